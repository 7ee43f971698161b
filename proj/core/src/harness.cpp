#include "mimo/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mimo/combining.hpp"
#include "mimo/errors.hpp"

namespace mimo {

namespace {

constexpr std::uint64_t kDropTag = 0xd409;
constexpr std::uint64_t kBlockTag = 0xb10c;

struct BlockTerms {
    // (b * L + j) * K + k layout, one value per block and UE
    std::vector<double> gamma;
    std::vector<double> first;
    std::vector<double> loss;
};

void run_blocks(const CorrelationSet& corr, const EstimationStatistics& stats,
                const NetworkConfig& config, const RngStream& drop_rng, int n_blocks, int threads,
                BlockTerms& out) {
    const int L = config.L;
    const int K = config.K;
    const double rho_ul = config.rho_ul_linear();
    const double rho_tr = config.rho_tr_linear();
    out.gamma.assign(static_cast<std::size_t>(n_blocks) * L * K, 0.0);
    out.first.assign(out.gamma.size(), 0.0);
    out.loss.assign(out.gamma.size(), 0.0);

    std::atomic<int> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;

    const auto worker = [&]() {
        try {
            for (int b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) {
                const ChannelBlock block =
                    sample_block(corr, stats, rho_tr, drop_rng.child(kBlockTag, b));
                for (int j = 0; j < L; ++j) {
                    const Eigen::MatrixXcd C = combiner_matrix(block, stats.z(j), rho_ul, j);
                    for (int k = 0; k < K; ++k) {
                        const std::size_t idx = (static_cast<std::size_t>(b) * L + j) * K + k;
                        const double gamma = sinr_quadratic_given(C, block, j, k);
                        if (!std::isfinite(gamma)) {
                            throw ConvergenceError("non-finite SINR at block " + std::to_string(b));
                        }
                        const SinrBreakdown dec = sinr_decomposition_given(C, block, j, k);
                        out.gamma[idx] = gamma;
                        out.first[idx] = dec.first_term;
                        out.loss[idx] = dec.loss_term;
                    }
                }
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(n_blocks);
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

double mean_log2_1p(const std::vector<double>& values, std::size_t stride, std::size_t offset,
                    int n) {
    double acc = 0.0;
    for (int b = 0; b < n; ++b) acc += std::log2(1.0 + values[b * stride + offset]);
    return acc / n;
}

} // namespace

ExperimentResult run_experiment(const NetworkConfig& config, const RunOptions& options) {
    config.validate();
    if (options.with_mc && options.n_blocks < 1) throw ConfigError("n_blocks must be >= 1");
    if (options.n_drops < 1) throw ConfigError("n_drops must be >= 1");
    const auto start = std::chrono::steady_clock::now();

    const int L = config.L;
    const int K = config.K;
    const double rho = config.rho_linear();
    const double prelog = config.prelog();
    int threads = options.threads > 0 ? options.threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    ExperimentResult result;
    result.config = config;
    result.n_blocks = options.with_mc ? options.n_blocks : 0;
    result.n_drops = options.n_drops;
    result.has_mc = options.with_mc;
    result.keep_blocks = options.keep_blocks;
    result.ue.resize(static_cast<std::size_t>(options.n_drops) * L * K);
    result.drops.resize(options.n_drops);
    if (options.keep_blocks && options.with_mc) {
        result.block_sinr.assign(
            static_cast<std::size_t>(options.n_drops) * options.n_blocks * L * K, 0.0);
    }

    const RngStream root(config.seed);
    for (int drop = 0; drop < options.n_drops; ++drop) {
        const RngStream drop_rng = root.child(kDropTag, drop);
        const NetworkRealization net = generate_network(config, drop_rng);
        const CorrelationSet corr = assemble_correlation_set(net, config);
        const EstimationStatistics stats = build_statistics(corr, config.rho_tr_linear());

        // Asymptotic engine: one fixed point per BS, then per-UE B matrices.
        for (int j = 0; j < L; ++j) {
            const FixedPointSolution sol =
                solve_mu(stats, rho, j, options.fp_tol, options.fp_max_iter);
            if (!sol.converged) {
                throw ConvergenceError("fixed point for BS " + std::to_string(j) +
                                       " stalled at residual " + std::to_string(sol.residual));
            }
            const Eigen::MatrixXcd T = compute_T_star(sol, stats, rho, j);
            for (int k = 0; k < K; ++k) {
                const GammaBar gb = gamma_bar(compute_B(corr, stats, T, j, k), j);
                UeResult& row = result.ue[(static_cast<std::size_t>(drop) * L + j) * K + k];
                row.drop = drop;
                row.cell = j;
                row.ue = k;
                row.gamma_bar = gb.gamma_bar;
                row.first_bar = gb.first_term;
                row.loss_bar = gb.loss;
                row.se_de = prelog * std::log2(1.0 + gb.gamma_bar);
            }
        }

        if (options.with_mc) {
            BlockTerms terms;
            run_blocks(corr, stats, config, drop_rng, options.n_blocks, threads, terms);
            const std::size_t stride = static_cast<std::size_t>(L) * K;
            for (int j = 0; j < L; ++j) {
                for (int k = 0; k < K; ++k) {
                    const std::size_t offset = static_cast<std::size_t>(j) * K + k;
                    double mean_gamma = 0.0;
                    double mean_first = 0.0;
                    double mean_loss = 0.0;
                    for (int b = 0; b < options.n_blocks; ++b) {
                        mean_gamma += terms.gamma[b * stride + offset];
                        mean_first += terms.first[b * stride + offset];
                        mean_loss += terms.loss[b * stride + offset];
                    }
                    mean_gamma /= options.n_blocks;
                    mean_first /= options.n_blocks;
                    mean_loss /= options.n_blocks;
                    double var = 0.0;
                    for (int b = 0; b < options.n_blocks; ++b) {
                        const double d = terms.gamma[b * stride + offset] - mean_gamma;
                        var += d * d;
                    }
                    var = options.n_blocks > 1 ? var / (options.n_blocks - 1) : 0.0;

                    UeResult& row = result.ue[(static_cast<std::size_t>(drop) * L + j) * K + k];
                    row.mean_sinr_mc = mean_gamma;
                    row.stderr_sinr_mc = std::sqrt(var / options.n_blocks);
                    row.se_mc = prelog * mean_log2_1p(terms.gamma, stride, offset, options.n_blocks);
                    row.se_mc_first_only =
                        prelog * mean_log2_1p(terms.first, stride, offset, options.n_blocks);
                    row.first_mc = mean_first;
                    row.loss_mc = mean_loss;
                    if (row.mean_sinr_mc > 0.0) {
                        result.max_rel_stderr = std::max(result.max_rel_stderr,
                                                         row.stderr_sinr_mc / row.mean_sinr_mc);
                    }
                }
            }
            if (options.keep_blocks) {
                std::copy(terms.gamma.begin(), terms.gamma.end(),
                          result.block_sinr.begin() +
                              static_cast<std::size_t>(drop) * options.n_blocks * stride);
            }
        } else {
            for (int j = 0; j < L; ++j) {
                for (int k = 0; k < K; ++k) {
                    UeResult& row = result.ue[(static_cast<std::size_t>(drop) * L + j) * K + k];
                    row.mean_sinr_mc = row.stderr_sinr_mc = row.se_mc = row.se_mc_first_only =
                        row.first_mc = row.loss_mc = std::numeric_limits<double>::quiet_NaN();
                }
            }
        }

        // Per-drop aggregates: sum SE per cell and the pilot-0 term strengths.
        DropAggregates agg;
        for (int j = 0; j < L; ++j) {
            const UeResult& first_ue = result.at(drop, j, 0);
            agg.term1_de += first_ue.first_bar / L;
            agg.term2_de += first_ue.loss_bar / L;
            if (options.with_mc) {
                agg.term1_mc += first_ue.first_mc / L;
                agg.term2_mc += first_ue.loss_mc / L;
            }
            for (int k = 0; k < K; ++k) {
                const UeResult& row = result.at(drop, j, k);
                agg.sum_se_de += row.se_de / L;
                if (options.with_mc) {
                    agg.sum_se_mc += row.se_mc / L;
                    agg.sum_se_mc_first_only += row.se_mc_first_only / L;
                }
            }
        }
        result.drops[drop] = agg;
    }

    for (const DropAggregates& agg : result.drops) {
        result.mean.sum_se_mc += agg.sum_se_mc / options.n_drops;
        result.mean.sum_se_de += agg.sum_se_de / options.n_drops;
        result.mean.sum_se_mc_first_only += agg.sum_se_mc_first_only / options.n_drops;
        result.mean.term1_mc += agg.term1_mc / options.n_drops;
        result.mean.term2_mc += agg.term2_mc / options.n_drops;
        result.mean.term1_de += agg.term1_de / options.n_drops;
        result.mean.term2_de += agg.term2_de / options.n_drops;
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

ExperimentResult run_monte_carlo(const NetworkConfig& config, int n_blocks, int n_drops,
                                 int threads) {
    RunOptions options;
    options.n_blocks = n_blocks;
    options.n_drops = n_drops;
    options.threads = threads;
    options.with_mc = true;
    return run_experiment(config, options);
}

ExperimentResult run_detequiv(const NetworkConfig& config, int n_drops) {
    RunOptions options;
    options.n_drops = n_drops;
    options.with_mc = false;
    return run_experiment(config, options);
}

std::vector<SweepPoint> run_sweep(const NetworkConfig& base, const SweepOptions& options) {
    std::vector<SweepPoint> points;
    for (double ratio : options.ratios) {
        for (int K : options.K_list) {
            const double m_real = ratio * K;
            const int M = static_cast<int>(std::lround(m_real));
            if (std::fabs(m_real - M) > 1e-9 || M < 1) {
                throw ConfigError("ratio * K = " + std::to_string(m_real) +
                                  " is not a positive integer antenna count");
            }
            NetworkConfig config = base;
            config.K = K;
            config.M = M;
            SweepPoint point;
            point.ratio = ratio;
            point.K = K;
            point.M = M;
            point.result = run_experiment(config, options.run);
            points.push_back(std::move(point));
        }
    }
    return points;
}

std::vector<Fig1Row> fig1_rows(const std::vector<SweepPoint>& points) {
    std::vector<Fig1Row> rows;
    rows.reserve(points.size());
    for (const auto& p : points) {
        Fig1Row row;
        row.ratio = p.ratio;
        row.K = p.K;
        row.M = p.M;
        row.sum_se_mc = p.result.mean.sum_se_mc;
        row.sum_se_de = p.result.mean.sum_se_de;
        row.sum_se_mc_first_only = p.result.mean.sum_se_mc_first_only;
        rows.push_back(row);
    }
    return rows;
}

std::vector<Fig2Row> fig2_rows(const std::vector<SweepPoint>& points) {
    const auto db = [](double x) { return 10.0 * std::log10(x); };
    std::vector<Fig2Row> rows;
    rows.reserve(points.size());
    for (const auto& p : points) {
        Fig2Row row;
        row.ratio = p.ratio;
        row.K = p.K;
        row.term1_db_mc = db(p.result.mean.term1_mc);
        row.term2_db_mc = db(p.result.mean.term2_mc);
        row.term1_db_de = db(p.result.mean.term1_de);
        row.term2_db_de = db(p.result.mean.term2_de);
        rows.push_back(row);
    }
    return rows;
}

} // namespace mimo
