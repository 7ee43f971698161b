// Command line front end: Monte Carlo and asymptotic spectral-efficiency
// experiments for the multicell massive MIMO uplink with M-MMSE combining.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mimo/combining.hpp"
#include "mimo/config_file.hpp"
#include "mimo/detequiv.hpp"
#include "mimo/errors.hpp"
#include "mimo/harness.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int blocks = 500;
    int drops = -1; // per-subcommand default
    std::string out = "-";
    std::string format = "csv";
    int threads = 0;
};

mimo::NetworkConfig load_config(const GlobalArgs& args) {
    mimo::NetworkConfig config =
        args.config_path.empty() ? mimo::NetworkConfig{} : mimo::parse_config_file(args.config_path);
    if (args.seed_given) config.seed = args.seed;
    config.validate();
    return config;
}

mimo::OutputFormat parse_format(const std::string& format) {
    if (format == "csv") return mimo::OutputFormat::csv;
    if (format == "json") return mimo::OutputFormat::json;
    throw mimo::ConfigError("format must be 'csv' or 'json'");
}

void add_global_options(CLI::App* cmd, GlobalArgs& args) {
    cmd->add_option("--config", args.config_path, "Scenario config file (key = value lines)");
    cmd->add_option("--seed", args.seed, "Override the config seed")
        ->each([&args](const std::string&) { args.seed_given = true; });
    cmd->add_option("--blocks", args.blocks, "Coherence blocks per drop");
    cmd->add_option("--drops", args.drops, "Independent UE placements to average over");
    cmd->add_option("--out", args.out, "Output path ('-' for stdout)");
    cmd->add_option("--format", args.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", args.threads, "Worker threads (0 = hardware)");
}

int run_selftest() {
    int failures = 0;
    const auto report = [&](const char* name, bool ok) {
        std::printf("%-34s %s\n", name, ok ? "PASS" : "FAIL");
        if (!ok) ++failures;
    };

    // Exponential correlation entries.
    {
        const Eigen::MatrixXcd T = mimo::exponential_correlation(3, 0.5);
        report("exponential correlation entries",
               std::abs(T(0, 1).real() - 0.5) < 1e-15 && std::abs(T(0, 2).real() - 0.25) < 1e-15 &&
                   std::abs(T(1, 1).real() - 1.0) < 1e-15);
    }

    // Three SINR routes agree on a synthetic block.
    {
        mimo::RngStream rng(7);
        mimo::ChannelBlock block;
        block.L = 2;
        block.K = 2;
        block.M = 8;
        block.h_hat.resize(2 * 2 * 2);
        for (auto& h : block.h_hat) {
            h.resize(8);
            for (int m = 0; m < 8; ++m) h(m) = rng.cgaussian();
        }
        const Eigen::MatrixXcd Z = Eigen::MatrixXcd::Identity(8, 8) * 0.3;
        const double g1 = mimo::sinr_quadratic(block, Z, 2.0, 0, 1);
        const auto g2 = mimo::sinr_via_mse(block, Z, 2.0, 0, 1);
        const auto g3 = mimo::sinr_decomposition(block, Z, 2.0, 0, 1);
        report("SINR route identity",
               std::fabs(g1 - g2.gamma) <= 1e-9 * g1 && std::fabs(g1 - g3.gamma) <= 1e-9 * g1);
    }

    // Scalar fixed point against the closed-form quadratic root.
    {
        const int M = 16;
        const double phi = 2.3, zeta = 0.7, rho = 37.0;
        mimo::EstimationStatistics stats;
        stats.L = stats.K = 1;
        stats.M = M;
        stats.rho_tr = 1.0;
        stats.Phi = {phi * Eigen::MatrixXcd::Identity(M, M)};
        stats.Z = {zeta * Eigen::MatrixXcd::Identity(M, M)};
        const auto sol = mimo::solve_mu(stats, rho, 0, 1e-13, 2000);
        const double a = phi / M;
        const double b = zeta / M + 1.0 / rho;
        const double B = a + b - phi;
        const double root = (-B + std::sqrt(B * B + 4.0 * b * phi)) / (2.0 * b);
        report("scalar fixed point vs quadratic",
               sol.converged && std::fabs(sol.mu[0] - root) <= 1e-10 * root);
    }

    // General asymptotic solver against the uncorrelated closed form.
    {
        const int M = 8, K = 2, L = 2;
        const double alpha = 0.5, rho = 100.0, rho_tr = 50.0;
        mimo::CorrelationSet corr;
        corr.L = L;
        corr.K = K;
        corr.M = M;
        for (int j = 0; j < L; ++j)
            for (int l = 0; l < L; ++l)
                for (int i = 0; i < K; ++i)
                    corr.R.push_back(Eigen::MatrixXcd::Identity(M, M) * (j == l ? 1.0 : alpha));
        const auto stats = mimo::build_statistics(corr, rho_tr);
        const auto sol = mimo::solve_mu(stats, rho, 0, 1e-13, 2000);
        const auto T = mimo::compute_T_star(sol, stats, rho, 0);
        const auto gb = mimo::gamma_bar(mimo::compute_B(corr, stats, T, 0, 0), 0);
        const auto cf = mimo::closed_form_uncorrelated(M, K, L, alpha, rho, rho_tr);
        report("uncorrelated closed form",
               cf.gamma_bar && std::fabs(gb.gamma_bar - *cf.gamma_bar) <= 1e-8 * gb.gamma_bar);
    }

    // Thread-count independence of a small Monte Carlo run.
    {
        mimo::NetworkConfig config;
        config.L = 4;
        config.K = 2;
        config.M = 8;
        config.seed = 3;
        mimo::RunOptions opt;
        opt.n_blocks = 8;
        opt.n_drops = 2;
        opt.threads = 1;
        const auto a = mimo::run_experiment(config, opt);
        opt.threads = 4;
        const auto b = mimo::run_experiment(config, opt);
        report("deterministic across threads",
               mimo::experiment_csv(a) == mimo::experiment_csv(b));
    }

    std::printf("%s\n", failures == 0 ? "selftest: all checks passed" : "selftest: FAILURES");
    return failures == 0 ? mimo::exit_ok : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multicell massive MIMO uplink simulator with M-MMSE combining"};
    app.require_subcommand(1);

    GlobalArgs args;
    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo spectral efficiency (plus asymptotics)");
    CLI::App* de = app.add_subcommand("detequiv", "Asymptotic (deterministic equivalent) run");
    CLI::App* fig1 = app.add_subcommand("fig1", "Sum-SE sweep over K at fixed M/K ratios");
    CLI::App* fig2 = app.add_subcommand("fig2", "Decomposition-term sweep over K at fixed M/K");
    CLI::App* closedform =
        app.add_subcommand("closedform", "Uncorrelated-model closed-form asymptotic SINR");
    CLI::App* selftest = app.add_subcommand("selftest", "Quick internal consistency checks");
    for (CLI::App* cmd : {mc, de, fig1, fig2}) add_global_options(cmd, args);

    std::vector<int> k_list = {4, 8, 16};
    std::vector<double> ratios = {2.0, 4.0};
    for (CLI::App* cmd : {fig1, fig2}) {
        cmd->add_option("--K-list", k_list, "K values of the sweep");
        cmd->add_option("--ratios", ratios, "M/K ratios of the sweep");
    }

    int cf_M = 16, cf_K = 4, cf_L = 2;
    double cf_alpha = 0.5, cf_rho_db = 114.0, cf_rho_tr_factor = 0.0;
    closedform->add_option("--M", cf_M, "Antennas per BS");
    closedform->add_option("--K", cf_K, "UEs per cell");
    closedform->add_option("--L", cf_L, "Cells");
    closedform->add_option("--alpha", cf_alpha, "Intercell interference factor in (0, 1]");
    closedform->add_option("--rho-db", cf_rho_db, "Normalized transmit power in dB");
    closedform->add_option("--rho-tr-factor", cf_rho_tr_factor,
                           "Pilot power factor (<= 0 means K)");
    closedform->add_option("--out", args.out, "Output path ('-' for stdout)");
    closedform->add_option("--format", args.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return mimo::exit_config_error;
    }

    try {
        if (selftest->parsed()) {
            return run_selftest();
        }
        if (closedform->parsed()) {
            const double factor = cf_rho_tr_factor > 0 ? cf_rho_tr_factor : cf_K;
            const double rho = std::pow(10.0, cf_rho_db / 10.0);
            const auto cf =
                mimo::closed_form_uncorrelated(cf_M, cf_K, cf_L, cf_alpha, rho, rho * factor);
            char buf[512];
            if (parse_format(args.format) == mimo::OutputFormat::csv) {
                std::snprintf(buf, sizeof(buf),
                              "M,K,L,alpha,nu,L_bar,mu_star,eta_star,noise,noncoherent,coherent,"
                              "gamma_bar\n%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                              "%.17g\n",
                              cf_M, cf_K, cf_L, cf_alpha, cf.nu, cf.L_bar, cf.mu_star, cf.eta_star,
                              cf.noise, cf.noncoherent, cf.coherent,
                              cf.gamma_bar ? *cf.gamma_bar : std::nan(""));
            } else {
                char gamma_field[64] = "";
                if (cf.gamma_bar) {
                    std::snprintf(gamma_field, sizeof(gamma_field), ",\"gamma_bar\":%.17g",
                                  *cf.gamma_bar);
                }
                std::snprintf(buf, sizeof(buf),
                              "{\"M\":%d,\"K\":%d,\"L\":%d,\"alpha\":%.17g,\"nu\":%.17g,"
                              "\"L_bar\":%.17g,\"mu_star\":%.17g,\"eta_star\":%.17g,"
                              "\"noise\":%.17g,\"noncoherent\":%.17g,\"coherent\":%.17g%s}\n",
                              cf_M, cf_K, cf_L, cf_alpha, cf.nu, cf.L_bar, cf.mu_star, cf.eta_star,
                              cf.noise, cf.noncoherent, cf.coherent, gamma_field);
            }
            std::cout << buf;
            return mimo::exit_ok;
        }

        const mimo::NetworkConfig config = load_config(args);
        const mimo::OutputFormat format = parse_format(args.format);

        if (mc->parsed() || de->parsed()) {
            mimo::RunOptions opt;
            opt.n_blocks = args.blocks;
            opt.n_drops = args.drops > 0 ? args.drops : 1;
            opt.threads = args.threads;
            opt.with_mc = mc->parsed();
            const auto result = mimo::run_experiment(config, opt);
            mimo::emit(result, args.out, format);
            std::fprintf(stderr, "completed in %.2f s\n", result.wall_seconds);
            return mimo::exit_ok;
        }

        mimo::SweepOptions sweep;
        sweep.ratios = ratios;
        sweep.K_list = k_list;
        sweep.run.n_blocks = args.blocks;
        sweep.run.n_drops = args.drops > 0 ? args.drops : 10;
        sweep.run.threads = args.threads;
        sweep.run.with_mc = true;
        const auto points = mimo::run_sweep(config, sweep);
        if (fig1->parsed()) {
            mimo::emit_fig1(points, args.out, format);
        } else {
            mimo::emit_fig2(points, args.out, format);
        }
        double total = 0.0;
        for (const auto& p : points) total += p.result.wall_seconds;
        std::fprintf(stderr, "completed %zu sweep points in %.2f s\n", points.size(), total);
        return mimo::exit_ok;
    } catch (const mimo::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return mimo::exit_config_error;
    } catch (const mimo::ConvergenceError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return mimo::exit_convergence_error;
    } catch (const mimo::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return mimo::exit_io_error;
    }
}
