#include "mimo/network.hpp"

#include <cmath>
#include <string>

#include "mimo/errors.hpp"

namespace mimo {

double NetworkConfig::rho_linear() const {
    return std::pow(10.0, rho_db / 10.0);
}

double NetworkConfig::rho_tr_linear() const {
    const double factor = rho_tr_factor > 0.0 ? rho_tr_factor : static_cast<double>(K);
    return rho_linear() * factor;
}

double NetworkConfig::rho_ul_linear() const {
    return rho_linear() / static_cast<double>(M);
}

double NetworkConfig::prelog() const {
    return 1.0 - static_cast<double>(K) / static_cast<double>(tau_c);
}

namespace {

int grid_side(int L) {
    const int g = static_cast<int>(std::lround(std::sqrt(static_cast<double>(L))));
    if (g * g != L) {
        throw ConfigError("L = " + std::to_string(L) +
                          " is not a perfect square; only square cell grids are supported");
    }
    return g;
}

} // namespace

void NetworkConfig::validate() const {
    if (L < 1) throw ConfigError("L must be positive");
    grid_side(L);
    if (K < 1) throw ConfigError("K must be positive");
    if (M < 1) throw ConfigError("M must be positive");
    if (tau_c < 1) throw ConfigError("tau_c must be positive");
    if (K > tau_c) throw ConfigError("K must not exceed tau_c (prelog would be negative)");
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("correlation factor r must satisfy 0 <= r < 1");
    if (!(cell_side_km > 0.0)) throw ConfigError("cell_side_km must be positive");
    if (!(shadow_param_db2 >= 0.0)) throw ConfigError("shadow parameter must be nonnegative");
    if (!(min_dist_m >= 0.0)) throw ConfigError("min_dist_m must be nonnegative");
    if (!std::isfinite(rho_db)) throw ConfigError("rho_db must be finite");
}

double torus_distance(const Point& a, const Point& b, double side) {
    double dx = std::fabs(a.x - b.x);
    double dy = std::fabs(a.y - b.y);
    dx = std::min(dx, side - dx);
    dy = std::min(dy, side - dy);
    return std::hypot(dx, dy);
}

double pathloss_db(double distance_km) {
    return -148.1 - 37.6 * std::log10(distance_km);
}

Eigen::MatrixXcd exponential_correlation(int M, double r) {
    if (M < 1) throw ConfigError("M must be positive");
    if (!(r >= 0.0 && r < 1.0)) {
        throw ConfigError("correlation factor r must satisfy 0 <= r < 1 (r >= 1 is not positive definite)");
    }
    Eigen::MatrixXcd T(M, M);
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < M; ++n) {
            T(m, n) = std::pow(r, std::abs(m - n));
        }
    }
    return T;
}

NetworkRealization generate_network(const NetworkConfig& config, const RngStream& rng) {
    config.validate();
    const int L = config.L;
    const int K = config.K;
    const int g = grid_side(L);
    const double side = g * config.cell_side_km;
    const double shadow_std = config.shadow_interpretation == ShadowParam::variance_db2
                                  ? std::sqrt(config.shadow_param_db2)
                                  : config.shadow_param_db2;
    const double min_dist_km = config.min_dist_m / 1000.0;

    NetworkRealization net;
    net.L = L;
    net.K = K;
    net.torus_side_km = side;
    net.bs_positions.resize(L);
    for (int j = 0; j < L; ++j) {
        const int col = j % g;
        const int row = j / g;
        net.bs_positions[j] = {(col + 0.5) * config.cell_side_km, (row + 0.5) * config.cell_side_km};
    }

    net.ue_positions.resize(L * K);
    net.beta_db.assign(L * L * K, 0.0);
    net.shadow_db.assign(L * L * K, 0.0);

    for (int l = 0; l < L; ++l) {
        for (int k = 0; k < K; ++k) {
            // One substream per UE: positions and shadows do not depend on K,
            // which keeps sweeps over K nested (common random numbers).
            RngStream ue_rng = rng.child(0x0eu, static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(k));
            Point p;
            p.x = net.bs_positions[l].x + (ue_rng.uniform() - 0.5) * config.cell_side_km;
            p.y = net.bs_positions[l].y + (ue_rng.uniform() - 0.5) * config.cell_side_km;
            if (p.x < 0) p.x += side;
            if (p.y < 0) p.y += side;
            net.ue_positions[l * K + k] = p;
            for (int j = 0; j < L; ++j) {
                const double f = shadow_std * ue_rng.gaussian();
                const double d = std::max(torus_distance(p, net.bs_positions[j], side), min_dist_km);
                net.shadow_db[(j * L + l) * K + k] = f;
                net.beta_db[(j * L + l) * K + k] = pathloss_db(d) + f;
            }
        }
    }
    return net;
}

CorrelationSet assemble_correlation_set(const NetworkRealization& net, const NetworkConfig& config) {
    if (net.L != config.L || net.K != config.K) {
        throw ConfigError("network realization does not match the configuration");
    }
    const Eigen::MatrixXcd T = exponential_correlation(config.M, config.r);
    CorrelationSet corr;
    corr.L = net.L;
    corr.K = net.K;
    corr.M = config.M;
    corr.R.reserve(net.L * net.L * net.K);
    for (int j = 0; j < net.L; ++j) {
        for (int l = 0; l < net.L; ++l) {
            for (int i = 0; i < net.K; ++i) {
                const double beta_lin = std::pow(10.0, net.beta(j, l, i) / 10.0);
                corr.R.push_back(beta_lin * T);
            }
        }
    }
    return corr;
}

CorrelationCheck check_correlation_set(const CorrelationSet& corr) {
    CorrelationCheck out;
    out.min_eigenvalue_ratio = std::numeric_limits<double>::infinity();
    out.min_normalized_trace = std::numeric_limits<double>::infinity();
    for (const auto& R : corr.R) {
        out.max_hermitian_violation =
            std::max(out.max_hermitian_violation, (R - R.adjoint()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(R, Eigen::EigenvaluesOnly);
        const double norm = eig.eigenvalues().cwiseAbs().maxCoeff();
        out.min_eigenvalue_ratio =
            std::min(out.min_eigenvalue_ratio, norm > 0 ? eig.eigenvalues().minCoeff() / norm : 0.0);
        out.min_normalized_trace =
            std::min(out.min_normalized_trace, R.real().trace() / static_cast<double>(corr.M));
    }
    out.ok = out.max_hermitian_violation <= 1e-12 && out.min_eigenvalue_ratio >= -1e-10 &&
             out.min_normalized_trace > 0.0;
    return out;
}

} // namespace mimo
