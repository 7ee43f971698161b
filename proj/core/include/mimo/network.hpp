#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mimo/rng.hpp"

namespace mimo {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Interpretation of NetworkConfig::shadow_param_db2.
enum class ShadowParam {
    variance_db2, // N(0, p): p is a variance in dB^2
    stddev_db,    // N(0, p^2): p is a standard deviation in dB
};

enum class OutputFormat { csv, json };

// Scenario parameters. Cells tile a g x g torus (L = g^2) of side
// g * cell_side_km; BS antennas follow the exponential correlation model
// with factor r; transmit power rho is normalized by the noise power.
struct NetworkConfig {
    int L = 4;
    int K = 4;
    int M = 16;
    int tau_c = 200;
    double r = 0.5;
    double rho_db = 114.0;
    double rho_tr_factor = 0.0; // <= 0 means "K" (pilot power rho * K)
    double cell_side_km = 0.4;
    double shadow_param_db2 = 10.0;
    ShadowParam shadow_interpretation = ShadowParam::variance_db2;
    double min_dist_m = 10.0;
    std::uint64_t seed = 1;

    double rho_linear() const;
    double rho_tr_linear() const;
    /// Uplink data power rho/M (the large-system operating point; used by
    /// both the Monte Carlo and the asymptotic engine).
    double rho_ul_linear() const;
    double prelog() const;

    /// Throws ConfigError if any invariant is violated.
    void validate() const;
};

// One random placement of users: positions, shadow fading and the resulting
// large-scale fading coefficients. beta_db(j, l, k) is the gain in dB between
// UE k of cell l and BS j.
struct NetworkRealization {
    int L = 0;
    int K = 0;
    double torus_side_km = 0.0;
    std::vector<Point> bs_positions;  // [j]
    std::vector<Point> ue_positions;  // [l * K + k]
    std::vector<double> beta_db;      // [(j * L + l) * K + k]
    std::vector<double> shadow_db;    // [(j * L + l) * K + k]

    double beta(int j, int l, int k) const { return beta_db[(j * L + l) * K + k]; }
    double shadow(int j, int l, int k) const { return shadow_db[(j * L + l) * K + k]; }
    const Point& ue(int l, int k) const { return ue_positions[l * K + k]; }
};

// The family of spatial correlation matrices R_(j,l,i): the channel between
// UE i of cell l and BS j is CN(0, R). All matrices are Hermitian PSD and in
// linear power units.
struct CorrelationSet {
    int L = 0;
    int K = 0;
    int M = 0;
    std::vector<Eigen::MatrixXcd> R; // [(j * L + l) * K + i]

    const Eigen::MatrixXcd& at(int j, int l, int i) const { return R[(j * L + l) * K + i]; }
    Eigen::MatrixXcd& at(int j, int l, int i) { return R[(j * L + l) * K + i]; }
};

/// Minimum-image distance on a square torus of the given side.
double torus_distance(const Point& a, const Point& b, double side);

/// Distance-dependent pathloss in dB, d in km: -148.1 - 37.6 log10(d).
double pathloss_db(double distance_km);

/// Exponential antenna correlation: T[m][n] = r^|m-n|. Requires 0 <= r < 1.
Eigen::MatrixXcd exponential_correlation(int M, double r);

/// Place UEs uniformly in their cells and draw shadow fading. Each UE has its
/// own substream of `rng`, so realizations are nested across K: the first K0
/// UEs of a K1 > K0 run coincide with the K0 run.
NetworkRealization generate_network(const NetworkConfig& config, const RngStream& rng);

/// R_(j,l,i) = beta_(j,l,i) (linear) * exponential_correlation(M, r).
CorrelationSet assemble_correlation_set(const NetworkRealization& net, const NetworkConfig& config);

struct CorrelationCheck {
    double max_hermitian_violation = 0.0; // max |R - R^H| entry over the set
    double min_eigenvalue_ratio = 0.0;    // min over set of lambda_min / ||R||
    double min_normalized_trace = 0.0;    // min over set of tr(R)/M
    bool ok = false;
};

/// Verify the CorrelationSet invariants (Hermitian to 1e-12, PSD up to
/// -1e-10 * ||R||, positive normalized trace).
CorrelationCheck check_correlation_set(const CorrelationSet& corr);

} // namespace mimo
