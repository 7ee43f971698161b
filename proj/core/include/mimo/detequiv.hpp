#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mimo/estimation.hpp"

namespace mimo {

// Solution of the coupled fixed-point system at one BS. mu holds the L*K
// coefficients of that BS in (l, i) order.
struct FixedPointSolution {
    int L = 0;
    int K = 0;
    std::vector<double> mu;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;

    double at(int l, int i) const { return mu[l * K + i]; }
};

/// Solve the fixed-point system
///   mu_(l,k) = (1/M) tr( Phi_(j,l,l,k) S^{-1} ),
///   S = (1/M) sum_{l,i} Phi_(j,l,l,i)/(1 + mu_(l,i)) + Z_j/M + I/rho,
/// by plain iteration from mu = 1, stopping when max |delta mu| <= tol.
/// A non-converged result is returned flagged, never silently.
FixedPointSolution solve_mu(const EstimationStatistics& stats, double rho, int j,
                            double tol = 1e-10, int max_iter = 500);

/// T*_j = S(mu*)^{-1}; Hermitian positive definite.
Eigen::MatrixXcd compute_T_star(const FixedPointSolution& sol, const EstimationStatistics& stats,
                                double rho, int j);

/// L x L matrix with [B]_(l,l') = (1/M) tr( Phi_(j,l',l,k) T*_j ).
Eigen::MatrixXcd compute_B(const CorrelationSet& corr, const EstimationStatistics& stats,
                           const Eigen::MatrixXcd& T_star, int j, int k);

// Asymptotic SINR of UE (j,k): the resolvent form and its two-term split
//   gamma_bar = 1/[(I + B)^{-1}]_(j,j) - 1 = [B]_(j,j) - loss.
struct GammaBar {
    double gamma_bar = 0.0;
    double first_term = 0.0;
    double loss = 0.0;
};

GammaBar gamma_bar(const Eigen::MatrixXcd& B, int j);

// Bound certificates for the two-term split. The signal-term sandwich
// constrains [B]_(j,j) normalized by tr(Phi_own)/M; the loss-term sandwich
// constrains the loss directly.
struct UeBoundCertificate {
    int cell = 0;
    int ue = 0;
    double trace_phi_own = 0.0; // tr(Phi_(j,j,j,k))/M
    double eta_prime = 0.0;
    double sigma_prime = 0.0;
    double b_ratio_lower = 0.0;
    double b_ratio_upper = 0.0;
    double loss_lower = 0.0;
    double loss_upper = 0.0;
};

struct BoundReport {
    double sigma = 0.0;              // max ||Phi||_2 + max ||R - Phi||_2 + (1/KL)(1/rho)
    double eta = 0.0;                // min eig(R - Phi) + (1/KL)(1/rho)
    double min_eig_error_cov = 0.0;  // min over (j,l,i) of lambda_min(R - Phi)
    bool degenerate = false;         // min_eig_error_cov <= 0 (upper bound unreliable)
    std::vector<UeBoundCertificate> ue; // (j, k) order
};

BoundReport compute_bounds(const CorrelationSet& corr, const EstimationStatistics& stats,
                           double rho);

// Closed form for the symmetric uncorrelated model R_own = I, R_cross =
// alpha I: the asymptotic SINR splits into noise, non-coherent and coherent
// interference. gamma_bar is populated for L == 2 (the two-cell display);
// the intermediate quantities are valid for any L.
struct UncorrelatedClosedForm {
    double nu = 0.0;
    double L_bar = 0.0;
    double mu_star = 0.0;
    double eta_star = 0.0;
    double noise = 0.0;
    double noncoherent = 0.0;
    double coherent = 0.0;
    std::optional<double> gamma_bar;
};

UncorrelatedClosedForm closed_form_uncorrelated(int M, int K, int L, double alpha, double rho,
                                                double rho_tr);

// Per-antenna profiles of a diagonal-correlation model at one BS:
// r(l,i,m) = [R]_(m,m), phi(l,i,m) = [Phi_self]_(m,m), z(m) = [Z]_(m,m).
struct DiagonalProfiles {
    int L = 0;
    int K = 0;
    int M = 0;
    std::vector<double> r;   // [(l * K + i) * M + m]
    std::vector<double> phi; // [(l * K + i) * M + m]
    std::vector<double> z;   // [m]

    double r_at(int l, int i, int m) const { return r[(l * K + i) * M + m]; }
    double phi_at(int l, int i, int m) const { return phi[(l * K + i) * M + m]; }
};

struct DiagonalClosedForm {
    int L = 0;
    int K = 0;
    std::vector<double> mu_star;  // (l, k)
    std::vector<double> varsigma; // per antenna
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> gamma_bar_two_cell; // per k; empty unless L == 2

    double mu(int l, int k) const { return mu_star[l * K + k]; }
};

/// Scalar specialization of the fixed point for diagonal correlation: solves
/// the per-antenna system varsigma(m), then mu*_(l,k) = (1/M) sum_m
/// phi_(l,k)(m)/varsigma(m). For L == 2 also evaluates the two-cell SINR
/// using the per-antenna gain ratios (beta_ratios indexed
/// [((l * L + l') * K + k) * M + m]; derived from r when empty).
DiagonalClosedForm closed_form_diagonal(const DiagonalProfiles& profiles, double rho,
                                        const std::vector<double>& beta_ratios = {},
                                        double tol = 1e-12, int max_iter = 2000);

} // namespace mimo
