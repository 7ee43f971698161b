#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "mimo/estimation.hpp"

namespace mimo {

// Instantaneous effective SINR of UE (j,k) under M-MMSE combining, split into
// the two quadratic forms of the contamination decomposition:
//   gamma = first_term - loss_term,  gamma = 1/mse - 1.
// first_term depends only on channels that do not share UE k's pilot;
// loss_term is the penalty from the correlation among pilot-sharing estimates.
struct SinrBreakdown {
    double gamma = 0.0;
    double mse = 0.0;
    double first_term = 0.0;
    double loss_term = 0.0;
};

struct MseSinr {
    double gamma = 0.0;
    double mse = 0.0;
};

// Complex multiplications per coherence block for one UE's SINR, for the
// direct quadratic form and for the MSE form.
struct ComplexityCounts {
    std::uint64_t estimation = 0;
    std::uint64_t gamma_quadratic = 0; // direct form
    std::uint64_t gamma_mse = 0;       // MSE form
};

/// Gram of all estimates at BS j plus Z_j plus the noise floor: the matrix
/// inverted by the M-MMSE combiner.
Eigen::MatrixXcd combiner_matrix(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j,
                                 double rho_ul, int j);

/// M-MMSE combining vector for UE (j,k).
Eigen::VectorXcd mmse_combiner(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j,
                               double rho_ul, int j, int k);

/// Effective SINR of an arbitrary nonzero combining vector v.
double sinr_generic(const Eigen::VectorXcd& v, const ChannelBlock& block,
                    const Eigen::MatrixXcd& Z_j, double rho_ul, int j, int k);

/// SINR under M-MMSE combining as the quadratic form h^H U^{-1} h, where U
/// sums every estimate except UE (j,k)'s own.
double sinr_quadratic(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j, double rho_ul,
                      int j, int k);

/// Same SINR via the conditional MSE of the combined data signal.
MseSinr sinr_via_mse(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j, double rho_ul,
                     int j, int k);

/// Same SINR as the difference of the contamination-free quadratic form and
/// the pilot-correlation loss.
SinrBreakdown sinr_decomposition(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j,
                                 double rho_ul, int j, int k);

// Variants reusing a precomputed combiner matrix (see combiner_matrix); used
// by the Monte Carlo loop where the Gram is shared across UEs of one BS.
double sinr_quadratic_given(const Eigen::MatrixXcd& C, const ChannelBlock& block, int j, int k);
MseSinr sinr_via_mse_given(const Eigen::MatrixXcd& C, const ChannelBlock& block, int j, int k);
SinrBreakdown sinr_decomposition_given(const Eigen::MatrixXcd& C, const ChannelBlock& block,
                                       int j, int k);

/// Complex multiplication counts per coherence block (channel estimation and
/// per-UE SINR evaluation) for both algebraic forms.
ComplexityCounts complexity_counts(int M, int K, int L, int tau_p);

} // namespace mimo
