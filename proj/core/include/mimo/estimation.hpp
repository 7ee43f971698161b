#pragma once

#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "mimo/network.hpp"
#include "mimo/rng.hpp"

namespace mimo {

// Precomputed MMSE estimation statistics for one CorrelationSet. Immutable
// after construction and shareable across threads.
//
//   Q_(j,i)   = sum_l R_(j,l,i) + I/rho_tr     (pilot observation covariance)
//   Phi_(j,l,l,i) = R Q^{-1} R                 (estimate covariance, self term)
//   Z_j       = sum_{l,i} (R - Phi_self)       (total estimation error covariance)
//   W_(j,l,i) = R Q^{-1}                       (estimator applied to the pilot observation)
struct EstimationStatistics {
    int L = 0;
    int K = 0;
    int M = 0;
    double rho_tr = 0.0;

    std::vector<Eigen::MatrixXcd> Q;                   // [(j * K + i)]
    std::vector<Eigen::LLT<Eigen::MatrixXcd>> Q_chol;  // [(j * K + i)]
    std::vector<Eigen::MatrixXcd> W;                   // [(j * L + l) * K + i]
    std::vector<Eigen::MatrixXcd> Phi;                 // [(j * L + l) * K + i] self terms
    std::vector<Eigen::MatrixXcd> Z;                   // [j]
    std::vector<Eigen::MatrixXcd> chan_factor;         // [(j * L + l) * K + i], F F^H = R

    const Eigen::MatrixXcd& q(int j, int i) const { return Q[j * K + i]; }
    const Eigen::LLT<Eigen::MatrixXcd>& q_chol(int j, int i) const { return Q_chol[j * K + i]; }
    const Eigen::MatrixXcd& w(int j, int l, int i) const { return W[(j * L + l) * K + i]; }
    const Eigen::MatrixXcd& phi(int j, int l, int i) const { return Phi[(j * L + l) * K + i]; }
    const Eigen::MatrixXcd& z(int j) const { return Z[j]; }
    const Eigen::MatrixXcd& factor(int j, int l, int i) const { return chan_factor[(j * L + l) * K + i]; }
};

// One coherence block: true channels, MMSE estimates and estimation errors,
// indexed by (receiving BS j, UE cell l, UE index i).
struct ChannelBlock {
    int L = 0;
    int K = 0;
    int M = 0;
    std::vector<Eigen::VectorXcd> h;       // true channel
    std::vector<Eigen::VectorXcd> h_hat;   // MMSE estimate
    std::vector<Eigen::VectorXcd> h_tilde; // h - h_hat

    const Eigen::VectorXcd& truth(int j, int l, int i) const { return h[(j * L + l) * K + i]; }
    const Eigen::VectorXcd& est(int j, int l, int i) const { return h_hat[(j * L + l) * K + i]; }
    const Eigen::VectorXcd& err(int j, int l, int i) const { return h_tilde[(j * L + l) * K + i]; }
};

/// Q_(j,i) = sum_l' R_(j,l',i) + I/rho_tr. Always Hermitian positive definite.
Eigen::MatrixXcd compute_Q(const CorrelationSet& corr, int j, int i, double rho_tr);

/// Cross-covariance of contaminated estimates,
/// Phi_(j,l',l,i) = R_(j,l',i) Q_(j,i)^{-1} R_(j,l,i); the self term for l' == l.
Eigen::MatrixXcd compute_Phi(const CorrelationSet& corr, const Eigen::LLT<Eigen::MatrixXcd>& Q_chol,
                             int j, int l_prime, int l, int i);

/// Z_j = sum_{l,i} (R_(j,l,i) - Phi_(j,l,l,i)), given all self terms.
Eigen::MatrixXcd compute_Z(const CorrelationSet& corr, const std::vector<Eigen::MatrixXcd>& phi_self,
                           int j);

/// Precompute all statistics for a correlation set.
EstimationStatistics build_statistics(const CorrelationSet& corr, double rho_tr);

/// Draw one coherence block: h ~ CN(0, R) via the PSD factor, then the MMSE
/// estimate from the (shared) pilot observation of each (j, i) pair.
ChannelBlock sample_block(const CorrelationSet& corr, const EstimationStatistics& stats,
                          double rho_tr, RngStream rng);

// Binary cache of the statistics (little-endian, documented in README):
// magic "MIMOSTAT", u32 version, u32 L, K, M, f64 rho_tr, then Q, Phi and Z
// matrices in index order, each row-major with interleaved re/im doubles.
void save_statistics(const EstimationStatistics& stats, const std::string& path);
EstimationStatistics load_statistics(const std::string& path);

} // namespace mimo
