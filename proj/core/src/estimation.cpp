#include "mimo/estimation.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "mimo/errors.hpp"

namespace mimo {

Eigen::MatrixXcd compute_Q(const CorrelationSet& corr, int j, int i, double rho_tr) {
    if (!(rho_tr > 0.0)) throw ConfigError("rho_tr must be positive");
    Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(corr.M, corr.M) / rho_tr;
    for (int l = 0; l < corr.L; ++l) {
        Q += corr.at(j, l, i);
    }
    return Q;
}

Eigen::MatrixXcd compute_Phi(const CorrelationSet& corr, const Eigen::LLT<Eigen::MatrixXcd>& Q_chol,
                             int j, int l_prime, int l, int i) {
    if (Q_chol.info() != Eigen::Success) {
        throw ConfigError("Q factorization failed (matrix not positive definite)");
    }
    return corr.at(j, l_prime, i) * Q_chol.solve(corr.at(j, l, i));
}

Eigen::MatrixXcd compute_Z(const CorrelationSet& corr, const std::vector<Eigen::MatrixXcd>& phi_self,
                           int j) {
    Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(corr.M, corr.M);
    for (int l = 0; l < corr.L; ++l) {
        for (int i = 0; i < corr.K; ++i) {
            Z += corr.at(j, l, i) - phi_self[(j * corr.L + l) * corr.K + i];
        }
    }
    return 0.5 * (Z + Z.adjoint().eval());
}

namespace {

// PSD factor F with F F^H = R. Eigendecomposition with small negative
// eigenvalues clipped at zero; rejects matrices that are indefinite beyond
// round-off tolerance.
Eigen::MatrixXcd psd_factor(const Eigen::MatrixXcd& R) {
    const Eigen::MatrixXcd H = 0.5 * (R + R.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H);
    if (eig.info() != Eigen::Success) throw ConfigError("eigendecomposition failed");
    Eigen::VectorXd lam = eig.eigenvalues();
    const double scale = lam.cwiseAbs().maxCoeff();
    for (int m = 0; m < lam.size(); ++m) {
        if (lam(m) < -1e-10 * scale) {
            throw ConfigError("correlation matrix is indefinite beyond tolerance");
        }
        lam(m) = std::max(lam(m), 0.0);
    }
    return eig.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

} // namespace

EstimationStatistics build_statistics(const CorrelationSet& corr, double rho_tr) {
    EstimationStatistics stats;
    stats.L = corr.L;
    stats.K = corr.K;
    stats.M = corr.M;
    stats.rho_tr = rho_tr;
    stats.Q.reserve(corr.L * corr.K);
    stats.Q_chol.reserve(corr.L * corr.K);
    stats.W.resize(corr.L * corr.L * corr.K);
    stats.Phi.resize(corr.L * corr.L * corr.K);
    stats.chan_factor.resize(corr.L * corr.L * corr.K);
    stats.Z.reserve(corr.L);

    for (int j = 0; j < corr.L; ++j) {
        for (int i = 0; i < corr.K; ++i) {
            stats.Q.push_back(compute_Q(corr, j, i, rho_tr));
            stats.Q_chol.emplace_back(stats.Q.back());
            if (stats.Q_chol.back().info() != Eigen::Success) {
                throw ConfigError("Q is numerically singular");
            }
        }
    }
    for (int j = 0; j < corr.L; ++j) {
        for (int l = 0; l < corr.L; ++l) {
            for (int i = 0; i < corr.K; ++i) {
                const std::size_t idx = (j * corr.L + l) * corr.K + i;
                // W = R Q^{-1}; both factors Hermitian, so W = (Q^{-1} R)^H.
                stats.W[idx] = stats.q_chol(j, i).solve(corr.at(j, l, i)).adjoint();
                Eigen::MatrixXcd phi = stats.W[idx] * corr.at(j, l, i);
                stats.Phi[idx] = 0.5 * (phi + phi.adjoint().eval());
                stats.chan_factor[idx] = psd_factor(corr.at(j, l, i));
            }
        }
    }
    for (int j = 0; j < corr.L; ++j) {
        stats.Z.push_back(compute_Z(corr, stats.Phi, j));
    }
    return stats;
}

ChannelBlock sample_block(const CorrelationSet& corr, const EstimationStatistics& stats,
                          double rho_tr, RngStream rng) {
    const int L = corr.L;
    const int K = corr.K;
    const int M = corr.M;
    ChannelBlock block;
    block.L = L;
    block.K = K;
    block.M = M;
    block.h.resize(L * L * K);
    block.h_hat.resize(L * L * K);
    block.h_tilde.resize(L * L * K);

    const double noise_scale = 1.0 / std::sqrt(rho_tr);
    Eigen::VectorXcd z(M);
    Eigen::VectorXcd y(M);
    for (int j = 0; j < L; ++j) {
        for (int i = 0; i < K; ++i) {
            y.setZero();
            for (int l = 0; l < L; ++l) {
                for (int m = 0; m < M; ++m) z(m) = rng.cgaussian();
                const std::size_t idx = (j * L + l) * K + i;
                block.h[idx].noalias() = stats.factor(j, l, i) * z;
                y += block.h[idx];
            }
            for (int m = 0; m < M; ++m) z(m) = rng.cgaussian();
            y += noise_scale * z;
            for (int l = 0; l < L; ++l) {
                const std::size_t idx = (j * L + l) * K + i;
                block.h_hat[idx].noalias() = stats.w(j, l, i) * y;
                block.h_tilde[idx] = block.h[idx] - block.h_hat[idx];
            }
        }
    }
    return block;
}

namespace {

constexpr char kMagic[8] = {'M', 'I', 'M', 'O', 'S', 'T', 'A', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_matrix(std::ofstream& out, const Eigen::MatrixXcd& A) {
    for (int row = 0; row < A.rows(); ++row) {
        for (int col = 0; col < A.cols(); ++col) {
            const double re = A(row, col).real();
            const double im = A(row, col).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(double));
            out.write(reinterpret_cast<const char*>(&im), sizeof(double));
        }
    }
}

Eigen::MatrixXcd read_matrix(std::ifstream& in, int M) {
    Eigen::MatrixXcd A(M, M);
    for (int row = 0; row < M; ++row) {
        for (int col = 0; col < M; ++col) {
            double re = 0, im = 0;
            in.read(reinterpret_cast<char*>(&re), sizeof(double));
            in.read(reinterpret_cast<char*>(&im), sizeof(double));
            A(row, col) = {re, im};
        }
    }
    return A;
}

} // namespace

void save_statistics(const EstimationStatistics& stats, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(kMagic, sizeof(kMagic));
    const std::uint32_t header[4] = {kVersion, static_cast<std::uint32_t>(stats.L),
                                     static_cast<std::uint32_t>(stats.K),
                                     static_cast<std::uint32_t>(stats.M)};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(&stats.rho_tr), sizeof(double));
    for (const auto& Q : stats.Q) write_matrix(out, Q);
    for (const auto& phi : stats.Phi) write_matrix(out, phi);
    for (const auto& Z : stats.Z) write_matrix(out, Z);
    if (!out) throw IoError("error while writing '" + path + "'");
}

EstimationStatistics load_statistics(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IoError("'" + path + "' is not a statistics dump");
    }
    std::uint32_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || header[0] != kVersion) throw IoError("unsupported statistics dump version");

    EstimationStatistics stats;
    stats.L = static_cast<int>(header[1]);
    stats.K = static_cast<int>(header[2]);
    stats.M = static_cast<int>(header[3]);
    in.read(reinterpret_cast<char*>(&stats.rho_tr), sizeof(double));
    stats.Q.reserve(stats.L * stats.K);
    for (int n = 0; n < stats.L * stats.K; ++n) stats.Q.push_back(read_matrix(in, stats.M));
    stats.Phi.reserve(stats.L * stats.L * stats.K);
    for (int n = 0; n < stats.L * stats.L * stats.K; ++n) stats.Phi.push_back(read_matrix(in, stats.M));
    stats.Z.reserve(stats.L);
    for (int n = 0; n < stats.L; ++n) stats.Z.push_back(read_matrix(in, stats.M));
    if (!in) throw IoError("truncated statistics dump '" + path + "'");
    // The sampling members (W, chan_factor) are intentionally not part of the
    // dump; rebuild from the correlation set when sampling is needed.
    stats.Q_chol.reserve(stats.Q.size());
    for (const auto& Q : stats.Q) stats.Q_chol.emplace_back(Q);
    return stats;
}

} // namespace mimo
