#include "mimo/combining.hpp"

#include <Eigen/Cholesky>

#include "mimo/errors.hpp"

namespace mimo {

Eigen::MatrixXcd combiner_matrix(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j,
                                 double rho_ul, int j) {
    if (!(rho_ul > 0.0)) throw ConfigError("rho_ul must be positive");
    Eigen::MatrixXcd C = Z_j + Eigen::MatrixXcd::Identity(block.M, block.M) / rho_ul;
    for (int l = 0; l < block.L; ++l) {
        for (int i = 0; i < block.K; ++i) {
            C.selfadjointView<Eigen::Lower>().rankUpdate(block.est(j, l, i));
        }
    }
    return C.selfadjointView<Eigen::Lower>();
}

Eigen::VectorXcd mmse_combiner(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j,
                               double rho_ul, int j, int k) {
    const Eigen::MatrixXcd C = combiner_matrix(block, Z_j, rho_ul, j);
    return Eigen::LLT<Eigen::MatrixXcd>(C).solve(block.est(j, j, k));
}

double sinr_generic(const Eigen::VectorXcd& v, const ChannelBlock& block,
                    const Eigen::MatrixXcd& Z_j, double rho_ul, int j, int k) {
    if (v.norm() == 0.0) throw ConfigError("combining vector must be nonzero");
    const std::complex<double> signal = v.dot(block.est(j, j, k));
    double denom = std::real(v.dot(Z_j * v)) + v.squaredNorm() / rho_ul;
    for (int l = 0; l < block.L; ++l) {
        for (int i = 0; i < block.K; ++i) {
            if (l == j && i == k) continue;
            denom += std::norm(v.dot(block.est(j, l, i)));
        }
    }
    return std::norm(signal) / denom;
}

double sinr_quadratic_given(const Eigen::MatrixXcd& C, const ChannelBlock& block, int j, int k) {
    const Eigen::VectorXcd& h = block.est(j, j, k);
    Eigen::MatrixXcd U = C;
    U.selfadjointView<Eigen::Lower>().rankUpdate(h, -1.0);
    const Eigen::LLT<Eigen::MatrixXcd> llt(U);
    return std::real(h.dot(llt.solve(h)));
}

double sinr_quadratic(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j, double rho_ul,
                      int j, int k) {
    return sinr_quadratic_given(combiner_matrix(block, Z_j, rho_ul, j), block, j, k);
}

namespace {

// A_(j,k): the combiner matrix with every pilot-k estimate removed.
Eigen::LLT<Eigen::MatrixXcd> pilot_free_llt(const Eigen::MatrixXcd& C, const ChannelBlock& block,
                                            int j, int k) {
    Eigen::MatrixXcd A = C;
    for (int l = 0; l < block.L; ++l) {
        A.selfadjointView<Eigen::Lower>().rankUpdate(block.est(j, l, k), -1.0);
    }
    return Eigen::LLT<Eigen::MatrixXcd>(A.selfadjointView<Eigen::Lower>());
}

} // namespace

MseSinr sinr_via_mse_given(const Eigen::MatrixXcd& C, const ChannelBlock& block, int j, int k) {
    const int L = block.L;
    const auto llt = pilot_free_llt(C, block, j, k);
    Eigen::MatrixXcd H(block.M, L);
    for (int l = 0; l < L; ++l) H.col(l) = block.est(j, l, k);
    const Eigen::MatrixXcd F =
        Eigen::MatrixXcd::Identity(L, L) + H.adjoint() * llt.solve(H);
    const Eigen::MatrixXcd Finv = F.partialPivLu().solve(Eigen::MatrixXcd::Identity(L, L));
    MseSinr out;
    out.mse = std::real(Finv(j, j));
    out.gamma = 1.0 / out.mse - 1.0;
    return out;
}

MseSinr sinr_via_mse(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j, double rho_ul,
                     int j, int k) {
    return sinr_via_mse_given(combiner_matrix(block, Z_j, rho_ul, j), block, j, k);
}

SinrBreakdown sinr_decomposition_given(const Eigen::MatrixXcd& C, const ChannelBlock& block,
                                       int j, int k) {
    const int L = block.L;
    const auto llt = pilot_free_llt(C, block, j, k);
    const Eigen::VectorXcd& h = block.est(j, j, k);
    const Eigen::VectorXcd s = llt.solve(h);

    SinrBreakdown out;
    out.first_term = std::real(h.dot(s));
    if (L > 1) {
        Eigen::MatrixXcd G(block.M, L - 1);
        int col = 0;
        for (int l = 0; l < L; ++l) {
            if (l == j) continue;
            G.col(col++) = block.est(j, l, k);
        }
        const Eigen::VectorXcd c = G.adjoint() * s;
        const Eigen::MatrixXcd F =
            Eigen::MatrixXcd::Identity(L - 1, L - 1) + G.adjoint() * llt.solve(G);
        out.loss_term = std::real(c.dot(F.partialPivLu().solve(c)));
    }
    out.gamma = out.first_term - out.loss_term;
    out.mse = 1.0 / (1.0 + out.gamma);
    return out;
}

SinrBreakdown sinr_decomposition(const ChannelBlock& block, const Eigen::MatrixXcd& Z_j,
                                 double rho_ul, int j, int k) {
    return sinr_decomposition_given(combiner_matrix(block, Z_j, rho_ul, j), block, j, k);
}

ComplexityCounts complexity_counts(int M, int K, int L, int tau_p) {
    if (M < 1 || K < 1 || L < 1 || tau_p < 1) throw ConfigError("counts need positive arguments");
    const std::uint64_t m = M;
    const std::uint64_t k = K;
    const std::uint64_t l = L;
    const std::uint64_t tp = tau_p;
    ComplexityCounts out;
    out.estimation = m * tp + l * m * m;
    const std::uint64_t half_gram = (m * m + m) / 2;
    const std::uint64_t cube = (m * m * m - m) / 3;
    out.gamma_quadratic = half_gram * (l * k + 1) + cube;
    out.gamma_mse = half_gram * (l * l * (k + 2) + l) + cube + (l * l * l - l) / 3;
    return out;
}

} // namespace mimo
