#include "mimo/detequiv.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mimo/errors.hpp"

namespace mimo {

namespace {

// tr(A B) for Hermitian A, B.
double trace_product(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    return std::real(A.cwiseProduct(B.transpose()).sum());
}

Eigen::MatrixXcd resolvent_base(const EstimationStatistics& stats, const std::vector<double>& mu,
                                double rho, int j) {
    const int M = stats.M;
    Eigen::MatrixXcd S = stats.z(j) / static_cast<double>(M);
    S += Eigen::MatrixXcd::Identity(M, M) / rho;
    for (int l = 0; l < stats.L; ++l) {
        for (int i = 0; i < stats.K; ++i) {
            S += stats.phi(j, l, i) / (static_cast<double>(M) * (1.0 + mu[l * stats.K + i]));
        }
    }
    return S;
}

Eigen::MatrixXcd invert_pd(const Eigen::MatrixXcd& S) {
    Eigen::LLT<Eigen::MatrixXcd> llt(S);
    if (llt.info() != Eigen::Success) {
        throw ConvergenceError("resolvent matrix is not positive definite");
    }
    Eigen::MatrixXcd T = llt.solve(Eigen::MatrixXcd::Identity(S.rows(), S.cols()));
    return 0.5 * (T + T.adjoint().eval());
}

} // namespace

FixedPointSolution solve_mu(const EstimationStatistics& stats, double rho, int j, double tol,
                            int max_iter) {
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be positive");
    const int M = stats.M;

    FixedPointSolution sol;
    sol.L = stats.L;
    sol.K = stats.K;
    sol.mu.assign(stats.L * stats.K, 1.0);

    std::vector<double> next(sol.mu.size(), 0.0);
    for (int iter = 1; iter <= max_iter; ++iter) {
        const Eigen::MatrixXcd T = invert_pd(resolvent_base(stats, sol.mu, rho, j));
        double residual = 0.0;
        for (int l = 0; l < stats.L; ++l) {
            for (int i = 0; i < stats.K; ++i) {
                const std::size_t n = l * stats.K + i;
                next[n] = trace_product(stats.phi(j, l, i), T) / static_cast<double>(M);
                residual = std::max(residual, std::fabs(next[n] - sol.mu[n]));
            }
        }
        sol.mu = next;
        sol.iterations = iter;
        sol.residual = residual;
        if (residual <= tol) {
            sol.converged = true;
            break;
        }
    }
    return sol;
}

Eigen::MatrixXcd compute_T_star(const FixedPointSolution& sol, const EstimationStatistics& stats,
                                double rho, int j) {
    return invert_pd(resolvent_base(stats, sol.mu, rho, j));
}

Eigen::MatrixXcd compute_B(const CorrelationSet& corr, const EstimationStatistics& stats,
                           const Eigen::MatrixXcd& T_star, int j, int k) {
    const int L = corr.L;
    const int M = corr.M;
    Eigen::MatrixXcd B(L, L);
    for (int l = 0; l < L; ++l) {
        // X_l = Q^{-1} R_(j,l,k) T*, so that [B]_(l,l') = tr(R_(j,l',k) X_l)/M.
        const Eigen::MatrixXcd X = stats.q_chol(j, k).solve(corr.at(j, l, k) * T_star);
        for (int lp = 0; lp < L; ++lp) {
            B(l, lp) = corr.at(j, lp, k).cwiseProduct(X.transpose()).sum() / static_cast<double>(M);
        }
    }
    return B;
}

GammaBar gamma_bar(const Eigen::MatrixXcd& B, int j) {
    const int L = static_cast<int>(B.rows());
    const Eigen::MatrixXcd IB = Eigen::MatrixXcd::Identity(L, L) + B;
    const Eigen::VectorXcd x = IB.partialPivLu().solve(Eigen::VectorXcd::Unit(L, j));

    GammaBar out;
    out.gamma_bar = 1.0 / std::real(x(j)) - 1.0;
    out.first_term = std::real(B(j, j));
    if (L > 1) {
        Eigen::VectorXcd b(L - 1);
        Eigen::MatrixXcd minor(L - 1, L - 1);
        int row = 0;
        for (int l = 0; l < L; ++l) {
            if (l == j) continue;
            b(row) = B(l, j);
            int col = 0;
            for (int lp = 0; lp < L; ++lp) {
                if (lp == j) continue;
                minor(row, col++) = B(l, lp);
            }
            ++row;
        }
        const Eigen::MatrixXcd Im = Eigen::MatrixXcd::Identity(L - 1, L - 1) + minor;
        out.loss = std::real(b.dot(Im.partialPivLu().solve(b)));
    }
    if (!std::isfinite(out.gamma_bar) || !std::isfinite(out.loss)) {
        throw ConvergenceError("I + B is numerically singular");
    }
    return out;
}

BoundReport compute_bounds(const CorrelationSet& corr, const EstimationStatistics& stats,
                           double rho) {
    const int L = corr.L;
    const int K = corr.K;
    const int M = corr.M;
    const double ratio = static_cast<double>(M) / static_cast<double>(K * L);
    const double rho_term = 1.0 / (static_cast<double>(K * L) * rho);

    double max_phi_norm = 0.0;
    double max_err_norm = 0.0;
    double min_err_eig = std::numeric_limits<double>::infinity();
    for (int j = 0; j < L; ++j) {
        for (int l = 0; l < L; ++l) {
            for (int i = 0; i < K; ++i) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> phi_eig(stats.phi(j, l, i),
                                                                        Eigen::EigenvaluesOnly);
                max_phi_norm = std::max(max_phi_norm, phi_eig.eigenvalues().cwiseAbs().maxCoeff());
                const Eigen::MatrixXcd err = corr.at(j, l, i) - stats.phi(j, l, i);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> err_eig(err, Eigen::EigenvaluesOnly);
                max_err_norm = std::max(max_err_norm, err_eig.eigenvalues().cwiseAbs().maxCoeff());
                min_err_eig = std::min(min_err_eig, err_eig.eigenvalues().minCoeff());
            }
        }
    }

    BoundReport report;
    report.sigma = max_phi_norm + max_err_norm + rho_term;
    report.eta = min_err_eig + rho_term;
    report.min_eig_error_cov = min_err_eig;
    report.degenerate = !(min_err_eig > 0.0);
    report.ue.reserve(L * K);
    for (int j = 0; j < L; ++j) {
        for (int k = 0; k < K; ++k) {
            UeBoundCertificate cert;
            cert.cell = j;
            cert.ue = k;
            cert.trace_phi_own = stats.phi(j, j, k).real().trace() / static_cast<double>(M);
            double sum_tr = 0.0;
            double sum_tr_sq = 0.0;
            for (int l = 0; l < L; ++l) {
                if (l == j) continue;
                const double tr = stats.phi(j, l, k).real().trace() / static_cast<double>(M);
                sum_tr += tr;
                sum_tr_sq += tr * tr;
            }
            cert.eta_prime = sum_tr / report.eta;
            cert.sigma_prime = sum_tr_sq / (report.sigma * report.sigma);
            cert.b_ratio_lower = ratio / report.sigma;
            cert.b_ratio_upper = ratio / report.eta;
            cert.loss_lower = ratio * ratio * cert.sigma_prime / (1.0 + ratio * cert.eta_prime);
            cert.loss_upper =
                L > 1 ? ratio * ratio * cert.sigma_prime /
                            (1.0 + ratio * cert.eta_prime / static_cast<double>(L - 1))
                      : 0.0;
            report.ue.push_back(cert);
        }
    }
    return report;
}

UncorrelatedClosedForm closed_form_uncorrelated(int M, int K, int L, double alpha, double rho,
                                                double rho_tr) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0, 1]");
    if (M < 1 || K < 1 || L < 1) throw ConfigError("M, K, L must be positive");
    if (!(rho > 0.0) || !(rho_tr > 0.0)) throw ConfigError("powers must be positive");

    UncorrelatedClosedForm out;
    out.L_bar = 1.0 + alpha * (L - 1);
    out.nu = rho_tr / (1.0 + rho_tr * out.L_bar);
    const double nu = out.nu;
    const double a2 = alpha * alpha;
    // Normalized error-covariance level Z/(K M): the own cell contributes
    // 1 - nu, each interfering cell alpha (1 - alpha nu).
    const double z0 = (1.0 - nu) + (L - 1) * alpha * (1.0 - alpha * nu);

    const auto denom = [&](double mu) {
        return (static_cast<double>(K) / M) *
                   (nu / (1.0 + mu) + (L - 1) * a2 * nu / (1.0 + a2 * mu) + z0) +
               1.0 / rho;
    };
    // mu* solves mu = nu / denom(mu); the left side grows, the right side
    // shrinks in mu, so bisection on their difference is safe.
    double lo = 0.0;
    double hi = nu * rho;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid * denom(mid) - nu > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo <= 1e-16 * (1.0 + hi)) break;
    }
    out.mu_star = 0.5 * (lo + hi);

    out.eta_star = (nu / (1.0 + out.mu_star) + (L - 1) * a2 * nu / (1.0 + a2 * out.mu_star) + z0) /
                   out.L_bar;
    out.noise = 1.0 / (rho * nu);
    out.noncoherent = (static_cast<double>(K) / M) * (out.L_bar / nu) * out.eta_star;
    out.coherent = alpha * (out.L_bar - 1.0);
    if (L == 2) {
        out.gamma_bar = 1.0 / (out.noise + out.noncoherent + out.coherent);
    }
    return out;
}

DiagonalClosedForm closed_form_diagonal(const DiagonalProfiles& profiles, double rho,
                                        const std::vector<double>& beta_ratios, double tol,
                                        int max_iter) {
    const int L = profiles.L;
    const int K = profiles.K;
    const int M = profiles.M;
    if (L < 1 || K < 1 || M < 1) throw ConfigError("profile dimensions must be positive");
    if (profiles.r.size() != static_cast<std::size_t>(L * K * M) ||
        profiles.phi.size() != static_cast<std::size_t>(L * K * M) ||
        profiles.z.size() != static_cast<std::size_t>(M)) {
        throw ConfigError("profile array sizes do not match dimensions");
    }
    for (double v : profiles.r) {
        if (!(v >= 0.0)) throw ConfigError("per-antenna profiles must be nonnegative");
    }

    DiagonalClosedForm out;
    out.L = L;
    out.K = K;
    out.mu_star.assign(L * K, 1.0);
    out.varsigma.assign(M, 0.0);

    std::vector<double> next(out.mu_star.size(), 0.0);
    for (int iter = 1; iter <= max_iter; ++iter) {
        for (int m = 0; m < M; ++m) {
            double acc = 0.0;
            for (int l = 0; l < L; ++l) {
                for (int i = 0; i < K; ++i) {
                    acc += profiles.phi_at(l, i, m) / (1.0 + out.mu_star[l * K + i]);
                }
            }
            out.varsigma[m] = (acc + profiles.z[m]) / static_cast<double>(M) + 1.0 / rho;
        }
        double residual = 0.0;
        for (int l = 0; l < L; ++l) {
            for (int i = 0; i < K; ++i) {
                double acc = 0.0;
                for (int m = 0; m < M; ++m) acc += profiles.phi_at(l, i, m) / out.varsigma[m];
                const std::size_t n = l * K + i;
                next[n] = acc / static_cast<double>(M);
                residual = std::max(residual, std::fabs(next[n] - out.mu_star[n]));
            }
        }
        out.mu_star = next;
        out.iterations = iter;
        out.residual = residual;
        if (residual <= tol) {
            out.converged = true;
            break;
        }
    }

    if (L == 2) {
        const auto ratio_at = [&](int l, int lp, int k, int m) {
            if (!beta_ratios.empty()) {
                return beta_ratios[((l * L + lp) * K + k) * M + m];
            }
            return profiles.r_at(lp, k, m) / profiles.r_at(l, k, m);
        };
        out.gamma_bar_two_cell.resize(K);
        for (int k = 0; k < K; ++k) {
            double b[2][2] = {{0, 0}, {0, 0}};
            for (int l = 0; l < 2; ++l) {
                for (int lp = 0; lp < 2; ++lp) {
                    double acc = 0.0;
                    for (int m = 0; m < M; ++m) {
                        acc += profiles.phi_at(l, k, m) / out.varsigma[m] * ratio_at(l, lp, k, m);
                    }
                    b[l][lp] = acc / static_cast<double>(M);
                }
            }
            out.gamma_bar_two_cell[k] = b[0][0] - b[0][1] * b[1][0] / (1.0 + b[1][1]);
        }
    }
    return out;
}

} // namespace mimo
