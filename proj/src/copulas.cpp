#include "chmm/copulas.hpp"

#include <cmath>

#include "chmm/special_functions.hpp"

namespace chmm {

namespace {

constexpr double kMinEigenvalue = 1e-8;
constexpr double kNuLower = 2.0 + 1e-6;
constexpr double kNuUpper = 300.0;

void check_correlation_invariants(const Eigen::MatrixXd& m) {
    const auto d = m.rows();
    if (d == 0 || m.cols() != d) throw InvalidInput("CorrelationMatrix: square, nonempty");
    for (Eigen::Index i = 0; i < d; ++i) {
        if (std::abs(m(i, i) - 1.0) > 1e-10) {
            throw InvalidInput("CorrelationMatrix: diagonal must be 1");
        }
        for (Eigen::Index j = i + 1; j < d; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > 1e-10) {
                throw InvalidInput("CorrelationMatrix: must be symmetric");
            }
            if (!(std::abs(m(i, j)) < 1.0)) {
                throw InvalidInput("CorrelationMatrix: off-diagonals must lie in (-1,1)");
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 1e-10)) {
        throw InvalidInput("CorrelationMatrix: not positive definite");
    }
}

Eigen::VectorXd normal_scores_row(const Eigen::VectorXd& u) {
    Eigen::VectorXd z(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        const double uj = u(j);
        if (!(uj > 0.0 && uj < 1.0)) {
            throw InvalidInput("copula: pseudo-observation outside (0,1)");
        }
        z(j) = normal_quantile(uj);
    }
    return z;
}

Eigen::MatrixXd normal_scores(const Eigen::MatrixXd& U) {
    Eigen::MatrixXd Z(U.rows(), U.cols());
    for (Eigen::Index t = 0; t < U.rows(); ++t) {
        for (Eigen::Index j = 0; j < U.cols(); ++j) {
            const double u = U(t, j);
            if (!(u > 0.0 && u < 1.0)) {
                throw InvalidInput("copula: pseudo-observation outside (0,1)");
            }
            Z(t, j) = normal_quantile(u);
        }
    }
    return Z;
}

Eigen::MatrixXd t_scores(const Eigen::MatrixXd& U, double nu) {
    Eigen::MatrixXd Z(U.rows(), U.cols());
    for (Eigen::Index t = 0; t < U.rows(); ++t) {
        for (Eigen::Index j = 0; j < U.cols(); ++j) {
            const double u = U(t, j);
            if (!(u > 0.0 && u < 1.0)) {
                throw InvalidInput("copula: pseudo-observation outside (0,1)");
            }
            Z(t, j) = student_t_quantile(u, nu);
        }
    }
    return Z;
}

// Rescale a symmetric PSD matrix to unit diagonal, guarding zero diagonals.
Eigen::MatrixXd rescale_to_correlation(const Eigen::MatrixXd& m) {
    const auto d = m.rows();
    Eigen::VectorXd s(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        s(i) = (m(i, i) > 0.0) ? 1.0 / std::sqrt(m(i, i)) : 1.0;
    }
    return s.asDiagonal() * m * s.asDiagonal();
}

void check_weights(const Eigen::MatrixXd& U, const Eigen::VectorXd& w) {
    if (w.size() != U.rows()) throw InvalidInput("copula fit: weight length mismatch");
    if ((w.array() < 0.0).any()) throw InvalidInput("copula fit: negative weight");
    if (!(w.sum() >= static_cast<double>(U.cols()))) {
        throw DegenerateInput("copula fit: effective sample smaller than dimension");
    }
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    check_correlation_invariants(m_);
}

CorrelationMatrix CorrelationMatrix::identity(int d) {
    return CorrelationMatrix(Eigen::MatrixXd::Identity(d, d));
}

CorrelationMatrix pd_repair(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw InvalidInput("pd_repair: matrix must be square");
    Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(kMinEigenvalue);
    Eigen::MatrixXd rebuilt =
        es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd r = rescale_to_correlation(rebuilt);
    r = 0.5 * (r + r.transpose());
    r.diagonal().setOnes();
    // The unit-diagonal rescale can nudge an extreme matrix back across the
    // eigenvalue floor; shrink toward the identity until it clears it.
    for (int pass = 0; pass < 64; ++pass) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(r, Eigen::EigenvaluesOnly);
        const double lo = check.eigenvalues().minCoeff();
        bool off_ok = true;
        for (Eigen::Index i = 0; i < r.rows() && off_ok; ++i) {
            for (Eigen::Index j = i + 1; j < r.cols(); ++j) {
                if (!(std::abs(r(i, j)) < 1.0)) {
                    off_ok = false;
                    break;
                }
            }
        }
        if (lo >= kMinEigenvalue * 0.999 && off_ok) break;
        const double a = 1e-6;
        r = (1.0 - a) * r + a * Eigen::MatrixXd::Identity(r.rows(), r.cols());
        r.diagonal().setOnes();
    }
    return CorrelationMatrix(r);
}

CopulaParams CopulaParams::make_gaussian(CorrelationMatrix R) {
    return CopulaParams(CopulaFamily::gaussian, std::move(R), 0.0);
}

CopulaParams CopulaParams::make_student_t(CorrelationMatrix R, double nu) {
    if (!(nu > 2.0)) throw InvalidInput("CopulaParams: nu must exceed 2");
    return CopulaParams(CopulaFamily::student_t, std::move(R), nu);
}

double clamp_pseudo_observation(double u) {
    if (u < 1e-10) return 1e-10;
    if (u > 1.0 - 1e-10) return 1.0 - 1e-10;
    return u;
}

double gaussian_copula_logdensity(const Eigen::VectorXd& u, const CorrelationMatrix& R) {
    if (u.size() != R.dim()) throw InvalidInput("gaussian copula: dimension mismatch");
    const Eigen::VectorXd z = normal_scores_row(u);
    Eigen::LLT<Eigen::MatrixXd> llt(R.matrix());
    if (llt.info() != Eigen::Success) throw InvalidInput("gaussian copula: R not PD");
    const double log_det =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const Eigen::VectorXd solved = llt.solve(z);
    return -0.5 * log_det - 0.5 * (z.dot(solved) - z.squaredNorm());
}

Eigen::VectorXd gaussian_copula_logdensity(const Eigen::MatrixXd& U,
                                           const CorrelationMatrix& R) {
    if (U.cols() != R.dim()) throw InvalidInput("gaussian copula: dimension mismatch");
    const Eigen::MatrixXd Z = normal_scores(U);
    Eigen::LLT<Eigen::MatrixXd> llt(R.matrix());
    if (llt.info() != Eigen::Success) throw InvalidInput("gaussian copula: R not PD");
    const double log_det =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    Eigen::VectorXd out(U.rows());
    for (Eigen::Index t = 0; t < U.rows(); ++t) {
        const Eigen::VectorXd z = Z.row(t).transpose();
        out(t) = -0.5 * log_det - 0.5 * (z.dot(llt.solve(z)) - z.squaredNorm());
    }
    return out;
}

namespace {

// log density of the d-variate t with scale R and df nu at z, minus nothing.
double mvt_logpdf(const Eigen::VectorXd& z, const Eigen::LLT<Eigen::MatrixXd>& llt,
                  double log_det, double nu) {
    const double d = static_cast<double>(z.size());
    const double q = z.dot(llt.solve(z));
    return std::lgamma(0.5 * (nu + d)) - std::lgamma(0.5 * nu) -
           0.5 * d * std::log(nu * M_PI) - 0.5 * log_det -
           0.5 * (nu + d) * std::log1p(q / nu);
}

}  // namespace

double t_copula_logdensity(const Eigen::VectorXd& u, const CorrelationMatrix& R,
                           double nu) {
    if (u.size() != R.dim()) throw InvalidInput("t copula: dimension mismatch");
    if (!(nu > 2.0)) throw InvalidInput("t copula: nu must exceed 2");
    Eigen::VectorXd z(u.size());
    double marginal = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        if (!(u(j) > 0.0 && u(j) < 1.0)) {
            throw InvalidInput("copula: pseudo-observation outside (0,1)");
        }
        z(j) = student_t_quantile(u(j), nu);
        marginal += student_t_logpdf(z(j), nu);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(R.matrix());
    if (llt.info() != Eigen::Success) throw InvalidInput("t copula: R not PD");
    const double log_det =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return mvt_logpdf(z, llt, log_det, nu) - marginal;
}

Eigen::VectorXd t_copula_logdensity(const Eigen::MatrixXd& U, const CorrelationMatrix& R,
                                    double nu) {
    if (U.cols() != R.dim()) throw InvalidInput("t copula: dimension mismatch");
    if (!(nu > 2.0)) throw InvalidInput("t copula: nu must exceed 2");
    const Eigen::MatrixXd Z = t_scores(U, nu);
    Eigen::LLT<Eigen::MatrixXd> llt(R.matrix());
    if (llt.info() != Eigen::Success) throw InvalidInput("t copula: R not PD");
    const double log_det =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    Eigen::VectorXd out(U.rows());
    for (Eigen::Index t = 0; t < U.rows(); ++t) {
        const Eigen::VectorXd z = Z.row(t).transpose();
        double marginal = 0.0;
        for (Eigen::Index j = 0; j < Z.cols(); ++j) {
            marginal += student_t_logpdf(Z(t, j), nu);
        }
        out(t) = mvt_logpdf(z, llt, log_det, nu) - marginal;
    }
    return out;
}

double copula_logdensity(const Eigen::VectorXd& u, const CopulaParams& params) {
    return params.family == CopulaFamily::gaussian
               ? gaussian_copula_logdensity(u, params.R)
               : t_copula_logdensity(u, params.R, params.nu);
}

CorrelationMatrix fit_gaussian_weighted(const Eigen::MatrixXd& U,
                                        const Eigen::VectorXd& w) {
    check_weights(U, w);
    const Eigen::MatrixXd Z = normal_scores(U);
    const double wsum = w.sum();
    Eigen::MatrixXd M = Z.transpose() * w.asDiagonal() * Z / wsum;
    return pd_repair(rescale_to_correlation(M));
}

CorrelationMatrix fit_t_weighted(const Eigen::MatrixXd& U, const Eigen::VectorXd& w,
                                 double nu_current) {
    check_weights(U, w);
    if (!(nu_current > 2.0)) throw InvalidInput("fit_t_weighted: nu must exceed 2");
    const Eigen::MatrixXd Z = t_scores(U, nu_current);
    const double d = static_cast<double>(U.cols());
    const double wsum = w.sum();

    Eigen::MatrixXd R = fit_gaussian_weighted(U, w).matrix();
    for (int sweep = 0; sweep < 100; ++sweep) {
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        if (llt.info() != Eigen::Success) {
            R = pd_repair(R).matrix();
            llt.compute(R);
        }
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(U.cols(), U.cols());
        for (Eigen::Index t = 0; t < Z.rows(); ++t) {
            if (w(t) == 0.0) continue;
            const Eigen::VectorXd z = Z.row(t).transpose();
            const double s = (nu_current + d) / (nu_current + z.dot(llt.solve(z)));
            M.noalias() += (w(t) * s) * z * z.transpose();
        }
        M /= wsum;
        const Eigen::MatrixXd next = pd_repair(rescale_to_correlation(M)).matrix();
        const double delta = (next - R).cwiseAbs().maxCoeff();
        R = next;
        if (delta < 1e-8) break;
    }
    return CorrelationMatrix(R);
}

NuEstimate profile_nu(const Eigen::MatrixXd& U, const Eigen::VectorXd& w,
                      const CorrelationMatrix& R) {
    check_weights(U, w);
    auto objective = [&](double nu) {
        return w.dot(t_copula_logdensity(U, R, nu));
    };
    // Golden-section search for the maximizer on (kNuLower, kNuUpper].
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = kNuLower, b = kNuUpper;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > 1e-3) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = objective(x1);
        }
    }
    double nu_hat = 0.5 * (a + b);
    bool at_upper = false;
    if (kNuUpper - nu_hat < 1.0) {
        nu_hat = kNuUpper;
        at_upper = true;
    }
    return {nu_hat, at_upper};
}

Eigen::MatrixXd sample_copula(const CopulaParams& params, int n, Rng& rng) {
    const int d = params.R.dim();
    Eigen::LLT<Eigen::MatrixXd> llt(params.R.matrix());
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd U(n, d);
    Eigen::VectorXd g(d);
    for (int t = 0; t < n; ++t) {
        for (int j = 0; j < d; ++j) g(j) = rng.normal();
        Eigen::VectorXd z = L * g;
        if (params.family == CopulaFamily::student_t) {
            const double scale = std::sqrt(rng.chi_squared(params.nu) / params.nu);
            z /= scale;
            for (int j = 0; j < d; ++j) U(t, j) = student_t_cdf(z(j), params.nu);
        } else {
            for (int j = 0; j < d; ++j) U(t, j) = normal_cdf(z(j));
        }
        for (int j = 0; j < d; ++j) U(t, j) = clamp_pseudo_observation(U(t, j));
    }
    return U;
}

}  // namespace chmm
