#pragma once

#include <Eigen/Dense>

#include "chmm/errors.hpp"
#include "chmm/rng.hpp"

namespace chmm {

/// Symmetric, unit-diagonal, strictly positive definite matrix with
/// off-diagonals inside (-1,1). Construction validates; pd_repair() projects.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(Eigen::MatrixXd m);
    static CorrelationMatrix identity(int d);

    const Eigen::MatrixXd& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    Eigen::MatrixXd m_;
};

/// Clip eigenvalues below 1e-8 up to 1e-8, reconstruct, rescale to unit
/// diagonal. Idempotent on valid correlation matrices.
CorrelationMatrix pd_repair(const Eigen::MatrixXd& m);

enum class CopulaFamily { gaussian, student_t };

struct CopulaParams {
    CopulaFamily family;
    CorrelationMatrix R;
    double nu;  // meaningful only for student_t

    static CopulaParams make_gaussian(CorrelationMatrix R);
    static CopulaParams make_student_t(CorrelationMatrix R, double nu);

private:
    CopulaParams(CopulaFamily f, CorrelationMatrix R_, double nu_)
        : family(f), R(std::move(R_)), nu(nu_) {}
};

/// Pseudo-observations feeding the copula are kept strictly inside the unit
/// hypercube so the marginal quantile transforms stay finite.
double clamp_pseudo_observation(double u);

double gaussian_copula_logdensity(const Eigen::VectorXd& u, const CorrelationMatrix& R);
Eigen::VectorXd gaussian_copula_logdensity(const Eigen::MatrixXd& U,
                                           const CorrelationMatrix& R);

double t_copula_logdensity(const Eigen::VectorXd& u, const CorrelationMatrix& R,
                           double nu);
Eigen::VectorXd t_copula_logdensity(const Eigen::MatrixXd& U, const CorrelationMatrix& R,
                                    double nu);

double copula_logdensity(const Eigen::VectorXd& u, const CopulaParams& params);

/// Weighted Gaussian-copula correlation: second moments of the normal scores,
/// rescaled to unit diagonal.
CorrelationMatrix fit_gaussian_weighted(const Eigen::MatrixXd& U,
                                        const Eigen::VectorXd& w);

/// Weighted t-copula scale at fixed nu, by the inner EM on the hierarchical
/// representation of the multivariate t. Runs to inner convergence
/// (max |delta R| < 1e-8) or 100 sweeps.
CorrelationMatrix fit_t_weighted(const Eigen::MatrixXd& U, const Eigen::VectorXd& w,
                                 double nu_current);

struct NuEstimate {
    double value;
    bool at_upper_bound;  // objective was flat / increasing up to the bracket top
};

/// Maximize the weighted t-copula log density over nu in (2, 300] by
/// golden-section search to absolute tolerance 1e-3.
NuEstimate profile_nu(const Eigen::MatrixXd& U, const Eigen::VectorXd& w,
                      const CorrelationMatrix& R);

/// Draw n rows with uniform margins from the given copula.
Eigen::MatrixXd sample_copula(const CopulaParams& params, int n, Rng& rng);

}  // namespace chmm
