#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chmm/copulas.hpp"
#include "chmm/distributions.hpp"
#include "chmm/rng.hpp"

namespace chmm {

/// Estimation configuration for a copula quantile/expectile hidden Markov
/// regression model.
struct ModelSpec {
    PowerOrder order = PowerOrder::quantile;
    int n_states = 1;
    CopulaFamily copula_family = CopulaFamily::gaussian;
    std::vector<TailIndex> tau;
    double tol = 1e-6;
    int max_iter = 500;
    int n_starts = 20;
    std::uint64_t seed = 0;

    int dim() const { return static_cast<int>(tau.size()); }
    void validate() const;
};

/// Aligned response block (T x d) and design block (T x p, intercept first).
struct TimeSeriesDataset {
    Eigen::MatrixXd y;
    Eigen::MatrixXd x;
    std::vector<std::string> response_names;
    std::vector<std::string> covariate_names;

    Eigen::Index n_obs() const { return y.rows(); }
    Eigen::Index n_responses() const { return y.cols(); }
    Eigen::Index n_covariates() const { return x.cols(); }
    void validate(int n_states) const;
};

/// Full parameter vector theta: chain law, per-state regression coefficients,
/// scales, and copula parameters.
struct HMMParameters {
    Eigen::VectorXd pi;                 // K
    Eigen::MatrixXd Pi;                 // K x K, rows sum to 1
    std::vector<Eigen::MatrixXd> beta;  // K matrices, p x d (column j = margin j)
    Eigen::MatrixXd sigma;              // K x d
    std::vector<CopulaParams> copula;   // K

    int n_states() const { return static_cast<int>(pi.size()); }
    void validate() const;
};

struct Posteriors {
    Eigen::MatrixXd gamma;            // T x K, rows sum to 1
    std::vector<Eigen::MatrixXd> xi;  // T-1 slices, K x K, each sums to 1
    double loglik = 0.0;
};

struct FitResult {
    HMMParameters params;
    Posteriors posteriors;
    std::vector<double> ll_trace;
    bool converged = false;
    int n_iter = 0;
    std::vector<int> decoded_states;  // 1-based labels
    int start_index = 0;
    int n_monotonicity_violations = 0;
    int n_failed_starts = 0;
};

/// Terms of the expected complete log-likelihood, split by parameter block.
struct QDecomposition {
    double initial = 0.0;
    double transition = 0.0;
    double margins = 0.0;
    double copula = 0.0;
    double total() const { return initial + transition + margins + copula; }
};

/// Log joint state density of observation t under state k: sum of marginal
/// log pdfs plus the copula log density at the marginal cdf values.
double state_logdensity(Eigen::Index t, int k, const HMMParameters& params,
                        const TimeSeriesDataset& data, const ModelSpec& spec);

/// T x K matrix of state log densities.
Eigen::MatrixXd log_density_matrix(const HMMParameters& params,
                                   const TimeSeriesDataset& data,
                                   const ModelSpec& spec);

/// Scaled forward-backward recursions; exact observed-data log-likelihood.
Posteriors forward_backward(const Eigen::MatrixXd& logdens, const Eigen::VectorXd& pi,
                            const Eigen::MatrixXd& Pi);

Posteriors e_step(const TimeSeriesDataset& data, const ModelSpec& spec,
                  const HMMParameters& params);

/// One IFM M-step: chain law from the posteriors, margins by weighted
/// quantile/expectile fits, pseudo-observations recomputed at the new margins,
/// then the copula refit per state.
HMMParameters m_step(const TimeSeriesDataset& data, const ModelSpec& spec,
                     const Posteriors& post, const HMMParameters& current);

/// Random-partition initial parameters for one EM start.
HMMParameters initial_parameters(const TimeSeriesDataset& data, const ModelSpec& spec,
                                 Rng& rng);

/// Multi-start EM driver. Starts use seeds spec.seed + 0 .. spec.seed +
/// n_starts-1; the best final log-likelihood wins, ties to the lower index.
FitResult fit(const TimeSeriesDataset& data, const ModelSpec& spec);

/// Observed-data log-likelihood via the scaled forward pass.
double loglik(const TimeSeriesDataset& data, const HMMParameters& params,
              const ModelSpec& spec);

/// Simulate responses from a fitted model on given covariates. states_out,
/// when non-null, receives the simulated hidden path (0-based).
Eigen::MatrixXd simulate_from_model(const HMMParameters& params, const ModelSpec& spec,
                                    const Eigen::MatrixXd& x, Rng& rng,
                                    std::vector<int>* states_out = nullptr);

/// MAP decoding: per-row argmax of gamma, ties toward the lower state index.
/// Labels are 1-based.
std::vector<int> decode_map(const Posteriors& post);

/// Expected complete log-likelihood terms at the given parameters under the
/// given posteriors.
QDecomposition q_decomposition(const TimeSeriesDataset& data, const ModelSpec& spec,
                               const Posteriors& post, const HMMParameters& params);

}  // namespace chmm
