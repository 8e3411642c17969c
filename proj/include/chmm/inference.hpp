#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chmm/hmm.hpp"

namespace chmm {

struct InformationCriteria {
    double aic = 0.0;
    double bic = 0.0;
    double icl = 0.0;
    int n_params = 0;
    double loglik = 0.0;
    int n_obs = 0;
};

/// Free parameter count:
///   K*(d*p + d + d(d-1)/2 + [1 if t copula]) + (K-1) + K(K-1).
int count_params(const ModelSpec& spec, int d, int p);

/// AIC/BIC plus the entropy-penalized ICL = BIC + 2*E with
/// E = -sum_t sum_k gamma log gamma (0 log 0 := 0).
InformationCriteria information_criteria(double loglik, const ModelSpec& spec,
                                         const Posteriors& post, int p);

/// Pair-counting adjusted Rand index between two labelings.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

struct BootstrapReport {
    Eigen::VectorXd se_pi;
    Eigen::MatrixXd se_Pi;
    std::vector<Eigen::MatrixXd> se_beta;  // per state, p x d
    Eigen::MatrixXd se_sigma;              // K x d
    std::vector<Eigen::MatrixXd> se_R;     // per state, d x d
    Eigen::VectorXd se_nu;                 // per state (t copula only)
    int n_replications = 0;
    int n_failed = 0;
    bool reliable = true;
    std::vector<std::vector<int>> alignments;  // permutation applied per replicate
};

/// Parametric bootstrap standard errors: simulate at the fitted parameters on
/// the observed covariates, refit with 5 starts, align states by the
/// scale-vector permutation, take per-parameter standard deviations.
BootstrapReport bootstrap_se(const FitResult& fit_result, const TimeSeriesDataset& data,
                             const ModelSpec& spec, int n_replications, Rng& rng,
                             int n_threads = 0);

struct SelectionCell {
    int n_states = 0;
    CopulaFamily family = CopulaFamily::gaussian;
    bool ok = false;
    std::string error;
    InformationCriteria criteria;
};

struct SelectionTable {
    std::vector<SelectionCell> cells;
    int best_aic = -1;  // index into cells, -1 when no cell succeeded
    int best_bic = -1;
    int best_icl = -1;
};

/// Fit every (K, family) pair at tau = 0.5 and tabulate the criteria. Failed
/// cells are recorded and skipped, never fatal.
SelectionTable select_model(const TimeSeriesDataset& data, const std::vector<int>& K_grid,
                            const std::vector<CopulaFamily>& family_grid,
                            const ModelSpec& spec_template, int n_threads = 0);

/// State permutation of `replicate` scales minimizing the summed distance to
/// the reference scales (K x d rows compared states-wise).
std::vector<int> align_states_by_scale(const Eigen::MatrixXd& sigma_ref,
                                       const Eigen::MatrixXd& sigma_rep);

/// Permutation minimizing the summed scale and coefficient distance. The scale
/// term dominates when the states have distinct volatilities; the coefficient
/// term settles replicates whose fitted scales tie.
std::vector<int> align_states_by_parameters(const HMMParameters& ref,
                                            const HMMParameters& rep);

/// Apply a state permutation to all state-indexed blocks; perm[k] names the
/// replicate state matched to reference state k.
HMMParameters permute_states(const HMMParameters& params, const std::vector<int>& perm);

}  // namespace chmm
