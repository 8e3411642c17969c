#pragma once

#include <vector>

#include <Eigen/Dense>

#include "chmm/distributions.hpp"

namespace chmm {

/// One weighted per-state regression problem from the M-step. X carries the
/// intercept in column 0; weights are the smoothed state probabilities.
struct WeightedRegressionProblem {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd w;
    TailIndex tau;
    PowerOrder order;
};

struct RegressionFit {
    Eigen::VectorXd beta;
    bool converged = true;
    int iterations = 0;
};

/// Sum_t w_t * asymmetric_loss(y_t - x_t'beta).
double regression_objective(const WeightedRegressionProblem& prob,
                            const Eigen::VectorXd& beta);

/// Weighted linear quantile regression (order l=1). Majorize-minimize on a
/// smoothed check loss with the smoothing parameter decayed 1e-2 -> 1e-9,
/// followed by a vertex polish over the near-zero-residual rows.
/// objective_trace, when given, receives the incumbent objective after every
/// smoothing stage (nonincreasing by construction).
RegressionFit weighted_quantile_fit(const WeightedRegressionProblem& prob,
                                    std::vector<double>* objective_trace = nullptr);

/// Weighted linear expectile regression (order l=2), IRLS until
/// max |delta beta| < 1e-10 or 200 iterations. objective_trace, when given,
/// receives the objective after every IRLS step.
RegressionFit weighted_expectile_fit(const WeightedRegressionProblem& prob,
                                     std::vector<double>* objective_trace = nullptr);

}  // namespace chmm
