#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chmm/hmm.hpp"

namespace chmm {

enum class ErrorFamily { gaussian, student_t5, skew_t5 };

/// One cell of the Monte Carlo study: a two-state bivariate regime-switching
/// regression with a scalar standard-normal covariate.
struct ScenarioConfig {
    ErrorFamily error_family = ErrorFamily::gaussian;
    int T = 500;
    CopulaFamily fit_copula = CopulaFamily::gaussian;
    PowerOrder model = PowerOrder::quantile;
    std::vector<double> tau_levels = {0.5};
    int n_replications = 50;
    int n_starts = 5;  // per-fit random starts inside the study
    double tol = 1e-6;
    int max_iter = 500;
    double noise_scale = 1.0;  // multiplies the error scale matrices
};

/// Reference two-state bivariate generator parameters.
struct TrueParameters {
    Eigen::MatrixXd beta1;   // 2 x 2, column j = margin j, rows (intercept, slope)
    Eigen::MatrixXd beta2;   // 2 x 2
    Eigen::MatrixXd Omega1;  // 2 x 2
    Eigen::MatrixXd Omega2;  // 2 x 2
    Eigen::MatrixXd Pi;      // 2 x 2
    static TrueParameters reference();
};

/// Multivariate skew-t draw with zero location: hidden-truncation skew-normal
/// with slant alpha and scale Omega, divided by sqrt(chi2_df / df).
Eigen::VectorXd sample_skew_t(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& Omega,
                              double df, Rng& rng);

/// Generate one scenario replication: dataset plus the true hidden path
/// (0-based states).
std::pair<TimeSeriesDataset, std::vector<int>> generate_scenario(
    const ScenarioConfig& cfg, std::uint64_t rep_seed);

/// tau-quantile / tau-expectile of one error margin, used to shift the true
/// intercept when measuring bias away from the median.
double error_margin_quantile(ErrorFamily family, int state, int margin, double tau);
double error_margin_expectile(ErrorFamily family, int state, int margin, double tau);

struct BiasRow {
    double tau = 0.5;
    int state = 0;   // 1-based
    int margin = 0;  // 1-based
    int coef = 0;    // 0 = intercept, 1 = slope
    double true_value = 0.0;
    double mean_bias = 0.0;
    double sd = 0.0;
};

struct AriRecord {
    double tau = 0.5;
    int replication = 0;
    double ari = 0.0;
};

struct MonteCarloResult {
    std::vector<BiasRow> bias;
    std::vector<AriRecord> ari;
    int n_failed = 0;
    int n_replications = 0;

    double median_ari(double tau) const;
    const BiasRow& row(double tau, int state, int margin, int coef) const;
};

/// Run the full study for one configuration: per replication, generate, fit at
/// every tau level, align estimated states to the truth, and accumulate
/// coefficient errors and ARI values.
MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg, std::uint64_t master_seed,
                                 int n_threads = 0);

}  // namespace chmm
