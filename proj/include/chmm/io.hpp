#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chmm/hmm.hpp"
#include "chmm/inference.hpp"
#include "chmm/simulation.hpp"

namespace chmm {

/// Batch run configuration; loadable from a JSON file, every field overridable
/// by a command-line flag of the same name.
struct RunConfig {
    std::string input_path;
    std::vector<std::string> response_columns;
    std::vector<std::string> covariate_columns;
    int lag_covariates = 1;
    bool log_returns = false;
    std::string delimiter = ",";

    std::vector<double> tau = {0.5};
    std::string model = "quantile";  // quantile | expectile
    int K = 2;
    std::string copula = "gaussian";  // gaussian | student_t
    int n_starts = 20;
    double tol = 1e-6;
    int max_iter = 500;
    std::optional<std::uint64_t> seed;
    std::string output_dir = ".";
    std::string params_path;  // decode / bootstrap input

    std::vector<int> K_grid = {1, 2, 3, 4};
    int bootstrap_replications = 100;

    std::string error_family = "gaussian";  // simulate subcommand
    int sim_T = 500;
    std::vector<double> tau_levels = {0.5};
    int n_replications = 50;

    ModelSpec to_model_spec(int d) const;
};

RunConfig load_config(const std::string& path);

struct IngestReport {
    Eigen::Index rows_read = 0;
    Eigen::Index rows_dropped = 0;
};

/// Read a delimited file with a header row, apply the optional log-return
/// transform, lag the covariates, and prepend the intercept column.
TimeSeriesDataset ingest(const RunConfig& config, IngestReport* report = nullptr);

struct ColumnStats {
    std::string name;
    double min = 0.0, mean = 0.0, max = 0.0, sd = 0.0;
    double skewness = 0.0, excess_kurtosis = 0.0;
    double jarque_bera = 0.0;
    bool jarque_bera_defined = true;
};

struct DescriptiveStats {
    std::vector<ColumnStats> columns;
    Eigen::MatrixXd response_correlations;
    std::vector<std::string> response_names;
};

DescriptiveStats descriptive_stats(const TimeSeriesDataset& data);

/// Everything one fit produces, as written to / read from the parameter
/// document.
struct FitDocument {
    std::string model;   // quantile | expectile
    std::string copula;  // gaussian | student_t
    std::vector<double> tau;
    double tol = 1e-6;
    int max_iter = 500;
    int n_starts = 20;
    std::uint64_t seed = 0;
    std::vector<std::string> response_names;
    std::vector<std::string> covariate_names;

    HMMParameters params;
    double loglik = 0.0;
    bool converged = false;
    int n_iter = 0;
    int start_index = 0;
    InformationCriteria criteria;
    std::optional<BootstrapReport> se;
    std::string version;

    ModelSpec to_model_spec() const;
    static FitDocument from_fit(const ModelSpec& spec, const TimeSeriesDataset& data,
                                const FitResult& result, const InformationCriteria& ic);
};

std::string serialize_parameter_document(const FitDocument& doc);
FitDocument parse_parameter_document(const std::string& text);
void write_parameter_document(const std::string& path, const FitDocument& doc);
FitDocument read_parameter_document(const std::string& path);

// CSV emitters (and the readers the round-trip checks rely on).
void write_posteriors_csv(const std::string& path, const Posteriors& post,
                          const std::vector<int>& decoded);
void write_loglik_trace_csv(const std::string& path, const std::vector<double>& trace);
void write_criteria_csv(const std::string& path, const SelectionTable& table);
SelectionTable read_criteria_csv(const std::string& path);
void write_bias_table_csv(const std::string& path, const MonteCarloResult& mc);
void write_ari_csv(const std::string& path, const MonteCarloResult& mc);
void write_stats_csv(const std::string& path, const DescriptiveStats& stats);
void write_correlations_csv(const std::string& path, const DescriptiveStats& stats);

/// Shortest round-trip decimal form used by every CSV writer.
std::string format_double(double v);

}  // namespace chmm
