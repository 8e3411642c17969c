// Batch front end: data ingestion, descriptive statistics, model fitting,
// selection, decoding, bootstrap standard errors and Monte Carlo studies.
//
// Every subcommand reads an optional JSON config (--config) whose fields can
// all be overridden by the flag of the same name. The outputs of a command
// are a pure function of (input files, config, seed).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chmm/errors.hpp"
#include "chmm/io.hpp"

namespace fs = std::filesystem;
using namespace chmm;

namespace {

struct CommandContext {
    RunConfig cfg;
    std::string config_path;
};

// The config file is merged before flag parsing so that flags win.
std::string prescan_config_path(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" || arg == "-c") return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--config,-c", "JSON config file (merged before flags)")
        ->expected(1);
    cmd->add_option("--input_path", cfg.input_path, "delimited input file");
    cmd->add_option("--response_columns", cfg.response_columns, "response column names")
        ->delimiter(',');
    cmd->add_option("--covariate_columns", cfg.covariate_columns,
                    "covariate column names")
        ->delimiter(',');
    cmd->add_option("--lag_covariates", cfg.lag_covariates,
                    "lag applied to the covariates");
    cmd->add_flag("--log_returns,!--no-log_returns", cfg.log_returns,
                  "transform selected columns to percent log returns");
    cmd->add_option("--delimiter", cfg.delimiter, "field delimiter (or 'tab')");
    cmd->add_option("--tau", cfg.tau, "tail index per response (or one for all)")
        ->delimiter(',');
    cmd->add_option("--model", cfg.model, "quantile | expectile");
    cmd->add_option("--K", cfg.K, "number of hidden states");
    cmd->add_option("--copula", cfg.copula, "gaussian | student_t");
    cmd->add_option("--n_starts", cfg.n_starts, "EM random starts");
    cmd->add_option("--tol", cfg.tol, "EM convergence tolerance");
    cmd->add_option("--max_iter", cfg.max_iter, "EM iteration cap");
    cmd->add_option("--seed", [&cfg](const std::vector<std::string>& vals) {
        cfg.seed = std::stoull(vals.back());
        return true;
    }, "random seed");
    cmd->add_option("--output_dir", cfg.output_dir, "directory for outputs");
    cmd->add_option("--params_path", cfg.params_path,
                    "parameter document (decode / bootstrap)");
    cmd->add_option("--K_grid", cfg.K_grid, "state counts for selection")
        ->delimiter(',');
    cmd->add_option("--bootstrap_replications", cfg.bootstrap_replications,
                    "bootstrap resamples");
    cmd->add_option("--error_family", cfg.error_family,
                    "gaussian | student_t5 | skew_t5");
    cmd->add_option("--sim_T", cfg.sim_T, "simulated series length");
    cmd->add_option("--tau_levels", cfg.tau_levels, "tau grid for the study")
        ->delimiter(',');
    cmd->add_option("--n_replications", cfg.n_replications, "study replications");
}

void normalize(RunConfig& cfg) {
    if (cfg.delimiter == "tab" || cfg.delimiter == "\\t") cfg.delimiter = "\t";
}

std::uint64_t require_seed(const RunConfig& cfg) {
    if (!cfg.seed) {
        throw InvalidInput("--seed is required for this command");
    }
    return *cfg.seed;
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    return fs::path(cfg.output_dir) / name;
}

CopulaFamily family_of(const std::string& name) {
    if (name == "gaussian") return CopulaFamily::gaussian;
    if (name == "student_t") return CopulaFamily::student_t;
    throw InvalidInput("unknown copula family: " + name);
}

ErrorFamily error_family_of(const std::string& name) {
    if (name == "gaussian") return ErrorFamily::gaussian;
    if (name == "student_t5") return ErrorFamily::student_t5;
    if (name == "skew_t5") return ErrorFamily::skew_t5;
    throw InvalidInput("unknown error family: " + name);
}

int cmd_stats(const RunConfig& cfg) {
    IngestReport report;
    const TimeSeriesDataset data = ingest(cfg, &report);
    std::cout << "read " << report.rows_read << " rows, dropped "
              << report.rows_dropped << ", using T=" << data.n_obs() << "\n";
    const DescriptiveStats stats = descriptive_stats(data);
    write_stats_csv(out_path(cfg, "stats.csv").string(), stats);
    write_correlations_csv(out_path(cfg, "response_correlations.csv").string(), stats);
    std::cout << "wrote stats.csv and response_correlations.csv to " << cfg.output_dir
              << "\n";
    return 0;
}

int cmd_fit(const RunConfig& cfg) {
    require_seed(cfg);
    IngestReport report;
    const TimeSeriesDataset data = ingest(cfg, &report);
    const ModelSpec spec = cfg.to_model_spec(static_cast<int>(data.n_responses()));
    const FitResult result = fit(data, spec);
    const InformationCriteria ic =
        information_criteria(result.posteriors.loglik, spec, result.posteriors,
                             static_cast<int>(data.n_covariates()));

    const FitDocument doc = FitDocument::from_fit(spec, data, result, ic);
    write_parameter_document(out_path(cfg, "params.json").string(), doc);
    write_posteriors_csv(out_path(cfg, "posteriors.csv").string(), result.posteriors,
                         result.decoded_states);
    write_loglik_trace_csv(out_path(cfg, "loglik_trace.csv").string(), result.ll_trace);

    std::cout << "loglik " << format_double(result.posteriors.loglik) << " after "
              << result.n_iter << " iterations (start " << result.start_index << ", "
              << (result.converged ? "converged" : "not converged") << ", "
              << result.n_failed_starts << " failed starts)\n"
              << "wrote params.json, posteriors.csv, loglik_trace.csv to "
              << cfg.output_dir << "\n";
    return 0;
}

int cmd_select(const RunConfig& cfg) {
    IngestReport report;
    const TimeSeriesDataset data = ingest(cfg, &report);
    ModelSpec tmpl = cfg.to_model_spec(static_cast<int>(data.n_responses()));
    const SelectionTable table =
        select_model(data, cfg.K_grid,
                     {CopulaFamily::gaussian, CopulaFamily::student_t}, tmpl, 0);
    write_criteria_csv(out_path(cfg, "criteria.csv").string(), table);
    int failures = 0;
    for (const auto& cell : table.cells) {
        if (!cell.ok) ++failures;
    }
    std::cout << "wrote criteria.csv (" << table.cells.size() << " cells, " << failures
              << " failed) to " << cfg.output_dir << "\n";
    return failures == static_cast<int>(table.cells.size()) ? 1 : 0;
}

int cmd_decode(const RunConfig& cfg) {
    if (cfg.params_path.empty()) throw InvalidInput("--params_path is required");
    const FitDocument doc = read_parameter_document(cfg.params_path);
    const TimeSeriesDataset data = ingest(cfg);
    const ModelSpec spec = doc.to_model_spec();
    const Posteriors post = e_step(data, spec, doc.params);
    write_posteriors_csv(out_path(cfg, "posteriors.csv").string(), post,
                         decode_map(post));
    std::cout << "wrote posteriors.csv to " << cfg.output_dir << "\n";
    return 0;
}

int cmd_bootstrap(const RunConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    if (cfg.params_path.empty()) throw InvalidInput("--params_path is required");
    FitDocument doc = read_parameter_document(cfg.params_path);
    const TimeSeriesDataset data = ingest(cfg);
    const ModelSpec spec = doc.to_model_spec();

    FitResult pseudo;
    pseudo.params = doc.params;
    pseudo.posteriors = e_step(data, spec, doc.params);
    pseudo.converged = doc.converged;

    Rng rng(seed);
    doc.se = bootstrap_se(pseudo, data, spec, cfg.bootstrap_replications, rng, 0);
    write_parameter_document(cfg.params_path, doc);
    std::cout << "appended bootstrap SEs (" << doc.se->n_replications << " resamples, "
              << doc.se->n_failed << " failed) to " << cfg.params_path << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    ScenarioConfig scenario;
    scenario.error_family = error_family_of(cfg.error_family);
    scenario.T = cfg.sim_T;
    scenario.fit_copula = family_of(cfg.copula);
    scenario.model = (cfg.model == "quantile") ? PowerOrder::quantile
                                               : PowerOrder::expectile;
    scenario.tau_levels = cfg.tau_levels;
    scenario.n_replications = cfg.n_replications;
    scenario.n_starts = cfg.n_starts;
    scenario.tol = cfg.tol;
    scenario.max_iter = cfg.max_iter;

    const MonteCarloResult mc = run_monte_carlo(scenario, seed, 0);
    write_bias_table_csv(out_path(cfg, "bias_table.csv").string(), mc);
    write_ari_csv(out_path(cfg, "ari.csv").string(), mc);
    std::cout << "ran " << mc.n_replications << " replications (" << mc.n_failed
              << " failed); wrote bias_table.csv and ari.csv to " << cfg.output_dir
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"copula-based quantile/expectile hidden Markov regression"};
    app.require_subcommand(1);

    RunConfig cfg;
    const std::string config_path = prescan_config_path(argc, argv);
    if (!config_path.empty()) {
        try {
            cfg = load_config(config_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    auto* stats = app.add_subcommand("stats", "descriptive statistics");
    auto* fit_cmd = app.add_subcommand("fit", "fit one model");
    auto* select = app.add_subcommand("select", "K/copula criteria grid");
    auto* decode = app.add_subcommand("decode", "posteriors from a saved fit");
    auto* bootstrap = app.add_subcommand("bootstrap", "parametric bootstrap SEs");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo study tables");
    for (CLI::App* cmd : {stats, fit_cmd, select, decode, bootstrap, simulate}) {
        add_common_options(cmd, cfg);
    }

    CLI11_PARSE(app, argc, argv);
    normalize(cfg);

    try {
        if (stats->parsed()) return cmd_stats(cfg);
        if (fit_cmd->parsed()) return cmd_fit(cfg);
        if (select->parsed()) return cmd_select(cfg);
        if (decode->parsed()) return cmd_decode(cfg);
        if (bootstrap->parsed()) return cmd_bootstrap(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
