#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "chmm/io.hpp"
#include "chmm/simulation.hpp"
#include "oracles.hpp"

using namespace chmm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("chmm_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CHMM_BINARY) + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

RunConfig basic_config(const fs::path& input, const fs::path& outdir) {
    RunConfig cfg;
    cfg.input_path = input.string();
    cfg.response_columns = {"y1", "y2"};
    cfg.covariate_columns = {"x1"};
    cfg.lag_covariates = 1;
    cfg.output_dir = outdir.string();
    return cfg;
}

}  // namespace

TEST_CASE("ingest: log returns, lagging, and intercept") {
    const fs::path dir = fresh_dir("ingest");
    const fs::path file = dir / "prices.csv";
    write_text(file,
               "date,y1,y2,x1\n"
               "2020-01-01,100,200,10\n"
               "2020-01-02,110,190,11\n"
               "2020-01-03,105,210,12\n"
               "2020-01-04,120,205,13\n"
               "2020-01-05,115,215,14\n"
               "2020-01-06,125,220,15\n"
               "2020-01-07,130,218,16\n"
               "2020-01-08,128,225,17\n");

    RunConfig cfg = basic_config(file, dir);
    cfg.log_returns = true;
    cfg.K = 1;
    cfg.lag_covariates = 1;

    IngestReport report;
    const TimeSeriesDataset data = ingest(cfg, &report);
    // 8 price rows -> 7 return rows -> lag drops one more.
    CHECK(report.rows_read == 8);
    CHECK(data.n_obs() == 6);
    CHECK(data.n_responses() == 2);
    CHECK(data.n_covariates() == 2);  // intercept + x1
    CHECK((data.x.col(0).array() == 1.0).all());

    // Return definition: 100 * (ln p_t - ln p_{t-1}).
    CHECK(data.y(0, 0) ==
          doctest::Approx(100.0 * (std::log(105.0) - std::log(110.0))).epsilon(1e-12));
    // Lag-1: the covariate beside return row t is the return of row t-1.
    CHECK(data.x(0, 1) ==
          doctest::Approx(100.0 * (std::log(11.0) - std::log(10.0))).epsilon(1e-12));
    CHECK(data.x(1, 1) ==
          doctest::Approx(100.0 * (std::log(12.0) - std::log(11.0))).epsilon(1e-12));
}

TEST_CASE("ingest: lag zero keeps contemporaneous alignment") {
    const fs::path dir = fresh_dir("lag0");
    const fs::path file = dir / "data.csv";
    write_text(file,
               "y1,y2,x1\n"
               "1.0,2.0,0.5\n"
               "1.5,2.5,0.6\n"
               "0.5,2.2,0.7\n"
               "1.1,2.4,0.8\n"
               "0.9,2.1,0.9\n"
               "1.3,2.0,1.0\n");
    RunConfig cfg = basic_config(file, dir);
    cfg.lag_covariates = 0;
    cfg.K = 1;
    const TimeSeriesDataset data = ingest(cfg);
    CHECK(data.n_obs() == 6);
    CHECK(data.x(0, 1) == 0.5);
    CHECK(data.y(0, 0) == 1.0);
}

TEST_CASE("ingest rejects bad inputs with clear errors") {
    const fs::path dir = fresh_dir("bad");
    const fs::path file = dir / "data.csv";
    write_text(file, "y1,y2,x1\n1.0,2.0,0.5\n1.5,abc,0.6\n");
    RunConfig cfg = basic_config(file, dir);
    cfg.K = 1;
    CHECK_THROWS_WITH_AS(ingest(cfg), doctest::Contains("non-numeric"), InvalidInput);

    cfg.response_columns = {"y1", "missing"};
    CHECK_THROWS_WITH_AS(ingest(cfg), doctest::Contains("missing"), InvalidInput);

    write_text(file, "y1,y2,x1\n1.0,2.0,0.5\n1.5,2.0,0.6\n");
    cfg = basic_config(file, dir);
    cfg.K = 2;  // needs K*(p+2) = 8 rows
    CHECK_THROWS_AS(ingest(cfg), InvalidInput);
}

TEST_CASE("descriptive stats: degenerate and simulated columns") {
    TimeSeriesDataset data;
    const int T = 100000;
    data.y.resize(T, 3);
    Rng rng(401);
    for (int t = 0; t < T; ++t) {
        data.y(t, 0) = rng.normal();
        data.y(t, 1) = 5.0;  // constant
        data.y(t, 2) = data.y(t, 0);
    }
    data.x = Eigen::MatrixXd::Ones(T, 1);
    data.response_names = {"normal", "constant", "dup"};
    data.covariate_names = {"intercept"};

    const DescriptiveStats stats = descriptive_stats(data);
    CHECK(std::abs(stats.columns[0].skewness) < 0.03);
    CHECK(std::abs(stats.columns[0].excess_kurtosis) < 0.06);
    CHECK(stats.columns[0].jarque_bera ==
          doctest::Approx(T / 6.0 *
                          (std::pow(stats.columns[0].skewness, 2) +
                           std::pow(stats.columns[0].excess_kurtosis, 2) / 4.0))
              .epsilon(1e-12));

    CHECK(stats.columns[1].sd == 0.0);
    CHECK_FALSE(stats.columns[1].jarque_bera_defined);

    CHECK(stats.response_correlations(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stats.response_correlations(0, 0) == 1.0);
}

TEST_CASE("parameter document round-trips byte for byte") {
    ScenarioConfig scenario;
    scenario.T = 140;
    scenario.model = PowerOrder::expectile;
    auto [data, states] = generate_scenario(scenario, 403);

    ModelSpec spec;
    spec.order = PowerOrder::expectile;
    spec.n_states = 2;
    spec.copula_family = CopulaFamily::student_t;
    spec.tau = {TailIndex(0.5), TailIndex(0.5)};
    spec.n_starts = 3;
    spec.seed = 11;
    const FitResult result = fit(data, spec);
    const InformationCriteria ic = information_criteria(
        result.posteriors.loglik, spec, result.posteriors, 2);

    const FitDocument doc = FitDocument::from_fit(spec, data, result, ic);
    const std::string once = serialize_parameter_document(doc);
    const FitDocument parsed = parse_parameter_document(once);
    const std::string twice = serialize_parameter_document(parsed);
    CHECK(once == twice);

    CHECK(parsed.loglik == doc.loglik);
    CHECK((parsed.params.Pi - doc.params.Pi).cwiseAbs().maxCoeff() == 0.0);
    CHECK(parsed.params.copula[0].nu == doc.params.copula[0].nu);
}

TEST_CASE("criteria table round-trips through its csv") {
    SelectionTable table;
    SelectionCell a;
    a.n_states = 1;
    a.family = CopulaFamily::gaussian;
    a.ok = true;
    a.criteria = {100.25, 120.5, 120.5, 9, -41.125, 200};
    SelectionCell b;
    b.n_states = 2;
    b.family = CopulaFamily::student_t;
    b.ok = false;
    b.error = "state 2 collapsed, effective weight";
    table.cells = {a, b};
    table.best_aic = 0;
    table.best_bic = 0;
    table.best_icl = 0;

    const fs::path dir = fresh_dir("criteria");
    const std::string path = (dir / "criteria.csv").string();
    write_criteria_csv(path, table);
    const SelectionTable back = read_criteria_csv(path);
    REQUIRE(back.cells.size() == 2);
    CHECK(back.cells[0].criteria.aic == a.criteria.aic);
    CHECK(back.cells[0].criteria.icl == a.criteria.icl);
    CHECK(back.cells[1].ok == false);
    CHECK(back.best_icl == 0);
    CHECK(back.cells[1].n_states == 2);
}

TEST_CASE("cli: fit then decode reproduces the posterior table") {
    const fs::path dir = fresh_dir("cli_fit");
    const fs::path file = dir / "prices.csv";
    std::ostringstream csv;
    csv << "y1,y2,x1\n";
    ScenarioConfig scenario;
    scenario.T = 160;
    auto [data, states] = generate_scenario(scenario, 405);
    for (int t = 0; t < 160; ++t) {
        csv << data.y(t, 0) << "," << data.y(t, 1) << "," << data.x(t, 1) << "\n";
    }
    write_text(file, csv.str());

    const std::string common = "--input_path " + file.string() +
                               " --response_columns y1,y2 --covariate_columns x1"
                               " --lag_covariates 0 --model expectile --K 2"
                               " --copula gaussian --n_starts 3 --tau 0.5";
    const fs::path out_fit = dir / "fit";
    REQUIRE(run_cli("fit " + common + " --seed 5 --output_dir " + out_fit.string()) == 0);

    const fs::path out_dec = dir / "dec";
    REQUIRE(run_cli("decode " + common + " --params_path " +
                    (out_fit / "params.json").string() + " --output_dir " +
                    out_dec.string()) == 0);
    CHECK(slurp(out_fit / "posteriors.csv") == slurp(out_dec / "posteriors.csv"));

    // Seed is mandatory for fit.
    CHECK(run_cli("fit " + common + " --output_dir " + (dir / "noseed").string()) != 0);
}

TEST_CASE("cli: bootstrap smoke run appends four replicates") {
    const fs::path dir = fresh_dir("cli_boot");
    const fs::path file = dir / "data.csv";
    std::ostringstream csv;
    csv << "y1,y2,x1\n";
    ScenarioConfig scenario;
    scenario.T = 120;
    scenario.model = PowerOrder::expectile;
    auto [data, states] = generate_scenario(scenario, 407);
    for (int t = 0; t < 120; ++t) {
        csv << data.y(t, 0) << "," << data.y(t, 1) << "," << data.x(t, 1) << "\n";
    }
    write_text(file, csv.str());

    const std::string common = "--input_path " + file.string() +
                               " --response_columns y1,y2 --covariate_columns x1"
                               " --lag_covariates 0 --model expectile --K 2"
                               " --copula gaussian --n_starts 3 --tau 0.5";
    const fs::path out = dir / "fit";
    REQUIRE(run_cli("fit " + common + " --seed 5 --output_dir " + out.string()) == 0);
    REQUIRE(run_cli("bootstrap " + common + " --params_path " +
                    (out / "params.json").string() +
                    " --bootstrap_replications 4 --seed 99") == 0);
    const FitDocument doc = read_parameter_document((out / "params.json").string());
    REQUIRE(doc.se.has_value());
    CHECK(doc.se->n_replications == 4);
    CHECK(doc.se->se_beta[0].allFinite());
}

TEST_CASE("cli: five-response pipeline shape with lag-1 design") {
    // Same schema as the empirical study: five responses regressed on five
    // lagged market covariates, selection grid, tail and median fits.
    const fs::path dir = fresh_dir("cli_pipeline");
    const fs::path file = dir / "returns.csv";
    Rng rng(409);
    std::ostringstream csv;
    csv << "date,c1,c2,c3,c4,c5,m1,m2,m3,m4,m5\n";
    const int T = 320;
    double vol = 1.0;
    for (int t = 0; t < T; ++t) {
        if (rng.uniform() < 0.05) vol = (vol == 1.0) ? 3.0 : 1.0;
        csv << "d" << t;
        const double base = rng.normal();
        for (int j = 0; j < 5; ++j) {
            csv << "," << vol * (0.8 * base + 0.6 * rng.normal());
        }
        for (int j = 0; j < 5; ++j) csv << "," << rng.normal();
        csv << "\n";
    }
    write_text(file, csv.str());

    const std::string common =
        "--input_path " + file.string() +
        " --response_columns c1,c2,c3,c4,c5 --covariate_columns m1,m2,m3,m4,m5"
        " --lag_covariates 1 --model expectile --copula gaussian --n_starts 2"
        " --max_iter 200";

    REQUIRE(run_cli("stats " + common + " --output_dir " + (dir / "stats").string()) ==
            0);
    CHECK(fs::exists(dir / "stats" / "stats.csv"));
    CHECK(fs::exists(dir / "stats" / "response_correlations.csv"));

    REQUIRE(run_cli("select " + common + " --K_grid 1,2 --output_dir " +
                    (dir / "sel").string()) == 0);
    const SelectionTable table = read_criteria_csv((dir / "sel" / "criteria.csv").string());
    CHECK(table.cells.size() == 4);  // {1,2} x {gaussian, student_t}

    for (const std::string tau : {"0.05", "0.5", "0.95"}) {
        const fs::path out = dir / ("fit_" + tau);
        REQUIRE(run_cli("fit " + common + " --K 2 --tau " + tau + " --seed 31 " +
                        "--output_dir " + out.string()) == 0);
        const FitDocument doc = read_parameter_document((out / "params.json").string());
        CHECK(doc.params.n_states() == 2);
        CHECK(doc.params.copula[0].R.dim() == 5);  // state-specific correlations
        CHECK(doc.tau == std::vector<double>(5, std::stod(tau)));
    }

    // Tail fit document carries per-state correlation blocks for plotting.
    const FitDocument tail =
        read_parameter_document((dir / "fit_0.05" / "params.json").string());
    CHECK(tail.params.copula[1].R.matrix().diagonal().isOnes());
}

TEST_CASE("cli outputs are byte-identical across reruns") {
    const fs::path dir = fresh_dir("cli_det");
    const fs::path file = dir / "data.csv";
    std::ostringstream csv;
    csv << "y1,y2,x1\n";
    ScenarioConfig scenario;
    scenario.T = 130;
    auto [data, states] = generate_scenario(scenario, 411);
    for (int t = 0; t < 130; ++t) {
        csv << data.y(t, 0) << "," << data.y(t, 1) << "," << data.x(t, 1) << "\n";
    }
    write_text(file, csv.str());

    const std::string common = "--input_path " + file.string() +
                               " --response_columns y1,y2 --covariate_columns x1"
                               " --lag_covariates 0 --model quantile --K 2"
                               " --copula gaussian --n_starts 3 --tau 0.5 --seed 77";
    REQUIRE(run_cli("fit " + common + " --output_dir " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("fit " + common + " --output_dir " + (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "params.json") == slurp(dir / "b" / "params.json"));
    CHECK(slurp(dir / "a" / "posteriors.csv") == slurp(dir / "b" / "posteriors.csv"));
    CHECK(slurp(dir / "a" / "loglik_trace.csv") == slurp(dir / "b" / "loglik_trace.csv"));
}
