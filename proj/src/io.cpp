#include "chmm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "chmm/errors.hpp"

namespace chmm {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write file: " + path);
    out << content;
    if (!out) throw InvalidInput("write failed: " + path);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) fields.push_back(field);
    if (!line.empty() && line.back() == delim) fields.push_back("");
    return fields;
}

bool parse_number(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t' || *begin == '\r')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    if (begin == end) return false;
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

PowerOrder parse_order(const std::string& model) {
    if (model == "quantile") return PowerOrder::quantile;
    if (model == "expectile") return PowerOrder::expectile;
    throw InvalidInput("model must be 'quantile' or 'expectile', got '" + model + "'");
}

CopulaFamily parse_family(const std::string& copula) {
    if (copula == "gaussian") return CopulaFamily::gaussian;
    if (copula == "student_t") return CopulaFamily::student_t;
    throw InvalidInput("copula must be 'gaussian' or 'student_t', got '" + copula + "'");
}

std::string family_name(CopulaFamily f) {
    return f == CopulaFamily::gaussian ? "gaussian" : "student_t";
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& j) {
    const auto rows = j.size();
    if (rows == 0) throw InvalidInput("parameter document: empty matrix");
    const auto cols = j.at(0).size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j.at(i).size() != cols) throw InvalidInput("parameter document: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
    }
    return m;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const ordered_json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    ordered_json j = v;
    return j.dump();
}

ModelSpec RunConfig::to_model_spec(int d) const {
    ModelSpec spec;
    spec.order = parse_order(model);
    spec.n_states = K;
    spec.copula_family = parse_family(copula);
    if (static_cast<int>(tau.size()) == 1 && d > 1) {
        spec.tau.assign(d, TailIndex(tau[0]));
    } else {
        if (static_cast<int>(tau.size()) != d) {
            throw InvalidInput("config: tau length must be 1 or match the response count");
        }
        for (double t : tau) spec.tau.emplace_back(t);
    }
    spec.tol = tol;
    spec.max_iter = max_iter;
    spec.n_starts = n_starts;
    spec.seed = seed.value_or(0);
    return spec;
}

RunConfig load_config(const std::string& path) {
    ordered_json j = ordered_json::parse(read_file(path));
    RunConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("input_path", cfg.input_path);
    get("response_columns", cfg.response_columns);
    get("covariate_columns", cfg.covariate_columns);
    get("lag_covariates", cfg.lag_covariates);
    get("log_returns", cfg.log_returns);
    get("delimiter", cfg.delimiter);
    get("tau", cfg.tau);
    get("model", cfg.model);
    get("K", cfg.K);
    get("copula", cfg.copula);
    get("n_starts", cfg.n_starts);
    get("tol", cfg.tol);
    get("max_iter", cfg.max_iter);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    get("output_dir", cfg.output_dir);
    get("params_path", cfg.params_path);
    get("K_grid", cfg.K_grid);
    get("bootstrap_replications", cfg.bootstrap_replications);
    get("error_family", cfg.error_family);
    get("sim_T", cfg.sim_T);
    get("tau_levels", cfg.tau_levels);
    get("n_replications", cfg.n_replications);
    return cfg;
}

TimeSeriesDataset ingest(const RunConfig& config, IngestReport* report) {
    if (config.delimiter.size() != 1) {
        throw InvalidInput("ingest: delimiter must be a single character");
    }
    const char delim = config.delimiter[0];
    std::istringstream in(read_file(config.input_path));
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("ingest: empty input file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_line(line, delim);

    auto column_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        throw InvalidInput("ingest: column '" + name + "' not found in header");
    };
    if (config.response_columns.empty()) throw InvalidInput("ingest: no response columns");
    std::vector<int> resp_idx, cov_idx;
    for (const auto& n : config.response_columns) resp_idx.push_back(column_index(n));
    for (const auto& n : config.covariate_columns) cov_idx.push_back(column_index(n));

    std::vector<std::vector<double>> resp_rows, cov_rows;
    Eigen::Index rows_read = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line, delim);
        ++rows_read;
        auto fetch = [&](int idx) {
            if (idx >= static_cast<int>(fields.size())) {
                throw InvalidInput("ingest: short row at line " + std::to_string(line_no));
            }
            double v;
            if (!parse_number(fields[idx], v)) {
                throw InvalidInput("ingest: non-numeric cell '" + fields[idx] +
                                   "' in column '" + header[idx] + "' at line " +
                                   std::to_string(line_no));
            }
            return v;
        };
        std::vector<double> r, c;
        for (int idx : resp_idx) r.push_back(fetch(idx));
        for (int idx : cov_idx) c.push_back(fetch(idx));
        resp_rows.push_back(std::move(r));
        cov_rows.push_back(std::move(c));
    }

    // Optional percent log-return transform of every selected column.
    if (config.log_returns) {
        auto transform = [](std::vector<std::vector<double>>& rows) {
            for (std::size_t t = rows.size(); t-- > 1;) {
                for (std::size_t j = 0; j < rows[t].size(); ++j) {
                    if (!(rows[t][j] > 0.0) || !(rows[t - 1][j] > 0.0)) {
                        throw InvalidInput("ingest: log-returns need positive prices");
                    }
                    rows[t][j] = 100.0 * (std::log(rows[t][j]) - std::log(rows[t - 1][j]));
                }
            }
            rows.erase(rows.begin());
        };
        transform(resp_rows);
        transform(cov_rows);
    }

    const int lag = config.lag_covariates;
    if (lag < 0) throw InvalidInput("ingest: lag must be >= 0");
    const Eigen::Index total = static_cast<Eigen::Index>(resp_rows.size());
    if (total <= lag) throw InvalidInput("ingest: not enough rows after lagging");
    const Eigen::Index T = total - lag;
    const Eigen::Index d = static_cast<Eigen::Index>(resp_idx.size());
    const Eigen::Index q = static_cast<Eigen::Index>(cov_idx.size());

    TimeSeriesDataset data;
    data.y.resize(T, d);
    data.x.resize(T, q + 1);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index j = 0; j < d; ++j) data.y(t, j) = resp_rows[t + lag][j];
        data.x(t, 0) = 1.0;
        // Covariate row t holds the raw covariates from lag rows earlier.
        for (Eigen::Index j = 0; j < q; ++j) data.x(t, j + 1) = cov_rows[t][j];
    }
    data.response_names = config.response_columns;
    data.covariate_names.push_back("intercept");
    for (const auto& n : config.covariate_columns) data.covariate_names.push_back(n);

    const Eigen::Index required =
        static_cast<Eigen::Index>(config.K) * (data.x.cols() + 2);
    if (T < required) {
        throw InvalidInput("ingest: fewer than K*(p+2) usable rows");
    }
    if (report) {
        report->rows_read = rows_read;
        report->rows_dropped = rows_read - T;
    }
    return data;
}

namespace {

ColumnStats column_stats(const std::string& name, const Eigen::VectorXd& col) {
    ColumnStats s;
    s.name = name;
    const auto n = col.size();
    s.min = col.minCoeff();
    s.max = col.maxCoeff();
    s.mean = col.mean();
    const Eigen::ArrayXd centered = col.array() - s.mean;
    const double m2 = centered.square().sum() / n;
    s.sd = std::sqrt(m2 * n / std::max<Eigen::Index>(n - 1, 1));
    if (m2 <= 0.0) {
        s.skewness = 0.0;
        s.excess_kurtosis = 0.0;
        s.jarque_bera = std::numeric_limits<double>::quiet_NaN();
        s.jarque_bera_defined = false;
        return s;
    }
    const double m3 = centered.cube().sum() / n;
    const double m4 = centered.square().square().sum() / n;
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    s.jarque_bera = n / 6.0 *
                    (s.skewness * s.skewness +
                     0.25 * s.excess_kurtosis * s.excess_kurtosis);
    return s;
}

}  // namespace

DescriptiveStats descriptive_stats(const TimeSeriesDataset& data) {
    DescriptiveStats out;
    for (Eigen::Index j = 0; j < data.y.cols(); ++j) {
        out.columns.push_back(column_stats(data.response_names[j], data.y.col(j)));
    }
    // Skip the intercept column.
    for (Eigen::Index j = 1; j < data.x.cols(); ++j) {
        out.columns.push_back(column_stats(data.covariate_names[j], data.x.col(j)));
    }
    const auto d = data.y.cols();
    out.response_correlations = Eigen::MatrixXd::Identity(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = a + 1; b < d; ++b) {
            const Eigen::ArrayXd ca = data.y.col(a).array() - data.y.col(a).mean();
            const Eigen::ArrayXd cb = data.y.col(b).array() - data.y.col(b).mean();
            const double denom = std::sqrt(ca.square().sum() * cb.square().sum());
            const double r = (denom > 0.0) ? (ca * cb).sum() / denom : 0.0;
            out.response_correlations(a, b) = r;
            out.response_correlations(b, a) = r;
        }
    }
    out.response_names = data.response_names;
    return out;
}

ModelSpec FitDocument::to_model_spec() const {
    ModelSpec spec;
    spec.order = parse_order(model);
    spec.n_states = params.n_states();
    spec.copula_family = parse_family(copula);
    for (double t : tau) spec.tau.emplace_back(t);
    spec.tol = tol;
    spec.max_iter = max_iter;
    spec.n_starts = n_starts;
    spec.seed = seed;
    return spec;
}

FitDocument FitDocument::from_fit(const ModelSpec& spec, const TimeSeriesDataset& data,
                                  const FitResult& result,
                                  const InformationCriteria& ic) {
    FitDocument doc;
    doc.model = (spec.order == PowerOrder::quantile) ? "quantile" : "expectile";
    doc.copula = family_name(spec.copula_family);
    for (const auto& t : spec.tau) doc.tau.push_back(t.value());
    doc.tol = spec.tol;
    doc.max_iter = spec.max_iter;
    doc.n_starts = spec.n_starts;
    doc.seed = spec.seed;
    doc.response_names = data.response_names;
    doc.covariate_names = data.covariate_names;
    doc.params = result.params;
    doc.loglik = result.posteriors.loglik;
    doc.converged = result.converged;
    doc.n_iter = result.n_iter;
    doc.start_index = result.start_index;
    doc.criteria = ic;
    doc.version = kVersion;
    return doc;
}

std::string serialize_parameter_document(const FitDocument& doc) {
    const int K = doc.params.n_states();
    ordered_json j;
    j["model"] = doc.model;
    j["copula"] = doc.copula;
    j["K"] = K;
    j["tau"] = doc.tau;
    j["tol"] = doc.tol;
    j["max_iter"] = doc.max_iter;
    j["n_starts"] = doc.n_starts;
    j["responses"] = doc.response_names;
    j["covariates"] = doc.covariate_names;
    j["pi"] = vector_to_json(doc.params.pi);
    j["Pi"] = matrix_to_json(doc.params.Pi);
    // beta nests state -> margin -> coefficient.
    ordered_json beta = ordered_json::array();
    for (int k = 0; k < K; ++k) {
        ordered_json per_margin = ordered_json::array();
        for (Eigen::Index m = 0; m < doc.params.beta[k].cols(); ++m) {
            per_margin.push_back(vector_to_json(doc.params.beta[k].col(m)));
        }
        beta.push_back(std::move(per_margin));
    }
    j["beta"] = std::move(beta);
    j["sigma"] = matrix_to_json(doc.params.sigma);
    ordered_json cop = ordered_json::array();
    for (int k = 0; k < K; ++k) {
        ordered_json c;
        c["R"] = matrix_to_json(doc.params.copula[k].R.matrix());
        if (doc.params.copula[k].family == CopulaFamily::student_t) {
            c["nu"] = doc.params.copula[k].nu;
        }
        cop.push_back(std::move(c));
    }
    j["copula_params"] = std::move(cop);
    j["loglik"] = doc.loglik;
    j["converged"] = doc.converged;
    j["n_iter"] = doc.n_iter;
    j["start_index"] = doc.start_index;
    j["criteria"] = {{"aic", doc.criteria.aic},
                     {"bic", doc.criteria.bic},
                     {"icl", doc.criteria.icl},
                     {"n_params", doc.criteria.n_params},
                     {"loglik", doc.criteria.loglik},
                     {"T", doc.criteria.n_obs}};
    if (doc.se) {
        const BootstrapReport& se = *doc.se;
        ordered_json s;
        s["replications"] = se.n_replications;
        s["failed"] = se.n_failed;
        s["reliable"] = se.reliable;
        s["pi"] = vector_to_json(se.se_pi);
        s["Pi"] = matrix_to_json(se.se_Pi);
        ordered_json sbeta = ordered_json::array();
        for (int k = 0; k < K; ++k) {
            ordered_json per_margin = ordered_json::array();
            for (Eigen::Index m = 0; m < se.se_beta[k].cols(); ++m) {
                per_margin.push_back(vector_to_json(se.se_beta[k].col(m)));
            }
            sbeta.push_back(std::move(per_margin));
        }
        s["beta"] = std::move(sbeta);
        s["sigma"] = matrix_to_json(se.se_sigma);
        ordered_json sr = ordered_json::array();
        for (int k = 0; k < K; ++k) sr.push_back(matrix_to_json(se.se_R[k]));
        s["R"] = std::move(sr);
        s["nu"] = vector_to_json(se.se_nu);
        j["se"] = std::move(s);
    }
    j["provenance"] = {{"seed", doc.seed}, {"version", doc.version}};
    return j.dump(2) + "\n";
}

FitDocument parse_parameter_document(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    FitDocument doc;
    doc.model = j.at("model").get<std::string>();
    doc.copula = j.at("copula").get<std::string>();
    doc.tau = j.at("tau").get<std::vector<double>>();
    doc.tol = j.at("tol").get<double>();
    doc.max_iter = j.at("max_iter").get<int>();
    doc.n_starts = j.at("n_starts").get<int>();
    doc.response_names = j.at("responses").get<std::vector<std::string>>();
    doc.covariate_names = j.at("covariates").get<std::vector<std::string>>();

    const int K = j.at("K").get<int>();
    doc.params.pi = vector_from_json(j.at("pi"));
    doc.params.Pi = matrix_from_json(j.at("Pi"));
    const auto& beta = j.at("beta");
    for (int k = 0; k < K; ++k) {
        const auto& per_margin = beta.at(k);
        const auto d = per_margin.size();
        const auto p = per_margin.at(0).size();
        Eigen::MatrixXd bk(p, d);
        for (std::size_t m = 0; m < d; ++m) bk.col(m) = vector_from_json(per_margin.at(m));
        doc.params.beta.push_back(std::move(bk));
    }
    doc.params.sigma = matrix_from_json(j.at("sigma"));
    const CopulaFamily fam = parse_family(doc.copula);
    for (int k = 0; k < K; ++k) {
        const auto& c = j.at("copula_params").at(k);
        CorrelationMatrix R(matrix_from_json(c.at("R")));
        if (fam == CopulaFamily::student_t) {
            doc.params.copula.push_back(
                CopulaParams::make_student_t(std::move(R), c.at("nu").get<double>()));
        } else {
            doc.params.copula.push_back(CopulaParams::make_gaussian(std::move(R)));
        }
    }
    doc.loglik = j.at("loglik").get<double>();
    doc.converged = j.at("converged").get<bool>();
    doc.n_iter = j.at("n_iter").get<int>();
    doc.start_index = j.at("start_index").get<int>();
    doc.criteria.aic = j.at("criteria").at("aic").get<double>();
    doc.criteria.bic = j.at("criteria").at("bic").get<double>();
    doc.criteria.icl = j.at("criteria").at("icl").get<double>();
    doc.criteria.n_params = j.at("criteria").at("n_params").get<int>();
    doc.criteria.loglik = j.at("criteria").at("loglik").get<double>();
    doc.criteria.n_obs = j.at("criteria").at("T").get<int>();
    if (j.contains("se")) {
        const auto& s = j.at("se");
        BootstrapReport se;
        se.n_replications = s.at("replications").get<int>();
        se.n_failed = s.at("failed").get<int>();
        se.reliable = s.at("reliable").get<bool>();
        se.se_pi = vector_from_json(s.at("pi"));
        se.se_Pi = matrix_from_json(s.at("Pi"));
        for (int k = 0; k < K; ++k) {
            const auto& per_margin = s.at("beta").at(k);
            const auto d = per_margin.size();
            const auto p = per_margin.at(0).size();
            Eigen::MatrixXd bk(p, d);
            for (std::size_t m = 0; m < d; ++m) {
                bk.col(m) = vector_from_json(per_margin.at(m));
            }
            se.se_beta.push_back(std::move(bk));
        }
        se.se_sigma = matrix_from_json(s.at("sigma"));
        for (int k = 0; k < K; ++k) se.se_R.push_back(matrix_from_json(s.at("R").at(k)));
        se.se_nu = vector_from_json(s.at("nu"));
        doc.se = std::move(se);
    }
    doc.seed = j.at("provenance").at("seed").get<std::uint64_t>();
    doc.version = j.at("provenance").at("version").get<std::string>();
    return doc;
}

void write_parameter_document(const std::string& path, const FitDocument& doc) {
    write_file(path, serialize_parameter_document(doc));
}

FitDocument read_parameter_document(const std::string& path) {
    return parse_parameter_document(read_file(path));
}

void write_posteriors_csv(const std::string& path, const Posteriors& post,
                          const std::vector<int>& decoded) {
    std::ostringstream out;
    out << "t";
    for (Eigen::Index k = 0; k < post.gamma.cols(); ++k) out << ",gamma" << (k + 1);
    out << ",state\n";
    for (Eigen::Index t = 0; t < post.gamma.rows(); ++t) {
        out << (t + 1);
        for (Eigen::Index k = 0; k < post.gamma.cols(); ++k) {
            out << "," << format_double(post.gamma(t, k));
        }
        out << "," << decoded[t] << "\n";
    }
    write_file(path, out.str());
}

void write_loglik_trace_csv(const std::string& path, const std::vector<double>& trace) {
    std::ostringstream out;
    out << "iteration,loglik\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << (i + 1) << "," << format_double(trace[i]) << "\n";
    }
    write_file(path, out.str());
}

void write_criteria_csv(const std::string& path, const SelectionTable& table) {
    std::ostringstream out;
    out << "model_index,K,copula,ok,loglik,n_params,aic,bic,icl,aic_best,bic_best,icl_"
           "best,error\n";
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        const SelectionCell& c = table.cells[i];
        out << i << "," << c.n_states << "," << family_name(c.family) << ","
            << (c.ok ? 1 : 0) << ",";
        if (c.ok) {
            out << format_double(c.criteria.loglik) << "," << c.criteria.n_params << ","
                << format_double(c.criteria.aic) << "," << format_double(c.criteria.bic)
                << "," << format_double(c.criteria.icl);
        } else {
            out << "NA,NA,NA,NA,NA";
        }
        out << "," << (static_cast<int>(i) == table.best_aic ? 1 : 0) << ","
            << (static_cast<int>(i) == table.best_bic ? 1 : 0) << ","
            << (static_cast<int>(i) == table.best_icl ? 1 : 0) << ",";
        std::string err = c.error;
        for (char& ch : err) {
            if (ch == ',' || ch == '\n') ch = ';';
        }
        out << err << "\n";
    }
    write_file(path, out.str());
}

SelectionTable read_criteria_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("criteria csv: empty");
    SelectionTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_line(line, ',');
        if (f.size() < 13) throw InvalidInput("criteria csv: short row");
        SelectionCell c;
        c.n_states = std::stoi(f[1]);
        c.family = parse_family(f[2]);
        c.ok = f[3] == "1";
        if (c.ok) {
            double v;
            parse_number(f[4], v);
            c.criteria.loglik = v;
            c.criteria.n_params = std::stoi(f[5]);
            parse_number(f[6], v);
            c.criteria.aic = v;
            parse_number(f[7], v);
            c.criteria.bic = v;
            parse_number(f[8], v);
            c.criteria.icl = v;
        }
        const int i = static_cast<int>(table.cells.size());
        if (f[9] == "1") table.best_aic = i;
        if (f[10] == "1") table.best_bic = i;
        if (f[11] == "1") table.best_icl = i;
        c.error = f[12];
        table.cells.push_back(std::move(c));
    }
    return table;
}

void write_bias_table_csv(const std::string& path, const MonteCarloResult& mc) {
    std::ostringstream out;
    out << "tau,state,margin,coef,true_value,mean_bias,sd\n";
    for (const auto& r : mc.bias) {
        out << format_double(r.tau) << "," << r.state << "," << r.margin << "," << r.coef
            << "," << format_double(r.true_value) << "," << format_double(r.mean_bias)
            << "," << format_double(r.sd) << "\n";
    }
    write_file(path, out.str());
}

void write_ari_csv(const std::string& path, const MonteCarloResult& mc) {
    std::ostringstream out;
    out << "tau,replication,ari\n";
    for (const auto& r : mc.ari) {
        out << format_double(r.tau) << "," << r.replication << "," << format_double(r.ari)
            << "\n";
    }
    write_file(path, out.str());
}

void write_stats_csv(const std::string& path, const DescriptiveStats& stats) {
    std::ostringstream out;
    out << "column,min,mean,max,sd,skewness,excess_kurtosis,jarque_bera\n";
    for (const auto& c : stats.columns) {
        out << c.name << "," << format_double(c.min) << "," << format_double(c.mean)
            << "," << format_double(c.max) << "," << format_double(c.sd) << ","
            << format_double(c.jarque_bera_defined ? c.skewness
                                                   : std::numeric_limits<double>::quiet_NaN())
            << ","
            << format_double(c.jarque_bera_defined
                                 ? c.excess_kurtosis
                                 : std::numeric_limits<double>::quiet_NaN())
            << "," << format_double(c.jarque_bera) << "\n";
    }
    write_file(path, out.str());
}

void write_correlations_csv(const std::string& path, const DescriptiveStats& stats) {
    std::ostringstream out;
    out << "response";
    for (const auto& n : stats.response_names) out << "," << n;
    out << "\n";
    for (Eigen::Index i = 0; i < stats.response_correlations.rows(); ++i) {
        out << stats.response_names[i];
        for (Eigen::Index j = 0; j < stats.response_correlations.cols(); ++j) {
            out << "," << format_double(stats.response_correlations(i, j));
        }
        out << "\n";
    }
    write_file(path, out.str());
}

}  // namespace chmm
