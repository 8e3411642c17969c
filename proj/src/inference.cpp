#include "chmm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chmm/errors.hpp"
#include "chmm/parallel.hpp"

namespace chmm {

int count_params(const ModelSpec& spec, int d, int p) {
    const int K = spec.n_states;
    const int per_state = d * p + d + d * (d - 1) / 2 +
                          (spec.copula_family == CopulaFamily::student_t ? 1 : 0);
    return K * per_state + (K - 1) + K * (K - 1);
}

InformationCriteria information_criteria(double loglik, const ModelSpec& spec,
                                         const Posteriors& post, int p) {
    InformationCriteria ic;
    ic.loglik = loglik;
    ic.n_obs = static_cast<int>(post.gamma.rows());
    ic.n_params = count_params(spec, spec.dim(), p);
    ic.aic = -2.0 * loglik + 2.0 * ic.n_params;
    ic.bic = -2.0 * loglik + ic.n_params * std::log(static_cast<double>(ic.n_obs));
    double entropy = 0.0;
    for (Eigen::Index t = 0; t < post.gamma.rows(); ++t) {
        for (Eigen::Index k = 0; k < post.gamma.cols(); ++k) {
            const double g = post.gamma(t, k);
            if (g > 0.0) entropy -= g * std::log(g);
        }
    }
    ic.icl = ic.bic + 2.0 * entropy;
    return ic;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw InvalidInput("adjusted_rand_index: length mismatch");
    const std::size_t n = a.size();
    if (n < 2) throw InvalidInput("adjusted_rand_index: need at least two items");

    auto relabel = [](const std::vector<int>& v) {
        std::vector<int> sorted(v);
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<int> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            out[i] = static_cast<int>(
                std::lower_bound(sorted.begin(), sorted.end(), v[i]) - sorted.begin());
        }
        return std::make_pair(out, static_cast<int>(sorted.size()));
    };
    auto [la, ka] = relabel(a);
    auto [lb, kb] = relabel(b);

    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(ka, kb);
    for (std::size_t i = 0; i < n; ++i) table(la[i], lb[i]) += 1.0;

    auto comb2 = [](double m) { return 0.5 * m * (m - 1.0); };
    double sum_cells = 0.0;
    for (int i = 0; i < ka; ++i) {
        for (int j = 0; j < kb; ++j) sum_cells += comb2(table(i, j));
    }
    double sum_rows = 0.0;
    for (int i = 0; i < ka; ++i) sum_rows += comb2(table.row(i).sum());
    double sum_cols = 0.0;
    for (int j = 0; j < kb; ++j) sum_cols += comb2(table.col(j).sum());
    const double total = comb2(static_cast<double>(n));

    const double expected = sum_rows * sum_cols / total;
    const double maximum = 0.5 * (sum_rows + sum_cols);
    if (maximum == expected) return 1.0;  // both partitions trivial
    return (sum_cells - expected) / (maximum - expected);
}

std::vector<int> align_states_by_scale(const Eigen::MatrixXd& sigma_ref,
                                       const Eigen::MatrixXd& sigma_rep) {
    const int K = static_cast<int>(sigma_ref.rows());
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int k = 0; k < K; ++k) {
            cost += (sigma_rep.row(perm[k]) - sigma_ref.row(k)).norm();
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

std::vector<int> align_states_by_parameters(const HMMParameters& ref,
                                            const HMMParameters& rep) {
    const int K = ref.n_states();
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int k = 0; k < K; ++k) {
            cost += (rep.sigma.row(perm[k]) - ref.sigma.row(k)).norm();
            cost += (rep.beta[perm[k]] - ref.beta[k]).norm();
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

HMMParameters permute_states(const HMMParameters& params, const std::vector<int>& perm) {
    const int K = params.n_states();
    HMMParameters out = params;
    for (int k = 0; k < K; ++k) {
        out.pi(k) = params.pi(perm[k]);
        out.beta[k] = params.beta[perm[k]];
        out.sigma.row(k) = params.sigma.row(perm[k]);
        out.copula[k] = params.copula[perm[k]];
        for (int j = 0; j < K; ++j) {
            out.Pi(k, j) = params.Pi(perm[k], perm[j]);
        }
    }
    return out;
}

BootstrapReport bootstrap_se(const FitResult& fit_result, const TimeSeriesDataset& data,
                             const ModelSpec& spec, int n_replications, Rng& rng,
                             int n_threads) {
    if (n_replications < 2) throw InvalidInput("bootstrap_se: need at least 2 replicates");
    const int K = fit_result.params.n_states();
    const auto p = data.n_covariates();
    const auto d = data.n_responses();

    const std::uint64_t base_seed = rng.raw();

    ModelSpec refit_spec = spec;
    refit_spec.n_starts = 5;

    struct Replicate {
        bool ok = false;
        HMMParameters params;
        std::vector<int> perm;
    };
    std::vector<Replicate> reps(n_replications);

    detail::parallel_for_index(n_replications, n_threads, [&](int r) {
        try {
            Rng sim_rng(base_seed + static_cast<std::uint64_t>(r));
            TimeSeriesDataset boot = data;
            boot.y = simulate_from_model(fit_result.params, spec, data.x, sim_rng);
            ModelSpec rep_spec = refit_spec;
            rep_spec.seed = base_seed + 1000003ULL * static_cast<std::uint64_t>(r + 1);
            FitResult refit = fit(boot, rep_spec);
            if (!refit.converged) return;  // dropped, counted below
            reps[r].perm = align_states_by_parameters(fit_result.params, refit.params);
            reps[r].params = permute_states(refit.params, reps[r].perm);
            reps[r].ok = true;
        } catch (const std::exception&) {
            reps[r].ok = false;
        }
    });

    BootstrapReport report;
    report.n_replications = n_replications;
    for (const auto& rep : reps) {
        if (!rep.ok) ++report.n_failed;
    }
    report.reliable = report.n_failed < n_replications / 2;

    // Per-parameter standard deviations across the successful replicates.
    const int ok_count = n_replications - report.n_failed;
    if (ok_count < 2) {
        throw DegenerateInput("bootstrap_se: fewer than two replicates converged");
    }

    auto sd = [ok_count](double sum, double sumsq) {
        const double mean = sum / ok_count;
        const double var = std::max(0.0, (sumsq - ok_count * mean * mean) / (ok_count - 1));
        return std::sqrt(var);
    };

    report.se_pi = Eigen::VectorXd::Zero(K);
    report.se_Pi = Eigen::MatrixXd::Zero(K, K);
    report.se_sigma = Eigen::MatrixXd::Zero(K, d);
    report.se_nu = Eigen::VectorXd::Zero(K);
    report.se_beta.assign(K, Eigen::MatrixXd::Zero(p, d));
    report.se_R.assign(K, Eigen::MatrixXd::Zero(d, d));

    auto accumulate = [&](auto getter, auto setter) {
        double sum = 0.0, sumsq = 0.0;
        for (const auto& rep : reps) {
            if (!rep.ok) continue;
            const double v = getter(rep.params);
            sum += v;
            sumsq += v * v;
        }
        setter(sd(sum, sumsq));
    };

    for (int k = 0; k < K; ++k) {
        accumulate([&](const HMMParameters& th) { return th.pi(k); },
                   [&](double v) { report.se_pi(k) = v; });
        for (int j = 0; j < K; ++j) {
            accumulate([&](const HMMParameters& th) { return th.Pi(k, j); },
                       [&](double v) { report.se_Pi(k, j) = v; });
        }
        for (Eigen::Index c = 0; c < p; ++c) {
            for (Eigen::Index j = 0; j < d; ++j) {
                accumulate([&](const HMMParameters& th) { return th.beta[k](c, j); },
                           [&](double v) { report.se_beta[k](c, j) = v; });
            }
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            accumulate([&](const HMMParameters& th) { return th.sigma(k, j); },
                       [&](double v) { report.se_sigma(k, j) = v; });
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                accumulate([&](const HMMParameters& th) { return th.copula[k].R.matrix()(i, j); },
                           [&](double v) { report.se_R[k](i, j) = v; });
            }
        }
        if (spec.copula_family == CopulaFamily::student_t) {
            accumulate([&](const HMMParameters& th) { return th.copula[k].nu; },
                       [&](double v) { report.se_nu(k) = v; });
        }
    }
    for (const auto& rep : reps) {
        if (rep.ok) report.alignments.push_back(rep.perm);
    }
    return report;
}

SelectionTable select_model(const TimeSeriesDataset& data, const std::vector<int>& K_grid,
                            const std::vector<CopulaFamily>& family_grid,
                            const ModelSpec& spec_template, int n_threads) {
    SelectionTable table;
    for (int K : K_grid) {
        for (CopulaFamily fam : family_grid) {
            SelectionCell cell;
            cell.n_states = K;
            cell.family = fam;
            table.cells.push_back(cell);
        }
    }

    detail::parallel_for_index(
        static_cast<int>(table.cells.size()), n_threads, [&](int i) {
            SelectionCell& cell = table.cells[i];
            try {
                ModelSpec spec = spec_template;
                spec.n_states = cell.n_states;
                spec.copula_family = cell.family;
                spec.tau.assign(data.n_responses(), TailIndex(0.5));
                const FitResult res = fit(data, spec);
                cell.criteria = information_criteria(
                    res.posteriors.loglik, spec, res.posteriors,
                    static_cast<int>(data.n_covariates()));
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
        });

    auto pick = [&](auto key) {
        int best = -1;
        for (int i = 0; i < static_cast<int>(table.cells.size()); ++i) {
            if (!table.cells[i].ok) continue;
            if (best < 0 || key(table.cells[i].criteria) < key(table.cells[best].criteria)) {
                best = i;
            }
        }
        return best;
    };
    table.best_aic = pick([](const InformationCriteria& ic) { return ic.aic; });
    table.best_bic = pick([](const InformationCriteria& ic) { return ic.bic; });
    table.best_icl = pick([](const InformationCriteria& ic) { return ic.icl; });
    return table;
}

}  // namespace chmm
