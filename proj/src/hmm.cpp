#include "chmm/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "chmm/errors.hpp"
#include "chmm/regression.hpp"
#include "chmm/special_functions.hpp"

namespace chmm {

namespace {

constexpr double kSigmaFloor = 1e-10;
constexpr double kInitialNu = 5.0;

double marginal_logpdf(double y, const LocationScale& p, TailIndex tau, PowerOrder l) {
    return (l == PowerOrder::quantile) ? al_logpdf(y, p, tau) : an_logpdf(y, p, tau);
}

double marginal_cdf(double y, const LocationScale& p, TailIndex tau, PowerOrder l) {
    return (l == PowerOrder::quantile) ? al_cdf(y, p, tau) : an_cdf(y, p, tau);
}

double marginal_quantile(double q, const LocationScale& p, TailIndex tau, PowerOrder l) {
    return (l == PowerOrder::quantile) ? al_quantile(q, p, tau) : an_quantile(q, p, tau);
}

// Pseudo-observations of state k at the given margins, clamped inside (0,1).
Eigen::MatrixXd pseudo_observations(const TimeSeriesDataset& data, const ModelSpec& spec,
                                    const Eigen::MatrixXd& beta_k,
                                    const Eigen::VectorXd& sigma_k) {
    const auto T = data.n_obs();
    const auto d = data.n_responses();
    Eigen::MatrixXd U(T, d);
    const Eigen::MatrixXd mu = data.x * beta_k;  // T x d
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const LocationScale ls(mu(t, j), sigma_k(j));
            U(t, j) = clamp_pseudo_observation(
                marginal_cdf(data.y(t, j), ls, spec.tau[j], spec.order));
        }
    }
    return U;
}

}  // namespace

void ModelSpec::validate() const {
    if (n_states < 1) throw InvalidInput("ModelSpec: K must be >= 1");
    if (tau.empty()) throw InvalidInput("ModelSpec: tau vector is empty");
    if (!(tol > 0.0)) throw InvalidInput("ModelSpec: tol must be positive");
    if (max_iter < 1) throw InvalidInput("ModelSpec: max_iter must be >= 1");
    if (n_starts < 1) throw InvalidInput("ModelSpec: n_starts must be >= 1");
}

void TimeSeriesDataset::validate(int n_states) const {
    if (y.rows() != x.rows()) throw InvalidInput("dataset: y and x row counts differ");
    if (y.rows() == 0) throw InvalidInput("dataset: empty");
    if (!y.allFinite() || !x.allFinite()) throw InvalidInput("dataset: missing values");
    if ((x.col(0).array() != 1.0).any()) {
        throw InvalidInput("dataset: first design column must be the intercept");
    }
    if (y.rows() <= static_cast<Eigen::Index>(n_states) * x.cols()) {
        throw InvalidInput("dataset: need T > K*p observations");
    }
}

void HMMParameters::validate() const {
    const int K = n_states();
    if (K < 1) throw InvalidInput("HMMParameters: empty pi");
    if (Pi.rows() != K || Pi.cols() != K) throw InvalidInput("HMMParameters: Pi shape");
    if (std::abs(pi.sum() - 1.0) > 1e-8 || (pi.array() < -1e-12).any()) {
        throw InvalidInput("HMMParameters: pi must be a probability vector");
    }
    for (int j = 0; j < K; ++j) {
        if (std::abs(Pi.row(j).sum() - 1.0) > 1e-8 || (Pi.row(j).array() < -1e-12).any()) {
            throw InvalidInput("HMMParameters: Pi rows must be probability vectors");
        }
    }
    if (static_cast<int>(beta.size()) != K || static_cast<int>(copula.size()) != K) {
        throw InvalidInput("HMMParameters: per-state block count mismatch");
    }
    if (sigma.rows() != K || (sigma.array() <= 0.0).any()) {
        throw InvalidInput("HMMParameters: sigma must be positive");
    }
}

double state_logdensity(Eigen::Index t, int k, const HMMParameters& params,
                        const TimeSeriesDataset& data, const ModelSpec& spec) {
    const auto d = data.n_responses();
    const Eigen::VectorXd mu = (data.x.row(t) * params.beta[k]).transpose();
    double total = 0.0;
    Eigen::VectorXd u(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const LocationScale ls(mu(j), params.sigma(k, j));
        total += marginal_logpdf(data.y(t, j), ls, spec.tau[j], spec.order);
        u(j) = clamp_pseudo_observation(
            marginal_cdf(data.y(t, j), ls, spec.tau[j], spec.order));
    }
    return total + copula_logdensity(u, params.copula[k]);
}

Eigen::MatrixXd log_density_matrix(const HMMParameters& params,
                                   const TimeSeriesDataset& data,
                                   const ModelSpec& spec) {
    const auto T = data.n_obs();
    const int K = params.n_states();
    Eigen::MatrixXd logdens(T, K);
    for (int k = 0; k < K; ++k) {
        const Eigen::MatrixXd mu = data.x * params.beta[k];
        Eigen::MatrixXd U(T, data.n_responses());
        Eigen::VectorXd marg = Eigen::VectorXd::Zero(T);
        for (Eigen::Index t = 0; t < T; ++t) {
            for (Eigen::Index j = 0; j < data.n_responses(); ++j) {
                const LocationScale ls(mu(t, j), params.sigma(k, j));
                marg(t) += marginal_logpdf(data.y(t, j), ls, spec.tau[j], spec.order);
                U(t, j) = clamp_pseudo_observation(
                    marginal_cdf(data.y(t, j), ls, spec.tau[j], spec.order));
            }
        }
        const auto& cop = params.copula[k];
        const Eigen::VectorXd cop_term =
            (cop.family == CopulaFamily::gaussian)
                ? gaussian_copula_logdensity(U, cop.R)
                : t_copula_logdensity(U, cop.R, cop.nu);
        logdens.col(k) = marg + cop_term;
    }
    return logdens;
}

Posteriors forward_backward(const Eigen::MatrixXd& logdens, const Eigen::VectorXd& pi,
                            const Eigen::MatrixXd& Pi) {
    const auto T = logdens.rows();
    const int K = static_cast<int>(logdens.cols());
    if (pi.size() != K || Pi.rows() != K || Pi.cols() != K) {
        throw InvalidInput("forward_backward: dimension mismatch");
    }
    if (!logdens.allFinite()) {
        throw InvalidInput("forward_backward: non-finite log densities");
    }

    // Per-row shift keeps the scaled densities in [exp(-huge), 1].
    Eigen::VectorXd shift(T);
    Eigen::MatrixXd b(T, K);
    for (Eigen::Index t = 0; t < T; ++t) {
        shift(t) = logdens.row(t).maxCoeff();
        b.row(t) = (logdens.row(t).array() - shift(t)).exp();
    }

    Eigen::MatrixXd alpha(T, K);  // normalized forward probabilities
    Eigen::VectorXd c(T);         // per-step normalizers
    alpha.row(0) = (pi.array() * b.row(0).transpose().array()).transpose();
    c(0) = alpha.row(0).sum();
    if (!(c(0) > 0.0)) throw DegenerateInput("forward_backward: zero forward mass");
    alpha.row(0) /= c(0);
    for (Eigen::Index t = 1; t < T; ++t) {
        alpha.row(t) =
            (alpha.row(t - 1) * Pi).cwiseProduct(b.row(t));
        c(t) = alpha.row(t).sum();
        if (!(c(t) > 0.0)) throw DegenerateInput("forward_backward: zero forward mass");
        alpha.row(t) /= c(t);
    }

    Eigen::MatrixXd betab = Eigen::MatrixXd::Zero(T, K);  // scaled backward
    betab.row(T - 1).setOnes();
    for (Eigen::Index t = T - 2; t >= 0; --t) {
        betab.row(t) =
            (Pi * (b.row(t + 1).cwiseProduct(betab.row(t + 1))).transpose()).transpose() /
            c(t + 1);
    }

    Posteriors post;
    post.loglik = c.array().log().sum() + shift.sum();
    post.gamma = alpha.cwiseProduct(betab);
    for (Eigen::Index t = 0; t < T; ++t) {
        const double s = post.gamma.row(t).sum();
        post.gamma.row(t) /= s;
    }
    post.xi.reserve(T > 0 ? T - 1 : 0);
    for (Eigen::Index t = 0; t + 1 < T; ++t) {
        Eigen::MatrixXd slice(K, K);
        for (int j = 0; j < K; ++j) {
            for (int k = 0; k < K; ++k) {
                slice(j, k) =
                    alpha(t, j) * Pi(j, k) * b(t + 1, k) * betab(t + 1, k) / c(t + 1);
            }
        }
        slice /= slice.sum();
        post.xi.push_back(std::move(slice));
    }
    return post;
}

Posteriors e_step(const TimeSeriesDataset& data, const ModelSpec& spec,
                  const HMMParameters& params) {
    return forward_backward(log_density_matrix(params, data, spec), params.pi, params.Pi);
}

namespace {

// Margin update for one (state, margin) cell: weighted quantile/expectile fit
// plus the matching scale formula.
std::pair<Eigen::VectorXd, double> fit_margin(const TimeSeriesDataset& data,
                                              const ModelSpec& spec, Eigen::Index j,
                                              const Eigen::VectorXd& w) {
    WeightedRegressionProblem prob{data.x, data.y.col(j), w, spec.tau[j], spec.order};
    const RegressionFit rf = (spec.order == PowerOrder::quantile)
                                 ? weighted_quantile_fit(prob)
                                 : weighted_expectile_fit(prob);
    const Eigen::VectorXd r = data.y.col(j) - data.x * rf.beta;
    const double wsum = w.sum();
    double sigma;
    if (spec.order == PowerOrder::quantile) {
        double acc = 0.0;
        for (Eigen::Index t = 0; t < r.size(); ++t) {
            acc += w(t) * asymmetric_loss(r(t), PowerOrder::quantile, spec.tau[j]);
        }
        sigma = acc / wsum;
    } else {
        double acc = 0.0;
        for (Eigen::Index t = 0; t < r.size(); ++t) {
            acc += w(t) * asymmetric_loss(r(t), PowerOrder::expectile, spec.tau[j]);
        }
        sigma = std::sqrt(2.0 * acc / wsum);
    }
    return {rf.beta, std::max(sigma, kSigmaFloor)};
}

double weighted_copula_loglik(const Eigen::MatrixXd& U, const Eigen::VectorXd& w,
                              const CopulaParams& params) {
    const Eigen::VectorXd terms =
        (params.family == CopulaFamily::gaussian)
            ? gaussian_copula_logdensity(U, params.R)
            : t_copula_logdensity(U, params.R, params.nu);
    return w.dot(terms);
}

CopulaParams fit_copula_weighted(const Eigen::MatrixXd& U, const Eigen::VectorXd& w,
                                 const ModelSpec& spec, const CopulaParams& incumbent) {
    CopulaParams candidate = [&] {
        if (spec.copula_family == CopulaFamily::gaussian) {
            return CopulaParams::make_gaussian(fit_gaussian_weighted(U, w));
        }
        const double nu_current =
            (incumbent.family == CopulaFamily::student_t) ? incumbent.nu : kInitialNu;
        CorrelationMatrix R = fit_t_weighted(U, w, nu_current);
        const NuEstimate nu = profile_nu(U, w, R);
        return CopulaParams::make_student_t(std::move(R), nu.value);
    }();
    // Generalized-EM safeguard: the unit-diagonal rescale makes the scale
    // update approximate, so never trade the incumbent for a candidate that
    // scores worse on the same pseudo-observations.
    if (incumbent.family == spec.copula_family &&
        weighted_copula_loglik(U, w, candidate) <
            weighted_copula_loglik(U, w, incumbent)) {
        return incumbent;
    }
    return candidate;
}

}  // namespace

HMMParameters m_step(const TimeSeriesDataset& data, const ModelSpec& spec,
                     const Posteriors& post, const HMMParameters& current) {
    const int K = current.n_states();
    const auto p = data.n_covariates();
    const auto d = data.n_responses();

    HMMParameters next = current;
    next.pi = post.gamma.row(0).transpose();

    if (K > 1) {
        Eigen::MatrixXd xi_sum = Eigen::MatrixXd::Zero(K, K);
        for (const auto& slice : post.xi) xi_sum += slice;
        for (int j = 0; j < K; ++j) {
            const double denom = xi_sum.row(j).sum();
            if (denom > 0.0) {
                next.Pi.row(j) = xi_sum.row(j) / denom;
            }
        }
    } else {
        next.Pi = Eigen::MatrixXd::Ones(1, 1);
    }

    for (int k = 0; k < K; ++k) {
        const Eigen::VectorXd w = post.gamma.col(k);
        if (w.sum() < static_cast<double>(p) + 1.0) {
            std::ostringstream msg;
            msg << "m_step: state " << (k + 1) << " collapsed (effective weight "
                << w.sum() << " < p+1)";
            throw DegenerateInput(msg.str());
        }
        Eigen::MatrixXd beta_k(p, d);
        Eigen::VectorXd sigma_k(d);
        for (Eigen::Index j = 0; j < d; ++j) {
            auto [bj, sj] = fit_margin(data, spec, j, w);
            beta_k.col(j) = bj;
            sigma_k(j) = sj;
        }
        next.beta[k] = beta_k;
        next.sigma.row(k) = sigma_k.transpose();

        // IFM order: margins first, pseudo-observations from the updated
        // margins, copula last.
        const Eigen::MatrixXd U = pseudo_observations(data, spec, beta_k, sigma_k);
        next.copula[k] = fit_copula_weighted(U, w, spec, current.copula[k]);
    }
    return next;
}

HMMParameters initial_parameters(const TimeSeriesDataset& data, const ModelSpec& spec,
                                 Rng& rng) {
    const auto T = data.n_obs();
    const int K = spec.n_states;
    const auto p = data.n_covariates();
    const auto d = data.n_responses();

    // Random state partition, uniform over {1..K}.
    std::vector<int> part(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        part[t] = static_cast<int>(rng.uniform_index(K));
    }

    HMMParameters params;
    params.pi = Eigen::VectorXd::Constant(K, 1.0 / K);
    params.Pi = Eigen::MatrixXd::Zero(K, K);
    for (Eigen::Index t = 0; t + 1 < T; ++t) params.Pi(part[t], part[t + 1]) += 1.0;
    for (int j = 0; j < K; ++j) {
        const double s = params.Pi.row(j).sum();
        if (s > 0.0) {
            params.Pi.row(j) /= s;
        } else {
            params.Pi.row(j).setConstant(1.0 / K);
        }
    }

    params.sigma.resize(K, d);
    const TailIndex half(0.5);
    for (int k = 0; k < K; ++k) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(T);
        int count = 0;
        for (Eigen::Index t = 0; t < T; ++t) {
            if (part[t] == k) {
                w(t) = 1.0;
                ++count;
            }
        }
        if (count < static_cast<int>(p) + 1) {
            throw DegenerateInput("initialization: state partition too small");
        }
        Eigen::MatrixXd beta_k(p, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            // Median regression seeds the quantile model, mean regression the
            // expectile model; scales come from the residual losses at the
            // target tau.
            WeightedRegressionProblem prob{data.x, data.y.col(j), w, half, spec.order};
            const RegressionFit rf = (spec.order == PowerOrder::quantile)
                                         ? weighted_quantile_fit(prob)
                                         : weighted_expectile_fit(prob);
            beta_k.col(j) = rf.beta;
            const Eigen::VectorXd r = data.y.col(j) - data.x * rf.beta;
            double acc = 0.0;
            for (Eigen::Index t = 0; t < T; ++t) {
                acc += w(t) * asymmetric_loss(r(t), spec.order, spec.tau[j]);
            }
            const double mean_loss = acc / w.sum();
            params.sigma(k, j) = std::max(
                (spec.order == PowerOrder::quantile) ? mean_loss
                                                     : std::sqrt(2.0 * mean_loss),
                kSigmaFloor);
        }
        params.beta.push_back(beta_k);

        const Eigen::MatrixXd U =
            pseudo_observations(data, spec, beta_k, params.sigma.row(k).transpose());
        CorrelationMatrix R = fit_gaussian_weighted(U, w);
        if (spec.copula_family == CopulaFamily::gaussian) {
            params.copula.push_back(CopulaParams::make_gaussian(std::move(R)));
        } else {
            params.copula.push_back(
                CopulaParams::make_student_t(std::move(R), kInitialNu));
        }
    }
    return params;
}

namespace {

struct StartOutcome {
    bool ok = false;
    std::string error;
    HMMParameters params;
    Posteriors post;
    std::vector<double> trace;
    bool converged = false;
    int n_iter = 0;
    int monotonicity_violations = 0;
};

StartOutcome run_single_start(const TimeSeriesDataset& data, const ModelSpec& spec,
                              std::uint64_t seed) {
    StartOutcome out;
    try {
        Rng rng(seed);
        HMMParameters params = initial_parameters(data, spec, rng);
        double prev_ll = -std::numeric_limits<double>::infinity();
        for (int h = 0; h < spec.max_iter; ++h) {
            Posteriors post = e_step(data, spec, params);
            out.trace.push_back(post.loglik);
            out.n_iter = h + 1;
            if (h > 0) {
                const double tol_band = 1e-8 * std::max(1.0, std::abs(prev_ll));
                if (post.loglik < prev_ll - tol_band) ++out.monotonicity_violations;
                if (std::abs(post.loglik - prev_ll) < spec.tol) {
                    out.params = std::move(params);
                    out.post = std::move(post);
                    out.converged = true;
                    out.ok = true;
                    return out;
                }
            }
            prev_ll = post.loglik;
            if (h + 1 == spec.max_iter) {
                out.params = std::move(params);
                out.post = std::move(post);
                out.converged = false;
                out.ok = true;
                return out;
            }
            params = m_step(data, spec, post, params);
        }
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

}  // namespace

FitResult fit(const TimeSeriesDataset& data, const ModelSpec& spec) {
    spec.validate();
    data.validate(spec.n_states);
    if (data.n_responses() != spec.dim()) {
        throw InvalidInput("fit: tau vector length must match response count");
    }

    std::vector<StartOutcome> outcomes(spec.n_starts);
    for (int s = 0; s < spec.n_starts; ++s) {
        outcomes[s] = run_single_start(data, spec, spec.seed + static_cast<std::uint64_t>(s));
    }

    int best = -1;
    int failed = 0;
    for (int s = 0; s < spec.n_starts; ++s) {
        if (!outcomes[s].ok) {
            ++failed;
            continue;
        }
        if (best < 0 || outcomes[s].post.loglik > outcomes[best].post.loglik) best = s;
    }
    if (best < 0) {
        std::string detail;
        for (int s = 0; s < spec.n_starts; ++s) {
            detail += "\n  start " + std::to_string(s) + ": " + outcomes[s].error;
        }
        throw FitFailure("fit: every random start failed" + detail);
    }

    StartOutcome& win = outcomes[best];
    FitResult result;
    result.params = std::move(win.params);
    result.posteriors = std::move(win.post);
    result.ll_trace = std::move(win.trace);
    result.converged = win.converged;
    result.n_iter = win.n_iter;
    result.start_index = best;
    result.n_monotonicity_violations = win.monotonicity_violations;
    result.n_failed_starts = failed;
    result.decoded_states = decode_map(result.posteriors);
    return result;
}

double loglik(const TimeSeriesDataset& data, const HMMParameters& params,
              const ModelSpec& spec) {
    const Eigen::MatrixXd logdens = log_density_matrix(params, data, spec);
    const auto T = logdens.rows();
    const int K = static_cast<int>(logdens.cols());

    Eigen::VectorXd alpha(K);
    double total = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
        const double shift = logdens.row(t).maxCoeff();
        const Eigen::VectorXd b = (logdens.row(t).array() - shift).exp();
        if (t == 0) {
            alpha = params.pi.cwiseProduct(b);
        } else {
            alpha = (params.Pi.transpose() * alpha).cwiseProduct(b);
        }
        const double c = alpha.sum();
        if (!(c > 0.0)) throw DegenerateInput("loglik: zero forward mass");
        alpha /= c;
        total += std::log(c) + shift;
    }
    return total;
}

Eigen::MatrixXd simulate_from_model(const HMMParameters& params, const ModelSpec& spec,
                                    const Eigen::MatrixXd& x, Rng& rng,
                                    std::vector<int>* states_out) {
    params.validate();
    const auto T = x.rows();
    const int K = params.n_states();
    const auto d = static_cast<Eigen::Index>(spec.tau.size());
    Eigen::MatrixXd y(T, d);
    if (states_out) states_out->reserve(states_out->size() + T);

    std::vector<Eigen::MatrixXd> chol(K);
    for (int k = 0; k < K; ++k) {
        chol[k] = Eigen::LLT<Eigen::MatrixXd>(params.copula[k].R.matrix()).matrixL();
    }

    auto draw_state = [&](const Eigen::VectorXd& probs) {
        const double u = rng.uniform();
        double acc = 0.0;
        for (int k = 0; k < K; ++k) {
            acc += probs(k);
            if (u <= acc) return k;
        }
        return K - 1;
    };

    int state = draw_state(params.pi);
    Eigen::VectorXd g(d);
    for (Eigen::Index t = 0; t < T; ++t) {
        if (t > 0) state = draw_state(params.Pi.row(state).transpose());
        if (states_out) states_out->push_back(state);
        const auto& cop = params.copula[state];
        for (Eigen::Index j = 0; j < d; ++j) g(j) = rng.normal();
        Eigen::VectorXd z = chol[state] * g;
        if (cop.family == CopulaFamily::student_t) {
            z /= std::sqrt(rng.chi_squared(cop.nu) / cop.nu);
        }
        const Eigen::VectorXd mu = (x.row(t) * params.beta[state]).transpose();
        for (Eigen::Index j = 0; j < d; ++j) {
            const double u = clamp_pseudo_observation(
                cop.family == CopulaFamily::student_t ? student_t_cdf(z(j), cop.nu)
                                                      : normal_cdf(z(j)));
            const LocationScale ls(mu(j), params.sigma(state, j));
            y(t, j) = marginal_quantile(u, ls, spec.tau[j], spec.order);
        }
    }
    return y;
}

std::vector<int> decode_map(const Posteriors& post) {
    std::vector<int> states(post.gamma.rows());
    for (Eigen::Index t = 0; t < post.gamma.rows(); ++t) {
        int arg = 0;
        for (int k = 1; k < post.gamma.cols(); ++k) {
            if (post.gamma(t, k) > post.gamma(t, arg)) arg = k;
        }
        states[t] = arg + 1;
    }
    return states;
}

QDecomposition q_decomposition(const TimeSeriesDataset& data, const ModelSpec& spec,
                               const Posteriors& post, const HMMParameters& params) {
    const auto T = data.n_obs();
    const int K = params.n_states();
    const auto d = data.n_responses();
    QDecomposition q;

    for (int k = 0; k < K; ++k) {
        if (post.gamma(0, k) > 0.0) {
            q.initial += post.gamma(0, k) * std::log(std::max(params.pi(k), 1e-300));
        }
    }
    for (const auto& slice : post.xi) {
        for (int j = 0; j < K; ++j) {
            for (int k = 0; k < K; ++k) {
                if (slice(j, k) > 0.0) {
                    q.transition += slice(j, k) * std::log(std::max(params.Pi(j, k), 1e-300));
                }
            }
        }
    }
    for (int k = 0; k < K; ++k) {
        const Eigen::MatrixXd mu = data.x * params.beta[k];
        Eigen::MatrixXd U(T, d);
        for (Eigen::Index t = 0; t < T; ++t) {
            double marg = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) {
                const LocationScale ls(mu(t, j), params.sigma(k, j));
                marg += marginal_logpdf(data.y(t, j), ls, spec.tau[j], spec.order);
                U(t, j) = clamp_pseudo_observation(
                    marginal_cdf(data.y(t, j), ls, spec.tau[j], spec.order));
            }
            q.margins += post.gamma(t, k) * marg;
        }
        const auto& cop = params.copula[k];
        const Eigen::VectorXd cop_term =
            (cop.family == CopulaFamily::gaussian)
                ? gaussian_copula_logdensity(U, cop.R)
                : t_copula_logdensity(U, cop.R, cop.nu);
        q.copula += post.gamma.col(k).dot(cop_term);
    }
    return q;
}

}  // namespace chmm
