#include "chmm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chmm/errors.hpp"
#include "chmm/inference.hpp"
#include "chmm/parallel.hpp"
#include "chmm/quadrature.hpp"
#include "chmm/special_functions.hpp"

namespace chmm {

namespace {

constexpr double kSimDf = 5.0;
const Eigen::Vector2d kSimSlant(-2.0, 2.0);

Eigen::MatrixXd omega_for_state(int state) {
    Eigen::MatrixXd omega(2, 2);
    const double rho = (state == 0) ? 0.2 : 0.7;
    omega << 1.0, rho, rho, 1.0;
    return omega;
}

// Marginal slant of one component of the hidden-truncation skew construction:
// delta = Omega alpha / sqrt(1 + alpha' Omega alpha), margin slant
// delta_j / sqrt(1 - delta_j^2).
double marginal_slant(const Eigen::MatrixXd& omega, const Eigen::VectorXd& alpha,
                      int margin) {
    const Eigen::VectorXd oa = omega * alpha;
    const double delta_j = oa(margin) / std::sqrt(1.0 + alpha.dot(oa));
    return delta_j / std::sqrt(1.0 - delta_j * delta_j);
}

// Density of the univariate skew-t with unit scale, slant a and df nu:
//   2 t(x; nu) T(a x sqrt((nu+1)/(nu+x^2)); nu+1).
double skew_t_pdf(double x, double a, double nu) {
    const double w = a * x * std::sqrt((nu + 1.0) / (nu + x * x));
    return 2.0 * std::exp(student_t_logpdf(x, nu)) * student_t_cdf(w, nu + 1.0);
}

double skew_t_cdf(double x, double a, double nu) {
    // The skew-t tails are polynomial; for nu = 5 the mass beyond +-300 is far
    // below the tolerances these adjustment constants are used at.
    const double lo = -300.0;
    if (x <= lo) return 0.0;
    return integrate([&](double s) { return skew_t_pdf(s, a, nu); }, lo,
                     std::min(x, 300.0), 1e-10);
}

double skew_t_quantile(double tau, double a, double nu) {
    double lo = -300.0, hi = 300.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (skew_t_cdf(mid, a, nu) < tau) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-8) break;
    }
    return 0.5 * (lo + hi);
}

// Expectile of a standard normal: solve tau E[(Y-m)+] = (1-tau) E[(m-Y)+]
// using the closed-form normal partial moment E[(Y-m)+] = phi(m) - m(1-Phi(m)).
double normal_expectile(double tau) {
    auto g = [&](double m) {
        const double upper = normal_pdf(m) - m * (1.0 - normal_cdf(m));
        const double lower = upper + m;  // E[(m-Y)+] = E[(Y-m)+] + m, mean zero
        return tau * upper - (1.0 - tau) * lower;
    };
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

// Student-t partial moment E[(Y-m)+] = (nu + m^2)/(nu-1) f(m) - m(1-F(m)).
double student_t_expectile(double tau, double nu) {
    auto g = [&](double m) {
        const double f = std::exp(student_t_logpdf(m, nu));
        const double upper = (nu + m * m) / (nu - 1.0) * f - m * (1.0 - student_t_cdf(m, nu));
        const double lower = upper + m;
        return tau * upper - (1.0 - tau) * lower;
    };
    double lo = -1e3, hi = 1e3;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-11) break;
    }
    return 0.5 * (lo + hi);
}

double skew_t_expectile(double tau, double a, double nu) {
    // Partial moments by quadrature of the skew-t density.
    auto g = [&](double m) {
        auto upper_int = [&](double s) { return (s - m) * skew_t_pdf(s, a, nu); };
        auto lower_int = [&](double s) { return (m - s) * skew_t_pdf(s, a, nu); };
        const double upper = integrate(upper_int, m, 500.0, 1e-9);
        const double lower = integrate(lower_int, -500.0, m, 1e-9);
        return tau * upper - (1.0 - tau) * lower;
    };
    double lo = -100.0, hi = 100.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-7) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TrueParameters TrueParameters::reference() {
    TrueParameters tp;
    tp.beta1.resize(2, 2);
    tp.beta1 << -2.0, 3.0, 1.0, -2.0;
    tp.beta2.resize(2, 2);
    tp.beta2 << 3.0, -2.0, -2.0, 1.0;
    tp.Omega1 = omega_for_state(0);
    tp.Omega2 = omega_for_state(1);
    tp.Pi.resize(2, 2);
    tp.Pi << 0.9, 0.1, 0.1, 0.9;
    return tp;
}

Eigen::VectorXd sample_skew_t(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& Omega,
                              double df, Rng& rng) {
    if (!(df > 0.0)) throw InvalidInput("sample_skew_t: df must be positive");
    const auto d = alpha.size();
    if (Omega.rows() != d || Omega.cols() != d) {
        throw InvalidInput("sample_skew_t: dimension mismatch");
    }

    // Correlation form of the scale and the implied conditioning vector.
    Eigen::VectorXd omega_sd = Omega.diagonal().cwiseSqrt();
    Eigen::MatrixXd corr = omega_sd.cwiseInverse().asDiagonal() * Omega *
                           omega_sd.cwiseInverse().asDiagonal();
    const Eigen::VectorXd oa = corr * alpha;
    const Eigen::VectorXd delta = oa / std::sqrt(1.0 + alpha.dot(oa));

    // Joint normal of (X0, X) with cov [[1, delta'],[delta, corr]]; reflect X
    // on the sign of X0 (hidden truncation).
    Eigen::MatrixXd joint(d + 1, d + 1);
    joint(0, 0) = 1.0;
    joint.block(0, 1, 1, d) = delta.transpose();
    joint.block(1, 0, d, 1) = delta;
    joint.block(1, 1, d, d) = corr;
    Eigen::LLT<Eigen::MatrixXd> llt(joint);
    if (llt.info() != Eigen::Success) {
        throw InvalidInput("sample_skew_t: conditioning covariance not PD");
    }
    Eigen::VectorXd g(d + 1);
    for (Eigen::Index i = 0; i < d + 1; ++i) g(i) = rng.normal();
    const Eigen::VectorXd zfull = llt.matrixL() * g;
    Eigen::VectorXd z = zfull.tail(d);
    if (zfull(0) <= 0.0) z = -z;

    if (std::isfinite(df)) {
        z /= std::sqrt(rng.chi_squared(df) / df);
    }
    return omega_sd.asDiagonal() * z;
}

std::pair<TimeSeriesDataset, std::vector<int>> generate_scenario(
    const ScenarioConfig& cfg, std::uint64_t rep_seed) {
    Rng rng(rep_seed);
    const TrueParameters tp = TrueParameters::reference();
    const int T = cfg.T;

    TimeSeriesDataset data;
    data.x.resize(T, 2);
    data.y.resize(T, 2);
    data.response_names = {"y1", "y2"};
    data.covariate_names = {"intercept", "x"};

    std::vector<Eigen::LLT<Eigen::MatrixXd>> chol;
    chol.emplace_back(cfg.noise_scale * tp.Omega1);
    chol.emplace_back(cfg.noise_scale * tp.Omega2);

    std::vector<int> states(T);
    int state = (rng.uniform() < 0.5) ? 0 : 1;  // uniform initial law
    for (int t = 0; t < T; ++t) {
        if (t > 0) {
            const double u = rng.uniform();
            state = (u <= tp.Pi(state, state)) ? state : 1 - state;
        }
        states[t] = state;
        data.x(t, 0) = 1.0;
        data.x(t, 1) = rng.normal();

        Eigen::VectorXd eps(2);
        switch (cfg.error_family) {
            case ErrorFamily::gaussian: {
                Eigen::VectorXd g(2);
                g << rng.normal(), rng.normal();
                eps = chol[state].matrixL() * g;
                break;
            }
            case ErrorFamily::student_t5: {
                Eigen::VectorXd g(2);
                g << rng.normal(), rng.normal();
                eps = chol[state].matrixL() * g;
                eps /= std::sqrt(rng.chi_squared(kSimDf) / kSimDf);
                break;
            }
            case ErrorFamily::skew_t5: {
                eps = sample_skew_t(kSimSlant, cfg.noise_scale * omega_for_state(state),
                                    kSimDf, rng);
                break;
            }
        }
        const Eigen::MatrixXd& beta = (state == 0) ? tp.beta1 : tp.beta2;
        data.y.row(t) = data.x.row(t) * beta + eps.transpose();
    }
    return {std::move(data), std::move(states)};
}

double error_margin_quantile(ErrorFamily family, int state, int margin, double tau) {
    switch (family) {
        case ErrorFamily::gaussian:
            return (tau == 0.5) ? 0.0 : normal_quantile(tau);
        case ErrorFamily::student_t5:
            return (tau == 0.5) ? 0.0 : student_t_quantile(tau, kSimDf);
        case ErrorFamily::skew_t5: {
            const double a = marginal_slant(omega_for_state(state), kSimSlant, margin);
            return skew_t_quantile(tau, a, kSimDf);
        }
    }
    throw InvalidInput("error_margin_quantile: unknown family");
}

double error_margin_expectile(ErrorFamily family, int state, int margin, double tau) {
    switch (family) {
        case ErrorFamily::gaussian:
            return (tau == 0.5) ? 0.0 : normal_expectile(tau);
        case ErrorFamily::student_t5:
            return (tau == 0.5) ? 0.0 : student_t_expectile(tau, kSimDf);
        case ErrorFamily::skew_t5: {
            const double a = marginal_slant(omega_for_state(state), kSimSlant, margin);
            return skew_t_expectile(tau, a, kSimDf);
        }
    }
    throw InvalidInput("error_margin_expectile: unknown family");
}

double MonteCarloResult::median_ari(double tau) const {
    std::vector<double> values;
    for (const auto& rec : ari) {
        if (std::abs(rec.tau - tau) < 1e-12) values.push_back(rec.ari);
    }
    if (values.empty()) throw InvalidInput("median_ari: no records at this tau");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

const BiasRow& MonteCarloResult::row(double tau, int state, int margin, int coef) const {
    for (const auto& r : bias) {
        if (std::abs(r.tau - tau) < 1e-12 && r.state == state && r.margin == margin &&
            r.coef == coef) {
            return r;
        }
    }
    throw InvalidInput("MonteCarloResult::row: no such cell");
}

MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg, std::uint64_t master_seed,
                                 int n_threads) {
    const TrueParameters tp = TrueParameters::reference();
    const int n_tau = static_cast<int>(cfg.tau_levels.size());
    const int R = cfg.n_replications;

    // True coefficients at each tau: intercepts shift by the tau-quantile
    // (quantile model) or tau-expectile (expectile model) of the error margin;
    // slopes are unchanged.
    std::vector<std::vector<Eigen::MatrixXd>> beta_true(n_tau);
    for (int i = 0; i < n_tau; ++i) {
        const double tau = cfg.tau_levels[i];
        for (int state = 0; state < 2; ++state) {
            Eigen::MatrixXd b = (state == 0) ? tp.beta1 : tp.beta2;
            for (int margin = 0; margin < 2; ++margin) {
                const double shift =
                    (cfg.model == PowerOrder::quantile)
                        ? error_margin_quantile(cfg.error_family, state, margin, tau)
                        : error_margin_expectile(cfg.error_family, state, margin, tau);
                b(0, margin) += shift * std::sqrt(cfg.noise_scale);
            }
            beta_true[i].push_back(b);
        }
    }

    struct RepOutcome {
        bool ok = false;
        // errors[tau][state(0/1)](coef, margin)
        std::vector<std::vector<Eigen::MatrixXd>> errors;
        std::vector<double> ari;
    };
    std::vector<RepOutcome> outcomes(R);

    detail::parallel_for_index(R, n_threads, [&](int r) {
        try {
            auto [data, true_states] =
                generate_scenario(cfg, master_seed + static_cast<std::uint64_t>(r));
            RepOutcome out;
            out.errors.resize(n_tau);
            out.ari.resize(n_tau);
            for (int i = 0; i < n_tau; ++i) {
                ModelSpec spec;
                spec.order = cfg.model;
                spec.n_states = 2;
                spec.copula_family = cfg.fit_copula;
                spec.tau = {TailIndex(cfg.tau_levels[i]), TailIndex(cfg.tau_levels[i])};
                spec.tol = cfg.tol;
                spec.max_iter = cfg.max_iter;
                spec.n_starts = cfg.n_starts;
                spec.seed = master_seed + 7919ULL * static_cast<std::uint64_t>(r + 1) +
                            104729ULL * static_cast<std::uint64_t>(i);
                const FitResult res = fit(data, spec);

                out.ari[i] = adjusted_rand_index(res.decoded_states, true_states);

                // Align estimated states to the truth by decoded-label
                // agreement (the ARI-maximizing permutation for K=2).
                int agree = 0;
                for (int t = 0; t < cfg.T; ++t) {
                    if (res.decoded_states[t] - 1 == true_states[t]) ++agree;
                }
                std::vector<int> perm = (2 * agree >= cfg.T) ? std::vector<int>{0, 1}
                                                             : std::vector<int>{1, 0};
                for (int state = 0; state < 2; ++state) {
                    out.errors[i].push_back(res.params.beta[perm[state]] -
                                            beta_true[i][state]);
                }
            }
            out.ok = true;
            outcomes[r] = std::move(out);
        } catch (const std::exception&) {
            outcomes[r].ok = false;
        }
    });

    MonteCarloResult result;
    result.n_replications = R;
    for (int r = 0; r < R; ++r) {
        if (!outcomes[r].ok) {
            ++result.n_failed;
            continue;
        }
        for (int i = 0; i < n_tau; ++i) {
            result.ari.push_back({cfg.tau_levels[i], r, outcomes[r].ari[i]});
        }
    }

    for (int i = 0; i < n_tau; ++i) {
        for (int state = 0; state < 2; ++state) {
            for (int coef = 0; coef < 2; ++coef) {
                for (int margin = 0; margin < 2; ++margin) {
                    double sum = 0.0, sumsq = 0.0;
                    int n = 0;
                    for (int r = 0; r < R; ++r) {
                        if (!outcomes[r].ok) continue;
                        const double e = outcomes[r].errors[i][state](coef, margin);
                        sum += e;
                        sumsq += e * e;
                        ++n;
                    }
                    BiasRow row;
                    row.tau = cfg.tau_levels[i];
                    row.state = state + 1;
                    row.margin = margin + 1;
                    row.coef = coef;
                    row.true_value = beta_true[i][state](coef, margin);
                    if (n > 0) {
                        row.mean_bias = sum / n;
                        row.sd = (n > 1) ? std::sqrt(std::max(
                                               0.0, (sumsq - n * row.mean_bias * sum / n) /
                                                        (n - 1)))
                                         : 0.0;
                    }
                    result.bias.push_back(row);
                }
            }
        }
    }
    return result;
}

}  // namespace chmm
