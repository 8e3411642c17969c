#include <cmath>
#include <vector>

#include "doctest.h"

#include "chmm/quadrature.hpp"
#include "chmm/simulation.hpp"
#include "chmm/special_functions.hpp"
#include "oracles.hpp"

using namespace chmm;

TEST_CASE("gaussian scenario errors reproduce the state covariance matrices") {
    ScenarioConfig cfg;
    cfg.error_family = ErrorFamily::gaussian;
    cfg.T = 100000;
    auto [data, states] = generate_scenario(cfg, 301);
    const TrueParameters tp = TrueParameters::reference();

    for (int k = 0; k < 2; ++k) {
        const Eigen::MatrixXd& beta = (k == 0) ? tp.beta1 : tp.beta2;
        const Eigen::MatrixXd& omega = (k == 0) ? tp.Omega1 : tp.Omega2;
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2, 2);
        int n = 0;
        for (int t = 0; t < cfg.T; ++t) {
            if (states[t] != k) continue;
            const Eigen::Vector2d eps =
                (data.y.row(t) - data.x.row(t) * beta).transpose();
            acc += eps * eps.transpose();
            ++n;
        }
        acc /= n;
        CHECK((acc - omega).cwiseAbs().maxCoeff() < 0.02);
    }
}

TEST_CASE("chain occupancy is balanced under the symmetric transition matrix") {
    ScenarioConfig cfg;
    cfg.T = 100000;
    auto [data, states] = generate_scenario(cfg, 303);
    double frac = 0.0;
    for (int s : states) frac += s;
    frac /= states.size();
    CHECK(std::abs(frac - 0.5) < 0.03);
}

TEST_CASE("skew-t scenario errors carry the configured skewness signs") {
    ScenarioConfig cfg;
    cfg.error_family = ErrorFamily::skew_t5;
    cfg.T = 100000;
    auto [data, states] = generate_scenario(cfg, 305);
    const TrueParameters tp = TrueParameters::reference();

    std::vector<double> eps1, eps2;
    for (int t = 0; t < cfg.T; ++t) {
        const Eigen::MatrixXd& beta = (states[t] == 0) ? tp.beta1 : tp.beta2;
        const Eigen::Vector2d e = (data.y.row(t) - data.x.row(t) * beta).transpose();
        eps1.push_back(e(0));
        eps2.push_back(e(1));
    }
    CHECK(oracle::sample_skewness(eps1) < -0.1);
    CHECK(oracle::sample_skewness(eps2) > 0.1);
}

TEST_CASE("skew-t sampler with zero slant reduces to the multivariate t") {
    Eigen::MatrixXd omega(2, 2);
    omega << 1.0, 0.4, 0.4, 1.0;
    Rng rng(307);
    const int n = 100000;
    std::vector<double> margin(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd z =
            sample_skew_t(Eigen::VectorXd::Zero(2), omega, 5.0, rng);
        margin[i] = z(0);
    }
    const double d = oracle::ks_statistic(
        margin, [](double x) { return student_t_cdf(x, 5.0); });
    CHECK(d < 0.01);
    CHECK(std::abs(oracle::sample_skewness(margin)) < 0.15);
}

TEST_CASE("skew-t sampler: slant signs and determinism") {
    Eigen::VectorXd alpha(2);
    alpha << -2.0, 2.0;
    Eigen::MatrixXd omega(2, 2);
    omega << 1.0, 0.2, 0.2, 1.0;

    Rng rng(311);
    std::vector<double> m1, m2;
    for (int i = 0; i < 100000; ++i) {
        const Eigen::VectorXd z = sample_skew_t(alpha, omega, 5.0, rng);
        m1.push_back(z(0));
        m2.push_back(z(1));
    }
    CHECK(oracle::sample_skewness(m1) < -0.2);
    CHECK(oracle::sample_skewness(m2) > 0.2);

    Rng a(313), b(313);
    for (int i = 0; i < 20; ++i) {
        const Eigen::VectorXd za = sample_skew_t(alpha, omega, 5.0, a);
        const Eigen::VectorXd zb = sample_skew_t(alpha, omega, 5.0, b);
        CHECK((za - zb).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("error margin quantiles: closed forms and quadrature cross-checks") {
    CHECK(error_margin_quantile(ErrorFamily::gaussian, 0, 0, 0.1) ==
          doctest::Approx(normal_quantile(0.1)).epsilon(1e-12));
    CHECK(error_margin_quantile(ErrorFamily::student_t5, 1, 1, 0.9) ==
          doctest::Approx(student_t_quantile(0.9, 5.0)).epsilon(1e-12));

    // Skew-t margin: the quantile must invert the cdf obtained by direct
    // quadrature of the marginal density.
    const double q = error_margin_quantile(ErrorFamily::skew_t5, 0, 0, 0.25);
    // Margin 0 slant under state-1 correlation 0.2 (delta worked out by hand):
    // Omega*alpha = (-1.6, 1.6), alpha'Omega*alpha = 6.4, delta = -1.6/sqrt(7.4).
    const double delta = -1.6 / std::sqrt(7.4);
    const double slant = delta / std::sqrt(1.0 - delta * delta);
    auto pdf = [&](double x) {
        const double w = slant * x * std::sqrt(6.0 / (5.0 + x * x));
        return 2.0 * std::exp(student_t_logpdf(x, 5.0)) * student_t_cdf(w, 6.0);
    };
    const double mass = integrate(pdf, -300.0, q, 1e-10);
    CHECK(mass == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("error margin expectiles solve the asymmetric moment condition") {
    // Gaussian at tau=0.5 is the mean; elsewhere verify the first-order
    // condition by quadrature.
    CHECK(std::abs(error_margin_expectile(ErrorFamily::gaussian, 0, 0, 0.5)) < 1e-9);

    for (double tau : {0.1, 0.9}) {
        const double m = error_margin_expectile(ErrorFamily::gaussian, 0, 0, tau);
        auto foc = [&](double x) {
            const double a = (x < m) ? (1.0 - tau) : tau;
            return a * (x - m) * normal_pdf(x);
        };
        CHECK(std::abs(integrate(foc, -12.0, 12.0, 1e-12)) < 1e-7);

        const double mt = error_margin_expectile(ErrorFamily::student_t5, 0, 0, tau);
        auto foc_t = [&](double x) {
            const double a = (x < mt) ? (1.0 - tau) : tau;
            return a * (x - mt) * std::exp(student_t_logpdf(x, 5.0));
        };
        CHECK(std::abs(integrate(foc_t, -500.0, 500.0, 1e-11)) < 1e-5);
    }
}

TEST_CASE("monte carlo tables are deterministic given the master seed") {
    ScenarioConfig cfg;
    cfg.T = 120;
    cfg.model = PowerOrder::expectile;
    cfg.n_replications = 4;
    cfg.n_starts = 3;
    const MonteCarloResult a = run_monte_carlo(cfg, 999, 2);
    const MonteCarloResult b = run_monte_carlo(cfg, 999, 1);
    REQUIRE(a.bias.size() == b.bias.size());
    for (std::size_t i = 0; i < a.bias.size(); ++i) {
        CHECK(a.bias[i].mean_bias == b.bias[i].mean_bias);
        CHECK(a.bias[i].sd == b.bias[i].sd);
    }
    REQUIRE(a.ari.size() == b.ari.size());
    for (std::size_t i = 0; i < a.ari.size(); ++i) CHECK(a.ari[i].ari == b.ari[i].ari);
}

TEST_CASE("trivially separable states decode perfectly") {
    ScenarioConfig cfg;
    cfg.T = 200;
    cfg.model = PowerOrder::expectile;
    cfg.n_replications = 5;
    cfg.n_starts = 3;
    cfg.noise_scale = 1e-4;
    const MonteCarloResult mc = run_monte_carlo(cfg, 1234, 2);
    CHECK(mc.n_failed == 0);
    CHECK(mc.median_ari(0.5) == doctest::Approx(1.0));
}

TEST_CASE("small expectile study recovers the coefficients near the median") {
    ScenarioConfig cfg;
    cfg.T = 300;
    cfg.model = PowerOrder::expectile;
    cfg.n_replications = 8;
    cfg.n_starts = 4;
    const MonteCarloResult mc = run_monte_carlo(cfg, 555, 2);
    CHECK(mc.n_failed == 0);
    for (int state : {1, 2}) {
        for (int margin : {1, 2}) {
            for (int coef : {0, 1}) {
                const BiasRow& row = mc.row(0.5, state, margin, coef);
                CHECK(std::abs(row.mean_bias) < 0.08);
                CHECK(row.sd < 0.2);
            }
        }
    }
}
