#include <cmath>
#include <vector>

#include "doctest.h"

#include "chmm/copulas.hpp"
#include "chmm/quadrature.hpp"
#include "chmm/special_functions.hpp"
#include "oracles.hpp"

using namespace chmm;

namespace {

Eigen::MatrixXd corr2(double rho) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, rho, rho, 1.0;
    return m;
}

}  // namespace

TEST_CASE("correlation matrix invariants are enforced") {
    CHECK_NOTHROW(CorrelationMatrix(corr2(0.5)));
    CHECK_THROWS(CorrelationMatrix(corr2(1.0)));
    Eigen::MatrixXd bad_diag = corr2(0.2);
    bad_diag(0, 0) = 1.1;
    CHECK_THROWS(CorrelationMatrix(bad_diag));
    Eigen::MatrixXd asym = corr2(0.2);
    asym(0, 1) = 0.3;
    CHECK_THROWS(CorrelationMatrix(asym));
}

TEST_CASE("pd_repair: idempotent, boundary repair, eigenvalue floor") {
    const Eigen::MatrixXd valid = corr2(0.37);
    CHECK((pd_repair(valid).matrix() - valid).cwiseAbs().maxCoeff() < 1e-12);

    const CorrelationMatrix fixed = pd_repair(corr2(1.0000001));
    CHECK(fixed.matrix()(0, 1) < 1.0);
    CHECK(fixed.matrix()(0, 1) > 0.99);

    const CorrelationMatrix floored = pd_repair(corr2(1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(floored.matrix(),
                                                      Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= 0.99e-8);
}

TEST_CASE("gaussian copula log density: independence and center value") {
    Eigen::VectorXd u(3);
    u << 0.2, 0.77, 0.5;
    CHECK(gaussian_copula_logdensity(u, CorrelationMatrix::identity(3)) ==
          doctest::Approx(0.0).epsilon(1e-14));

    Eigen::VectorXd center(2);
    center << 0.5, 0.5;
    // z = 0 there, so only -log|R|/2 survives; |R| = 1 - rho^2 = 0.75.
    CHECK(gaussian_copula_logdensity(center, CorrelationMatrix(corr2(0.5))) ==
          doctest::Approx(-0.5 * std::log(0.75)).epsilon(1e-12));

    Eigen::VectorXd boundary(2);
    boundary << 0.0, 0.5;
    CHECK_THROWS(gaussian_copula_logdensity(boundary, CorrelationMatrix(corr2(0.5))));
}

TEST_CASE("gaussian copula density integrates to one over the unit square") {
    const CorrelationMatrix R(corr2(0.7));
    // Substitute u = Phi(z); the integrand becomes c(Phi(z)) phi(z1) phi(z2),
    // smooth and light-tailed, handled by a tensor Gauss-Legendre rule.
    auto [nodes, weights] = gauss_legendre(96);
    const double lim = 8.0;
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double z1 = lim * nodes[i];
        Eigen::VectorXd u(2);
        u(0) = clamp_pseudo_observation(normal_cdf(z1));
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double z2 = lim * nodes[j];
            u(1) = clamp_pseudo_observation(normal_cdf(z2));
            const double c = std::exp(gaussian_copula_logdensity(u, R));
            total += weights[i] * weights[j] * lim * lim * c * normal_pdf(z1) *
                     normal_pdf(z2);
        }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("t copula: univariate degeneracy and gaussian limit") {
    Eigen::VectorXd u1(1);
    u1 << 0.31;
    CHECK(t_copula_logdensity(u1, CorrelationMatrix::identity(1), 7.0) ==
          doctest::Approx(0.0).epsilon(1e-10));

    Eigen::VectorXd u(2);
    u << 0.2, 0.8;
    CHECK(t_copula_logdensity(u, CorrelationMatrix::identity(2), 1e6) ==
          doctest::Approx(0.0).epsilon(1e-3));

    // 20-point probe grid for the nu -> infinity limit.
    const CorrelationMatrix R(corr2(0.55));
    for (int i = 1; i <= 4; ++i) {
        for (int j = 1; j <= 5; ++j) {
            Eigen::VectorXd probe(2);
            probe << i / 5.0, j / 6.0;
            const double g = gaussian_copula_logdensity(probe, R);
            const double t = t_copula_logdensity(probe, R, 1e6);
            CHECK(std::abs(g - t) < 1e-3);
        }
    }
}

TEST_CASE("t copula density integrates to one over the unit square") {
    const CorrelationMatrix R(corr2(0.5));
    const double nu = 5.0;
    // Substitute u = Psi(s) with s = tan(theta): the integrand is the copula
    // density times the t densities, with algebraic tails flattened by the
    // tangent map.
    auto [nodes, weights] = gauss_legendre(200);
    const double lim = M_PI / 2.0 - 1e-12;
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double th1 = lim * nodes[i];
        const double s1 = std::tan(th1);
        const double sec1 = 1.0 / std::cos(th1);
        Eigen::VectorXd u(2);
        u(0) = student_t_cdf(s1, nu);
        if (!(u(0) > 0.0 && u(0) < 1.0)) continue;
        const double f1 = std::exp(student_t_logpdf(s1, nu));
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double th2 = lim * nodes[j];
            const double s2 = std::tan(th2);
            const double sec2 = 1.0 / std::cos(th2);
            u(1) = student_t_cdf(s2, nu);
            if (!(u(1) > 0.0 && u(1) < 1.0)) continue;
            const double f2 = std::exp(student_t_logpdf(s2, nu));
            const double c = std::exp(t_copula_logdensity(u, R, nu));
            total += weights[i] * weights[j] * lim * lim * c * f1 * f2 * sec1 * sec1 *
                     sec2 * sec2;
        }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("copula log densities are permutation invariant") {
    Eigen::MatrixXd R3(3, 3);
    R3 << 1.0, 0.4, 0.1, 0.4, 1.0, -0.3, 0.1, -0.3, 1.0;
    const CorrelationMatrix R(R3);
    Eigen::VectorXd u(3);
    u << 0.12, 0.6, 0.87;

    // Swap coordinates 0 and 2 in both u and R.
    Eigen::MatrixXd Rp(3, 3);
    const int map[3] = {2, 1, 0};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) Rp(i, j) = R3(map[i], map[j]);
    }
    Eigen::VectorXd up(3);
    up << u(2), u(1), u(0);

    CHECK(gaussian_copula_logdensity(u, R) ==
          doctest::Approx(gaussian_copula_logdensity(up, CorrelationMatrix(Rp)))
              .epsilon(1e-12));
    CHECK(t_copula_logdensity(u, R, 4.4) ==
          doctest::Approx(t_copula_logdensity(up, CorrelationMatrix(Rp), 4.4))
              .epsilon(1e-12));
}

TEST_CASE("weighted gaussian fit recovers independence and tolerates scaling") {
    Rng rng(101);
    const int T = 100000;
    Eigen::MatrixXd U(T, 2);
    for (int t = 0; t < T; ++t) {
        U(t, 0) = clamp_pseudo_observation(rng.uniform());
        U(t, 1) = clamp_pseudo_observation(rng.uniform());
    }
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(T);
    const CorrelationMatrix R = fit_gaussian_weighted(U, w);
    CHECK(std::abs(R.matrix()(0, 1)) < 0.02);

    // Positive rescaling of the weights leaves the fit unchanged.
    const CorrelationMatrix R2 = fit_gaussian_weighted(U, 3.7 * w);
    CHECK((R.matrix() - R2.matrix()).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(fit_gaussian_weighted(U, Eigen::VectorXd::Zero(T)), DegenerateInput);
}

TEST_CASE("comonotone pseudo-observations drive the correlation to one") {
    const int T = 50;
    Eigen::MatrixXd U(T, 2);
    Rng rng(5);
    for (int t = 0; t < T; ++t) {
        const double u = clamp_pseudo_observation(rng.uniform());
        U(t, 0) = u;
        U(t, 1) = u;
    }
    const CorrelationMatrix R = fit_gaussian_weighted(U, Eigen::VectorXd::Ones(T));
    CHECK(R.matrix()(0, 1) > 0.999);
    CHECK(R.matrix()(0, 1) < 1.0);
}

TEST_CASE("weighted t fit reduces to the gaussian fit for huge nu") {
    Rng rng(17);
    const CopulaParams params = CopulaParams::make_student_t(
        CorrelationMatrix(corr2(0.45)), 8.0);
    const Eigen::MatrixXd U = sample_copula(params, 20000, rng);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(U.rows());
    const Eigen::MatrixXd Rt = fit_t_weighted(U, w, 1e6).matrix();
    const Eigen::MatrixXd Rg = fit_gaussian_weighted(U, w).matrix();
    CHECK((Rt - Rg).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("weighted t fit handles a single heavily weighted row") {
    Rng rng(23);
    Eigen::MatrixXd U(40, 2);
    for (int t = 0; t < 40; ++t) {
        U(t, 0) = clamp_pseudo_observation(rng.uniform());
        U(t, 1) = clamp_pseudo_observation(rng.uniform());
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(40);
    w(7) = 10.0;
    const CorrelationMatrix R = fit_t_weighted(U, w, 5.0);
    CHECK(R.dim() == 2);
    CHECK(std::abs(R.matrix()(0, 1)) < 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R.matrix(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 1e-10);
}

TEST_CASE("t-scale EM plus nu profiling recover a simulated t copula") {
    Rng rng(31);
    const CopulaParams truth =
        CopulaParams::make_student_t(CorrelationMatrix(corr2(0.6)), 5.0);
    const Eigen::MatrixXd U = sample_copula(truth, 100000, rng);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(U.rows());

    const CorrelationMatrix R = fit_t_weighted(U, w, 5.0);
    CHECK(std::abs(R.matrix()(0, 1) - 0.6) < 0.02);

    const NuEstimate nu = profile_nu(U, w, R);
    CHECK(nu.value > 4.0);
    CHECK(nu.value < 6.5);
    CHECK_FALSE(nu.at_upper_bound);

    // Local optimality of the profiled objective.
    auto objective = [&](double v) { return w.dot(t_copula_logdensity(U, R, v)); };
    CHECK(objective(nu.value) >= objective(nu.value - 0.5));
    CHECK(objective(nu.value) >= objective(nu.value + 0.5));
}

TEST_CASE("profile_nu flags gaussian data at the upper bracket") {
    Rng rng(37);
    const CopulaParams truth =
        CopulaParams::make_gaussian(CorrelationMatrix(corr2(0.5)));
    const Eigen::MatrixXd U = sample_copula(truth, 4000, rng);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(U.rows());
    const NuEstimate nu = profile_nu(U, w, CorrelationMatrix(corr2(0.5)));
    CHECK(nu.at_upper_bound);
    CHECK(nu.value == doctest::Approx(300.0));
}

TEST_CASE("copula sampling: uniform margins, independence, determinism") {
    Rng rng(41);
    const CopulaParams params =
        CopulaParams::make_student_t(CorrelationMatrix(corr2(0.3)), 6.0);
    const Eigen::MatrixXd U = sample_copula(params, 100000, rng);
    for (int j = 0; j < 2; ++j) {
        std::vector<double> col(U.rows());
        for (int t = 0; t < U.rows(); ++t) col[t] = U(t, j);
        CHECK(oracle::ks_statistic(col, [](double x) { return x; }) < 0.01);
    }

    Rng rng_i(43);
    const Eigen::MatrixXd Ui =
        sample_copula(CopulaParams::make_gaussian(CorrelationMatrix::identity(2)), 100000,
                      rng_i);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int t = 0; t < Ui.rows(); ++t) {
        const double zx = normal_quantile(Ui(t, 0));
        const double zy = normal_quantile(Ui(t, 1));
        sxy += zx * zy;
        sxx += zx * zx;
        syy += zy * zy;
    }
    CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.02);

    Rng a(47), b(47);
    const Eigen::MatrixXd Ua = sample_copula(params, 50, a);
    const Eigen::MatrixXd Ub = sample_copula(params, 50, b);
    CHECK((Ua - Ub).cwiseAbs().maxCoeff() == 0.0);
}
