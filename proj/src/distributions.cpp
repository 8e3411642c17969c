#include "chmm/distributions.hpp"

#include <cmath>

#include "chmm/special_functions.hpp"

namespace chmm {

namespace {

// Uniform draws are pushed through the quantile functions; keep them away from
// the exact endpoints where the quantiles diverge.
double clamp_sampling_probability(double u) {
    if (u < 1e-300) return 1e-300;
    if (u > 1.0 - 1e-16) return 1.0 - 1e-16;
    return u;
}

}  // namespace

double asymmetric_loss(double u, PowerOrder l, TailIndex tau) {
    const double t = tau.value();
    const double a = (u < 0.0) ? (1.0 - t) : t;
    const double au = std::abs(u);
    return (l == PowerOrder::quantile) ? au * a : au * au * a;
}

double al_logpdf(double y, const LocationScale& p, TailIndex tau) {
    const double t = tau.value();
    const double u = (y - p.mu) / p.sigma;
    return std::log(t * (1.0 - t) / p.sigma) - asymmetric_loss(u, PowerOrder::quantile, tau);
}

double al_cdf(double y, const LocationScale& p, TailIndex tau) {
    const double t = tau.value();
    const double u = (y - p.mu) / p.sigma;
    if (u <= 0.0) return t * std::exp((1.0 - t) * u);
    return 1.0 - (1.0 - t) * std::exp(-t * u);
}

double al_quantile(double q, const LocationScale& p, TailIndex tau) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidInput("al_quantile: q must lie in (0,1)");
    const double t = tau.value();
    if (q <= t) return p.mu + p.sigma * std::log(q / t) / (1.0 - t);
    return p.mu - p.sigma * std::log((1.0 - q) / (1.0 - t)) / t;
}

double al_sample(const LocationScale& p, TailIndex tau, Rng& rng) {
    return al_quantile(clamp_sampling_probability(rng.uniform()), p, tau);
}

namespace {

// Normalizing constant of the Asymmetric Normal:
//   B(sigma,tau) = 2 sqrt(tau(1-tau)) / (sqrt(pi sigma^2) (sqrt(tau)+sqrt(1-tau)))
double an_log_normalizer(double sigma, double t) {
    return std::log(2.0) + 0.5 * std::log(t * (1.0 - t)) -
           0.5 * std::log(M_PI * sigma * sigma) -
           std::log(std::sqrt(t) + std::sqrt(1.0 - t));
}

}  // namespace

double an_logpdf(double y, const LocationScale& p, TailIndex tau) {
    const double u = (y - p.mu) / p.sigma;
    return an_log_normalizer(p.sigma, tau.value()) -
           asymmetric_loss(u, PowerOrder::expectile, tau);
}

// Each half-line of the AN is a rescaled Gaussian: the left piece has sd
// sigma/sqrt(2(1-tau)), the right piece sd sigma/sqrt(2 tau), and the split of
// mass at mu is sqrt(tau) : sqrt(1-tau).
double an_cdf(double y, const LocationScale& p, TailIndex tau) {
    const double t = tau.value();
    const double st = std::sqrt(t);
    const double s1t = std::sqrt(1.0 - t);
    const double denom = st + s1t;
    const double u = (y - p.mu) / p.sigma;
    if (u <= 0.0) {
        return (2.0 * st / denom) * normal_cdf(u * std::sqrt(2.0 * (1.0 - t)));
    }
    return st / denom +
           (2.0 * s1t / denom) * (normal_cdf(u * std::sqrt(2.0 * t)) - 0.5);
}

double an_quantile(double q, const LocationScale& p, TailIndex tau) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidInput("an_quantile: q must lie in (0,1)");
    const double t = tau.value();
    const double st = std::sqrt(t);
    const double s1t = std::sqrt(1.0 - t);
    const double denom = st + s1t;
    const double w = st / denom;  // cdf at mu
    if (q <= w) {
        const double z = normal_quantile(q * denom / (2.0 * st));
        return p.mu + p.sigma * z / std::sqrt(2.0 * (1.0 - t));
    }
    const double z = normal_quantile(0.5 + (q - w) * denom / (2.0 * s1t));
    return p.mu + p.sigma * z / std::sqrt(2.0 * t);
}

double an_sample(const LocationScale& p, TailIndex tau, Rng& rng) {
    return an_quantile(clamp_sampling_probability(rng.uniform()), p, tau);
}

}  // namespace chmm
