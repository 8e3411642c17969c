#pragma once

#include "chmm/errors.hpp"
#include "chmm/rng.hpp"

namespace chmm {

/// Asymmetry level tau, strictly inside (0,1).
class TailIndex {
public:
    explicit TailIndex(double tau) : tau_(tau) {
        if (!(tau > 0.0 && tau < 1.0)) {
            throw InvalidInput("TailIndex: tau must lie strictly in (0,1)");
        }
    }
    double value() const { return tau_; }

private:
    double tau_;
};

/// Order of the asymmetric power loss: 1 selects the quantile / Asymmetric
/// Laplace machinery, 2 the expectile / Asymmetric Normal machinery.
enum class PowerOrder : int { quantile = 1, expectile = 2 };

struct LocationScale {
    double mu;
    double sigma;
    LocationScale(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
        if (!(sigma > 0.0)) throw InvalidInput("LocationScale: sigma must be positive");
    }
};

/// |u|^l * |tau - 1{u<0}|.
double asymmetric_loss(double u, PowerOrder l, TailIndex tau);

// Asymmetric Laplace: working likelihood whose location is the tau-quantile.
double al_logpdf(double y, const LocationScale& p, TailIndex tau);
double al_cdf(double y, const LocationScale& p, TailIndex tau);
double al_quantile(double q, const LocationScale& p, TailIndex tau);
double al_sample(const LocationScale& p, TailIndex tau, Rng& rng);

// Asymmetric Normal: working likelihood whose location is the tau-expectile.
double an_logpdf(double y, const LocationScale& p, TailIndex tau);
double an_cdf(double y, const LocationScale& p, TailIndex tau);
double an_quantile(double q, const LocationScale& p, TailIndex tau);
double an_sample(const LocationScale& p, TailIndex tau, Rng& rng);

}  // namespace chmm
