#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace chmm {

double normal_quantile(double p);

/// Deterministic random source. All samplers in the library take one of these
/// explicitly; derived streams are built from derived seeds, never by sharing
/// a handle across threads.
///
/// Uniforms come straight from the mt19937_64 word stream and normals through
/// the inverse cdf, so a seed pins the exact output sequence independently of
/// the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0,1).
    double uniform() {
        // 53-bit mantissa draw, offset half a ulp so 0 and 1 are unreachable.
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via inverse cdf.
    double normal() { return normal_quantile(uniform()); }

    /// Gamma(shape, 1), Marsaglia-Tsang squeeze method.
    double gamma(double shape) {
        if (shape < 1.0) {
            // Boost a < 1 with the standard power-of-uniform trick.
            double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            double v = t * t * t;
            double u = uniform();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
                return d * v;
            }
        }
    }

    double chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

    /// Next raw engine word; useful for deriving child seeds.
    std::uint64_t raw() { return engine_(); }

    /// Integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection to kill modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace chmm
