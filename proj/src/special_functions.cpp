#include "chmm/special_functions.hpp"

#include <cmath>
#include <limits>

#include "chmm/errors.hpp"

namespace chmm {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))
constexpr double kSqrt1_2 = 0.70710678118654752440;     // 1/sqrt(2)

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double normal_logpdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kSqrt1_2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidInput("normal_quantile: p must lie in (0,1)");
    }
    // AS 241, PPND16 (Wichura 1988). Central rational fit for |p-1/2| <= 0.425,
    // two tail fits in r = sqrt(-log(min(p,1-p))).
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) *
                        r +
                    4.5921953931549871457e4) *
                       r +
                   1.3731693765509461125e4) *
                      r +
                  1.9715909503065514427e3) *
                     r +
                 1.3314166789178437745e2) *
                    r +
                3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) *
                        r +
                    2.1213794301586595867e4) *
                       r +
                   5.3941960214247511077e3) *
                      r +
                  6.8718700749205790830e2) *
                     r +
                 4.2313330701600911252e1) *
                    r +
                1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) *
                     r +
                 1.27045825245236838258e0) *
                    r +
                3.64784832476320460504e0) *
                   r +
               5.76949722146069140550e0) *
                  r +
              4.63033784615654529590e0) *
                 r +
             1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) *
                     r +
                 1.48103976427480074590e-1) *
                    r +
                6.89767334985100004550e-1) *
                   r +
               1.67638483018380384940e0) *
                  r +
              2.05319162663775882187e0) *
                 r +
             1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) *
                     r +
                 2.65321895265761230930e-2) *
                    r +
                2.96560571828504891230e-1) *
                   r +
               1.78482653991729133580e0) *
                  r +
              5.46378491116411436990e0) *
                 r +
             6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-6) *
                     r +
                 7.86869131145613259100e-4) *
                    r +
                1.48753612908506148525e-2) *
                   r +
               1.36929880922735805310e-1) *
                  r +
              5.99832206555887937690e-1) *
                 r +
             1.0);
    }
    return (q < 0.0) ? -v : v;
}

namespace {

// Continued fraction for the incomplete beta (Numerical Recipes style, modified
// Lentz evaluation).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw InvalidInput("incomplete_beta: a,b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_logpdf(double x, double nu) {
    if (!(nu > 0.0)) throw InvalidInput("student_t_logpdf: nu must be positive");
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log(nu * M_PI) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double student_t_cdf(double x, double nu) {
    if (!(nu > 0.0)) throw InvalidInput("student_t_cdf: nu must be positive");
    if (x == 0.0) return 0.5;
    // Beyond ~1e5 degrees of freedom the t and normal cdfs agree to well below
    // 1e-6 and the continued fraction slows down, so defer to the normal.
    if (nu > 1e5) return normal_cdf(x);
    const double p = 0.5 * incomplete_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    return (x > 0.0) ? 1.0 - p : p;
}

double student_t_quantile(double p, double nu) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidInput("student_t_quantile: p must lie in (0,1)");
    }
    if (!(nu > 0.0)) throw InvalidInput("student_t_quantile: nu must be positive");
    if (p == 0.5) return 0.0;
    if (nu > 1e5) return normal_quantile(p);
    // Work in the lower tail and mirror at the end.
    const bool flip = p > 0.5;
    const double pl = flip ? 1.0 - p : p;

    // Cornish-Fisher start around the normal quantile.
    const double z = normal_quantile(pl);
    double x = z + (z * z * z + z) / (4.0 * nu) +
               (5.0 * std::pow(z, 5) + 16.0 * z * z * z + 3.0 * z) / (96.0 * nu * nu);
    if (x >= 0.0) x = z;

    // Bracket the root, then Newton on log F(x) - log pl with bisection
    // safeguarding. The log form stays well conditioned deep in the tail.
    double lo = x, hi = 0.0;
    while (student_t_cdf(lo, nu) > pl) {
        hi = lo;
        lo *= 2.0;
        if (lo < -1e300) throw DegenerateInput("student_t_quantile: bracket failure");
    }
    for (int it = 0; it < 200; ++it) {
        const double F = student_t_cdf(x, nu);
        if (F > pl) {
            hi = x;
        } else {
            lo = x;
        }
        const double f = std::exp(student_t_logpdf(x, nu));
        double step = 0.0;
        if (f > 0.0 && F > 0.0) {
            step = -(std::log(F) - std::log(pl)) * F / f;
        }
        double next = x + step;
        if (!(next > lo && next < hi) || step == 0.0) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) <= 1e-14 * (1.0 + std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    return flip ? -x : x;
}

}  // namespace chmm
