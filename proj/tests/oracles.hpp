#pragma once

// Independent oracles for the test suites: quadrature wrappers, empirical
// distribution checks, exhaustive enumerations. Everything here recomputes
// expected values from first principles, never through the library's own
// estimation path.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "chmm/quadrature.hpp"

namespace oracle {

/// Kolmogorov-Smirnov statistic of a sample against a cdf.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - (i + 1) / n));
        d = std::max(d, std::abs(f - i / n));
    }
    return d;
}

inline double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

inline double sample_sd(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

inline double sample_skewness(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double m2 = 0.0, m3 = 0.0;
    for (double x : v) {
        const double c = x - m;
        m2 += c * c;
        m3 += c * c * c;
    }
    m2 /= v.size();
    m3 /= v.size();
    return m3 / std::pow(m2, 1.5);
}

inline double empirical_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double idx = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = idx - lo;
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

/// Exhaustive forward-backward reference: enumerate all K^T paths.
struct EnumeratedPosteriors {
    Eigen::MatrixXd gamma;
    std::vector<Eigen::MatrixXd> xi;
    double loglik;
};

inline EnumeratedPosteriors enumerate_paths(const Eigen::MatrixXd& logdens,
                                            const Eigen::VectorXd& pi,
                                            const Eigen::MatrixXd& Pi) {
    const int T = static_cast<int>(logdens.rows());
    const int K = static_cast<int>(logdens.cols());
    std::vector<int> path(T, 0);
    std::vector<double> log_joint;
    std::vector<std::vector<int>> paths;

    // Odometer over all K^T state paths.
    for (;;) {
        double lj = std::log(pi(path[0])) + logdens(0, path[0]);
        for (int t = 1; t < T; ++t) {
            lj += std::log(Pi(path[t - 1], path[t])) + logdens(t, path[t]);
        }
        log_joint.push_back(lj);
        paths.push_back(path);
        int pos = T - 1;
        while (pos >= 0 && ++path[pos] == K) path[pos--] = 0;
        if (pos < 0) break;
    }

    const double shift = *std::max_element(log_joint.begin(), log_joint.end());
    double total = 0.0;
    for (double lj : log_joint) total += std::exp(lj - shift);
    const double loglik = shift + std::log(total);

    EnumeratedPosteriors out;
    out.gamma = Eigen::MatrixXd::Zero(T, K);
    out.xi.assign(T - 1, Eigen::MatrixXd::Zero(K, K));
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const double wpath = std::exp(log_joint[i] - loglik);
        for (int t = 0; t < T; ++t) out.gamma(t, paths[i][t]) += wpath;
        for (int t = 0; t + 1 < T; ++t) out.xi[t](paths[i][t], paths[i][t + 1]) += wpath;
    }
    out.loglik = loglik;
    return out;
}

/// Exact weighted check-loss minimum for small instances: every optimal basic
/// solution interpolates p rows, so enumerate all p-subsets.
inline double quantile_regression_oracle_objective(const Eigen::MatrixXd& X,
                                                   const Eigen::VectorXd& y,
                                                   const Eigen::VectorXd& w, double tau) {
    const int T = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    std::vector<int> comb(p);
    for (int i = 0; i < p; ++i) comb[i] = i;

    auto objective = [&](const Eigen::VectorXd& beta) {
        double total = 0.0;
        for (int t = 0; t < T; ++t) {
            const double r = y(t) - X.row(t).dot(beta);
            total += w(t) * std::abs(r) * ((r < 0.0) ? (1.0 - tau) : tau);
        }
        return total;
    };

    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        Eigen::MatrixXd Xs(p, p);
        Eigen::VectorXd ys(p);
        for (int i = 0; i < p; ++i) {
            Xs.row(i) = X.row(comb[i]);
            ys(i) = y(comb[i]);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Xs);
        if (std::abs(lu.determinant()) > 1e-12) {
            const Eigen::VectorXd beta = lu.solve(ys);
            if (beta.allFinite()) best = std::min(best, objective(beta));
        }
        // next combination
        int i = p - 1;
        while (i >= 0 && comb[i] == T - p + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < p; ++j) comb[j] = comb[j - 1] + 1;
    }
    return best;
}

}  // namespace oracle
