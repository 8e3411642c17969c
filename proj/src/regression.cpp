#include "chmm/regression.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "chmm/errors.hpp"

namespace chmm {

namespace {

constexpr double kWeightFloor = 1e-12;

struct Support {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd w;
};

// Drop rows with negligible weight and check the remaining design for full
// column rank.
Support active_rows(const WeightedRegressionProblem& prob) {
    const auto T = prob.X.rows();
    const auto p = prob.X.cols();
    if (prob.y.size() != T || prob.w.size() != T) {
        throw InvalidInput("regression: dimension mismatch");
    }
    if ((prob.w.array() < 0.0).any()) throw InvalidInput("regression: negative weight");

    std::vector<Eigen::Index> keep;
    keep.reserve(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        if (prob.w(t) >= kWeightFloor) keep.push_back(t);
    }
    if (keep.empty()) throw DegenerateInput("regression: all weights are zero");

    Support s;
    s.X.resize(static_cast<Eigen::Index>(keep.size()), p);
    s.y.resize(static_cast<Eigen::Index>(keep.size()));
    s.w.resize(static_cast<Eigen::Index>(keep.size()));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(keep.size()); ++i) {
        s.X.row(i) = prob.X.row(keep[i]);
        s.y(i) = prob.y(keep[i]);
        s.w(i) = prob.w(keep[i]);
    }

    Eigen::MatrixXd scaled = s.w.array().sqrt().matrix().asDiagonal() * s.X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        throw RankDeficiency("regression: design rank-deficient on weighted support");
    }
    return s;
}

Eigen::VectorXd solve_weighted_ls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& w) {
    const Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
    const Eigen::VectorXd b = X.transpose() * (w.array() * y.array()).matrix();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd beta = ldlt.solve(b);
        if (beta.allFinite()) return beta;
    }
    const Eigen::MatrixXd scaled = w.array().sqrt().matrix().asDiagonal() * X;
    const Eigen::VectorXd ys = (w.array().sqrt() * y.array()).matrix();
    return scaled.colPivHouseholderQr().solve(ys);
}

double objective_on(const Support& s, TailIndex tau, PowerOrder order,
                    const Eigen::VectorXd& beta) {
    const Eigen::VectorXd r = s.y - s.X * beta;
    double total = 0.0;
    for (Eigen::Index t = 0; t < r.size(); ++t) {
        total += s.w(t) * asymmetric_loss(r(t), order, tau);
    }
    return total;
}

// Exact fit through the p rows of smallest absolute residual (and swaps among
// the few next-smallest). Quantile solutions interpolate p points, so this
// recovers the optimal vertex once the smoothed solve is close.
void vertex_polish(const Support& s, TailIndex tau, Eigen::VectorXd& beta,
                   double& best_obj) {
    const auto p = s.X.cols();
    const auto n = s.X.rows();
    if (n < p) return;

    Eigen::VectorXd r = s.y - s.X * beta;
    std::vector<Eigen::Index> idx(n);
    for (Eigen::Index i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(r(a)) < std::abs(r(b));
    });

    const Eigen::Index m = std::min<Eigen::Index>(n, p + 3);
    std::vector<Eigen::Index> pool(idx.begin(), idx.begin() + m);

    std::vector<int> mask(m, 0);
    std::fill(mask.begin(), mask.begin() + p, 1);
    Eigen::MatrixXd Xs(p, p);
    Eigen::VectorXd ys(p);
    // Iterate over all p-subsets of the candidate pool.
    do {
        Eigen::Index row = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (!mask[i]) continue;
            Xs.row(row) = s.X.row(pool[i]);
            ys(row) = s.y(pool[i]);
            ++row;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Xs);
        const double det = std::abs(lu.determinant());
        if (det < 1e-12) continue;
        Eigen::VectorXd cand = lu.solve(ys);
        if (!cand.allFinite()) continue;
        const double obj = objective_on(s, tau, PowerOrder::quantile, cand);
        if (obj < best_obj) {
            best_obj = obj;
            beta = cand;
        }
    } while (std::prev_permutation(mask.begin(), mask.end()));
}

}  // namespace

double regression_objective(const WeightedRegressionProblem& prob,
                            const Eigen::VectorXd& beta) {
    const Eigen::VectorXd r = prob.y - prob.X * beta;
    double total = 0.0;
    for (Eigen::Index t = 0; t < r.size(); ++t) {
        total += prob.w(t) * asymmetric_loss(r(t), prob.order, prob.tau);
    }
    return total;
}

RegressionFit weighted_quantile_fit(const WeightedRegressionProblem& prob,
                                    std::vector<double>* objective_trace) {
    const Support s = active_rows(prob);
    const double tau = prob.tau.value();

    Eigen::VectorXd beta = solve_weighted_ls(s.X, s.y, s.w);
    double best_obj = objective_on(s, prob.tau, PowerOrder::quantile, beta);
    Eigen::VectorXd best = beta;

    // Hunter-Lange majorization of the check loss: rho_tau(r) =
    // (|r| + (2 tau - 1) r) / 2 with |r| majorized by r^2 / (2 max(|r0|,eps)).
    // The stationarity system of the surrogate is weighted least squares with
    // an extra constant right-hand side.
    const Eigen::VectorXd xw = s.X.transpose() * s.w;
    int iterations = 0;
    for (double eps = 1e-2; eps >= 1e-9 * 0.999; eps *= 0.1) {
        for (int it = 0; it < 40; ++it) {
            ++iterations;
            const Eigen::VectorXd r = s.y - s.X * beta;
            const Eigen::VectorXd e = r.cwiseAbs().cwiseMax(eps);
            const Eigen::VectorXd wi = (s.w.array() / e.array()).matrix();
            const Eigen::MatrixXd A = s.X.transpose() * wi.asDiagonal() * s.X;
            const Eigen::VectorXd b =
                s.X.transpose() * (wi.array() * s.y.array()).matrix() +
                (2.0 * tau - 1.0) * xw;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
            Eigen::VectorXd next = ldlt.solve(b);
            if (!next.allFinite()) break;
            const double step = (next - beta).cwiseAbs().maxCoeff();
            beta = next;
            const double obj = objective_on(s, prob.tau, PowerOrder::quantile, beta);
            if (obj < best_obj) {
                best_obj = obj;
                best = beta;
            }
            if (step < 0.01 * eps) break;
        }
        if (objective_trace) objective_trace->push_back(best_obj);
    }

    beta = best;
    vertex_polish(s, prob.tau, beta, best_obj);
    return {beta, true, iterations};
}

RegressionFit weighted_expectile_fit(const WeightedRegressionProblem& prob,
                                     std::vector<double>* objective_trace) {
    const Support s = active_rows(prob);
    const double tau = prob.tau.value();

    Eigen::VectorXd beta = solve_weighted_ls(s.X, s.y, s.w);
    double obj = objective_on(s, prob.tau, PowerOrder::expectile, beta);

    RegressionFit fit;
    fit.converged = false;
    for (int it = 0; it < 200; ++it) {
        fit.iterations = it + 1;
        const Eigen::VectorXd r = s.y - s.X * beta;
        Eigen::VectorXd wi(s.w.size());
        for (Eigen::Index t = 0; t < r.size(); ++t) {
            wi(t) = s.w(t) * ((r(t) < 0.0) ? (1.0 - tau) : tau);
        }
        const Eigen::VectorXd target = solve_weighted_ls(s.X, s.y, wi);

        // The IRLS target is a descent direction; backtrack if the raw
        // objective ever increases so the trace stays monotone.
        const Eigen::VectorXd dir = target - beta;
        Eigen::VectorXd next = target;
        double next_obj = objective_on(s, prob.tau, PowerOrder::expectile, next);
        double step = 1.0;
        while (next_obj > obj && step > 1e-12) {
            step *= 0.5;
            next = beta + step * dir;
            next_obj = objective_on(s, prob.tau, PowerOrder::expectile, next);
        }
        const double delta = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        obj = next_obj;
        if (objective_trace) objective_trace->push_back(obj);
        if (delta < 1e-10) {
            fit.converged = true;
            break;
        }
    }
    fit.beta = beta;
    return fit;
}

}  // namespace chmm
