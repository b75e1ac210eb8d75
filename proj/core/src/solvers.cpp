#include "capstrip/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace capstrip {

std::optional<RootResult> brent(const std::function<double(double)>& f, double a, double b, double x_tol,
                                int max_iter) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return RootResult{a, fa, 0, true};
    if (fb == 0.0) return RootResult{b, fb, 0, true};
    if ((fa > 0.0) == (fb > 0.0)) return std::nullopt;

    double c = a, fc = fa, d = b - a, e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 1; iter <= max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 0.5 * x_tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return RootResult{b, fb, iter, true};

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    return RootResult{b, fb, max_iter, false};
}

std::vector<std::vector<double>> finite_difference_jacobian(const ResidualFunction& residuals,
                                                            const std::vector<double>& x, double step) {
    const std::vector<double> r0 = residuals(x);
    std::vector<std::vector<double>> jac(r0.size(), std::vector<double>(x.size(), 0.0));
    std::vector<double> bumped = x;
    for (std::size_t k = 0; k < x.size(); ++k) {
        bumped[k] = x[k] + step;
        const std::vector<double> r1 = residuals(bumped);
        for (std::size_t i = 0; i < r0.size(); ++i) jac[i][k] = (r1[i] - r0[i]) / step;
        bumped[k] = x[k];
    }
    return jac;
}

namespace {

double sum_squares(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

double max_abs(const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const std::vector<double>& r) {
    return std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& residuals, std::vector<double> x0,
                                             const LevenbergMarquardtOptions& options) {
    if (options.project) options.project(x0);
    LevenbergMarquardtResult out;
    out.x = std::move(x0);
    out.residuals = residuals(out.x);
    if (!all_finite(out.residuals)) throw std::runtime_error("levenberg_marquardt: non-finite objective");

    const std::size_t n = out.x.size();
    const std::size_t m = out.residuals.size();
    double cost = sum_squares(out.residuals);
    double lambda = options.initial_lambda;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        out.iterations = iter;
        if (max_abs(out.residuals) <= options.residual_tol) {
            out.converged = true;
            return out;
        }
        const auto jac = finite_difference_jacobian(residuals, out.x, options.fd_step);
        Eigen::MatrixXd J(m, n);
        Eigen::VectorXd r(m);
        for (std::size_t i = 0; i < m; ++i) {
            r(i) = out.residuals[i];
            for (std::size_t k = 0; k < n; ++k) J(i, k) = jac[i][k];
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;

        double diag_scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) diag_scale = std::max(diag_scale, JtJ(k, k));
        const double diag_floor = std::max(1e-4 * diag_scale, 1e-300);

        bool accepted = false;
        bool tiny_step = false;
        while (!accepted && lambda < 1e20) {
            Eigen::MatrixXd A = JtJ;
            for (std::size_t k = 0; k < n; ++k) A(k, k) += lambda * std::max(JtJ(k, k), diag_floor);
            const Eigen::VectorXd delta = A.ldlt().solve(-g);
            if (!delta.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            double alpha = 1.0;
            for (int bt = 0; bt <= options.max_backtracks; ++bt, alpha *= 0.5) {
                std::vector<double> trial(n);
                for (std::size_t k = 0; k < n; ++k) trial[k] = out.x[k] + alpha * delta(k);
                if (options.project) options.project(trial);
                double step_norm = 0.0, x_norm = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    step_norm = std::max(step_norm, std::abs(trial[k] - out.x[k]));
                    x_norm = std::max(x_norm, std::abs(out.x[k]));
                }
                if (step_norm <= options.relative_step_tol * std::max(x_norm, 1e-300)) {
                    tiny_step = true;
                    break;
                }
                std::vector<double> r_trial = residuals(trial);
                if (!all_finite(r_trial)) continue;
                const double trial_cost = sum_squares(r_trial);
                if (trial_cost < cost) {
                    out.x = std::move(trial);
                    out.residuals = std::move(r_trial);
                    cost = trial_cost;
                    accepted = true;
                    break;
                }
            }
            if (tiny_step) break;
            if (accepted) lambda = std::max(lambda / 10.0, 1e-15);
            else lambda *= 10.0;
        }
        if (!accepted) {
            // No descent left at machine resolution: the current point is the best iterate.
            out.stationary = tiny_step;
            out.converged = max_abs(out.residuals) <= options.residual_tol;
            out.iterations = iter + 1;
            return out;
        }
    }
    out.iterations = options.max_iterations;
    out.converged = max_abs(out.residuals) <= options.residual_tol;
    return out;
}

}  // namespace capstrip
