#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace capstrip {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Brent's method on [a, b]; requires f(a) and f(b) of opposite sign (or one of them zero).
/// Returns std::nullopt when the bracket does not straddle a root.
std::optional<RootResult> brent(const std::function<double(double)>& f, double a, double b,
                                double x_tol = 1e-15, int max_iter = 200);

struct LevenbergMarquardtOptions {
    double residual_tol = 1e-14;    ///< stop when max |r_i| falls below this
    double relative_step_tol = 1e-14;
    int max_iterations = 200;
    double fd_step = 1e-7;          ///< forward-difference Jacobian step, in parameter units
    double initial_lambda = 1e-3;
    int max_backtracks = 20;
    /// Optional projection applied to every trial point (e.g. clipping at a bound).
    std::function<void(std::vector<double>&)> project;
};

struct LevenbergMarquardtResult {
    std::vector<double> x;
    std::vector<double> residuals;
    int iterations = 0;
    bool converged = false;   ///< max |r_i| reached residual_tol
    bool stationary = false;  ///< stopped because no step of relative size above relative_step_tol reduced the cost
};

using ResidualFunction = std::function<std::vector<double>(const std::vector<double>&)>;

/// Minimises sum r_i(x)^2 with damped Gauss-Newton steps and a halving line search.
/// Throws std::runtime_error if the residuals at the starting point are not finite.
LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& residuals, std::vector<double> x0,
                                             const LevenbergMarquardtOptions& options = {});

/// Forward-difference Jacobian, row-major m x n.
std::vector<std::vector<double>> finite_difference_jacobian(const ResidualFunction& residuals,
                                                            const std::vector<double>& x, double step);

}  // namespace capstrip
