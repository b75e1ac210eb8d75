#include "capstrip/solvers.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace capstrip {
namespace {

TEST(Brent, FindsSimpleRoots) {
    const auto r = brent([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    ASSERT_TRUE(r.has_value());
    EXPECT_TRUE(r->converged);
    EXPECT_NEAR(r->x, std::sqrt(2.0), 1e-15);
    const auto c = brent([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
    EXPECT_NEAR(c->x, 0.7390851332151607, 1e-15);
}

TEST(Brent, EndpointRootsAndMissingBracket) {
    EXPECT_EQ(brent([](double x) { return x; }, 0.0, 1.0)->x, 0.0);
    EXPECT_EQ(brent([](double x) { return x - 1.0; }, 0.0, 1.0)->x, 1.0);
    EXPECT_FALSE(brent([](double x) { return x * x + 1.0; }, -1.0, 1.0).has_value());
}

TEST(LevenbergMarquardt, SolvesSquareSystem) {
    const ResidualFunction f = [](const std::vector<double>& x) {
        return std::vector<double>{x[0] + x[1] - 3.0, x[0] * x[1] - 2.0};
    };
    const auto r = levenberg_marquardt(f, {0.5, 3.0});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(std::min(r.x[0], r.x[1]), 1.0, 1e-10);
    EXPECT_NEAR(std::max(r.x[0], r.x[1]), 2.0, 1e-10);
}

TEST(LevenbergMarquardt, Rosenbrock) {
    const ResidualFunction f = [](const std::vector<double>& x) {
        return std::vector<double>{10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]};
    };
    const auto r = levenberg_marquardt(f, {-1.2, 1.0});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-8);
    EXPECT_NEAR(r.x[1], 1.0, 1e-8);
}

TEST(LevenbergMarquardt, LeastSquaresStopsAtTheMinimum) {
    // Inconsistent system: best fit is x = 2 with residuals -1 and +1.
    const ResidualFunction f = [](const std::vector<double>& x) {
        return std::vector<double>{x[0] - 1.0, x[0] - 3.0};
    };
    const auto r = levenberg_marquardt(f, {10.0});
    EXPECT_FALSE(r.converged);
    EXPECT_TRUE(r.stationary);
    EXPECT_NEAR(r.x[0], 2.0, 1e-8);
}

TEST(LevenbergMarquardt, ProjectionHoldsTheBound) {
    const ResidualFunction f = [](const std::vector<double>& x) { return std::vector<double>{x[0] + 1.0}; };
    LevenbergMarquardtOptions o;
    o.project = [](std::vector<double>& x) { x[0] = std::max(x[0], 0.0); };
    const auto r = levenberg_marquardt(f, {2.0}, o);
    EXPECT_GE(r.x[0], 0.0);
    EXPECT_NEAR(r.x[0], 0.0, 1e-10);
}

TEST(LevenbergMarquardt, RejectsNonFiniteStart) {
    const ResidualFunction f = [](const std::vector<double>& x) { return std::vector<double>{std::log(x[0])}; };
    EXPECT_THROW(levenberg_marquardt(f, {-1.0}), std::runtime_error);
}

TEST(FiniteDifference, MatchesAnalyticJacobian) {
    const ResidualFunction f = [](const std::vector<double>& x) {
        return std::vector<double>{x[0] * x[0], x[0] * x[1]};
    };
    const auto j = finite_difference_jacobian(f, {1.5, -2.0}, 1e-7);
    EXPECT_NEAR(j[0][0], 3.0, 1e-6);
    EXPECT_NEAR(j[0][1], 0.0, 1e-12);
    EXPECT_NEAR(j[1][0], -2.0, 1e-6);
    EXPECT_NEAR(j[1][1], 1.5, 1e-6);
}

}  // namespace
}  // namespace capstrip
