#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace capstrip {

/// Transition shape used to ramp between consecutive step levels.
enum class Kernel { Rect, Smoothstep, Cosine, Quintic };

/// Psi(s) for the given kernel, clamped to 0 below s = 0 and to 1 above s = 1.
double transition(Kernel kernel, double s) noexcept;

/// Piecewise cubic Hermite interpolant with flat extrapolation beyond the end nodes.
class CubicHermite {
public:
    CubicHermite() = default;
    CubicHermite(std::vector<double> xs, std::vector<double> ys, std::vector<double> slopes);

    double operator()(double x) const noexcept;
    double derivative(double x) const noexcept;

    std::span<const double> xs() const noexcept { return xs_; }
    std::span<const double> ys() const noexcept { return ys_; }
    std::span<const double> slopes() const noexcept { return slopes_; }

private:
    std::size_t segment(double x) const noexcept;

    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<double> slopes_;
};

/// Broken-line interpolation with flat extrapolation.
double linear_interpolate(std::span<const double> xs, std::span<const double> ys, double x) noexcept;

/// Natural (zero second derivative at both ends) C2 cubic spline.
CubicHermite natural_cubic_spline(std::span<const double> xs, std::span<const double> ys);

/// Natural C2 spline with its slopes limited so that the interpolant is monotone on every
/// interval where the data are monotone (Hyman-style filter against the secant slopes).
CubicHermite monotone_cubic_spline(std::span<const double> xs, std::span<const double> ys);

/// Bessel (parabolic) slope estimates: interior nodes weighted by adjacent interval lengths,
/// first slope equal to the first secant, last slope zero.
std::vector<double> bessel_slopes(std::span<const double> xs, std::span<const double> ys);

/// C1 cubic Hermite through non-negative data that never goes negative.
///
/// Slopes start from bessel_slopes() and are clamped to
///   -3 f_k / h_k <= d_k <= 3 f_k / h_{k-1},
/// with d_k = 0 wherever f_k <= 0. Here h_k = x_{k+1} - x_k.
CubicHermite hyman_nonneg_spline(std::span<const double> xs, std::span<const double> ys);

enum class VolFamily { PiecewiseConstant, Kernel, Linear, CubicC2, HymanNonnegC1 };

struct VolFamilySpec {
    VolFamily family = VolFamily::PiecewiseConstant;
    Kernel kernel = Kernel::Rect;
    double beta = 1.0;  ///< ramp width as a fraction of the caplet tenor, only for VolFamily::Kernel

    static VolFamilySpec piecewise_constant() { return {}; }
    static VolFamilySpec kernel_ramp(Kernel k, double beta) { return {VolFamily::Kernel, k, beta}; }
    static VolFamilySpec linear() { return {VolFamily::Linear, Kernel::Rect, 1.0}; }
    static VolFamilySpec cubic() { return {VolFamily::CubicC2, Kernel::Rect, 1.0}; }
    static VolFamilySpec hyman() { return {VolFamily::HymanNonnegC1, Kernel::Rect, 1.0}; }

    /// True when sigma(t) on (tau_{k-1}, tau_k] depends on v_{k-1} and v_k only.
    bool is_local() const noexcept;
};

/// Caplet volatility term structure built from node times (years) and node values.
///
/// Every family extrapolates flat: sigma(t) = v_1 for t <= tau_1 and v_N for t >= tau_N.
/// Step and kernel families are left-open/right-closed, so sigma(tau_k) = v_k.
class VolCurve {
public:
    VolCurve(std::vector<double> node_times, std::vector<double> node_values, VolFamilySpec spec,
             double tenor_years);

    double operator()(double t) const noexcept;

    std::span<const double> node_times() const noexcept { return times_; }
    std::span<const double> node_values() const noexcept { return values_; }
    const VolFamilySpec& spec() const noexcept { return spec_; }
    double tenor() const noexcept { return tenor_; }

private:
    double eval_piecewise_constant(double t) const noexcept;
    double eval_kernel(double t) const noexcept;

    std::vector<double> times_;
    std::vector<double> values_;
    VolFamilySpec spec_;
    double tenor_;
    CubicHermite spline_;
};

std::string_view to_string(Kernel kernel) noexcept;
std::string_view to_string(VolFamily family) noexcept;

}  // namespace capstrip
