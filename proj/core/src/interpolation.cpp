#include "capstrip/interpolation.hpp"

#include "capstrip/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace capstrip {

namespace {

void require_increasing(std::span<const double> xs, std::span<const double> ys, const char* who) {
    if (xs.size() != ys.size()) {
        throw InputError(std::string(who) + ": abscissae and ordinates differ in length");
    }
    if (xs.empty()) {
        throw InputError(std::string(who) + ": no nodes");
    }
    for (std::size_t k = 1; k < xs.size(); ++k) {
        if (!(xs[k] > xs[k - 1])) {
            throw InputError(std::string(who) + ": abscissae must be strictly increasing");
        }
    }
}

std::vector<double> secants(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> s(xs.size() > 0 ? xs.size() - 1 : 0);
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        s[k] = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
    }
    return s;
}

double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double transition(Kernel kernel, double s) noexcept {
    if (!(s > 0.0)) return 0.0;
    if (s >= 1.0) return 1.0;
    switch (kernel) {
        case Kernel::Rect:
            return s;
        case Kernel::Smoothstep:
            return s * s * (3.0 - 2.0 * s);
        case Kernel::Cosine:
            return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
        case Kernel::Quintic:
            return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
    }
    return s;
}

CubicHermite::CubicHermite(std::vector<double> xs, std::vector<double> ys, std::vector<double> slopes)
    : xs_(std::move(xs)), ys_(std::move(ys)), slopes_(std::move(slopes)) {
    require_increasing(xs_, ys_, "CubicHermite");
    if (slopes_.size() != xs_.size()) {
        throw InputError("CubicHermite: one slope per node required");
    }
}

std::size_t CubicHermite::segment(double x) const noexcept {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    auto k = static_cast<std::size_t>(std::distance(xs_.begin(), it));
    return std::clamp<std::size_t>(k, 1, xs_.size() - 1) - 1;
}

double CubicHermite::operator()(double x) const noexcept {
    if (xs_.empty()) return 0.0;
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const std::size_t k = segment(x);
    const double h = xs_[k + 1] - xs_[k];
    const double u = (x - xs_[k]) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    const double h10 = u3 - 2.0 * u2 + u;
    const double h01 = -2.0 * u3 + 3.0 * u2;
    const double h11 = u3 - u2;
    return h00 * ys_[k] + h10 * h * slopes_[k] + h01 * ys_[k + 1] + h11 * h * slopes_[k + 1];
}

double CubicHermite::derivative(double x) const noexcept {
    if (xs_.size() < 2 || x < xs_.front() || x > xs_.back()) return 0.0;
    const std::size_t k = segment(x);
    const double h = xs_[k + 1] - xs_[k];
    const double u = (x - xs_[k]) / h;
    const double u2 = u * u;
    const double dh00 = (6.0 * u2 - 6.0 * u) / h;
    const double dh10 = 3.0 * u2 - 4.0 * u + 1.0;
    const double dh01 = (-6.0 * u2 + 6.0 * u) / h;
    const double dh11 = 3.0 * u2 - 2.0 * u;
    return dh00 * ys_[k] + dh10 * slopes_[k] + dh01 * ys_[k + 1] + dh11 * slopes_[k + 1];
}

double linear_interpolate(std::span<const double> xs, std::span<const double> ys, double x) noexcept {
    if (xs.empty()) return 0.0;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto k = static_cast<std::size_t>(std::distance(xs.begin(), it)) - 1;
    const double w = (x - xs[k]) / (xs[k + 1] - xs[k]);
    return ys[k] + w * (ys[k + 1] - ys[k]);
}

CubicHermite natural_cubic_spline(std::span<const double> xs, std::span<const double> ys) {
    require_increasing(xs, ys, "natural_cubic_spline");
    const std::size_t n = xs.size();
    std::vector<double> slopes(n, 0.0);
    if (n == 1) {
        return {std::vector<double>(xs.begin(), xs.end()), std::vector<double>(ys.begin(), ys.end()), slopes};
    }
    const auto s = secants(xs, ys);
    std::vector<double> h(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) h[k] = xs[k + 1] - xs[k];

    // Second derivatives m_k with m_0 = m_{n-1} = 0; Thomas algorithm on the interior rows.
    std::vector<double> m(n, 0.0);
    if (n > 2) {
        const std::size_t interior = n - 2;
        std::vector<double> diag(interior), upper(interior), rhs(interior);
        for (std::size_t i = 0; i < interior; ++i) {
            diag[i] = 2.0 * (h[i] + h[i + 1]);
            upper[i] = h[i + 1];
            rhs[i] = 6.0 * (s[i + 1] - s[i]);
        }
        for (std::size_t i = 1; i < interior; ++i) {
            const double w = h[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m[interior] = rhs[interior - 1] / diag[interior - 1];
        for (std::size_t i = interior - 1; i-- > 0;) {
            m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
        }
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        slopes[k] = s[k] - h[k] * (2.0 * m[k] + m[k + 1]) / 6.0;
    }
    slopes[n - 1] = s[n - 2] + h[n - 2] * (m[n - 2] + 2.0 * m[n - 1]) / 6.0;
    return {std::vector<double>(xs.begin(), xs.end()), std::vector<double>(ys.begin(), ys.end()),
            std::move(slopes)};
}

CubicHermite monotone_cubic_spline(std::span<const double> xs, std::span<const double> ys) {
    const CubicHermite base = natural_cubic_spline(xs, ys);
    const std::size_t n = xs.size();
    std::vector<double> d(base.slopes().begin(), base.slopes().end());
    if (n >= 2) {
        const auto s = secants(xs, ys);
        auto limit = [](double slope, double bound_dir, double bound) {
            // keep the slope on the side of bound_dir and no steeper than bound
            if (slope * bound_dir <= 0.0) return 0.0;
            return bound_dir * std::min(std::abs(slope), bound);
        };
        d[0] = limit(d[0], sign(s[0]), 3.0 * std::abs(s[0]));
        d[n - 1] = limit(d[n - 1], sign(s[n - 2]), 3.0 * std::abs(s[n - 2]));
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (s[k - 1] * s[k] > 0.0) {
                d[k] = limit(d[k], sign(s[k]), 3.0 * std::min(std::abs(s[k - 1]), std::abs(s[k])));
            } else {
                d[k] = 0.0;
            }
        }
    }
    return {std::vector<double>(xs.begin(), xs.end()), std::vector<double>(ys.begin(), ys.end()),
            std::move(d)};
}

std::vector<double> bessel_slopes(std::span<const double> xs, std::span<const double> ys) {
    require_increasing(xs, ys, "bessel_slopes");
    const std::size_t n = xs.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    const auto s = secants(xs, ys);
    d[0] = s[0];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h_left = xs[k] - xs[k - 1];
        const double h_right = xs[k + 1] - xs[k];
        d[k] = (h_right * s[k - 1] + h_left * s[k]) / (h_left + h_right);
    }
    d[n - 1] = 0.0;
    return d;
}

CubicHermite hyman_nonneg_spline(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> d = bessel_slopes(xs, ys);
    const std::size_t n = xs.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (ys[k] <= 0.0) {
            d[k] = 0.0;
            continue;
        }
        if (k > 0) d[k] = std::min(d[k], 3.0 * ys[k] / (xs[k] - xs[k - 1]));
        if (k + 1 < n) d[k] = std::max(d[k], -3.0 * ys[k] / (xs[k + 1] - xs[k]));
    }
    return {std::vector<double>(xs.begin(), xs.end()), std::vector<double>(ys.begin(), ys.end()),
            std::move(d)};
}

bool VolFamilySpec::is_local() const noexcept {
    return family == VolFamily::PiecewiseConstant || family == VolFamily::Kernel ||
           family == VolFamily::Linear;
}

VolCurve::VolCurve(std::vector<double> node_times, std::vector<double> node_values, VolFamilySpec spec,
                   double tenor_years)
    : times_(std::move(node_times)), values_(std::move(node_values)), spec_(spec), tenor_(tenor_years) {
    require_increasing(times_, values_, "VolCurve");
    if (!(tenor_ > 0.0)) {
        throw InputError("VolCurve: tenor must be positive");
    }
    if (spec_.family == VolFamily::Kernel && !(spec_.beta >= 0.0 && spec_.beta <= 1.0)) {
        throw InputError("VolCurve: ramp factor beta must lie in [0, 1]");
    }
    if (spec_.family == VolFamily::CubicC2) {
        spline_ = natural_cubic_spline(times_, values_);
    } else if (spec_.family == VolFamily::HymanNonnegC1) {
        spline_ = hyman_nonneg_spline(times_, values_);
    }
}

double VolCurve::operator()(double t) const noexcept {
    switch (spec_.family) {
        case VolFamily::PiecewiseConstant:
            return eval_piecewise_constant(t);
        case VolFamily::Kernel:
            return eval_kernel(t);
        case VolFamily::Linear:
            return linear_interpolate(times_, values_, t);
        case VolFamily::CubicC2:
        case VolFamily::HymanNonnegC1:
            return spline_(t);
    }
    return eval_piecewise_constant(t);
}

double VolCurve::eval_piecewise_constant(double t) const noexcept {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) return values_.back();
    return values_[static_cast<std::size_t>(std::distance(times_.begin(), it))];
}

double VolCurve::eval_kernel(double t) const noexcept {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return values_.front();
    if (it == times_.end()) return values_.back();
    const auto k = static_cast<std::size_t>(std::distance(times_.begin(), it));
    const double prev = times_[k - 1];
    const double centre = prev + 0.5 * tenor_;
    const double half_width = 0.5 * spec_.beta * tenor_;
    const double a = std::max(prev, centre - half_width);
    const double b = std::min(times_[k], centre + half_width);
    double psi = 0.0;
    if (b > a) {
        psi = transition(spec_.kernel, (t - a) / (b - a));
    } else {
        psi = (t > a || t >= times_[k]) ? 1.0 : 0.0;
    }
    return values_[k - 1] + (values_[k] - values_[k - 1]) * psi;
}

std::string_view to_string(Kernel kernel) noexcept {
    switch (kernel) {
        case Kernel::Rect: return "rect";
        case Kernel::Smoothstep: return "smoothstep";
        case Kernel::Cosine: return "cosine";
        case Kernel::Quintic: return "quintic";
    }
    return "rect";
}

std::string_view to_string(VolFamily family) noexcept {
    switch (family) {
        case VolFamily::PiecewiseConstant: return "piecewise_constant";
        case VolFamily::Kernel: return "kernel";
        case VolFamily::Linear: return "linear";
        case VolFamily::CubicC2: return "cubic_c2";
        case VolFamily::HymanNonnegC1: return "hyman_nonneg_c1";
    }
    return "piecewise_constant";
}

}  // namespace capstrip
