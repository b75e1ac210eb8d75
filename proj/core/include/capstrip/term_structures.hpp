#pragma once

#include "capstrip/interpolation.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace capstrip {

/// Interpolation applied to log discount factors between pillars.
enum class CurveInterp {
    LogLinearDf,  ///< piecewise-constant instantaneous forwards
    CubicC2LogDf  ///< natural C2 cubic spline on log B(t)
};

/// Continuously-compounded zero curve. Immutable once built.
///
/// Outside the pillar range the zero rate is held flat, so B(t) = exp(-z_N t) beyond the
/// last pillar (and exp(-z_1 t) before a first pillar that is not at t = 0).
class ZeroCurve {
public:
    ZeroCurve(std::vector<double> pillar_times, std::vector<double> zero_rates,
              CurveInterp interp = CurveInterp::LogLinearDf);

    /// Flat curve used in tests and examples.
    static ZeroCurve flat(double rate, double horizon = 100.0);

    double discount(double t) const;
    double zero_rate(double t) const;

    std::span<const double> pillar_times() const noexcept { return times_; }
    std::span<const double> zero_rates() const noexcept { return rates_; }
    CurveInterp interp() const noexcept { return interp_; }

    /// Same pillars with a different interpolation mode.
    ZeroCurve with_interp(CurveInterp interp) const;

private:
    double log_discount(double t) const;

    std::vector<double> times_;
    std::vector<double> rates_;
    std::vector<double> log_dfs_;
    CurveInterp interp_;
    CubicHermite spline_;
};

/// B(t) on the curve; throws std::domain_error for t < 0.
double discount_factor(const ZeroCurve& curve, double t);

/// Simply-compounded forward (B(t1)/B(t2) - 1) / accrual.
double forward_rate(const ZeroCurve& curve, double t1, double t2, double accrual);

struct Caplet {
    double fixing;   ///< years
    double payment;  ///< years
    double accrual;  ///< year fraction
    double forward;  ///< projection-curve forward over [fixing, payment]
    double pay_df;   ///< discount-curve factor to payment
};

/// Caplets of one forward-looking cap: fixing at tenor, 2 tenor, ..., maturity - tenor.
struct CapletSchedule {
    int tenor_months = 1;
    std::vector<Caplet> caplets;

    std::size_t size() const noexcept { return caplets.size(); }
    const Caplet& operator[](std::size_t i) const noexcept { return caplets[i]; }
    /// Number of caplets in a cap of the given maturity on this grid.
    std::size_t count_for(int maturity_months) const;
};

/// Caplet schedule of a cap_maturity-month cap; throws InputError when the maturity is not a
/// multiple of the tenor or holds no caplet.
CapletSchedule build_schedule(const ZeroCurve& projection, const ZeroCurve& discount, int cap_maturity_months,
                              int tenor_months);

/// Projection and discount curves plus the caplet tenor: everything needed to lay out caps.
struct RateCurves {
    ZeroCurve projection;
    ZeroCurve discount;
    int tenor_months = 1;

    CapletSchedule schedule(int cap_maturity_months) const {
        return build_schedule(projection, discount, cap_maturity_months, tenor_months);
    }
    RateCurves with_interp(CurveInterp interp) const {
        return {projection.with_interp(interp), discount.with_interp(interp), tenor_months};
    }
};

std::string_view to_string(CurveInterp interp) noexcept;

}  // namespace capstrip
