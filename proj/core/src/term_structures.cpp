#include "capstrip/term_structures.hpp"

#include "capstrip/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace capstrip {

ZeroCurve::ZeroCurve(std::vector<double> pillar_times, std::vector<double> zero_rates, CurveInterp interp)
    : times_(std::move(pillar_times)), rates_(std::move(zero_rates)), interp_(interp) {
    if (times_.size() != rates_.size() || times_.empty()) {
        throw InputError("ZeroCurve: need one zero rate per pillar and at least one pillar");
    }
    if (times_.front() < 0.0) {
        throw InputError("ZeroCurve: pillar times must be non-negative");
    }
    log_dfs_.resize(times_.size());
    for (std::size_t k = 0; k < times_.size(); ++k) {
        if (k > 0 && !(times_[k] > times_[k - 1])) {
            throw InputError("ZeroCurve: pillar times must be strictly increasing");
        }
        log_dfs_[k] = -rates_[k] * times_[k];
    }
    if (interp_ == CurveInterp::CubicC2LogDf && times_.size() >= 2) {
        spline_ = natural_cubic_spline(times_, log_dfs_);
    }
}

ZeroCurve ZeroCurve::flat(double rate, double horizon) {
    return ZeroCurve({0.0, horizon}, {rate, rate}, CurveInterp::LogLinearDf);
}

ZeroCurve ZeroCurve::with_interp(CurveInterp interp) const { return ZeroCurve(times_, rates_, interp); }

double ZeroCurve::log_discount(double t) const {
    if (t < 0.0) {
        throw std::domain_error("ZeroCurve: negative time " + std::to_string(t));
    }
    if (t == 0.0) return 0.0;
    if (t <= times_.front()) return -rates_.front() * t;
    if (t >= times_.back()) return -rates_.back() * t;
    if (interp_ == CurveInterp::CubicC2LogDf) return spline_(t);
    return linear_interpolate(times_, log_dfs_, t);
}

double ZeroCurve::discount(double t) const {
    if (t == 0.0) return 1.0;
    return std::exp(log_discount(t));
}

double ZeroCurve::zero_rate(double t) const {
    if (t == 0.0) return rates_.front();
    return -log_discount(t) / t;
}

double discount_factor(const ZeroCurve& curve, double t) { return curve.discount(t); }

double forward_rate(const ZeroCurve& curve, double t1, double t2, double accrual) {
    if (t1 < 0.0 || !(t2 > t1)) {
        throw std::domain_error("forward_rate: need 0 <= t1 < t2");
    }
    if (!(accrual > 0.0)) {
        throw std::domain_error("forward_rate: accrual must be positive");
    }
    return (curve.discount(t1) / curve.discount(t2) - 1.0) / accrual;
}

std::size_t CapletSchedule::count_for(int maturity_months) const {
    if (maturity_months % tenor_months != 0) {
        throw InputError("cap maturity " + std::to_string(maturity_months) +
                         "M is not a multiple of the caplet tenor");
    }
    const int n = maturity_months / tenor_months - 1;
    return n < 0 ? 0 : static_cast<std::size_t>(n);
}

CapletSchedule build_schedule(const ZeroCurve& projection, const ZeroCurve& discount, int cap_maturity_months,
                              int tenor_months) {
    if (tenor_months <= 0) {
        throw InputError("build_schedule: tenor must be a positive number of months");
    }
    if (cap_maturity_months % tenor_months != 0) {
        throw InputError("build_schedule: cap maturity " + std::to_string(cap_maturity_months) +
                         "M is not a multiple of the " + std::to_string(tenor_months) + "M tenor");
    }
    const int n = cap_maturity_months / tenor_months - 1;
    if (n < 1) {
        throw InputError("build_schedule: a " + std::to_string(cap_maturity_months) + "M cap on a " +
                         std::to_string(tenor_months) + "M tenor holds no caplet");
    }
    CapletSchedule schedule;
    schedule.tenor_months = tenor_months;
    schedule.caplets.reserve(static_cast<std::size_t>(n));
    const double accrual = tenor_months / 12.0;
    for (int i = 1; i <= n; ++i) {
        Caplet c{};
        c.fixing = (i * tenor_months) / 12.0;
        c.payment = ((i + 1) * tenor_months) / 12.0;
        c.accrual = accrual;
        c.forward = forward_rate(projection, c.fixing, c.payment, accrual);
        c.pay_df = discount.discount(c.payment);
        schedule.caplets.push_back(c);
    }
    return schedule;
}

std::string_view to_string(CurveInterp interp) noexcept {
    return interp == CurveInterp::LogLinearDf ? "loglinear" : "cubic";
}

}  // namespace capstrip
