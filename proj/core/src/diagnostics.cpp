#include "capstrip/diagnostics.hpp"

#include "capstrip/bachelier.hpp"
#include "capstrip/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace capstrip {

double cap_price_from_flat_vol(const CapletSchedule& schedule, double flat_vol, double strike, std::size_t count) {
    if (flat_vol < 0.0) throw std::domain_error("cap_price_from_flat_vol: negative volatility");
    count = std::min(count, schedule.size());
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const Caplet& c = schedule[i];
        total += price({c.forward, strike, flat_vol, c.fixing, c.accrual, c.pay_df, OptionSide::Call});
    }
    return total;
}

double cap_intrinsic(const CapletSchedule& schedule, double strike, std::size_t count) {
    count = std::min(count, schedule.size());
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const Caplet& c = schedule[i];
        total += c.pay_df * c.accrual * std::max(c.forward - strike, 0.0);
    }
    return total;
}

CapQuoteSet::CapQuoteSet(RateCurves curves, double strike, std::vector<int> maturities_months,
                         std::vector<double> flat_vols)
    : curves_(std::move(curves)), strike_(strike), maturities_(std::move(maturities_months)),
      vols_(std::move(flat_vols)) {
    if (maturities_.empty()) throw InputError("CapQuoteSet: no quotes");
    if (maturities_.size() != vols_.size()) throw InputError("CapQuoteSet: one flat vol per maturity required");
    for (std::size_t q = 0; q < maturities_.size(); ++q) {
        if (q > 0 && maturities_[q] <= maturities_[q - 1]) {
            throw InputError("CapQuoteSet: maturities must be strictly increasing");
        }
        if (!(vols_[q] >= 0.0) || !std::isfinite(vols_[q])) {
            throw InputError("CapQuoteSet: flat vol at " + std::to_string(maturities_[q]) + "M is negative");
        }
    }
    schedule_ = curves_.schedule(maturities_.back());
    counts_.reserve(size());
    prices_.reserve(size());
    intrinsics_.reserve(size());
    time_values_.reserve(size());
    for (std::size_t q = 0; q < size(); ++q) {
        const std::size_t n = schedule_.count_for(maturities_[q]);
        if (n < 1) {
            throw InputError("CapQuoteSet: a " + std::to_string(maturities_[q]) + "M cap holds no caplet");
        }
        counts_.push_back(n);
        prices_.push_back(cap_price_from_flat_vol(schedule_, vols_[q], strike_, n));
        intrinsics_.push_back(cap_intrinsic(schedule_, strike_, n));
        time_values_.push_back(prices_.back() - intrinsics_.back());
    }
}

CapQuoteSet CapQuoteSet::with_strike(double strike) const { return {curves_, strike, maturities_, vols_}; }

CapQuoteSet CapQuoteSet::with_curves(RateCurves curves) const {
    return {std::move(curves), strike_, maturities_, vols_};
}

namespace {

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

OutlierReport detect_outliers(std::span<const double> flat_vols, std::size_t window, double threshold) {
    if (flat_vols.size() < 3) throw InputError("detect_outliers: need at least three quotes");
    if (window % 2 == 0 || window < 3) throw InputError("detect_outliers: window must be odd and at least 3");

    const std::size_t n = flat_vols.size();
    const std::size_t half = window / 2;
    OutlierReport report;
    report.residuals.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t lo = q >= half ? q - half : 0;
        const std::size_t hi = std::min(n - 1, q + half);
        report.residuals[q] =
            flat_vols[q] - median({flat_vols.begin() + static_cast<std::ptrdiff_t>(lo),
                                   flat_vols.begin() + static_cast<std::ptrdiff_t>(hi + 1)});
    }
    const double centre = median(report.residuals);
    std::vector<double> deviations(n);
    for (std::size_t q = 0; q < n; ++q) deviations[q] = std::abs(report.residuals[q] - centre);
    const double mad = median(deviations);

    report.scores.assign(n, 0.0);
    if (!(mad > 0.0)) {
        report.degenerate_scale = true;
        report.warning = "median absolute deviation is zero; no outliers reported";
        return report;
    }
    for (std::size_t q = 0; q < n; ++q) {
        report.scores[q] = 0.6745 * (report.residuals[q] - centre) / mad;
        if (std::abs(report.scores[q]) > threshold) report.outliers.push_back(q);
    }
    return report;
}

DiagnosticsReport decompose(const CapQuoteSet& quotes) {
    DiagnosticsReport r;
    const std::size_t n = quotes.size();
    r.price.assign(quotes.prices().begin(), quotes.prices().end());
    r.intrinsic.assign(quotes.intrinsics().begin(), quotes.intrinsics().end());
    r.time_value.assign(quotes.time_values().begin(), quotes.time_values().end());
    r.d_price.resize(n);
    r.d_intrinsic.resize(n);
    r.d_time_value.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        r.d_price[q] = q == 0 ? r.price[q] : r.price[q] - r.price[q - 1];
        r.d_intrinsic[q] = q == 0 ? r.intrinsic[q] : r.intrinsic[q] - r.intrinsic[q - 1];
        r.d_time_value[q] = r.d_price[q] - r.d_intrinsic[q];
        if (r.d_time_value[q] < 0.0) r.arbitrage_violations.push_back(q);
        if (r.d_price[q] < 0.0) r.calendar_violations.push_back(q);
    }
    if (n >= 2) r.total_variance_violations = total_variance_check(quotes);
    return r;
}

std::vector<std::size_t> total_variance_check(std::span<const int> maturities_months,
                                              std::span<const double> flat_vols, TimeScale scale) {
    if (maturities_months.size() != flat_vols.size()) {
        throw InputError("total_variance_check: one flat vol per maturity required");
    }
    const double divisor = scale == TimeScale::Years ? 12.0 : 360.0;
    std::vector<std::size_t> flagged;
    for (std::size_t q = 1; q < flat_vols.size(); ++q) {
        const double prev = flat_vols[q - 1] * flat_vols[q - 1] * (maturities_months[q - 1] / divisor);
        const double curr = flat_vols[q] * flat_vols[q] * (maturities_months[q] / divisor);
        if (curr - prev < 0.0) flagged.push_back(q);
    }
    return flagged;
}

std::vector<std::size_t> total_variance_check(const CapQuoteSet& quotes, TimeScale scale) {
    return total_variance_check(quotes.maturities(), quotes.flat_vols(), scale);
}

CapQuoteSet remove_quotes(const CapQuoteSet& quotes, std::span<const std::size_t> indices) {
    std::vector<bool> drop(quotes.size(), false);
    for (std::size_t idx : indices) {
        if (idx >= quotes.size()) throw InputError("remove_quotes: index " + std::to_string(idx) + " out of range");
        drop[idx] = true;
    }
    std::vector<int> maturities;
    std::vector<double> vols;
    for (std::size_t q = 0; q < quotes.size(); ++q) {
        if (drop[q]) continue;
        maturities.push_back(quotes.maturities()[q]);
        vols.push_back(quotes.flat_vols()[q]);
    }
    if (maturities.empty()) throw InputError("remove_quotes: every quote would be removed");
    return {quotes.curves(), quotes.strike(), std::move(maturities), std::move(vols)};
}

}  // namespace capstrip
