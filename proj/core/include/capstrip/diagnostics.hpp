#pragma once

#include "capstrip/term_structures.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace capstrip {

/// Sum of Bachelier caplet prices of the first `count` caplets at one flat vol (all caplets by default).
double cap_price_from_flat_vol(const CapletSchedule& schedule, double flat_vol, double strike,
                               std::size_t count = static_cast<std::size_t>(-1));

/// Discounted intrinsic value of the first `count` caplets.
double cap_intrinsic(const CapletSchedule& schedule, double strike,
                     std::size_t count = static_cast<std::size_t>(-1));

/// Cap quotes at one strike together with the curves that price them.
///
/// Prices, intrinsics and time values are per unit notional, derived at construction.
class CapQuoteSet {
public:
    CapQuoteSet(RateCurves curves, double strike, std::vector<int> maturities_months,
                std::vector<double> flat_vols);

    const RateCurves& curves() const noexcept { return curves_; }
    double strike() const noexcept { return strike_; }
    std::size_t size() const noexcept { return maturities_.size(); }

    std::span<const int> maturities() const noexcept { return maturities_; }
    std::span<const double> flat_vols() const noexcept { return vols_; }
    std::span<const double> prices() const noexcept { return prices_; }
    std::span<const double> intrinsics() const noexcept { return intrinsics_; }
    std::span<const double> time_values() const noexcept { return time_values_; }
    std::span<const std::size_t> caplet_counts() const noexcept { return counts_; }

    /// Caplets of the longest cap; every shorter cap is a prefix of it.
    const CapletSchedule& schedule() const noexcept { return schedule_; }
    double tenor_years() const noexcept { return curves_.tenor_months / 12.0; }

    CapQuoteSet with_strike(double strike) const;
    CapQuoteSet with_curves(RateCurves curves) const;

private:
    RateCurves curves_;
    double strike_;
    std::vector<int> maturities_;
    std::vector<double> vols_;
    CapletSchedule schedule_;
    std::vector<std::size_t> counts_;
    std::vector<double> prices_;
    std::vector<double> intrinsics_;
    std::vector<double> time_values_;
};

struct OutlierReport {
    std::vector<double> residuals;  ///< quote minus rolling median
    std::vector<double> scores;     ///< modified Z-scores (0 when the scale is degenerate)
    std::vector<std::size_t> outliers;
    bool degenerate_scale = false;  ///< MAD was zero, nothing flagged
    std::string warning;
};

/// Modified Z-score outlier test on residuals from a rolling median.
///
/// The window is centred and truncated at the ends. Scores are
/// 0.6745 (r_q - median r) / MAD(r) and quote q is flagged when |score| > threshold.
OutlierReport detect_outliers(std::span<const double> flat_vols, std::size_t window = 5,
                              double threshold = 3.0);

struct DiagnosticsReport {
    std::vector<double> price;
    std::vector<double> intrinsic;
    std::vector<double> time_value;
    std::vector<double> d_price;
    std::vector<double> d_intrinsic;
    std::vector<double> d_time_value;               ///< d_price - d_intrinsic
    std::vector<std::size_t> arbitrage_violations;  ///< d_time_value < 0
    std::vector<std::size_t> calendar_violations;   ///< d_price < 0
    std::vector<std::size_t> total_variance_violations;
};

/// Intrinsic/time-value decomposition of the quotes and the static-arbitrage checks.
/// Increments of the first quote are taken against an empty cap.
DiagnosticsReport decompose(const CapQuoteSet& quotes);

enum class TimeScale {
    Years,          ///< months / 12
    ListingDays360  ///< months / 360; flags the same pairs as Years
};

/// Indices q (of the later quote) where flat_vol^2 * T decreases from q - 1 to q. Advisory only.
std::vector<std::size_t> total_variance_check(const CapQuoteSet& quotes, TimeScale scale = TimeScale::Years);
std::vector<std::size_t> total_variance_check(std::span<const int> maturities_months,
                                              std::span<const double> flat_vols,
                                              TimeScale scale = TimeScale::Years);

/// Quote set without the given indices; throws InputError on a bad index or if nothing is left.
CapQuoteSet remove_quotes(const CapQuoteSet& quotes, std::span<const std::size_t> indices);
inline CapQuoteSet remove_outliers(const CapQuoteSet& quotes, std::span<const std::size_t> indices) {
    return remove_quotes(quotes, indices);
}

}  // namespace capstrip
