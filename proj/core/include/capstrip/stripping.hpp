#pragma once

#include "capstrip/diagnostics.hpp"
#include "capstrip/interpolation.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace capstrip {

enum class StripMethod { TimeValue, Bootstrap, Global };

enum class NodePlacement {
    AtMaturity,        ///< tau_k = T_k - tenor (last fixing of cap k)
    Midpoint,          ///< tau_1 = T_1 - tenor, tau_k = (T_{k-1} + T_k) / 2 - tenor
    MidpointUnshifted  ///< tau_1 = T_1 - tenor, tau_k = (T_{k-1} + T_k) / 2
};

enum class Positivity {
    None,          ///< node values free; caplet vols floored at 0 when pricing
    ExpTransform,  ///< solve for u_k with v_k = exp(u_k)
    NonnegSpline,  ///< non-negative Hyman spline, node values kept >= 0
    Floor          ///< solve, then floor node values at StripConfig::floor
};

/// Interpolant of the cumulative time value in the time-value method.
enum class TimeValueInterp { Linear, MonotoneCubic };

struct StripConfig {
    StripMethod method = StripMethod::Bootstrap;
    NodePlacement placement = NodePlacement::AtMaturity;
    VolFamilySpec family = VolFamilySpec::piecewise_constant();
    Positivity positivity = Positivity::None;
    double floor = 0.0;  ///< decimal vol, for Positivity::Floor and as the bootstrap lower bracket

    // Time-value method only.
    TimeValueInterp tv_interp = TimeValueInterp::MonotoneCubic;
    bool arbitrage_filter = false;
    bool interpolate_prices = false;  ///< interpolate cap prices instead of time values

    // Global method only.
    double residual_tol_bp = 1e-10;
    int max_iterations = 200;
};

struct StripResult {
    std::vector<double> node_times;     ///< years
    std::vector<double> node_values;    ///< decimal vols
    std::vector<double> fixing_times;   ///< years, one per caplet
    std::vector<double> caplet_vols;    ///< decimal vols used for pricing (>= 0)
    std::vector<int> maturities;        ///< caps that were fitted
    std::vector<double> residuals_bp;   ///< model minus market price per fitted cap, bp of notional
    std::vector<int> removed_quotes;    ///< maturities dropped by the arbitrage filter
    double min_vol = 0.0;
    double min_node_value = 0.0;
    double max_abs_residual_bp = 0.0;
    bool converged = true;
    int iterations = 0;
    std::size_t negative_increments = 0;  ///< time-value method: increments clamped at zero
    std::vector<std::string> warnings;
};

/// Node abscissae in years. Throws InputError when the first node is not positive.
std::vector<double> place_nodes(std::span<const int> maturities_months, int tenor_months, NodePlacement placement);

/// Quote set with one more cap at `months` (flat vol defaults to the last quoted one).
CapQuoteSet add_synthetic_far_quote(const CapQuoteSet& quotes, int months, std::optional<double> flat_vol = {});

/// Prices of every cap in the set under a caplet vol curve; negative curve values are floored at 0.
std::vector<double> model_cap_prices(const CapQuoteSet& quotes, const VolCurve& curve);

/// d P_q / d v_k by forward differences for the given nodes; rows are caps, columns nodes.
std::vector<std::vector<double>> cap_price_jacobian(const CapQuoteSet& quotes, std::span<const double> node_times,
                                                    std::span<const double> node_values, const VolFamilySpec& family,
                                                    double step = 1e-7);

StripResult strip_time_value(const CapQuoteSet& quotes, const StripConfig& config);
StripResult bootstrap_sequential(const CapQuoteSet& quotes, const StripConfig& config);
StripResult strip_global(const CapQuoteSet& quotes, const StripConfig& config);

/// Dispatches on config.method.
StripResult strip(const CapQuoteSet& quotes, const StripConfig& config);

std::string_view to_string(StripMethod method) noexcept;
std::string_view to_string(NodePlacement placement) noexcept;
std::string_view to_string(Positivity positivity) noexcept;
std::string_view to_string(TimeValueInterp interp) noexcept;

}  // namespace capstrip
