#include "capstrip/stripping.hpp"

#include "capstrip/bachelier.hpp"
#include "capstrip/errors.hpp"
#include "capstrip/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace capstrip {

namespace {

constexpr double kBp = 1e-4;
constexpr double kInitialUpper = 5000.0 * kBp;
constexpr double kMaxUpper = 1e6 * kBp;
constexpr double kExpStartFloor = 0.01 * kBp;

double caplet_value(const Caplet& c, double strike, double vol) {
    if (std::isnan(vol)) return vol;
    return price({c.forward, strike, std::max(vol, 0.0), c.fixing, c.accrual, c.pay_df, OptionSide::Call});
}

std::vector<double> prices_from_caplet_vols(const CapQuoteSet& quotes, std::span<const double> vols) {
    const CapletSchedule& schedule = quotes.schedule();
    std::vector<double> out(quotes.size());
    double running = 0.0;
    std::size_t i = 0;
    for (std::size_t q = 0; q < quotes.size(); ++q) {
        for (; i < quotes.caplet_counts()[q]; ++i) running += caplet_value(schedule[i], quotes.strike(), vols[i]);
        out[q] = running;
    }
    return out;
}

std::vector<double> caplet_vols_on_grid(const CapletSchedule& schedule, const VolCurve& curve) {
    std::vector<double> vols(schedule.size());
    for (std::size_t i = 0; i < schedule.size(); ++i) vols[i] = std::max(curve(schedule[i].fixing), 0.0);
    return vols;
}

std::vector<double> residuals_bp(const CapQuoteSet& quotes, std::span<const double> model) {
    std::vector<double> r(quotes.size());
    for (std::size_t q = 0; q < quotes.size(); ++q) r[q] = (model[q] - quotes.prices()[q]) / kBp;
    return r;
}

void fill_summary(StripResult& result, const CapQuoteSet& quotes) {
    result.fixing_times.resize(quotes.schedule().size());
    for (std::size_t i = 0; i < result.fixing_times.size(); ++i) result.fixing_times[i] = quotes.schedule()[i].fixing;
    result.maturities.assign(quotes.maturities().begin(), quotes.maturities().end());
    result.residuals_bp = residuals_bp(quotes, prices_from_caplet_vols(quotes, result.caplet_vols));
    result.min_vol = result.caplet_vols.empty()
                         ? 0.0
                         : *std::min_element(result.caplet_vols.begin(), result.caplet_vols.end());
    result.min_node_value = result.node_values.empty()
                                ? 0.0
                                : *std::min_element(result.node_values.begin(), result.node_values.end());
    result.max_abs_residual_bp = 0.0;
    for (double r : result.residuals_bp) result.max_abs_residual_bp = std::max(result.max_abs_residual_bp, std::abs(r));
}

void finish_from_curve(StripResult& result, const CapQuoteSet& quotes, const VolFamilySpec& family) {
    const VolCurve curve(result.node_times, result.node_values, family, quotes.tenor_years());
    result.caplet_vols = caplet_vols_on_grid(quotes.schedule(), curve);
    fill_summary(result, quotes);
}

VolFamilySpec effective_family(const StripConfig& config) {
    if (config.positivity == Positivity::NonnegSpline) return VolFamilySpec::hyman();
    return config.family;
}

std::string bp_string(double vol) { return std::to_string(vol / kBp) + " bp"; }

}  // namespace

std::vector<double> place_nodes(std::span<const int> maturities_months, int tenor_months, NodePlacement placement) {
    if (maturities_months.empty()) throw InputError("place_nodes: no maturities");
    for (std::size_t k = 1; k < maturities_months.size(); ++k) {
        if (maturities_months[k] <= maturities_months[k - 1]) {
            throw InputError("place_nodes: maturities must be strictly increasing");
        }
    }
    std::vector<double> nodes(maturities_months.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        double months = maturities_months[k] - tenor_months;
        if (k > 0 && placement != NodePlacement::AtMaturity) {
            months = 0.5 * (maturities_months[k - 1] + maturities_months[k]);
            if (placement == NodePlacement::Midpoint) months -= tenor_months;
        }
        nodes[k] = months / 12.0;
    }
    if (!(nodes.front() > 0.0)) throw InputError("place_nodes: first node must be after the valuation date");
    return nodes;
}

CapQuoteSet add_synthetic_far_quote(const CapQuoteSet& quotes, int months, std::optional<double> flat_vol) {
    if (months <= quotes.maturities().back()) {
        throw InputError("add_synthetic_far_quote: maturity " + std::to_string(months) +
                         "M is not beyond the last quote");
    }
    std::vector<int> maturities(quotes.maturities().begin(), quotes.maturities().end());
    std::vector<double> vols(quotes.flat_vols().begin(), quotes.flat_vols().end());
    maturities.push_back(months);
    vols.push_back(flat_vol.value_or(vols.back()));
    return {quotes.curves(), quotes.strike(), std::move(maturities), std::move(vols)};
}

std::vector<double> model_cap_prices(const CapQuoteSet& quotes, const VolCurve& curve) {
    return prices_from_caplet_vols(quotes, caplet_vols_on_grid(quotes.schedule(), curve));
}

std::vector<std::vector<double>> cap_price_jacobian(const CapQuoteSet& quotes, std::span<const double> node_times,
                                                    std::span<const double> node_values, const VolFamilySpec& family,
                                                    double step) {
    const std::vector<double> times(node_times.begin(), node_times.end());
    const ResidualFunction prices = [&](const std::vector<double>& v) {
        return model_cap_prices(quotes, VolCurve(times, v, family, quotes.tenor_years()));
    };
    return finite_difference_jacobian(prices, {node_values.begin(), node_values.end()}, step);
}

StripResult strip_time_value(const CapQuoteSet& input, const StripConfig& config) {
    StripResult result;
    CapQuoteSet quotes = input;

    if (config.arbitrage_filter) {
        for (;;) {
            // Augmented nodes: index 0 is the origin (0, 0), index j >= 1 is quote j - 1.
            const std::size_t n = quotes.size();
            auto t_at = [&](std::size_t j) { return j == 0 ? 0.0 : quotes.maturities()[j - 1] / 12.0; };
            auto tv_at = [&](std::size_t j) { return j == 0 ? 0.0 : quotes.time_values()[j - 1]; };
            std::size_t bad = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (tv_at(j) <= tv_at(j - 1)) {
                    bad = j;
                    break;
                }
            }
            if (bad == 0) break;
            auto deviation = [&](std::size_t j) {
                if (j == 0 || j == n) return 0.0;
                const double w = (t_at(j) - t_at(j - 1)) / (t_at(j + 1) - t_at(j - 1));
                return std::abs(tv_at(j) - ((1.0 - w) * tv_at(j - 1) + w * tv_at(j + 1)));
            };
            std::size_t drop = bad;
            if (bad >= 2 && deviation(bad - 1) > deviation(bad)) drop = bad - 1;
            if (n == 1) throw InputError("strip_time_value: the arbitrage filter removed every quote");
            result.removed_quotes.push_back(quotes.maturities()[drop - 1]);
            const std::size_t idx = drop - 1;
            quotes = remove_quotes(quotes, std::span<const std::size_t>(&idx, 1));
        }
    }

    std::vector<double> xs{0.0};
    std::vector<double> ys{0.0};
    for (std::size_t q = 0; q < quotes.size(); ++q) {
        xs.push_back(quotes.maturities()[q] / 12.0);
        ys.push_back(config.interpolate_prices ? quotes.prices()[q] : quotes.time_values()[q]);
    }
    CubicHermite spline;
    if (config.tv_interp == TimeValueInterp::MonotoneCubic) spline = monotone_cubic_spline(xs, ys);
    auto interpolate = [&](double t) {
        return config.tv_interp == TimeValueInterp::Linear ? linear_interpolate(xs, ys, t) : spline(t);
    };

    const CapletSchedule& schedule = quotes.schedule();
    const double strike = quotes.strike();
    result.caplet_vols.resize(schedule.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const Caplet& c = schedule[i];
        double value = interpolate(c.payment);
        double increment = 0.0;
        if (config.interpolate_prices) {
            increment = (value - previous) - c.pay_df * c.accrual * std::max(c.forward - strike, 0.0);
        } else {
            value = std::max(value, previous);
            increment = value - previous;
        }
        if (increment < 0.0) {
            ++result.negative_increments;
            increment = 0.0;
        }
        previous = value;
        result.caplet_vols[i] =
            implied_vol_from_time_value(increment, c.forward, strike, c.fixing, c.accrual, c.pay_df);
    }
    if (result.negative_increments > 0) {
        result.warnings.push_back(std::to_string(result.negative_increments) +
                                  " caplet time-value increments were negative and set to zero");
    }
    result.node_times.resize(schedule.size());
    for (std::size_t i = 0; i < schedule.size(); ++i) result.node_times[i] = schedule[i].fixing;
    result.node_values = result.caplet_vols;
    fill_summary(result, quotes);
    return result;
}

StripResult bootstrap_sequential(const CapQuoteSet& quotes, const StripConfig& config) {
    const VolFamilySpec family = effective_family(config);
    if (config.placement != NodePlacement::AtMaturity && family.family != VolFamily::PiecewiseConstant) {
        throw InputError("bootstrap_sequential: midpoint nodes need the global solver for this family");
    }
    StripResult result;
    result.node_times = place_nodes(quotes.maturities(), quotes.curves().tenor_months, config.placement);
    const std::size_t n_quotes = quotes.size();
    const double lower = config.positivity == Positivity::Floor ? config.floor : 0.0;
    const CapletSchedule& schedule = quotes.schedule();
    const double strike = quotes.strike();

    std::vector<double> values;
    values.reserve(n_quotes);
    for (std::size_t q = 0; q < n_quotes; ++q) {
        const std::vector<double> times(result.node_times.begin(),
                                        result.node_times.begin() + static_cast<std::ptrdiff_t>(q + 1));
        const std::size_t first = q == 0 ? 0 : quotes.caplet_counts()[q - 1];
        const std::size_t last = quotes.caplet_counts()[q];
        const double target = quotes.prices()[q] - (q == 0 ? 0.0 : quotes.prices()[q - 1]);

        auto incremental = [&](double v) {
            std::vector<double> trial = values;
            trial.push_back(v);
            const VolCurve curve(times, std::move(trial), family, quotes.tenor_years());
            double total = 0.0;
            for (std::size_t i = first; i < last; ++i) total += caplet_value(schedule[i], strike, curve(schedule[i].fixing));
            return total - target;
        };

        double upper = kInitialUpper;
        double f_upper = incremental(upper);
        while (f_upper < 0.0 && upper < kMaxUpper) {
            upper = std::min(2.0 * upper, kMaxUpper);
            f_upper = incremental(upper);
        }
        const double f_lower = incremental(lower);
        double v = lower;
        if (f_lower > 0.0) {
            result.warnings.push_back(std::to_string(quotes.maturities()[q]) +
                                      "M: no root above the floor, node clamped to " + bp_string(lower));
        } else if (f_upper < 0.0) {
            v = upper;
            result.warnings.push_back(std::to_string(quotes.maturities()[q]) +
                                      "M: no root below the upper bracket, node clamped to " + bp_string(upper));
        } else {
            const auto root = brent(incremental, lower, upper, 1e-16);
            v = root->x;
            result.iterations += root->iterations;
        }
        values.push_back(v);
    }
    result.node_values = std::move(values);
    finish_from_curve(result, quotes, family);
    return result;
}

StripResult strip_global(const CapQuoteSet& quotes, const StripConfig& config) {
    const VolFamilySpec family = effective_family(config);
    StripResult result;
    result.node_times = place_nodes(quotes.maturities(), quotes.curves().tenor_months, config.placement);

    // Starts: the piecewise-constant bootstrap, the quoted flat vols, and for at-maturity nodes the
    // bootstrap of the same family. Caplet vols floored at zero leave several local minima on
    // arbitrageable quotes; the lowest one wins.
    StripConfig init_config;
    init_config.method = StripMethod::Bootstrap;
    std::vector<std::vector<double>> starts{
        bootstrap_sequential(quotes, init_config).node_values,
        std::vector<double>(quotes.flat_vols().begin(), quotes.flat_vols().end())};
    if (config.placement == NodePlacement::AtMaturity && family.family != VolFamily::PiecewiseConstant) {
        StripConfig same = config;
        same.positivity = Positivity::None;
        starts.push_back(bootstrap_sequential(quotes, same).node_values);
    }

    const bool exp_space = config.positivity == Positivity::ExpTransform;
    if (exp_space) {
        for (auto& start : starts) {
            for (double& v : start) v = std::log(std::max(v, kExpStartFloor));
        }
    }
    auto to_values = [exp_space](std::vector<double> x) {
        if (exp_space) {
            for (double& v : x) v = std::exp(v);
        }
        return x;
    };
    const std::vector<double> times = result.node_times;
    const ResidualFunction residuals = [&](const std::vector<double>& x) {
        const std::vector<double> values = to_values(x);
        if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
            return std::vector<double>(quotes.size(), std::numeric_limits<double>::quiet_NaN());
        }
        const VolCurve curve(times, values, family, quotes.tenor_years());
        return residuals_bp(quotes, model_cap_prices(quotes, curve));
    };

    LevenbergMarquardtOptions options;
    options.residual_tol = config.residual_tol_bp;
    options.max_iterations = config.max_iterations;
    if (config.positivity == Positivity::NonnegSpline) {
        options.project = [](std::vector<double>& x) {
            for (double& v : x) v = std::max(v, 0.0);
        };
    }
    auto cost = [](const std::vector<double>& r) {
        double s = 0.0;
        for (double v : r) s += v * v;
        return s;
    };
    LevenbergMarquardtResult fit = levenberg_marquardt(residuals, starts[0], options);
    int iterations = fit.iterations;
    auto exact = [&](const LevenbergMarquardtResult& f) {
        return std::all_of(f.residuals.begin(), f.residuals.end(),
                           [&](double r) { return std::abs(r) <= config.residual_tol_bp; });
    };
    for (std::size_t k = 1; k < starts.size() && !exact(fit); ++k) {
        LevenbergMarquardtResult other = levenberg_marquardt(residuals, starts[k], options);
        iterations += other.iterations;
        if (cost(other.residuals) < cost(fit.residuals)) fit = std::move(other);
    }
    result.node_values = to_values(fit.x);
    result.converged = fit.converged;
    result.iterations = iterations;
    if (!fit.converged) {
        result.warnings.push_back("global solve did not reach the residual tolerance; best iterate returned");
    }
    if (config.positivity == Positivity::Floor) {
        for (double& v : result.node_values) v = std::max(v, config.floor);
    }
    finish_from_curve(result, quotes, family);
    return result;
}

StripResult strip(const CapQuoteSet& quotes, const StripConfig& config) {
    switch (config.method) {
        case StripMethod::TimeValue: return strip_time_value(quotes, config);
        case StripMethod::Bootstrap: return bootstrap_sequential(quotes, config);
        case StripMethod::Global: return strip_global(quotes, config);
    }
    throw std::logic_error("strip: unknown method");
}

std::string_view to_string(StripMethod method) noexcept {
    switch (method) {
        case StripMethod::TimeValue: return "tv";
        case StripMethod::Bootstrap: return "bootstrap";
        case StripMethod::Global: return "global";
    }
    return "?";
}

std::string_view to_string(NodePlacement placement) noexcept {
    switch (placement) {
        case NodePlacement::AtMaturity: return "maturity";
        case NodePlacement::Midpoint: return "mid";
        case NodePlacement::MidpointUnshifted: return "mid-unshifted";
    }
    return "?";
}

std::string_view to_string(Positivity positivity) noexcept {
    switch (positivity) {
        case Positivity::None: return "none";
        case Positivity::ExpTransform: return "exp";
        case Positivity::NonnegSpline: return "nonneg";
        case Positivity::Floor: return "floor";
    }
    return "?";
}

std::string_view to_string(TimeValueInterp interp) noexcept {
    return interp == TimeValueInterp::Linear ? "linear" : "monotone-cubic";
}

}  // namespace capstrip
