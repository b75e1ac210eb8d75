#include "capstrip/pipeline.hpp"

#include "capstrip/errors.hpp"
#include "capstrip/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

namespace capstrip {

namespace {

constexpr double kBp = 1e-4;
constexpr double kMinStrikeBp = -1000.0;

double parse_number(std::string_view s, std::string_view what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
        throw InputError(std::string(what) + ": not a number: '" + std::string(s) + "'");
    }
    return value;
}

std::string family_name(const VolFamilySpec& f) {
    switch (f.family) {
        case VolFamily::PiecewiseConstant: return "flat";
        case VolFamily::Linear: return "linear";
        case VolFamily::CubicC2: return "cubic";
        case VolFamily::HymanNonnegC1: return "hyman";
        case VolFamily::Kernel: break;
    }
    switch (f.kernel) {
        case Kernel::Rect: return "flat-linear";
        case Kernel::Smoothstep: return "flat-smooth";
        case Kernel::Cosine: return "cosine";
        case Kernel::Quintic: return "quintic";
    }
    return "?";
}

std::string number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ConfigEcho echo(const RunConfig& c, std::size_t quotes_used) {
    const StripConfig& s = c.strip;
    ConfigEcho e{
        {"projection_curve", c.projection_curve.generic_string()},
        {"discount_curve", c.discount_curve.generic_string()},
        {"quotes", c.quotes.generic_string()},
        {"strike_bp", number(c.strike_bp)},
        {"tenor_months", std::to_string(c.tenor_months)},
        {"curve_interp", std::string(to_string(c.curve_interp))},
        {"method", std::string(to_string(s.method))},
        {"family", family_name(s.family)},
        {"beta", number(s.family.beta)},
        {"nodes", std::string(to_string(s.placement))},
        {"positivity", std::string(to_string(s.positivity))},
        {"floor_bp", number(s.floor / kBp)},
        {"tv_interp", std::string(to_string(s.tv_interp))},
        {"arbitrage_filter", s.arbitrage_filter ? "true" : "false"},
        {"interpolate_prices", s.interpolate_prices ? "true" : "false"},
        {"outliers", c.outliers == OutlierPolicy::Off ? "off" : c.outliers == OutlierPolicy::Report ? "report" : "remove"},
        {"mad_threshold", number(c.mad_threshold)},
        {"far_quote", c.far_quote_months ? std::to_string(*c.far_quote_months) +
                                               (c.far_quote_vol_bp ? ":" + number(*c.far_quote_vol_bp) : "")
                                         : ""},
        {"strict", c.strict ? "true" : "false"},
        {"quotes_used", std::to_string(quotes_used)},
    };
    return e;
}

template <typename Writer>
std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name, Writer writer) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
    return path;
}

std::string months_list(const CapQuoteSet& quotes, const std::vector<std::size_t>& idx) {
    std::string s;
    for (std::size_t i : idx) s += (s.empty() ? "" : ", ") + std::to_string(quotes.maturities()[i]) + "M";
    return s;
}

}  // namespace

StripMethod parse_method(std::string_view s) {
    if (s == "tv") return StripMethod::TimeValue;
    if (s == "bootstrap") return StripMethod::Bootstrap;
    if (s == "global") return StripMethod::Global;
    throw InputError("unknown method '" + std::string(s) + "'");
}

VolFamilySpec parse_family(std::string_view s, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must lie in [0, 1]");
    if (s == "flat") return VolFamilySpec::piecewise_constant();
    if (s == "flat-linear") return VolFamilySpec::kernel_ramp(Kernel::Rect, beta);
    if (s == "flat-smooth") return VolFamilySpec::kernel_ramp(Kernel::Smoothstep, beta);
    if (s == "cosine") return VolFamilySpec::kernel_ramp(Kernel::Cosine, beta);
    if (s == "quintic") return VolFamilySpec::kernel_ramp(Kernel::Quintic, beta);
    if (s == "linear") return VolFamilySpec::linear();
    if (s == "cubic") return VolFamilySpec::cubic();
    if (s == "hyman") return VolFamilySpec::hyman();
    throw InputError("unknown family '" + std::string(s) + "'");
}

NodePlacement parse_placement(std::string_view s) {
    if (s == "maturity") return NodePlacement::AtMaturity;
    if (s == "mid") return NodePlacement::Midpoint;
    if (s == "mid-unshifted") return NodePlacement::MidpointUnshifted;
    throw InputError("unknown node placement '" + std::string(s) + "'");
}

void parse_positivity(std::string_view s, StripConfig& config) {
    if (s == "none") {
        config.positivity = Positivity::None;
    } else if (s == "exp") {
        config.positivity = Positivity::ExpTransform;
    } else if (s == "nonneg") {
        config.positivity = Positivity::NonnegSpline;
        config.family = VolFamilySpec::hyman();
    } else if (s.starts_with("floor=")) {
        config.positivity = Positivity::Floor;
        config.floor = parse_number(s.substr(6), "positivity floor") * kBp;
        if (config.floor < 0.0) throw InputError("positivity floor must be non-negative");
    } else {
        throw InputError("unknown positivity '" + std::string(s) + "'");
    }
}

OutlierPolicy parse_outlier_policy(std::string_view s) {
    if (s == "off") return OutlierPolicy::Off;
    if (s == "report") return OutlierPolicy::Report;
    if (s == "remove") return OutlierPolicy::Remove;
    throw InputError("unknown outlier policy '" + std::string(s) + "'");
}

CurveInterp parse_curve_interp(std::string_view s) {
    if (s == "loglinear") return CurveInterp::LogLinearDf;
    if (s == "cubic") return CurveInterp::CubicC2LogDf;
    throw InputError("unknown curve interpolation '" + std::string(s) + "'");
}

void parse_far_quote(std::string_view s, RunConfig& config) {
    const auto colon = s.find(':');
    const double months = parse_number(s.substr(0, colon), "far quote months");
    if (months != std::floor(months) || months <= 0) throw InputError("far quote months must be a positive integer");
    config.far_quote_months = static_cast<int>(months);
    config.far_quote_vol_bp.reset();
    if (colon != std::string_view::npos) config.far_quote_vol_bp = parse_number(s.substr(colon + 1), "far quote vol");
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open config");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    RunConfig c;
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    try {
        if (j.contains("projection_curve")) c.projection_curve = resolve(j["projection_curve"].get<std::string>());
        if (j.contains("discount_curve")) c.discount_curve = resolve(j["discount_curve"].get<std::string>());
        if (j.contains("quotes")) c.quotes = resolve(j["quotes"].get<std::string>());
        if (j.contains("out")) c.output_dir = resolve(j["out"].get<std::string>());
        if (j.contains("strike_bp")) c.strike_bp = j["strike_bp"].get<double>();
        if (j.contains("tenor_months")) c.tenor_months = j["tenor_months"].get<int>();
        if (j.contains("curve_interp")) c.curve_interp = parse_curve_interp(j["curve_interp"].get<std::string>());
        if (j.contains("method")) c.strip.method = parse_method(j["method"].get<std::string>());
        const double beta = j.value("beta", 1.0);
        if (j.contains("family")) c.strip.family = parse_family(j["family"].get<std::string>(), beta);
        if (j.contains("nodes")) c.strip.placement = parse_placement(j["nodes"].get<std::string>());
        if (j.contains("positivity")) parse_positivity(j["positivity"].get<std::string>(), c.strip);
        if (j.contains("tv_interp")) {
            const auto s = j["tv_interp"].get<std::string>();
            if (s != "linear" && s != "monotone") throw InputError("unknown tv_interp '" + s + "'");
            c.strip.tv_interp = s == "linear" ? TimeValueInterp::Linear : TimeValueInterp::MonotoneCubic;
        }
        c.strip.arbitrage_filter = j.value("arbitrage_filter", false);
        c.strip.interpolate_prices = j.value("interpolate_prices", false);
        if (j.contains("outliers")) c.outliers = parse_outlier_policy(j["outliers"].get<std::string>());
        c.mad_threshold = j.value("mad_threshold", 3.0);
        if (j.contains("far_quote")) parse_far_quote(j["far_quote"].get<std::string>(), c);
        c.strict = j.value("strict", false);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return c;
}

RunOutcome run_pipeline(const RunConfig& config, std::ostream& log) {
    RunOutcome outcome;
    std::optional<CapQuoteSet> raw;
    std::optional<CapQuoteSet> used;
    StripResult result;
    std::vector<std::size_t> removed;

    // Everything that can fail on bad input happens before the first file is written.
    try {
        if (config.strike_bp < kMinStrikeBp) throw InputError("strike below -1000 bp");
        if (config.tenor_months <= 0) throw InputError("tenor must be a positive number of months");
        RateCurves curves{read_zero_curve_csv(config.projection_curve, config.curve_interp),
                          read_zero_curve_csv(config.discount_curve, config.curve_interp), config.tenor_months};
        CapQuoteTable table = read_cap_quotes_csv(config.quotes);
        raw.emplace(std::move(curves), config.strike_bp * kBp, std::move(table.maturities_months),
                    std::move(table.flat_vols));

        outcome.diagnostics = decompose(*raw);
        if (config.outliers != OutlierPolicy::Off && raw->size() >= 3) {
            outcome.outliers = detect_outliers(raw->flat_vols(), config.mad_window, config.mad_threshold);
            if (!outcome.outliers->warning.empty()) log << "warning: " << outcome.outliers->warning << '\n';
        }
    } catch (const InputError& e) {
        log << "input error: " << e.what() << '\n';
        outcome.exit_code = 1;
        return outcome;
    }

    const DiagnosticsReport& diag = *outcome.diagnostics;
    if (!diag.arbitrage_violations.empty()) {
        log << "static arbitrage: negative incremental time value at " << months_list(*raw, diag.arbitrage_violations)
            << '\n';
    }
    if (!diag.calendar_violations.empty()) {
        log << "calendar spread: decreasing cap price at " << months_list(*raw, diag.calendar_violations) << '\n';
    }
    if (!diag.total_variance_violations.empty()) {
        log << "advisory: total variance decreases at " << months_list(*raw, diag.total_variance_violations) << '\n';
    }
    if (outcome.outliers && !outcome.outliers->outliers.empty()) {
        log << "outliers (|M| > " << config.mad_threshold << "): " << months_list(*raw, outcome.outliers->outliers)
            << '\n';
    }

    if (config.strict && config.outliers == OutlierPolicy::Off && !diag.arbitrage_violations.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(config.output_dir, ec);
        outcome.written.push_back(write_file(config.output_dir, "diagnostics.csv",
                                             [&](std::ostream& o) { write_diagnostics_csv(o, *raw, diag); }));
        outcome.exit_code = 2;
        return outcome;
    }

    try {
        CapQuoteSet q = *raw;
        if (config.outliers == OutlierPolicy::Remove && outcome.outliers) {
            removed = outcome.outliers->outliers;
            q = remove_outliers(q, removed);
        }
        if (config.far_quote_months) {
            q = add_synthetic_far_quote(q, *config.far_quote_months,
                                        config.far_quote_vol_bp ? std::optional<double>(*config.far_quote_vol_bp * kBp)
                                                                : std::nullopt);
        }
        result = strip(q, config.strip);
        used.emplace(std::move(q));
    } catch (const InputError& e) {
        log << "input error: " << e.what() << '\n';
        outcome.exit_code = 1;
        return outcome;
    }
    for (std::size_t idx : removed) result.removed_quotes.push_back(raw->maturities()[idx]);
    std::sort(result.removed_quotes.begin(), result.removed_quotes.end());
    for (const auto& w : result.warnings) log << "warning: " << w << '\n';

    std::filesystem::create_directories(config.output_dir);
    const auto& dir = config.output_dir;
    outcome.written.push_back(
        write_file(dir, "diagnostics.csv", [&](std::ostream& o) { write_diagnostics_csv(o, *raw, diag); }));
    if (outcome.outliers) {
        outcome.written.push_back(
            write_file(dir, "outliers.csv", [&](std::ostream& o) { write_outlier_csv(o, *raw, *outcome.outliers); }));
    }
    outcome.written.push_back(write_file(dir, "strip.csv", [&](std::ostream& o) { write_strip_csv(o, result); }));
    outcome.written.push_back(write_file(
        dir, "strip.json", [&](std::ostream& o) { write_strip_json(o, result, echo(config, used->size())); }));

    // Daily sigma(t): the fitted curve for node-based methods, caplet steps for the time-value method.
    const double horizon = used->maturities().back() / 12.0;
    const bool steps = config.strip.method == StripMethod::TimeValue;
    const VolFamilySpec family = config.strip.positivity == Positivity::NonnegSpline ? VolFamilySpec::hyman()
                                 : steps ? VolFamilySpec::piecewise_constant()
                                         : config.strip.family;
    const VolCurve curve(result.node_times, result.node_values, family, used->tenor_years());
    outcome.written.push_back(write_file(dir, "vol_curve_daily.csv", [&](std::ostream& o) {
        write_daily_curve_csv(o, [&](double t) { return std::max(curve(t), 0.0); }, horizon);
    }));

    log << "stripped " << used->size() << " quotes with " << to_string(config.strip.method)
        << ", max |reprice error| = " << result.max_abs_residual_bp << " bp\n";
    outcome.quotes_used = std::move(used);
    outcome.strip = std::move(result);
    return outcome;
}

std::vector<NamedConfig> method_comparison_preset() {
    auto make = [](StripMethod m, VolFamilySpec f, NodePlacement p, Positivity pos, double floor_bp = 0.0) {
        StripConfig c;
        c.method = m;
        c.family = f;
        c.placement = p;
        c.positivity = pos;
        c.floor = floor_bp * kBp;
        return c;
    };
    using M = StripMethod;
    using P = NodePlacement;
    using Q = Positivity;
    return {
        {"flat at maturity", make(M::Bootstrap, VolFamilySpec::piecewise_constant(), P::AtMaturity, Q::None)},
        {"linear at maturity", make(M::Bootstrap, VolFamilySpec::linear(), P::AtMaturity, Q::None)},
        {"cubic at maturity", make(M::Bootstrap, VolFamilySpec::cubic(), P::AtMaturity, Q::None)},
        {"linear mid", make(M::Global, VolFamilySpec::linear(), P::Midpoint, Q::None)},
        {"cubic mid", make(M::Global, VolFamilySpec::cubic(), P::Midpoint, Q::None)},
        {"hyman mid", make(M::Global, VolFamilySpec::hyman(), P::Midpoint, Q::None)},
        {"hyman mid floor=10", make(M::Global, VolFamilySpec::hyman(), P::Midpoint, Q::Floor, 10.0)},
        {"linear exp mid", make(M::Global, VolFamilySpec::linear(), P::Midpoint, Q::ExpTransform)},
        {"cubic exp mid", make(M::Global, VolFamilySpec::cubic(), P::Midpoint, Q::ExpTransform)},
    };
}

std::vector<ComparisonRow> compare_methods(const CapQuoteSet& quotes, const std::vector<NamedConfig>& configs) {
    std::vector<std::future<StripResult>> jobs;
    jobs.reserve(configs.size());
    for (const auto& nc : configs) {
        jobs.push_back(std::async(std::launch::async, [&quotes, cfg = nc.config] { return strip(quotes, cfg); }));
    }
    std::vector<ComparisonRow> rows;
    rows.reserve(configs.size());
    for (std::size_t k = 0; k < configs.size(); ++k) {
        ComparisonRow row;
        row.label = configs[k].label;
        row.result = jobs[k].get();
        row.min_vol_bp = row.result.min_vol / kBp;
        row.min_node_bp = row.result.min_node_value / kBp;
        row.max_abs_residual_bp = row.result.max_abs_residual_bp;
        row.converged = row.result.converged;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << "label,min_vol_bp,min_node_bp,reprice_err_bp\n";
    for (const auto& r : rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%.2f,%.2f,%.2e\n", r.label.c_str(), r.min_vol_bp, r.min_node_bp,
                      r.max_abs_residual_bp);
        out << buf;
    }
}

}  // namespace capstrip
