#include "capstrip/errors.hpp"
#include "capstrip/io.hpp"
#include "capstrip/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace capstrip;

namespace {

struct Flags {
    std::string projection = std::string(CAPSTRIP_DEFAULT_DATA_DIR) + "/libor_1m.csv";
    std::string discount = std::string(CAPSTRIP_DEFAULT_DATA_DIR) + "/ois_discount.csv";
    std::string quotes = std::string(CAPSTRIP_DEFAULT_DATA_DIR) + "/cap_vols.csv";
    std::string out = "capstrip_out";
    std::string config;
    double strike_bp = 0.0;
    int tenor_months = 1;
    std::string method = "bootstrap";
    std::string family = "flat";
    double beta = 1.0;
    std::string nodes = "maturity";
    std::string positivity = "none";
    std::string outliers = "report";
    double mad_threshold = 3.0;
    std::string far_quote;
    std::string curve_interp = "loglinear";
    std::string tv_interp = "monotone";
    bool arbitrage_filter = false;
    bool interpolate_prices = false;
    bool strict = false;
};

void add_input_flags(CLI::App* app, Flags& f) {
    app->add_option("--projection", f.projection, "Projection zero curve CSV (maturity_months,zero_rate_pct)")
        ->capture_default_str();
    app->add_option("--discount", f.discount, "Discount zero curve CSV (maturity_months,zero_rate_pct)")
        ->capture_default_str();
    app->add_option("--quotes", f.quotes, "Cap quotes CSV (maturity_months,flat_vol_bp)")->capture_default_str();
    app->add_option("--strike-bp", f.strike_bp, "Cap strike in bp")->capture_default_str();
    app->add_option("--tenor-months", f.tenor_months, "Caplet tenor in months")->capture_default_str();
    app->add_option("--curve-interp", f.curve_interp, "Curve interpolation")
        ->check(CLI::IsMember({"loglinear", "cubic"}))
        ->capture_default_str();
    app->add_option("--outliers", f.outliers, "Outlier policy")
        ->check(CLI::IsMember({"off", "report", "remove"}))
        ->capture_default_str();
    app->add_option("--mad-threshold", f.mad_threshold, "Modified Z-score threshold")->capture_default_str();
    app->add_option("--out", f.out, "Output directory")->capture_default_str();
}

RunConfig to_run_config(const Flags& f, const CLI::App& app) {
    RunConfig c;
    if (!f.config.empty()) c = load_run_config(f.config);
    auto given = [&](const char* name) { return f.config.empty() || app.count(name) > 0; };
    if (given("--projection")) c.projection_curve = f.projection;
    if (given("--discount")) c.discount_curve = f.discount;
    if (given("--quotes")) c.quotes = f.quotes;
    if (given("--out")) c.output_dir = f.out;
    if (given("--strike-bp")) c.strike_bp = f.strike_bp;
    if (given("--tenor-months")) c.tenor_months = f.tenor_months;
    if (given("--curve-interp")) c.curve_interp = parse_curve_interp(f.curve_interp);
    if (given("--method")) c.strip.method = parse_method(f.method);
    if (given("--family") || given("--beta")) c.strip.family = parse_family(f.family, f.beta);
    if (given("--nodes")) c.strip.placement = parse_placement(f.nodes);
    if (given("--positivity")) parse_positivity(f.positivity, c.strip);
    if (given("--tv-interp")) {
        c.strip.tv_interp = f.tv_interp == "linear" ? TimeValueInterp::Linear : TimeValueInterp::MonotoneCubic;
    }
    if (given("--arbitrage-filter")) c.strip.arbitrage_filter = f.arbitrage_filter;
    if (given("--interpolate-prices")) c.strip.interpolate_prices = f.interpolate_prices;
    if (given("--outliers")) c.outliers = parse_outlier_policy(f.outliers);
    if (given("--mad-threshold")) c.mad_threshold = f.mad_threshold;
    if (!f.far_quote.empty()) parse_far_quote(f.far_quote, c);
    if (given("--strict")) c.strict = f.strict;
    return c;
}

int run_compare(const Flags& f) {
    RateCurves curves{read_zero_curve_csv(f.projection, parse_curve_interp(f.curve_interp)),
                      read_zero_curve_csv(f.discount, parse_curve_interp(f.curve_interp)), f.tenor_months};
    CapQuoteTable table = read_cap_quotes_csv(f.quotes);
    CapQuoteSet quotes(std::move(curves), f.strike_bp * 1e-4, table.maturities_months, table.flat_vols);
    const OutlierPolicy policy = parse_outlier_policy(f.outliers);
    if (policy == OutlierPolicy::Remove) {
        const OutlierReport report = detect_outliers(quotes.flat_vols(), 5, f.mad_threshold);
        quotes = remove_outliers(quotes, report.outliers);
    }
    const auto rows = compare_methods(quotes, method_comparison_preset());
    write_comparison_csv(std::cout, rows);
    if (!f.out.empty() && f.out != "-") {
        std::filesystem::create_directories(f.out);
        std::ofstream file(std::filesystem::path(f.out) / "comparison.csv", std::ios::binary);
        write_comparison_csv(file, rows);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Caplet volatility stripping from cap quotes"};
    app.require_subcommand(1);
    Flags f;
    Flags fc;
    fc.outliers = "off";

    CLI::App* run = app.add_subcommand("run", "Diagnose quotes and strip caplet vols");
    add_input_flags(run, f);
    run->add_option("--config", f.config, "JSON run configuration; explicit flags override it");
    run->add_option("--method", f.method, "Stripping method")
        ->check(CLI::IsMember({"tv", "bootstrap", "global"}))
        ->capture_default_str();
    run->add_option("--family", f.family, "Caplet vol interpolation family")
        ->check(CLI::IsMember({"flat", "flat-linear", "flat-smooth", "cosine", "quintic", "linear", "cubic", "hyman"}))
        ->capture_default_str();
    run->add_option("--beta", f.beta, "Ramp width for kernel families, fraction of the tenor")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    run->add_option("--nodes", f.nodes, "Node placement")
        ->check(CLI::IsMember({"maturity", "mid", "mid-unshifted"}))
        ->capture_default_str();
    run->add_option("--positivity", f.positivity, "none, exp, nonneg or floor=<bp>")->capture_default_str();
    run->add_option("--far-quote", f.far_quote, "Synthetic far quote <months>[:<bp>]");
    run->add_option("--tv-interp", f.tv_interp, "Time-value interpolant for --method tv")
        ->check(CLI::IsMember({"linear", "monotone"}))
        ->capture_default_str();
    run->add_flag("--arbitrage-filter", f.arbitrage_filter, "Drop quotes with decreasing time value (--method tv)");
    run->add_flag("--interpolate-prices", f.interpolate_prices,
                  "Interpolate cap prices instead of time values (--method tv)");
    run->add_flag("--strict", f.strict, "Exit with status 2 on static arbitrage when outliers are off");

    CLI::App* compare = app.add_subcommand("compare", "Method-comparison table on one quote set");
    add_input_flags(compare, fc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            const RunConfig config = to_run_config(f, *run);
            return run_pipeline(config, std::cerr).exit_code;
        }
        return run_compare(fc);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
