#pragma once

#include "capstrip/diagnostics.hpp"
#include "capstrip/stripping.hpp"
#include "capstrip/term_structures.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace capstrip {

enum class OutlierPolicy { Off, Report, Remove };

struct RunConfig {
    std::filesystem::path projection_curve;
    std::filesystem::path discount_curve;
    std::filesystem::path quotes;
    std::filesystem::path output_dir = ".";

    double strike_bp = 0.0;
    int tenor_months = 1;
    CurveInterp curve_interp = CurveInterp::LogLinearDf;
    StripConfig strip;

    OutlierPolicy outliers = OutlierPolicy::Report;
    double mad_threshold = 3.0;
    std::size_t mad_window = 5;

    std::optional<int> far_quote_months;
    std::optional<double> far_quote_vol_bp;  ///< defaults to the last quoted vol

    bool strict = false;  ///< exit 2 on static arbitrage when outliers are not handled
};

/// Reads a JSON run description. Keys mirror the CLI flags (strike_bp, method, family, ...);
/// relative paths are resolved against the file's directory.
RunConfig load_run_config(const std::filesystem::path& path);

struct RunOutcome {
    int exit_code = 0;  ///< 0 success, 1 input error, 2 static arbitrage in strict mode
    std::vector<std::filesystem::path> written;
    std::optional<CapQuoteSet> quotes_used;
    std::optional<DiagnosticsReport> diagnostics;
    std::optional<OutlierReport> outliers;
    std::optional<StripResult> strip;
};

/// Load, diagnose, optionally repair, strip, and write all artifacts into config.output_dir.
/// Nothing is written when the inputs fail to load or validate.
RunOutcome run_pipeline(const RunConfig& config, std::ostream& log);

struct NamedConfig {
    std::string label;
    StripConfig config;
};

/// The nine rows of the method-comparison table.
std::vector<NamedConfig> method_comparison_preset();

struct ComparisonRow {
    std::string label;
    double min_vol_bp = 0.0;
    double min_node_bp = 0.0;
    double max_abs_residual_bp = 0.0;
    bool converged = true;
    StripResult result;
};

/// Strips the same quotes under each configuration (concurrently) and summarises the results.
std::vector<ComparisonRow> compare_methods(const CapQuoteSet& quotes, const std::vector<NamedConfig>& configs);

/// `label,min_vol_bp,min_node_bp,reprice_err_bp`.
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// Parsers shared by the CLI and the JSON config; throw InputError on unknown names.
StripMethod parse_method(std::string_view s);
VolFamilySpec parse_family(std::string_view s, double beta);
NodePlacement parse_placement(std::string_view s);
/// "none", "exp", "nonneg" or "floor=<bp>".
void parse_positivity(std::string_view s, StripConfig& config);
OutlierPolicy parse_outlier_policy(std::string_view s);
CurveInterp parse_curve_interp(std::string_view s);
/// "<months>" or "<months>:<bp>".
void parse_far_quote(std::string_view s, RunConfig& config);

}  // namespace capstrip
