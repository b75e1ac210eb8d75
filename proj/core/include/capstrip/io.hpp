#pragma once

#include "capstrip/diagnostics.hpp"
#include "capstrip/stripping.hpp"
#include "capstrip/term_structures.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace capstrip {

/// Rows of a `maturity_months,zero_rate_pct` file, converted to years and decimals.
ZeroCurve read_zero_curve_csv(const std::filesystem::path& path, CurveInterp interp = CurveInterp::LogLinearDf);

struct CapQuoteTable {
    std::vector<int> maturities_months;
    std::vector<double> flat_vols;  ///< decimal
};

/// Rows of a `maturity_months,flat_vol_bp` file.
CapQuoteTable read_cap_quotes_csv(const std::filesystem::path& path);

/// `T_months,flat_vol_bp,cap_price_bp,intrinsic_bp,time_value_bp,dP_bp,dIV_bp,dTV_bp`, 4 decimals.
void write_diagnostics_csv(std::ostream& out, const CapQuoteSet& quotes, const DiagnosticsReport& report);

/// `T_months,flat_vol_bp,residual_bp,z_score,outlier`.
void write_outlier_csv(std::ostream& out, const CapQuoteSet& quotes, const OutlierReport& report);

/// `fixing_months,caplet_vol_bp`, vols with 17 significant digits.
void write_strip_csv(std::ostream& out, const StripResult& result);

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

/// JSON sidecar: nodes, caplet vols (decimal, exact round trip), residuals in bp, removed quotes,
/// summary and the echoed config.
void write_strip_json(std::ostream& out, const StripResult& result, const ConfigEcho& config);

/// `t_years,sigma_bp` sampled every day (1/365 year) from 0 to `horizon` years.
void write_daily_curve_csv(std::ostream& out, const std::function<double(double)>& sigma, double horizon);

/// Fixing times and caplet vols back from a strip CSV.
StripResult read_strip_csv(const std::filesystem::path& path);

/// Everything written by write_strip_json except the config echo, which is returned separately.
StripResult read_strip_json(const std::filesystem::path& path, ConfigEcho* config = nullptr);

}  // namespace capstrip
