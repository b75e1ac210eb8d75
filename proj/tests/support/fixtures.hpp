#pragma once

#include "capstrip/diagnostics.hpp"
#include "capstrip/io.hpp"
#include "capstrip/term_structures.hpp"

#include <filesystem>
#include <string>

namespace capstrip::testing {

inline std::filesystem::path data_file(const std::string& name) {
    return std::filesystem::path(CAPSTRIP_TEST_DATA_DIR) / name;
}

inline RateCurves sample_curves(CurveInterp interp = CurveInterp::LogLinearDf) {
    return {read_zero_curve_csv(data_file("libor_1m.csv"), interp),
            read_zero_curve_csv(data_file("ois_discount.csv"), interp), 1};
}

inline CapQuoteSet sample_quotes(double strike = 0.0, CurveInterp interp = CurveInterp::LogLinearDf) {
    const CapQuoteTable table = read_cap_quotes_csv(data_file("cap_vols.csv"));
    return {sample_curves(interp), strike, table.maturities_months, table.flat_vols};
}

/// Sample quotes without the 3M and 24M outliers.
inline CapQuoteSet sample_clean_quotes(double strike = 0.0, CurveInterp interp = CurveInterp::LogLinearDf) {
    const CapQuoteSet all = sample_quotes(strike, interp);
    const OutlierReport report = detect_outliers(all.flat_vols());
    return remove_outliers(all, report.outliers);
}

constexpr double kBp = 1e-4;

}  // namespace capstrip::testing
