#include "capstrip/io.hpp"

#include "capstrip/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace capstrip {

namespace {

constexpr double kBp = 1e-4;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_double(std::string_view field, const std::string& file, std::size_t line, std::size_t column) {
    if (field.empty()) throw ParseError(file, line, column, "empty field");
    double value = 0.0;
    // std::from_chars rejects a leading '+', strtod does not; keep the stricter form.
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw ParseError(file, line, column, "not a number: '" + std::string(field) + "'");
    }
    return value;
}

int parse_int(std::string_view field, const std::string& file, std::size_t line, std::size_t column) {
    if (field.empty()) throw ParseError(file, line, column, "empty field");
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(file, line, column, "not an integer number of months: '" + std::string(field) + "'");
    }
    return value;
}

/// Reads a two-column numeric CSV with the given header; calls row(line, first, second) per data row.
template <typename Row>
void read_two_column(const std::filesystem::path& path, std::string_view col1, std::string_view col2, Row row) {
    const std::string file = path.string();
    std::ifstream in(path);
    if (!in) throw InputError(file + ": cannot open file");
    std::string text;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t rows = 0;
    while (std::getline(in, text)) {
        ++line_no;
        const std::string_view line = trim(text);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line);
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != col1 || fields[1] != col2) {
                throw ParseError(file, line_no, 1,
                                 "expected header '" + std::string(col1) + "," + std::string(col2) + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) {
            throw ParseError(file, line_no, fields.size() < 2 ? fields.size() + 1 : 3,
                             "expected 2 fields, found " + std::to_string(fields.size()));
        }
        row(file, line_no, fields[0], fields[1]);
        ++rows;
    }
    if (!header_seen) throw ParseError(file, line_no == 0 ? 1 : line_no, 1, "missing header");
    if (rows == 0) throw ParseError(file, line_no, 1, "no data rows");
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    // Avoid "-0.0000" so that identical numbers always print identically.
    if (std::string_view(buf) == "-0.0000") return "0.0000";
    return buf;
}

std::string full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ZeroCurve read_zero_curve_csv(const std::filesystem::path& path, CurveInterp interp) {
    std::vector<double> times;
    std::vector<double> rates;
    read_two_column(path, "maturity_months", "zero_rate_pct",
                    [&](const std::string& file, std::size_t line, std::string_view a, std::string_view b) {
                        const double months = parse_double(a, file, line, 1);
                        if (months < 0.0) throw ParseError(file, line, 1, "negative maturity");
                        if (!times.empty() && !(months / 12.0 > times.back())) {
                            throw ParseError(file, line, 1, "maturities must be strictly increasing");
                        }
                        times.push_back(months / 12.0);
                        rates.push_back(parse_double(b, file, line, 2) / 100.0);
                    });
    return ZeroCurve(std::move(times), std::move(rates), interp);
}

CapQuoteTable read_cap_quotes_csv(const std::filesystem::path& path) {
    CapQuoteTable table;
    read_two_column(path, "maturity_months", "flat_vol_bp",
                    [&](const std::string& file, std::size_t line, std::string_view a, std::string_view b) {
                        const int months = parse_int(a, file, line, 1);
                        if (months <= 0) throw ParseError(file, line, 1, "maturity must be positive");
                        if (!table.maturities_months.empty() && months <= table.maturities_months.back()) {
                            throw ParseError(file, line, 1, "maturities must be strictly increasing");
                        }
                        const double vol = parse_double(b, file, line, 2);
                        if (vol < 0.0) throw ParseError(file, line, 2, "negative volatility");
                        table.maturities_months.push_back(months);
                        table.flat_vols.push_back(vol * kBp);
                    });
    return table;
}

void write_diagnostics_csv(std::ostream& out, const CapQuoteSet& quotes, const DiagnosticsReport& r) {
    out << "T_months,flat_vol_bp,cap_price_bp,intrinsic_bp,time_value_bp,dP_bp,dIV_bp,dTV_bp\n";
    for (std::size_t q = 0; q < quotes.size(); ++q) {
        out << quotes.maturities()[q] << ',' << fixed4(quotes.flat_vols()[q] / kBp) << ',' << fixed4(r.price[q] / kBp)
            << ',' << fixed4(r.intrinsic[q] / kBp) << ',' << fixed4(r.time_value[q] / kBp) << ','
            << fixed4(r.d_price[q] / kBp) << ',' << fixed4(r.d_intrinsic[q] / kBp) << ','
            << fixed4(r.d_time_value[q] / kBp) << '\n';
    }
}

void write_outlier_csv(std::ostream& out, const CapQuoteSet& quotes, const OutlierReport& report) {
    out << "T_months,flat_vol_bp,residual_bp,z_score,outlier\n";
    std::vector<bool> flagged(quotes.size(), false);
    for (std::size_t q : report.outliers) flagged[q] = true;
    for (std::size_t q = 0; q < quotes.size(); ++q) {
        out << quotes.maturities()[q] << ',' << fixed4(quotes.flat_vols()[q] / kBp) << ','
            << fixed4(report.residuals[q] / kBp) << ',' << fixed4(report.scores[q]) << ','
            << (flagged[q] ? 1 : 0) << '\n';
    }
}

void write_strip_csv(std::ostream& out, const StripResult& result) {
    out << "fixing_months,caplet_vol_bp\n";
    for (std::size_t i = 0; i < result.caplet_vols.size(); ++i) {
        out << full(result.fixing_times[i] * 12.0) << ',' << full(result.caplet_vols[i] / kBp) << '\n';
    }
}

void write_strip_json(std::ostream& out, const StripResult& result, const ConfigEcho& config) {
    nlohmann::ordered_json j;
    j["node_times_years"] = result.node_times;
    j["node_values"] = result.node_values;
    j["fixing_times_years"] = result.fixing_times;
    j["caplet_vols"] = result.caplet_vols;
    j["maturities_months"] = result.maturities;
    j["residuals_bp"] = result.residuals_bp;
    j["removed_quotes_months"] = result.removed_quotes;
    j["min_vol"] = result.min_vol;
    j["min_node_value"] = result.min_node_value;
    j["max_abs_residual_bp"] = result.max_abs_residual_bp;
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["negative_increments"] = result.negative_increments;
    j["warnings"] = result.warnings;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config) cfg[key] = value;
    j["config"] = cfg;
    out << j.dump(2) << '\n';
}

void write_daily_curve_csv(std::ostream& out, const std::function<double(double)>& sigma, double horizon) {
    out << "t_years,sigma_bp\n";
    const auto days = static_cast<long>(std::ceil(horizon * 365.0 - 1e-9));
    for (long d = 0; d <= days; ++d) {
        const double t = d / 365.0;
        out << full(t) << ',' << full(sigma(t) / kBp) << '\n';
    }
}

StripResult read_strip_csv(const std::filesystem::path& path) {
    StripResult result;
    read_two_column(path, "fixing_months", "caplet_vol_bp",
                    [&](const std::string& file, std::size_t line, std::string_view a, std::string_view b) {
                        result.fixing_times.push_back(parse_double(a, file, line, 1) / 12.0);
                        result.caplet_vols.push_back(parse_double(b, file, line, 2) * kBp);
                    });
    return result;
}

StripResult read_strip_json(const std::filesystem::path& path, ConfigEcho* config) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    StripResult r;
    try {
        r.node_times = j.at("node_times_years").get<std::vector<double>>();
        r.node_values = j.at("node_values").get<std::vector<double>>();
        r.fixing_times = j.at("fixing_times_years").get<std::vector<double>>();
        r.caplet_vols = j.at("caplet_vols").get<std::vector<double>>();
        r.maturities = j.at("maturities_months").get<std::vector<int>>();
        r.residuals_bp = j.at("residuals_bp").get<std::vector<double>>();
        r.removed_quotes = j.at("removed_quotes_months").get<std::vector<int>>();
        r.min_vol = j.at("min_vol").get<double>();
        r.min_node_value = j.at("min_node_value").get<double>();
        r.max_abs_residual_bp = j.at("max_abs_residual_bp").get<double>();
        r.converged = j.at("converged").get<bool>();
        r.iterations = j.at("iterations").get<int>();
        r.negative_increments = j.at("negative_increments").get<std::size_t>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        if (config) {
            config->clear();
            for (const auto& [key, value] : j.at("config").items()) config->emplace_back(key, value.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return r;
}

}  // namespace capstrip
