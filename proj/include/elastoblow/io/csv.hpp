#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "elastoblow/diagnostics.hpp"

namespace elastoblow::io {

inline constexpr const char* kSeriesHeader = "t,m,Ffun,E,trace,div_res,front,front_bound,bkm,gradu_max,rho_min,riccati_lb";

/// Round-trip-safe text for a double (17 significant digits).
inline auto format_double(double v) -> std::string {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// One CSV record; an absent Riccati bound is an empty field.
inline auto format_row(const DiagnosticsRow& r) -> std::string {
    std::string s;
    for (double v : {r.t, r.m, r.Ffun, r.E, r.trace, r.div_res, r.front, r.front_bound, r.bkm, r.gradu_max, r.rho_min}) {
        s += format_double(v);
        s += ',';
    }
    if (r.riccati_lb) s += format_double(*r.riccati_lb);
    return s;
}

inline void write_series(std::ostream& out, const std::vector<DiagnosticsRow>& rows) {
    out << kSeriesHeader << '\n';
    for (const auto& r : rows) out << format_row(r) << '\n';
}

inline void write_series(const std::filesystem::path& path, const std::vector<DiagnosticsRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    write_series(out, rows);
}

inline auto parse_row(const std::string& line) -> DiagnosticsRow {
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            f.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    f.push_back(cur);
    if (f.size() != 12) throw Error(ErrorCode::IoFailure, "series record has " + std::to_string(f.size()) + " fields");
    auto num = [](const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size()) throw Error(ErrorCode::IoFailure, "bad number '" + s + "'");
        return v;
    };
    DiagnosticsRow r;
    double* slots[11] = {&r.t, &r.m, &r.Ffun, &r.E, &r.trace, &r.div_res, &r.front, &r.front_bound, &r.bkm,
                         &r.gradu_max, &r.rho_min};
    for (int i = 0; i < 11; ++i) *slots[i] = num(f[static_cast<std::size_t>(i)]);
    if (!f[11].empty()) r.riccati_lb = num(f[11]);
    return r;
}

inline auto read_series(std::istream& in) -> std::vector<DiagnosticsRow> {
    std::string line;
    if (!std::getline(in, line) || line != kSeriesHeader) throw Error(ErrorCode::IoFailure, "missing series header");
    std::vector<DiagnosticsRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty()) rows.push_back(parse_row(line));
    }
    return rows;
}

inline auto read_series(const std::filesystem::path& path) -> std::vector<DiagnosticsRow> {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    return read_series(in);
}

} // namespace elastoblow::io
