#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <system_error>

#include "pjdet/bench.hpp"
#include "pjdet/errors.hpp"

namespace pjdet {

/// Shortest decimal form that round-trips to the same double, '.' separator.
inline std::string format_double(double v) {
    char buffer[64];
    const auto res = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, res.ptr);
}

inline std::string format_int(long long v) { return std::to_string(v); }

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out.push_back('\\');
        out.push_back(ch);
    }
    return out;
}

}  // namespace detail

inline void write_ber_csv(std::ostream& os, const BerReport& report) {
    os << "snr_db,nt,nr,detector,t_iters,trials,bit_errors,ber,ci_half_width\n";
    for (const auto& r : report.rows)
        os << format_double(r.snr_db) << ',' << r.nt << ',' << r.nr << ',' << r.detector << ','
           << r.t_iters << ',' << r.trials << ',' << r.bit_errors << ',' << format_double(r.ber) << ','
           << format_double(r.ci_half_width) << '\n';
}

/// Flat JSON: one object per CSV row, same field names, no nesting.
inline void write_ber_json(std::ostream& os, const BerReport& report) {
    os << "[\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        os << "  {\"snr_db\": " << format_double(r.snr_db) << ", \"nt\": " << r.nt << ", \"nr\": " << r.nr
           << ", \"detector\": \"" << detail::json_escape(r.detector) << "\", \"t_iters\": " << r.t_iters
           << ", \"trials\": " << r.trials << ", \"bit_errors\": " << r.bit_errors
           << ", \"ber\": " << format_double(r.ber)
           << ", \"ci_half_width\": " << format_double(r.ci_half_width) << '}'
           << (i + 1 < report.rows.size() ? ",\n" : "\n");
    }
    os << "]\n";
}

inline void write_time_units_csv(std::ostream& os, const TimeUnitReport& report) {
    os << "nt,nr,t_iters,detector,time_units\n";
    for (const auto& r : report.rows)
        os << r.nt << ',' << r.nr << ',' << r.t_iters << ',' << r.detector << ',' << r.time_units << '\n';
}

inline void write_time_units_json(std::ostream& os, const TimeUnitReport& report) {
    os << "[\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        os << "  {\"nt\": " << r.nt << ", \"nr\": " << r.nr << ", \"t_iters\": " << r.t_iters
           << ", \"detector\": \"" << detail::json_escape(r.detector) << "\", \"time_units\": " << r.time_units
           << '}' << (i + 1 < report.rows.size() ? ",\n" : "\n");
    }
    os << "]\n";
}

}  // namespace pjdet
