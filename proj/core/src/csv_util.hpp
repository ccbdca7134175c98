#ifndef ADAPID_CSV_UTIL_HPP
#define ADAPID_CSV_UTIL_HPP

// Internal CSV helpers shared by signal and harness I/O.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "adapid/errors.hpp"

namespace adapid::detail {

/// 17 significant digits: enough for an exact double round trip.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& cell, int row, int col) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw IoError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                      ", column " + std::to_string(col));
    return v;
}

inline long parse_int(const std::string& cell, int row, int col) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw IoError("non-integer cell '" + cell + "' at row " + std::to_string(row) +
                      ", column " + std::to_string(col));
    return v;
}

} // namespace adapid::detail

#endif
