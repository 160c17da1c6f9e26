#pragma once

#include "kbandit/common.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

namespace kbandit::csv {

/// Shortest round-trip decimal form; "na" for non-finite values. Used for
/// every CSV field so repeated runs are byte-identical.
inline std::string fmt(double x) {
    if (!std::isfinite(x)) return "na";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Splits one CSV line on commas (no quoting; our formats never need it).
std::vector<std::string> split_line(const std::string& line);

/// Reads a numeric CSV file, skipping an optional header row (detected by a
/// non-numeric first field) and blank lines.
std::vector<std::vector<double>> read_numeric(const std::string& path);

}  // namespace kbandit::csv
