#pragma once

#include "kbandit/verify.hpp"

#include <vector>

namespace kbandit::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numeric_error = 3;
inline constexpr int exit_verify_failure = 4;

/// Entry point shared by the binary and the tests. args excludes argv[0].
int dispatch(const std::vector<std::string>& args);

/// Writers for the two run outputs (also used by sweep and tests).
void write_rounds_csv(const RegretCurve& curve, const std::string& path);
void write_summary_csv(const std::vector<std::tuple<Index, double, double, double>>& rows,
                       const std::string& path);

}  // namespace kbandit::cli
