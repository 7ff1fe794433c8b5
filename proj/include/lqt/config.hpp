#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lqt/model.hpp"

namespace lqt {

/// Plain-text `key = value` configuration. `#` starts a comment; list values
/// are comma separated. Keys are case-sensitive.
class KeyValueConfig {
  public:
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(std::string_view key) const;
    const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

    std::optional<std::string> get_string(std::string_view key) const;
    std::optional<double> get_double(std::string_view key) const;
    std::optional<std::vector<double>> get_doubles(std::string_view key) const;
    std::optional<std::vector<std::string>> get_strings(std::string_view key) const;

    double get_double_or(std::string_view key, double fallback) const;

  private:
    std::map<std::string, std::string, std::less<>> entries_;
};

/// Scalar problem from keys A, B, Q, R, T, x0, signal, f. Missing keys take
/// the benchmark defaults (A=B=Q=1, x0=2, f=0.02, signal=z1); R and T are
/// required.
ScalarLqtProblem scalar_problem_from_config(const KeyValueConfig& config);

/// Kinetic two-state problem (`model = kinetic`): keys A11, A12, B, Q, R, T,
/// signal, f and x0 = "x1, x2". x0 must be given explicitly.
MatrixLqtProblem kinetic_problem_from_config(const KeyValueConfig& config);

} // namespace lqt
