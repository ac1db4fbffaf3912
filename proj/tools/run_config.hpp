#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nws/kernel_spec.hpp"
#include "nws/mult_solver.hpp"
#include "nws/params.hpp"

namespace nws::app {

/// Malformed or invalid configuration. Maps to the usage exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Equation { conv, mult, fisher_erfc, fisher_genetic };
std::string_view to_string(Equation e);
Equation equation_from_string(std::string_view s);

/// Everything `solve` needs. Field defaults are the values used when a key is absent.
struct RunConfig {
  Equation equation = Equation::conv;
  RawParams params{};
  std::size_t grid_n = 256;
  double grid_L = 20.0;
  std::vector<double> times;
  double C = 1.0;
  FactorCountConvention factor_count_convention = FactorCountConvention::factors;
  double quad_rel_tol = 1e-10;
  PolePolicy pole_policy = PolePolicy::report;
  double pole_tol = 1e-10;
  ScalingHypothesis hypothesis = ScalingHypothesis::none;
  double prob_product = 1.0;
  std::string out_dir = ".";
  bool svg = false;

  bool operator==(const RunConfig&) const;
  KernelSpec kernel() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Rejects unknown keys by name and validates every value.
RunConfig run_config_from_json(const nlohmann::json& j);
/// Parses text; syntax errors name the byte offset.
RunConfig parse_run_config(std::string_view text);

/// Cartesian product of parameter lists for `sweep`.
/// Each of eps/b/p is a list or {"start", "stop", "count"} (inclusive, evenly spaced).
struct SweepConfig {
  double D = 1.0;
  double s = 0.0;
  double C = 1.0;
  std::vector<double> eps;
  std::vector<double> b;
  std::vector<int> p;
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);
SweepConfig parse_sweep_config(std::string_view text);

/// Parse JSON text or throw ConfigError naming the byte offset.
nlohmann::json parse_json(std::string_view text);
std::string read_text_file(const std::string& path);

}  // namespace nws::app
