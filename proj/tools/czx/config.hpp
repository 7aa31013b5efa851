#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace czx::cli {

/// Raised for any configuration that cannot be interpreted; maps to exit 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double split = 1e-12;
  double plancherel = 1e-5;
  double trend_factor = 2.0;
  double recovery_fraction = 1.0 / 3;
};

/// Empty lists and unset optionals mean "use the subcommand default".
struct ExperimentConfig {
  std::string symbol;  // empty: "sign" for n = 1, "riesz-1" otherwise
  int n = 1;
  std::vector<double> betas;
  std::vector<double> eps_multiples;  // epsilon in units of h
  std::vector<double> qs;
  std::vector<double> lambdas;
  std::optional<double> h;
  std::optional<double> side;
  std::uint64_t seed = 42;
  std::optional<std::size_t> count;
  std::size_t first = 0;
  std::string outdir = "czx-out";
  std::string input;  // czx-field v1 file
  std::string part = "full";
  int quad_order = 64;
  std::optional<double> constant;  // frozen C of the main bound
  std::optional<double> c_cal;     // frozen good-lambda C
  std::optional<double> delta;
  Tolerances tolerances;

  const std::string& symbol_or_default() const;
};

/// "4h" -> 4. Throws ConfigError for anything else.
double parse_eps(std::string_view text);
std::string format_eps(double multiple);

/// Keys: symbol, n, beta, eps, q, lambda (scalars or lists), grid {h, side},
/// corpus {seed, count, first}, outdir, input, part, quad_order, constant,
/// C, delta, tolerances {split, plancherel, trend_factor,
/// recovery_fraction}. Unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

nlohmann::ordered_json to_json(const ExperimentConfig& config);

}  // namespace czx::cli
