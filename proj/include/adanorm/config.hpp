#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adanorm/optimizers.hpp"

namespace adanorm {

/// Parse or validation failure; `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A number optionally multiplied by an instance constant: `0.5*L`, `2*sqrtD0`.
/// Units: L, mu, D0 (‖x₀−x*‖² or F(x₀)−F*), sqrtD0.
struct ScaledValue {
  double value = 1.0;
  std::string unit;

  bool operator==(const ScaledValue&) const = default;
};

ScaledValue parse_scaled(const std::string& text);
std::string to_string(const ScaledValue& v);

struct ProblemSpec {
  std::string generator = "least_squares";  // least_squares | least_squares_noisy | regularized | two_layer_relu
  std::size_t n = 1000;
  std::size_t d = 20;
  std::size_t m = 200;  // hidden width (two_layer_relu)
  double sigma = 0.1;   // least_squares_noisy
  double lambda = 1.0;  // regularized
  std::uint64_t seed = 0;
  bool allow_degenerate = false;

  bool operator==(const ProblemSpec&) const = default;
};

struct MethodSpec {
  Method method = Method::AdagradNorm;
  Mode mode = Mode::Stochastic;
  ScaledValue eta;
  ScaledValue b0;
  std::size_t batch_size = 1;
  double decay = 0.2;
  std::string label;  // defaults to "<method>_<mode>_<index>"

  bool operator==(const MethodSpec&) const = default;
};

struct SweepSpec {
  std::string param = "b0";  // b0 | eta
  std::vector<double> grid;  // sorted ascending
  std::string unit;          // applied to every grid value

  bool operator==(const SweepSpec&) const = default;
};

struct RuigSpec {
  double epsilon = 1e-4;
  std::vector<double> alpha_grid;
  bool alpha_in_units = true;  // multiply the grid by the instance's alpha unit
  std::size_t points = 20;
  std::size_t samples = 10000;

  bool operator==(const RuigSpec&) const = default;
};

struct BoundsSpec {
  double eps = 1e-8;
  double delta_h = 0.05;
  std::optional<ScaledValue> C;  // defaults to ηL

  bool operator==(const BoundsSpec&) const = default;
};

struct ExperimentConfig {
  std::string id = "experiment";
  std::string description;
  ProblemSpec problem;
  std::vector<MethodSpec> methods;
  std::int64_t max_iters = 1000;
  double stop_tol = 0.0;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::int64_t stride = 1;
  std::string x0 = "default";  // default | zero | gaussian:<scale>
  bool track_gap = true;
  std::optional<SweepSpec> sweep;
  std::optional<RuigSpec> ruig;
  std::optional<BoundsSpec> bounds;

  bool operator==(const ExperimentConfig&) const = default;
};

/// `key = value` lines; `#` starts a comment. Each `method = ...` line adds a
/// method with space-separated `key=value` fields. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace adanorm
