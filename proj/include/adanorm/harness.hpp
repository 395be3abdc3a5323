#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adanorm/bounds.hpp"
#include "adanorm/config.hpp"
#include "adanorm/optimizers.hpp"
#include "adanorm/problems.hpp"
#include "adanorm/ruig.hpp"

namespace adanorm {

ProblemPtr build_problem(const ProblemSpec& spec);

/// x₀ from the config's `x0` option; gaussian:<s> draws s·w, w ~ N(0, I),
/// from the experiment seed.
Vector initial_point(const ExperimentConfig& config, const ProblemInstance& problem);

/// Resolves a value given in instance units. D0 is ‖x₀−x*‖² (or F(x₀)−F* without x*).
double resolve(const ScaledValue& v, const ProblemInstance& problem, const Vector& x0);

RunOptions run_options(const ExperimentConfig& config, const MethodSpec& method,
                       const ProblemInstance& problem, const Vector& x0, std::uint64_t seed);

/// Seed for cell `index` of an experiment (method-major, then repeat).
std::uint64_t cell_seed(const ExperimentConfig& config, std::size_t index);

struct CellResult {
  std::string label;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  Trace trace;
  std::string error;  // non-empty when the cell threw
  bool io_error = false;
};

struct SummaryRow {
  std::string method;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::optional<double> final_err_sq;
  std::optional<double> min_err_sq;
  std::optional<double> final_gap;
  std::optional<double> min_gap;
  double final_b = 0.0;
  bool diverged = false;
  std::int64_t iterations = 0;
};

SummaryRow summarize(const CellResult& cell);
std::string summary_csv(const std::vector<SummaryRow>& rows);

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::vector<SummaryRow> summary;
  bool any_error = false;
};

/// Runs every (method, repeat) cell. With a non-empty `out_dir`, writes
/// `<label>_r<k>.csv` per cell and `summary.csv`. Throws IoError on write failure.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir = {});

struct SweepRow {
  double value = 0.0;  // grid value in config units
  double resolved = 0.0;
  std::string method;
  std::size_t repeat = 0;
  std::optional<double> final_metric;
  std::optional<double> min_metric;
  double final_b = 0.0;
  bool diverged = false;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir = {});
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct RuigReport {
  double alpha_unit = 1.0;
  std::vector<RuigEstimate> estimates;
};

RuigReport run_ruig(const ExperimentConfig& config, const std::filesystem::path& out_dir = {});

struct BoundsReport {
  std::vector<IterationBudget> budgets;
  std::vector<BoundCheckReport> checks;
  bool all_passed = true;
};

/// For every AdaGrad-Norm method: budgets for the theorems that apply, and
/// lemma checks on the recorded trace of each repeat.
BoundsReport verify_bounds(const ExperimentConfig& config,
                           const std::filesystem::path& out_dir = {});

/// Two-column files per curve (`<label>_r<k>_err.dat`: t and err_sq or gap,
/// `<label>_r<k>_b.dat`: t and b_t) and a gnuplot script `plot.gp`. Zero metrics
/// are floored at 1e-300.
void emit_plot_data(const std::vector<CellResult>& cells, const std::filesystem::path& out_dir);

struct BundledConfig {
  std::string name;
  std::filesystem::path path;
  std::string description;
};

std::filesystem::path bundled_config_dir();
std::vector<BundledConfig> list_bundled();

/// A path to an existing file, or the name of a bundled config.
std::filesystem::path resolve_config_path(const std::string& name_or_path);

}  // namespace adanorm
