#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adanorm/problems.hpp"

namespace adanorm {

enum class Method { AdagradNorm, SgdConst, SgdSqrt, GdConst, GdSqrt };
enum class Mode { Stochastic, Batch };

std::string to_string(Method method);
std::string to_string(Mode mode);
std::optional<Method> parse_method(std::string_view name);
std::optional<Mode> parse_mode(std::string_view name);

/// sgd_* baselines are stochastic and gd_* batch; AdaGrad-Norm runs in either.
std::optional<Mode> implied_mode(Method method);

struct NonFiniteGradient : std::domain_error {
  using std::domain_error::domain_error;
};

struct EmptyTrace : std::logic_error {
  using std::logic_error::logic_error;
};

struct OptimizerState {
  Vector x;
  double b = 1.0;    // stepsize denominator b_t
  double eta = 1.0;  // stepsize numerator
  std::int64_t t = 0;
};

/// b_{t+1} = sqrt(b_t² + ‖G‖²)
double square_form_next(double b, double grad_norm_sq);

/// b_{t+1} = b_t + ‖G‖² / (b_t + b_{t+1}), solved in closed form.
double solution_form_next(double b, double grad_norm_sq);

/// One AdaGrad-Norm update: b' = sqrt(b² + ‖G‖²), x' = x − (η/b') G.
/// Throws NonFiniteGradient when G has a non-finite entry.
OptimizerState adagrad_norm_step(OptimizerState state, const Vector& g);

struct RunOptions {
  Method method = Method::AdagradNorm;
  Mode mode = Mode::Stochastic;
  double eta = 1.0;
  double b0 = 1.0;
  std::size_t batch_size = 1;
  std::int64_t max_iters = 1000;
  double stop_tol = 0.0;
  std::uint64_t seed = 0;
  double decay = 0.2;  // square-root schedule: η / (b₀ + decay·√t)
  std::int64_t stride = 1;
  std::optional<Vector> x0;  // defaults to problem.default_initial_point()
  double divergence_threshold = 1e12;
  bool track_gap = true;     // F(x_t) − F* costs a full pass per iteration
  // Stop once b exceeds this value (Stage-I checks only need the crossing).
  std::optional<double> stop_b_above;
};

struct TraceRecord {
  std::int64_t t = 0;
  double b = 0.0;                 // b_t, the denominator before step t
  std::optional<double> err_sq;   // ‖x_t − x*‖²
  std::optional<double> gap;      // F(x_t) − F*
  double grad_norm_sq = 0.0;      // ‖G_t‖² of the step taken
  double stepsize = 0.0;          // stepsize applied at step t (η / b_{t+1} for AdaGrad-Norm)
};

/// Echo of the configuration that produced a trace.
struct TraceHeader {
  std::string optimizer;
  std::string mode;
  std::string problem;
  std::uint64_t seed = 0;
  double eta = 0.0;
  double b0 = 0.0;
  std::size_t batch_size = 1;
  std::int64_t max_iters = 0;
  double stop_tol = 0.0;
  std::int64_t stride = 1;
};

struct Trace {
  TraceHeader config;
  std::vector<TraceRecord> records;
  bool diverged = false;
  bool converged = false;       // stop_tol reached
  std::int64_t iterations = 0;  // steps taken
  double final_b = 0.0;         // b after the last step
  double max_b = 0.0;
  std::optional<double> final_err_sq;
  std::optional<double> final_gap;
  // Exact min of the tracked metric over all visited iterates, even when
  // records are subsampled by the stride.
  std::optional<double> best_metric;
};

/// Executes one optimizer run. Divergence (metric above the threshold or a
/// non-finite gradient) ends the run early with `diverged` set; it is not an
/// error. A run stops when the current iterate's metric is at or below
/// `stop_tol`, emitting a terminal record with a zero step.
Trace run(const ProblemInstance& problem, const RunOptions& options);

/// min over records of err_sq (gap when err_sq is absent). Throws EmptyTrace.
double best_error(const Trace& trace);

}  // namespace adanorm
