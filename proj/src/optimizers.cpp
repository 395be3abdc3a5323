#include "adanorm/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "adanorm/rng.hpp"

namespace adanorm {

std::string to_string(Method method) {
  switch (method) {
    case Method::AdagradNorm: return "adagrad_norm";
    case Method::SgdConst: return "sgd_const";
    case Method::SgdSqrt: return "sgd_sqrt";
    case Method::GdConst: return "gd_const";
    case Method::GdSqrt: return "gd_sqrt";
  }
  return "unknown";
}

std::string to_string(Mode mode) { return mode == Mode::Batch ? "batch" : "stochastic"; }

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::AdagradNorm, Method::SgdConst, Method::SgdSqrt, Method::GdConst,
                   Method::GdSqrt}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "batch") return Mode::Batch;
  if (name == "stochastic") return Mode::Stochastic;
  return std::nullopt;
}

std::optional<Mode> implied_mode(Method method) {
  switch (method) {
    case Method::SgdConst:
    case Method::SgdSqrt: return Mode::Stochastic;
    case Method::GdConst:
    case Method::GdSqrt: return Mode::Batch;
    case Method::AdagradNorm: return std::nullopt;
  }
  return std::nullopt;
}

double square_form_next(double b, double grad_norm_sq) { return std::sqrt(b * b + grad_norm_sq); }

double solution_form_next(double b, double grad_norm_sq) {
  // b' − b = g²/(b + b') with b' = sqrt(b² + g²); this form avoids cancellation.
  return b + grad_norm_sq / (b + std::sqrt(b * b + grad_norm_sq));
}

OptimizerState adagrad_norm_step(OptimizerState state, const Vector& g) {
  if (!g.allFinite()) throw NonFiniteGradient("adagrad_norm_step: non-finite gradient");
  state.b = square_form_next(state.b, g.squaredNorm());
  state.x -= (state.eta / state.b) * g;
  ++state.t;
  return state;
}

namespace {

void validate(const ProblemInstance& problem, const RunOptions& o) {
  if (!(o.eta > 0.0) || !std::isfinite(o.eta)) throw std::invalid_argument("eta must be > 0");
  if (!(o.b0 > 0.0) || !std::isfinite(o.b0)) throw std::invalid_argument("b0 must be > 0");
  if (o.max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (o.batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  if (o.stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (!(o.decay >= 0.0)) throw std::invalid_argument("decay must be >= 0");
  if (auto implied = implied_mode(o.method); implied && *implied != o.mode) {
    throw std::invalid_argument(to_string(o.method) + " runs in " + to_string(*implied) +
                                " mode only");
  }
  if (o.x0 && static_cast<std::size_t>(o.x0->size()) != problem.dimension()) {
    throw std::invalid_argument("x0 dimension mismatch");
  }
}

bool is_constant(Method m) { return m == Method::SgdConst || m == Method::GdConst; }
bool is_sqrt(Method m) { return m == Method::SgdSqrt || m == Method::GdSqrt; }

}  // namespace

Trace run(const ProblemInstance& problem, const RunOptions& o) {
  validate(problem, o);

  Trace trace;
  trace.config = {to_string(o.method), to_string(o.mode), problem.name(), o.seed, o.eta,
                  o.b0, o.batch_size, o.max_iters, o.stop_tol, o.stride};

  const auto& x_star = problem.minimizer();
  const bool track_gap = o.track_gap || !x_star;
  const std::size_t n = problem.component_count();

  Vector x = o.x0 ? *o.x0 : problem.default_initial_point();
  Vector g(x.size());
  double b = o.b0;
  trace.max_b = b;
  CounterRng sampler(o.seed);
  std::vector<std::size_t> batch(o.batch_size);

  auto measure = [&](const Vector& at, std::optional<double>& err, std::optional<double>& gap) {
    err.reset();
    gap.reset();
    if (x_star) err = (at - *x_star).squaredNorm();
    if (track_gap) gap = problem.gap(at);
    return err ? *err : *gap;
  };
  auto blown_up = [&](double metric) {
    return !std::isfinite(metric) || metric > o.divergence_threshold;
  };
  auto note_best = [&](double metric) {
    trace.best_metric = trace.best_metric ? std::min(*trace.best_metric, metric) : metric;
  };

  for (std::int64_t t = 0; t < o.max_iters; ++t) {
    TraceRecord rec;
    rec.t = t;
    const double metric = measure(x, rec.err_sq, rec.gap);
    if (blown_up(metric)) {
      trace.diverged = true;
      break;
    }
    note_best(metric);

    // Denominator used for this step and the accumulator carried forward.
    double denom = b;
    if (is_constant(o.method)) {
      rec.b = o.b0;
    } else if (is_sqrt(o.method)) {
      rec.b = o.b0 + o.decay * std::sqrt(static_cast<double>(t));
      denom = rec.b;
    } else {
      rec.b = b;
    }

    if (metric <= o.stop_tol) {
      rec.grad_norm_sq = 0.0;
      rec.stepsize = o.eta / rec.b;
      trace.records.push_back(rec);
      trace.converged = true;
      break;
    }

    if (o.mode == Mode::Batch) {
      problem.gradient(x, g);
    } else if (o.batch_size == 1) {
      problem.component_gradient(sampler.uniform_index(n), x, g);
    } else {
      for (auto& idx : batch) idx = sampler.uniform_index(n);
      problem.batch_gradient(batch, x, g);
    }
    if (!g.allFinite()) {
      trace.diverged = true;
      break;
    }
    rec.grad_norm_sq = g.squaredNorm();

    if (o.method == Method::AdagradNorm) {
      OptimizerState state{std::move(x), b, o.eta, t};
      state = adagrad_norm_step(std::move(state), g);
      x = std::move(state.x);
      b = state.b;
      rec.stepsize = o.eta / b;
    } else {
      rec.stepsize = o.eta / denom;
      x -= rec.stepsize * g;
      b = is_sqrt(o.method) ? o.b0 + o.decay * std::sqrt(static_cast<double>(t + 1)) : o.b0;
    }
    trace.max_b = std::max(trace.max_b, b);
    ++trace.iterations;

    if (t % o.stride == 0) trace.records.push_back(rec);
    if (o.stop_b_above && b > *o.stop_b_above) break;
  }

  trace.final_b = b;
  if (!trace.diverged || x.allFinite()) {
    const double metric = measure(x, trace.final_err_sq, trace.final_gap);
    if (blown_up(metric)) trace.diverged = true;
  }
  return trace;
}

double best_error(const Trace& trace) {
  if (trace.records.empty()) throw EmptyTrace("best_error: trace has no records");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    const auto& v = r.err_sq ? r.err_sq : r.gap;
    if (v) best = std::min(best, *v);
  }
  if (trace.config.stride > 1 && trace.best_metric) best = std::min(best, *trace.best_metric);
  return best;
}

}  // namespace adanorm
