#include "adanorm/ruig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "adanorm/rng.hpp"
#include "adanorm/trace_io.hpp"

namespace adanorm {
namespace {

constexpr double kZ95 = 1.959963984540054;

Vector probe_point(const Vector& x_star, double epsilon, std::uint64_t point_seed) {
  auto engine = make_engine(point_seed);
  std::normal_distribution<double> normal;
  Vector u(x_star.size());
  do {
    for (auto& v : u) v = normal(engine);
  } while (u.squaredNorm() == 0.0);
  u.normalize();

  const double d = static_cast<double>(x_star.size());
  const double lo = std::log(1.01 * std::sqrt(epsilon));
  const double hi = std::log(10.0 * std::sqrt(epsilon * d));
  std::uniform_real_distribution<double> unif(lo, hi);
  return x_star + std::exp(unif(engine)) * u;
}

// ‖∇fᵢ(x)‖² for `samples` indices drawn uniformly with replacement.
std::vector<double> sampled_grad_norms(const ProblemInstance& problem, const Vector& x,
                                       std::size_t samples, std::uint64_t seed) {
  CounterRng rng(seed);
  Vector g(x.size());
  std::vector<double> out(samples);
  const std::size_t n = problem.component_count();
  for (auto& v : out) {
    problem.component_gradient(rng.uniform_index(n), x, g);
    v = g.squaredNorm();
  }
  return out;
}

std::size_t count_passes(const std::vector<double>& norms, double alpha, double err_sq) {
  const double threshold = alpha * err_sq;
  return static_cast<std::size_t>(
      std::count_if(norms.begin(), norms.end(), [&](double v) { return v >= threshold; }));
}

}  // namespace

std::vector<RuigEstimate> estimate_ruig(const ProblemInstance& problem, const RuigOptions& o) {
  const auto& x_star = problem.minimizer();
  if (!x_star) throw std::invalid_argument("estimate_ruig: problem has no known minimizer");
  if (!(o.epsilon > 0.0)) throw std::invalid_argument("estimate_ruig: epsilon must be > 0");
  if (o.points == 0 || o.samples == 0) {
    throw std::invalid_argument("estimate_ruig: points and samples must be >= 1");
  }

  const std::size_t P = o.points;
  const std::size_t A = o.alpha_grid.size();
  std::vector<std::size_t> passes(P * A, 0);

  auto probe = [&](std::size_t p) {
    const std::uint64_t point_seed = derive_seed(o.seed, p);
    const Vector x = probe_point(*x_star, o.epsilon, point_seed);
    const double err_sq = (x - *x_star).squaredNorm();
    const auto norms = sampled_grad_norms(problem, x, o.samples, derive_seed(point_seed, 1));
    for (std::size_t a = 0; a < A; ++a) passes[p * A + a] = count_passes(norms, o.alpha_grid[a], err_sq);
  };

  if (o.exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(P); ++p) probe(static_cast<std::size_t>(p));
  } else {
    for (std::size_t p = 0; p < P; ++p) probe(p);
  }

  std::vector<RuigEstimate> out;
  out.reserve(A);
  const double s = static_cast<double>(o.samples);
  for (std::size_t a = 0; a < A; ++a) {
    std::size_t worst = std::numeric_limits<std::size_t>::max();
    for (std::size_t p = 0; p < P; ++p) worst = std::min(worst, passes[p * A + a]);
    RuigEstimate e;
    e.epsilon = o.epsilon;
    e.alpha = o.alpha_grid[a];
    e.gamma = static_cast<double>(worst) / s;
    e.samples_per_point = o.samples;
    e.points_probed = P;
    e.gamma_ci_halfwidth = kZ95 * std::sqrt(e.gamma * (1.0 - e.gamma) / s);
    out.push_back(e);
  }
  return out;
}

std::vector<double> ruig_pass_fractions(const ProblemInstance& problem,
                                        const std::vector<Vector>& points, double alpha,
                                        std::size_t samples, std::uint64_t seed) {
  const auto& x_star = problem.minimizer();
  if (!x_star) throw std::invalid_argument("ruig_pass_fractions: problem has no known minimizer");
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& x : points) {
    const auto norms = sampled_grad_norms(problem, x, samples, seed);
    out.push_back(static_cast<double>(count_passes(norms, alpha, (x - *x_star).squaredNorm())) /
                  static_cast<double>(samples));
  }
  return out;
}

std::string ruig_csv(const std::vector<RuigEstimate>& estimates, double alpha_unit) {
  std::ostringstream os;
  os << "alpha,alpha_over_unit,gamma,ci,epsilon,points,samples\n";
  for (const auto& e : estimates) {
    os << format_double(e.alpha) << ',' << format_double(e.alpha / alpha_unit) << ','
       << format_double(e.gamma) << ',' << format_double(e.gamma_ci_halfwidth) << ','
       << format_double(e.epsilon) << ',' << e.points_probed << ',' << e.samples_per_point
       << '\n';
  }
  return os.str();
}

double bernstein_failure_prob(std::int64_t N, double gamma, double delta) {
  const double var = static_cast<double>(N) * gamma * (1.0 - gamma);
  return std::exp(-delta * delta / (2.0 * (var + delta)));
}

StageOneBudget stage_one_budget(double b0, double C, const RuigEstimate& ruig, double delta) {
  if (!(b0 > 0.0)) throw std::invalid_argument("stage_one_budget: b0 must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("stage_one_budget: delta must be > 0");
  if (!(ruig.alpha > 0.0) || !(ruig.gamma > 0.0) || !(ruig.epsilon > 0.0)) {
    throw std::invalid_argument("stage_one_budget: alpha, gamma, epsilon must be > 0");
  }
  StageOneBudget out;
  out.C = C;
  out.delta = delta;
  if (C <= b0) {
    out.stage_one_complete = true;
    return out;
  }
  const double g = ruig.gamma;
  const double steps = (C * C - b0 * b0) / (ruig.alpha * g * ruig.epsilon) + delta / g;
  out.N = static_cast<std::int64_t>(std::ceil(steps)) + 1;
  out.failure_prob = bernstein_failure_prob(out.N, g, delta);
  return out;
}

double default_stage_one_delta(double b0, double C, const RuigEstimate& ruig) {
  const double g = ruig.gamma;
  if (g >= 1.0) return 1.0;
  double delta = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double N = static_cast<double>(stage_one_budget(b0, C, ruig, delta).N);
    const double next = std::sqrt(4.0 * g * (1.0 - g) * N * std::log(std::max(N, 1.0)));
    if (!(next > 0.0)) return delta;
    if (std::abs(next - delta) <= 1e-12 * next) return next;
    delta = next;
  }
  return delta;
}

StageOneVerification verify_stage_one(const ProblemInstance& problem,
                                      const StageOneBudget& budget, double epsilon, double eta,
                                      double b0, const std::vector<std::uint64_t>& seeds) {
  if (!problem.minimizer()) {
    throw std::invalid_argument("verify_stage_one: problem has no known minimizer");
  }
  StageOneVerification out;
  out.runs = seeds.size();
  if (seeds.empty()) return out;

  std::vector<char> ok(seeds.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(seeds.size()); ++k) {
    if (budget.stage_one_complete) {
      ok[static_cast<std::size_t>(k)] = 1;
      continue;
    }
    RunOptions o;
    o.method = Method::AdagradNorm;
    o.mode = Mode::Stochastic;
    o.eta = eta;
    o.b0 = b0;
    o.max_iters = budget.N;
    o.stop_tol = epsilon;
    o.seed = seeds[static_cast<std::size_t>(k)];
    o.track_gap = false;
    o.stride = std::numeric_limits<std::int64_t>::max();
    o.stop_b_above = budget.C;
    const Trace tr = run(problem, o);
    double best = tr.best_metric.value_or(std::numeric_limits<double>::infinity());
    if (tr.final_err_sq) best = std::min(best, *tr.final_err_sq);
    ok[static_cast<std::size_t>(k)] = (tr.final_b > budget.C || best <= epsilon) ? 1 : 0;
  }
  for (char c : ok) out.successes += static_cast<std::size_t>(c);
  out.frequency = static_cast<double>(out.successes) / static_cast<double>(out.runs);
  return out;
}

}  // namespace adanorm
