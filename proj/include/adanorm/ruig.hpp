#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adanorm/optimizers.hpp"
#include "adanorm/problems.hpp"

namespace adanorm {

/// One (ε, α, γ) tuple estimated by Monte-Carlo: γ is the minimum over probe
/// points of the fraction of sampled components with ‖∇fᵢ(x)‖² ≥ α‖x−x*‖².
struct RuigEstimate {
  double epsilon = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  std::size_t samples_per_point = 0;
  std::size_t points_probed = 0;
  double gamma_ci_halfwidth = 0.0;  // 95% normal approximation at the minimizing point
};

struct RuigOptions {
  double epsilon = 1e-4;
  std::vector<double> alpha_grid;
  std::size_t points = 20;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  Execution exec = Execution::Parallel;
};

/// Probe points are x* + r·u with u uniform on the sphere and r log-uniform in
/// [1.01√ε, 10√(εd)]. The same component samples are reused across the α grid.
/// Throws std::invalid_argument when the problem has no x*.
std::vector<RuigEstimate> estimate_ruig(const ProblemInstance& problem, const RuigOptions& options);

/// Per-point pass fractions for one α at caller-chosen points (used by the
/// nesting property). `samples` indices are drawn from `seed`.
std::vector<double> ruig_pass_fractions(const ProblemInstance& problem,
                                        const std::vector<Vector>& points, double alpha,
                                        std::size_t samples, std::uint64_t seed);

std::string ruig_csv(const std::vector<RuigEstimate>& estimates, double alpha_unit);

struct StageOneBudget {
  std::int64_t N = 0;
  double C = 0.0;
  double delta = 0.0;
  double failure_prob = 0.0;  // δ₁
  bool stage_one_complete = false;  // b₀ ≥ C: nothing to do
};

/// N = ⌈(C²−b₀²)/(αγε) + δ/γ⌉ + 1 and δ₁ = exp(−δ²/(2(Nγ(1−γ)+δ))).
/// Returns stage_one_complete with N = 0, δ₁ = 0 when C ≤ b₀.
StageOneBudget stage_one_budget(double b0, double C, const RuigEstimate& ruig, double delta);

/// δ₁ alone, for given N.
double bernstein_failure_prob(std::int64_t N, double gamma, double delta);

/// Solves δ = √(4γ(1−γ)N ln N) with N = N(δ) by fixed-point iteration.
/// γ = 1 has no variance term; returns δ = 1 there.
double default_stage_one_delta(double b0, double C, const RuigEstimate& ruig);

struct StageOneVerification {
  std::size_t runs = 0;
  std::size_t successes = 0;
  double frequency = 0.0;
};

/// Runs stochastic AdaGrad-Norm for at most N steps per seed and counts runs
/// with b_N > C or min err_sq ≤ ε. Both events are absorbing, so a run stops
/// as soon as either holds.
StageOneVerification verify_stage_one(const ProblemInstance& problem,
                                      const StageOneBudget& budget, double epsilon, double eta,
                                      double b0, const std::vector<std::uint64_t>& seeds);

}  // namespace adanorm
