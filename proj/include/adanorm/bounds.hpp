#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adanorm/optimizers.hpp"
#include "adanorm/problems.hpp"

namespace adanorm {

enum class BudgetCase { Case1, Case2 };

std::string to_string(BudgetCase c);

struct BudgetConstants {
  double b0 = 0.0;
  double eta = 0.0;
  double L = 0.0;
  double mu = 0.0;
  double delta0 = 0.0;  // ‖x₀−x*‖², or F(x₀)−F* for the PL budget
  double Delta = 0.0;   // Stage-I-inflated radius (Case 2), else delta0
  double eps = 0.0;
  std::optional<double> delta_h;
  std::optional<double> delta;
  std::optional<double> alpha;
  std::optional<double> gamma;
};

struct IterationBudget {
  int theorem = 0;
  BudgetCase which = BudgetCase::Case1;
  std::int64_t T = 0;
  std::int64_t stage1_part = 0;  // ⌈Stage-I addend⌉ (0 in Case 1)
  std::int64_t stage2_part = 0;  // ⌈Stage-II addend⌉
  double stage1_exact = 0.0;
  double stage2_exact = 0.0;
  bool exceeds_desk_scale = false;  // T overflowed or is not finite; T is then meaningless
  bool log_clamped = false;         // some log argument was < 1 and was taken as 0
  BudgetConstants constants;
};

/// Stochastic, strongly convex. Case 1 iff b₀ > ηL.
IterationBudget budget_thm1(double b0, double eta, double L, double mu, double delta0, double eps,
                            double delta_h, double alpha, double gamma, double delta);

/// Batch, strongly convex. Case 1 iff b₀ > η(μ+L)/2.
IterationBudget budget_thm2(double b0, double eta, double L, double mu, double delta0, double eps);

/// Batch, PL. Case 1 iff b₀ > ηL. Throws std::invalid_argument when F0_gap ≤ 0.
IterationBudget budget_thm3(double b0, double eta, double L, double mu, double F0_gap, double eps);

/// Batch Stage-I length; 0 when b₀ ≥ C.
std::int64_t lemma2_budget(double b0, double C, double mu, double eps, Flavor flavor);

/// Δ₀ + η²(log(C²/b₀²) + 1), the log clamped at 0.
double stage_one_radius(double delta0, double eta, double C, double b0, bool* clamped = nullptr);

struct BoundCheckReport {
  std::string lemma;
  double bound = 0.0;
  double observed = 0.0;
  double slack = 0.0;  // bound − observed
  bool passed = true;
  bool applicable = true;
  bool log_clamped = false;
  std::string note;
};

/// err_sq at J−1 against Δ₀ + η²(log(C²/b₀²)+1), J the first index with b_J > C.
/// Needs an unstrided trace with err_sq; throws std::invalid_argument otherwise.
BoundCheckReport check_lemma3(const Trace& trace, double C, double eta, double b0, double delta0);

/// max_t b_t against C + (L/η)(Δ₀ + η²(log(C²/b₀²)+1)); when b₀ > C the
/// no-Stage-I form b₀ + (L/η)Δ₀ applies. Throws std::invalid_argument when C < ηL.
BoundCheckReport check_lemma4(const Trace& trace, double C, double eta, double L, double b0,
                              double delta0);

/// From the first step whose denominator b_{t+1} exceeds ηL/2: every later
/// step is nonincreasing (1e-12 absolute) and no later error exceeds the
/// error at that step. bound = error there, observed = max error after it.
BoundCheckReport check_descent(const Trace& trace, double eta, double L);

/// Σ aₗ/Sₗ ≤ log S + 1 and Σ aₗ/√Sₗ ≤ 2√S with Sₗ the partial sums.
/// Throws std::invalid_argument when a is empty, a₁ < 1, or some aᵢ < 0.
bool check_integral_lemma(std::span<const double> a);

/// (b_N > C) ∨ (min over the first N iterates of the metric ≤ ε) for an
/// N-step batch trace.
BoundCheckReport check_lemma2_contract(const Trace& trace, double C, double eps);

std::string bounds_csv(const std::vector<BoundCheckReport>& reports);
std::string budget_csv(const std::vector<IterationBudget>& budgets);

}  // namespace adanorm
