#include "adanorm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "adanorm/trace_io.hpp"

namespace adanorm {
namespace {

constexpr double kDeskScaleLimit = 9.0e15;

double clamped_log(double x, bool& clamped) {
  if (x < 1.0) {
    clamped = true;
    return 0.0;
  }
  return std::log(x);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be finite and > 0");
  }
}

std::int64_t ceil_count(double v) {
  if (!std::isfinite(v) || v > kDeskScaleLimit) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::ceil(v));
}

// T = ⌈s1 + s2⌉ + 1 with parts reported separately.
void finish(IterationBudget& out, double s1, double s2) {
  out.stage1_exact = s1;
  out.stage2_exact = s2;
  const double total = s1 + s2;
  if (!std::isfinite(total) || total > kDeskScaleLimit) {
    out.exceeds_desk_scale = true;
    out.T = std::numeric_limits<std::int64_t>::max();
    out.stage1_part = ceil_count(s1);
    out.stage2_part = ceil_count(s2);
    return;
  }
  out.stage1_part = ceil_count(s1);
  out.stage2_part = ceil_count(s2);
  out.T = static_cast<std::int64_t>(std::ceil(total)) + 1;
}

bool unstrided_with_err(const Trace& trace) {
  if (trace.config.stride != 1) return false;
  for (const auto& r : trace.records) {
    if (!r.err_sq) return false;
  }
  return true;
}

// b_t for t = 0..T: the records plus final_b.
std::vector<double> b_column(const Trace& trace) {
  std::vector<double> b;
  b.reserve(trace.records.size() + 1);
  for (const auto& r : trace.records) b.push_back(r.b);
  b.push_back(trace.final_b);
  return b;
}

std::vector<double> err_column(const Trace& trace) {
  std::vector<double> e;
  e.reserve(trace.records.size() + 1);
  for (const auto& r : trace.records) e.push_back(*r.err_sq);
  if (trace.final_err_sq && trace.iterations == static_cast<std::int64_t>(trace.records.size())) {
    e.push_back(*trace.final_err_sq);
  }
  return e;
}

void grade(BoundCheckReport& r) {
  r.slack = r.bound - r.observed;
  r.passed = r.slack >= -1e-9 * std::abs(r.bound);
}

}  // namespace

std::string to_string(BudgetCase c) { return c == BudgetCase::Case1 ? "case1" : "case2"; }

double stage_one_radius(double delta0, double eta, double C, double b0, bool* clamped) {
  bool c = false;
  const double r = delta0 + eta * eta * (clamped_log(C * C / (b0 * b0), c) + 1.0);
  if (clamped) *clamped = c;
  return r;
}

IterationBudget budget_thm1(double b0, double eta, double L, double mu, double delta0, double eps,
                            double delta_h, double alpha, double gamma, double delta) {
  require_positive(b0, "b0");
  require_positive(eta, "eta");
  require_positive(L, "L");
  require_positive(mu, "mu");
  require_positive(delta0, "delta0");
  require_positive(eps, "eps");
  require_positive(delta_h, "delta_h");

  IterationBudget out;
  out.theorem = 1;
  out.constants = {b0, eta, L, mu, delta0, delta0, eps, delta_h, std::nullopt, std::nullopt,
                   std::nullopt};
  bool clamped = false;

  if (b0 > eta * L) {
    out.which = BudgetCase::Case1;
    const double s2 = (b0 + L * delta0 / eta) / mu * clamped_log(delta0 / (eps * delta_h), clamped);
    finish(out, 0.0, s2);
  } else {
    require_positive(alpha, "alpha");
    require_positive(gamma, "gamma");
    require_positive(delta, "delta");
    out.which = BudgetCase::Case2;
    const double Delta = stage_one_radius(delta0, eta, eta * L, b0, &clamped);
    out.constants.Delta = Delta;
    out.constants.alpha = alpha;
    out.constants.gamma = gamma;
    out.constants.delta = delta;
    const double s1 = (eta * eta * L * L - b0 * b0) / (alpha * gamma * eps) + delta / gamma;
    const double s2 =
        L * (eta + Delta / eta) / mu * clamped_log(Delta / (eps * delta_h), clamped);
    finish(out, s1, s2);
  }
  out.log_clamped = clamped;
  return out;
}

IterationBudget budget_thm2(double b0, double eta, double L, double mu, double delta0,
                            double eps) {
  require_positive(b0, "b0");
  require_positive(eta, "eta");
  require_positive(L, "L");
  require_positive(mu, "mu");
  require_positive(delta0, "delta0");
  require_positive(eps, "eps");

  IterationBudget out;
  out.theorem = 2;
  out.constants = {b0, eta, L, mu, delta0, delta0, eps, std::nullopt, std::nullopt,
                   std::nullopt, std::nullopt};
  bool clamped = false;
  const double threshold = eta * (mu + L) / 2.0;
  auto rate = [&](double radius) {
    return std::max(L * (1.0 + radius / (eta * eta)) / mu, (mu + L) / (2.0 * mu));
  };

  if (b0 > threshold) {
    out.which = BudgetCase::Case1;
    finish(out, 0.0, rate(delta0) * clamped_log(delta0 / eps, clamped));
  } else {
    out.which = BudgetCase::Case2;
    // Radius from the Stage-I bound at C = η(μ+L)/2, so η² sits inside the log.
    const double Delta = stage_one_radius(delta0, eta, threshold, b0, &clamped);
    out.constants.Delta = Delta;
    const double ratio = threshold * threshold / (b0 * b0);
    const double s1 = clamped_log(ratio, clamped) /
                      std::log1p(4.0 * mu * mu * eps / ((mu + L) * (mu + L)));
    finish(out, s1, rate(Delta) * clamped_log(Delta / eps, clamped));
  }
  out.log_clamped = clamped;
  return out;
}

IterationBudget budget_thm3(double b0, double eta, double L, double mu, double F0_gap,
                            double eps) {
  if (!(F0_gap > 0.0)) throw std::invalid_argument("budget_thm3: F(x0) - F* must be > 0");
  require_positive(b0, "b0");
  require_positive(eta, "eta");
  require_positive(L, "L");
  require_positive(mu, "mu");
  require_positive(eps, "eps");

  IterationBudget out;
  out.theorem = 3;
  out.constants = {b0, eta, L, mu, F0_gap, F0_gap, eps, std::nullopt, std::nullopt,
                   std::nullopt, std::nullopt};
  bool clamped = false;

  if (b0 > eta * L) {
    out.which = BudgetCase::Case1;
    const double s2 =
        (b0 + 2.0 / eta * F0_gap) / (mu * eta) * clamped_log(F0_gap / eps, clamped);
    finish(out, 0.0, s2);
  } else {
    out.which = BudgetCase::Case2;
    const double Delta =
        eta * eta * L / 2.0 * (1.0 + 2.0 * clamped_log(eta * L / b0, clamped)) + F0_gap;
    out.constants.Delta = Delta;
    const double s1 = clamped_log(eta * eta * L * L / (b0 * b0), clamped) /
                      std::log1p(2.0 * mu * eps / (eta * L * eta * L));
    const double s2 =
        (eta * L + 2.0 / eta * Delta) / (mu * eta) * clamped_log(Delta / eps, clamped);
    finish(out, s1, s2);
  }
  out.log_clamped = clamped;
  return out;
}

std::int64_t lemma2_budget(double b0, double C, double mu, double eps, Flavor flavor) {
  require_positive(b0, "b0");
  if (b0 >= C) return 0;
  require_positive(mu, "mu");
  require_positive(eps, "eps");
  const double num = std::log(C * C / (b0 * b0));
  if (flavor == Flavor::StronglyConvex) {
    return ceil_count(num / std::log1p(mu * mu * eps / (C * C))) + 1;
  }
  return ceil_count(num / std::log1p(2.0 * mu * eps / (C * C)));
}

BoundCheckReport check_lemma3(const Trace& trace, double C, double eta, double b0,
                              double delta0) {
  if (!unstrided_with_err(trace)) {
    throw std::invalid_argument("check_lemma3: needs an unstrided trace with err_sq");
  }
  BoundCheckReport r;
  r.lemma = "lemma3";
  r.bound = stage_one_radius(delta0, eta, C, b0, &r.log_clamped);

  const auto b = b_column(trace);
  std::size_t J = 0;
  while (J < b.size() && !(b[J] > C)) ++J;
  if (J == 0 || J == b.size() || J > trace.records.size()) {
    r.applicable = false;
    r.note = J == 0 ? "b0 > C" : "b never exceeds C";
    r.observed = 0.0;
    r.slack = r.bound;
    return r;
  }
  r.observed = *trace.records[J - 1].err_sq;
  r.note = "J=" + std::to_string(J);
  grade(r);
  return r;
}

BoundCheckReport check_lemma4(const Trace& trace, double C, double eta, double L, double b0,
                              double delta0) {
  if (C < eta * L) throw std::invalid_argument("check_lemma4: requires C >= eta * L");
  BoundCheckReport r;
  r.lemma = "lemma4";
  if (b0 > C) {
    r.bound = b0 + L / eta * delta0;
    r.note = "b0 > C";
  } else {
    r.bound = C + L / eta * stage_one_radius(delta0, eta, C, b0, &r.log_clamped);
  }
  double bmax = trace.final_b;
  for (const auto& rec : trace.records) bmax = std::max(bmax, rec.b);
  r.observed = bmax;
  grade(r);
  return r;
}

BoundCheckReport check_descent(const Trace& trace, double eta, double L) {
  if (!unstrided_with_err(trace)) {
    throw std::invalid_argument("check_descent: needs an unstrided trace with err_sq");
  }
  BoundCheckReport r;
  r.lemma = "descent";
  const auto b = b_column(trace);
  const auto e = err_column(trace);
  const double threshold = eta * L / 2.0;

  // Step t (x_t → x_{t+1}) divides by b_{t+1}.
  std::size_t k = 0;
  while (k + 1 < e.size() && !(b[k + 1] > threshold)) ++k;
  if (k + 1 >= e.size()) {
    r.applicable = false;
    r.note = "no step with b > eta*L/2";
    r.slack = 0.0;
    return r;
  }

  r.bound = e[k];
  r.observed = e[k];
  double worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t t = k; t + 1 < e.size(); ++t) {
    r.observed = std::max(r.observed, e[t + 1]);
    worst_increase = std::max(worst_increase, e[t + 1] - e[t]);
  }
  r.slack = r.bound - r.observed;
  const bool stepwise = worst_increase <= 1e-12;
  r.passed = stepwise && r.slack >= -std::max(1e-12, 1e-9 * std::abs(r.bound));
  r.note = "from_step=" + std::to_string(k);
  if (!stepwise) r.note += " max_increase=" + format_double(worst_increase);
  return r;
}

bool check_integral_lemma(std::span<const double> a) {
  if (a.empty()) throw std::invalid_argument("check_integral_lemma: empty sequence");
  if (!(a[0] >= 1.0)) throw std::invalid_argument("check_integral_lemma: a_1 must be >= 1");
  double S = 0.0;
  double log_sum = 0.0;
  double sqrt_sum = 0.0;
  for (double v : a) {
    if (!(v >= 0.0)) throw std::invalid_argument("check_integral_lemma: negative entry");
    S += v;
    log_sum += v / S;
    sqrt_sum += v / std::sqrt(S);
  }
  const double lhs1 = std::log(S) + 1.0;
  const double lhs2 = 2.0 * std::sqrt(S);
  return log_sum <= lhs1 * (1.0 + 1e-12) && sqrt_sum <= lhs2 * (1.0 + 1e-12);
}

BoundCheckReport check_lemma2_contract(const Trace& trace, double C, double eps) {
  BoundCheckReport r;
  r.lemma = "lemma2";
  r.bound = eps;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& rec : trace.records) {
    const auto& v = rec.err_sq ? rec.err_sq : rec.gap;
    if (v) best = std::min(best, *v);
  }
  if (trace.best_metric) best = std::min(best, *trace.best_metric);
  r.observed = best;
  const bool crossed = trace.final_b > C;
  const bool reached = best <= eps || trace.converged;
  r.passed = crossed || reached;
  r.slack = crossed ? trace.final_b - C : eps - best;
  r.note = crossed ? "b_N > C" : (reached ? "min metric <= eps" : "neither");
  return r;
}

std::string bounds_csv(const std::vector<BoundCheckReport>& reports) {
  std::ostringstream os;
  os << "lemma,bound,observed,slack,passed,applicable,note\n";
  for (const auto& r : reports) {
    os << r.lemma << ',' << format_double(r.bound) << ',' << format_double(r.observed) << ','
       << format_double(r.slack) << ',' << (r.passed ? 1 : 0) << ',' << (r.applicable ? 1 : 0)
       << ',' << r.note << '\n';
  }
  return os.str();
}

std::string budget_csv(const std::vector<IterationBudget>& budgets) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::ostringstream os;
  os << "theorem,case,T,stage1,stage2,exceeds_desk_scale,b0,eta,L,mu,delta0,Delta,eps,delta_h,"
        "delta,alpha,gamma\n";
  for (const auto& b : budgets) {
    const auto& c = b.constants;
    os << b.theorem << ',' << to_string(b.which) << ',' << b.T << ',' << b.stage1_part << ','
       << b.stage2_part << ',' << (b.exceeds_desk_scale ? 1 : 0) << ',' << format_double(c.b0)
       << ',' << format_double(c.eta) << ',' << format_double(c.L) << ','
       << format_double(c.mu) << ',' << format_double(c.delta0) << ','
       << format_double(c.Delta) << ',' << format_double(c.eps) << ',' << opt(c.delta_h) << ','
       << opt(c.delta) << ',' << opt(c.alpha) << ',' << opt(c.gamma) << '\n';
  }
  return os.str();
}

}  // namespace adanorm
