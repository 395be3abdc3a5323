#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "adanorm/optimizers.hpp"
#include "adanorm/problems.hpp"
#include "adanorm/rng.hpp"

using namespace adanorm;

namespace {

// F(x) = ½‖x − x*‖² as a single component: L = μ = 1.
class UnitQuadratic final : public ProblemInstance {
 public:
  explicit UnitQuadratic(Vector x_star) : ProblemInstance(constants(x_star)) {}

  double component_value(std::size_t, const Vector& x) const override {
    return 0.5 * (x - *minimizer()).squaredNorm();
  }
  void component_gradient(std::size_t, const Vector& x, Vector& out) const override {
    out = x - *minimizer();
  }
  double component_smoothness(std::size_t) const override { return 1.0; }

 private:
  static Constants constants(const Vector& x_star) {
    Constants c;
    c.name = "unit_quadratic";
    c.dimension = static_cast<std::size_t>(x_star.size());
    c.component_count = 1;
    c.smoothness = 1.0;
    c.strong_convexity = 1.0;
    c.minimizer = x_star;
    return c;
  }
};

RunOptions adagrad(Mode mode, double eta, double b0, std::int64_t iters, std::uint64_t seed = 0) {
  RunOptions o;
  o.mode = mode;
  o.eta = eta;
  o.b0 = b0;
  o.max_iters = iters;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(AdagradStep, PythagoreanTriple) {
  OptimizerState s{Vector::Zero(2), 3.0, 1.0, 0};
  Vector g(2);
  g << 4.0, 0.0;
  const auto next = adagrad_norm_step(s, g);
  EXPECT_DOUBLE_EQ(next.b, 5.0);
  EXPECT_DOUBLE_EQ(next.x[0], -0.8);
  EXPECT_EQ(next.t, 1);
  EXPECT_DOUBLE_EQ(3.0 + 16.0 / (3.0 + 5.0), 5.0);
  EXPECT_DOUBLE_EQ(solution_form_next(3.0, 16.0), 5.0);
}

TEST(AdagradStep, ZeroGradientIsIdentity) {
  Vector x(3);
  x << 1, -2, 3;
  OptimizerState s{x, 2.5, 7.0, 4};
  const auto next = adagrad_norm_step(s, Vector::Zero(3));
  EXPECT_EQ(next.b, 2.5);
  EXPECT_EQ(next.x, x);
}

TEST(AdagradStep, NonFiniteGradientThrows) {
  OptimizerState s{Vector::Zero(1), 1.0, 1.0, 0};
  Vector g(1);
  g << std::nan("");
  EXPECT_THROW(adagrad_norm_step(s, g), NonFiniteGradient);
}

TEST(AdagradStep, SquareAndSolutionFormsAgree) {
  std::mt19937_64 engine(123);
  std::uniform_real_distribution<double> log_scale(-6.0, 6.0);
  for (int k = 0; k < 1000; ++k) {
    const double b = std::pow(10.0, log_scale(engine));
    const double g = std::pow(10.0, log_scale(engine));
    const double sq = square_form_next(b, g * g);
    const double sol = solution_form_next(b, g * g);
    EXPECT_LE(std::abs(sq - sol), 1e-10 * sq);
    // The defining relation b' = b + ‖G‖²/(b + b') at the square-form root.
    EXPECT_LE(std::abs(b + g * g / (b + sq) - sq), 1e-10 * sq);
  }
}

TEST(Run, MaxItersZeroEchoesConfig) {
  const auto p = make_least_squares(50, 5, 1);
  auto o = adagrad(Mode::Batch, 2.0, 0.5, 0, 17);
  const auto t = run(*p, o);
  EXPECT_TRUE(t.records.empty());
  EXPECT_EQ(t.iterations, 0);
  EXPECT_EQ(t.config.optimizer, "adagrad_norm");
  EXPECT_EQ(t.config.mode, "batch");
  EXPECT_EQ(t.config.seed, 17u);
  EXPECT_EQ(t.config.eta, 2.0);
  EXPECT_EQ(t.config.b0, 0.5);
  EXPECT_EQ(t.final_b, 0.5);
  EXPECT_THROW(best_error(t), EmptyTrace);
}

TEST(Run, InvalidOptionsRejected) {
  const auto p = make_least_squares(50, 5, 1);
  auto o = adagrad(Mode::Batch, 1.0, 0.0, 10);
  EXPECT_THROW(run(*p, o), std::invalid_argument);
  o.b0 = 1.0;
  o.method = Method::SgdConst;
  EXPECT_THROW(run(*p, o), std::invalid_argument);
  o.method = Method::GdConst;
  o.stride = 0;
  EXPECT_THROW(run(*p, o), std::invalid_argument);
}

TEST(Run, SqrtScheduleStepsize) {
  const auto p = make_least_squares(50, 5, 1);
  RunOptions o;
  o.method = Method::SgdSqrt;
  o.mode = Mode::Stochastic;
  o.eta = 1.0;
  o.b0 = 1.0;
  o.max_iters = 30;
  const auto t = run(*p, o);
  ASSERT_GT(t.records.size(), 25u);
  EXPECT_DOUBLE_EQ(t.records[25].stepsize, 0.5);
  EXPECT_DOUBLE_EQ(t.records[0].stepsize, 1.0);
}

TEST(Run, ConstScheduleStepsize) {
  const auto p = make_least_squares(50, 5, 1);
  RunOptions o;
  o.method = Method::GdConst;
  o.mode = Mode::Batch;
  o.eta = 1.0;
  o.b0 = 4.0 * p->smoothness();
  o.max_iters = 10;
  const auto t = run(*p, o);
  for (const auto& r : t.records) EXPECT_DOUBLE_EQ(r.stepsize, 1.0 / o.b0);
}

TEST(Run, QuadraticStageTwoFromStartStrictlyDecreases) {
  Vector x_star(3);
  x_star << 1.0, -1.0, 2.0;
  const UnitQuadratic q(x_star);
  auto o = adagrad(Mode::Batch, 1.0, 10.0, 200);
  o.x0 = Vector::Zero(3);
  const auto t = run(q, o);
  ASSERT_EQ(t.records.size(), 200u);
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    EXPECT_LT(*t.records[k].err_sq, *t.records[k - 1].err_sq) << "t=" << k;
  }
}

TEST(Run, AccumulatorIdentity) {
  const auto p = make_least_squares(200, 10, 2);
  for (Mode mode : {Mode::Batch, Mode::Stochastic}) {
    const auto t = run(*p, adagrad(mode, 1.0, 0.3, 500, 5));
    double sum = 0.0;
    for (const auto& r : t.records) {
      const double expected = 0.3 * 0.3 + sum;
      EXPECT_LE(std::abs(r.b * r.b - expected), 1e-9 * expected);
      sum += r.grad_norm_sq;
    }
    EXPECT_LE(std::abs(t.final_b * t.final_b - (0.09 + sum)), 1e-9 * (0.09 + sum));
  }
}

TEST(Run, RecordsOrderedAndBNondecreasing) {
  const auto p = make_least_squares(200, 10, 2);
  const auto t = run(*p, adagrad(Mode::Stochastic, 1.0, 1e-3, 1000, 3));
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    EXPECT_GT(t.records[k].t, t.records[k - 1].t);
    EXPECT_GE(t.records[k].b, t.records[k - 1].b);
  }
  for (const auto& r : t.records) {
    EXPECT_GE(*r.err_sq, 0.0);
    EXPECT_TRUE(std::isfinite(r.b) && std::isfinite(r.stepsize) && std::isfinite(r.grad_norm_sq));
    EXPECT_GE(*r.gap, -1e-12);
  }
}

TEST(Run, DescentAfterThreshold) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = make_least_squares(200, 10, 100 + seed);
    const double eta = 1.0;
    const double half = eta * p->smoothness() / 2.0;
    for (Mode mode : {Mode::Batch, Mode::Stochastic}) {
      const auto t = run(*p, adagrad(mode, eta, 1e-3, 2000, seed));
      for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
        if (t.records[k].b > half) {
          EXPECT_LE(*t.records[k + 1].err_sq, *t.records[k].err_sq + 1e-12);
        }
      }
    }
  }
}

TEST(Run, LemmaFourStyleBoundOnB) {
  // b_max ≤ C + (L/η)(Δ₀ + η²(log(C²/b₀²) + 1)) with C = ηL.
  const auto p = make_least_squares(200, 10, 7);
  const double eta = 1.0;
  const double b0 = 1e-2;
  const double C = eta * p->smoothness();
  const double delta0 = p->minimizer()->squaredNorm();
  const double bound =
      C + p->smoothness() / eta * (delta0 + eta * eta * (std::log(C * C / (b0 * b0)) + 1.0));
  for (Mode mode : {Mode::Batch, Mode::Stochastic}) {
    const auto t = run(*p, adagrad(mode, eta, b0, 3000, 1));
    EXPECT_LE(t.max_b, bound);
  }
}

TEST(Run, Determinism) {
  const auto p = make_least_squares(100, 5, 3);
  const auto a = run(*p, adagrad(Mode::Batch, 1.0, 1.0, 100, 1));
  const auto b = run(*p, adagrad(Mode::Batch, 1.0, 1.0, 100, 2));
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(*a.records[k].err_sq, *b.records[k].err_sq);
    EXPECT_EQ(a.records[k].b, b.records[k].b);
  }
  const auto s1 = run(*p, adagrad(Mode::Stochastic, 1.0, 1.0, 300, 9));
  const auto s2 = run(*p, adagrad(Mode::Stochastic, 1.0, 1.0, 300, 9));
  const auto s3 = run(*p, adagrad(Mode::Stochastic, 1.0, 1.0, 300, 10));
  bool differs = false;
  for (std::size_t k = 0; k < s1.records.size(); ++k) {
    EXPECT_EQ(*s1.records[k].err_sq, *s2.records[k].err_sq);
    EXPECT_EQ(s1.records[k].grad_norm_sq, s2.records[k].grad_norm_sq);
    differs = differs || s1.records[k].grad_norm_sq != s3.records[k].grad_norm_sq;
  }
  EXPECT_TRUE(differs);
}

TEST(Run, StopTolEmitsTerminalRecord) {
  const auto p = make_least_squares(200, 10, 4);
  auto o = adagrad(Mode::Batch, 1.0, 1.0, 100000);
  o.stop_tol = 1e-10;
  const auto t = run(*p, o);
  EXPECT_TRUE(t.converged);
  ASSERT_FALSE(t.records.empty());
  EXPECT_LE(*t.records.back().err_sq, 1e-10);
  EXPECT_EQ(t.records.back().grad_norm_sq, 0.0);
  EXPECT_EQ(static_cast<std::int64_t>(t.records.size()), t.iterations + 1);
}

TEST(Run, DivergenceIsRecordedNotThrown) {
  const auto p = make_least_squares(200, 10, 4);
  RunOptions o;
  o.method = Method::GdConst;
  o.mode = Mode::Batch;
  o.b0 = 1e-3 * p->smoothness();
  o.max_iters = 10000;
  const auto t = run(*p, o);
  EXPECT_TRUE(t.diverged);
  EXPECT_LT(t.iterations, 10000);
}

TEST(Run, StrideKeepsExactBookkeeping) {
  const auto p = make_least_squares(200, 10, 5);
  auto o = adagrad(Mode::Stochastic, 1.0, 1.0, 1000, 2);
  const auto full = run(*p, o);
  o.stride = 7;
  const auto strided = run(*p, o);
  EXPECT_EQ(strided.final_b, full.final_b);
  EXPECT_EQ(strided.max_b, full.max_b);
  EXPECT_EQ(*strided.final_err_sq, *full.final_err_sq);
  EXPECT_EQ(best_error(strided), best_error(full));
  for (const auto& r : strided.records) EXPECT_EQ(r.t % 7, 0);
}

TEST(Run, ReluHasNoErrColumn) {
  const auto p = make_two_layer_relu(20, 10, 3, 1);
  RunOptions o;
  o.mode = Mode::Batch;
  o.max_iters = 5;
  const auto t = run(*p, o);
  for (const auto& r : t.records) {
    EXPECT_FALSE(r.err_sq);
    EXPECT_TRUE(r.gap);
  }
}

TEST(BestError, ExplicitColumn) {
  Trace t;
  for (double e : {4.0, 1.0, 2.0}) {
    TraceRecord r;
    r.t = static_cast<std::int64_t>(t.records.size());
    r.err_sq = e;
    t.records.push_back(r);
  }
  EXPECT_EQ(best_error(t), 1.0);
}

TEST(BestError, MonotoneTraceGivesLast) {
  Trace t;
  for (int k = 0; k < 5; ++k) {
    TraceRecord r;
    r.t = k;
    r.gap = 1.0 / (k + 1);
    t.records.push_back(r);
  }
  EXPECT_EQ(best_error(t), 0.2);
}

TEST(BestError, MatchesBruteForceScan) {
  const auto p = make_least_squares(100, 5, 6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = run(*p, adagrad(Mode::Stochastic, 1.0, 0.1, 300, seed));
    double m = *t.records.front().err_sq;
    for (const auto& r : t.records) m = *r.err_sq < m ? *r.err_sq : m;
    EXPECT_EQ(best_error(t), m);
  }
}

TEST(Names, RoundTrip) {
  for (Method m : {Method::AdagradNorm, Method::SgdConst, Method::SgdSqrt, Method::GdConst,
                   Method::GdSqrt}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_FALSE(parse_method("adam"));
  EXPECT_EQ(parse_mode("batch"), Mode::Batch);
  EXPECT_FALSE(parse_mode("online"));
}
