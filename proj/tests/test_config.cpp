#include <gtest/gtest.h>

#include <filesystem>

#include "adanorm/config.hpp"
#include "adanorm/trace_io.hpp"

using namespace adanorm;

namespace {

const char* kFull = R"(# a full config
experiment = demo
description = every key once
problem = least_squares_noisy
problem.n = 300
problem.d = 7
problem.sigma = 0.25
problem.seed = 9
method = adagrad_norm mode=batch eta=1 b0=0.5*L label=ada
method = sgd_const b0=2*L
method = sgd_sqrt eta=0.1*sqrtD0 b0=1 decay=0.3
max_iters = 500
stop_tol = 1e-12
repeats = 3
seed = 42
stride = 2
x0 = gaussian:100
track_gap = false
sweep.param = b0
sweep.logspace = 0.001 10 5
sweep.unit = L
ruig.epsilon = 1e-6
ruig.alpha_grid = 0.015 0.1 0.45
ruig.points = 4
ruig.samples = 100
bounds.eps = 1e-6
bounds.delta_h = 0.1
bounds.C = 1*L
)";

std::size_t error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return 0;
}

}  // namespace

TEST(Config, ParsesEveryKey) {
  const auto c = parse_config(kFull);
  EXPECT_EQ(c.id, "demo");
  EXPECT_EQ(c.problem.generator, "least_squares_noisy");
  EXPECT_EQ(c.problem.n, 300u);
  EXPECT_EQ(c.problem.sigma, 0.25);
  ASSERT_EQ(c.methods.size(), 3u);
  EXPECT_EQ(c.methods[0].label, "ada");
  EXPECT_EQ(c.methods[0].mode, Mode::Batch);
  EXPECT_EQ(c.methods[0].b0, (ScaledValue{0.5, "L"}));
  EXPECT_EQ(c.methods[1].mode, Mode::Stochastic);
  EXPECT_EQ(c.methods[1].label, "sgd_const_stochastic_1");
  EXPECT_EQ(c.methods[2].eta, (ScaledValue{0.1, "sqrtD0"}));
  EXPECT_EQ(c.methods[2].decay, 0.3);
  EXPECT_EQ(c.repeats, 3u);
  EXPECT_EQ(c.x0, "gaussian:100");
  EXPECT_FALSE(c.track_gap);
  ASSERT_TRUE(c.sweep);
  ASSERT_EQ(c.sweep->grid.size(), 5u);
  EXPECT_DOUBLE_EQ(c.sweep->grid[0], 1e-3);
  EXPECT_NEAR(c.sweep->grid[2], 0.1, 1e-15);
  EXPECT_EQ(c.sweep->grid[4], 10.0);
  ASSERT_TRUE(c.ruig);
  EXPECT_EQ(c.ruig->alpha_grid.size(), 3u);
  ASSERT_TRUE(c.bounds && c.bounds->C);
  EXPECT_EQ(*c.bounds->C, (ScaledValue{1, "L"}));
}

TEST(Config, RoundTrip) {
  const auto c = parse_config(kFull);
  const std::string text = serialize_config(c);
  const auto back = parse_config(text);
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize_config(back), text);
}

TEST(Config, MinimalDefaults) {
  const auto c = parse_config("method = adagrad_norm\n");
  EXPECT_EQ(c.problem.generator, "least_squares");
  EXPECT_EQ(c.repeats, 1u);
  EXPECT_EQ(c.methods[0].eta, ScaledValue{});
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, ScaledValues) {
  EXPECT_EQ(parse_scaled("3"), (ScaledValue{3, ""}));
  EXPECT_EQ(parse_scaled("0.5*mu"), (ScaledValue{0.5, "mu"}));
  EXPECT_EQ(to_string(ScaledValue{2, "D0"}), "2*D0");
  EXPECT_THROW(parse_scaled("2*K"), ConfigError);
  EXPECT_THROW(parse_scaled("x*L"), ConfigError);
}

TEST(Config, LineNumberedErrors) {
  EXPECT_EQ(error_line("experiment = a\nbogus = 1\n"), 2u);
  EXPECT_EQ(error_line("# c\n\nproblem.n = ten\n"), 3u);
  EXPECT_EQ(error_line("method = adam\n"), 1u);
  EXPECT_EQ(error_line("method = adagrad_norm\nmethod = adagrad_norm mode=sideways\n"), 2u);
  EXPECT_EQ(error_line("method = adagrad_norm b0=1*Q\n"), 1u);
  EXPECT_EQ(error_line("method = gd_const mode=stochastic\n"), 1u);
  EXPECT_EQ(error_line("a\n"), 1u);
  EXPECT_EQ(error_line("repeats = -1\n"), 1u);
  EXPECT_EQ(error_line("sweep.grid = 1 2\nsweep.logspace = 1 2 3\n"), 2u);
  EXPECT_EQ(error_line("track_gap = maybe\n"), 1u);
}

TEST(Config, ValidationErrors) {
  EXPECT_THROW(parse_config("problem = mnist\n"), ConfigError);
  EXPECT_THROW(parse_config("repeats = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("x0 = far\n"), ConfigError);
  EXPECT_THROW(parse_config("sweep.grid = 3 1 2\n"), ConfigError);
  EXPECT_THROW(parse_config("method = adagrad_norm label=x\nmethod = gd_const label=x\n"),
               ConfigError);
  EXPECT_THROW(parse_config("sweep.param = decay\nsweep.grid = 1\n"), ConfigError);
}

TEST(Config, UnreadableFile) {
  EXPECT_THROW(load_config("/nonexistent/adanorm/x.cfg"), IoError);
}

TEST(Config, CommentsAndWhitespace) {
  const auto c = parse_config("  experiment   =  spaced  # trailing\n\t\n# full line\n");
  EXPECT_EQ(c.id, "spaced");
}
