#include <gtest/gtest.h>

#include <omp.h>

#include "adanorm/kernels.hpp"
#include "adanorm/problems.hpp"
#include "adanorm/rng.hpp"

using namespace adanorm;

namespace {

RowMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  auto engine = make_engine(seed);
  std::normal_distribution<double> normal;
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(engine);
  return m;
}

Vector random_vector(Eigen::Index size, std::uint64_t seed) {
  return random_matrix(size, 1, seed).col(0);
}

class ThreadCount : public ::testing::TestWithParam<int> {};

}  // namespace

TEST(Kernels, LeastSquaresMatchesDenseFormula) {
  // 1000 rows spans several reduction blocks plus a ragged tail.
  const RowMatrix a = random_matrix(1000, 20, 1);
  const Vector y = random_vector(1000, 2);
  const Vector x = random_vector(20, 3);
  const Vector r = a * x - y;
  const Vector expected = a.transpose() * r / 1000.0;
  Vector g;
  kernels::least_squares_gradient(a, y, x, g);
  EXPECT_LT((g - expected).norm(), 1e-12 * expected.norm());
  EXPECT_NEAR(kernels::least_squares_value(a, y, x), 0.5 * r.squaredNorm() / 1000.0, 1e-12);
}

// Serial sums rows in one pass, parallel sums blocks, so the two agree to
// rounding; the parallel result itself must not depend on the thread count.
TEST_P(ThreadCount, LeastSquaresParallelMatchesSerial) {
  const RowMatrix a = random_matrix(1000, 20, 4);
  const Vector y = random_vector(1000, 5);
  const Vector x = random_vector(20, 6);
  Vector serial_g, one_thread_g, parallel_g;
  kernels::serial::least_squares_gradient(a, y, x, serial_g);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  kernels::least_squares_gradient(a, y, x, one_thread_g);
  const double v1 = kernels::least_squares_value(a, y, x);
  omp_set_num_threads(GetParam());
  kernels::least_squares_gradient(a, y, x, parallel_g);
  const double pv = kernels::least_squares_value(a, y, x);
  omp_set_num_threads(saved);
  for (Eigen::Index j = 0; j < x.size(); ++j) EXPECT_EQ(parallel_g[j], one_thread_g[j]);
  EXPECT_EQ(pv, v1);
  EXPECT_LT((parallel_g - serial_g).norm(), 1e-12 * serial_g.norm());
  EXPECT_NEAR(pv, kernels::serial::least_squares_value(a, y, x), 1e-12 * pv);
}

TEST_P(ThreadCount, ReluParallelMatchesSerial) {
  const auto net = make_two_layer_relu(300, 40, 10, 7);
  const Vector w = random_vector(400, 8);
  const auto& in = net->inputs();
  const auto& tg = net->targets();
  const auto& out = net->outer_weights();
  Vector serial_g, one_thread_g, parallel_g;
  kernels::serial::relu_net_gradient(in, tg, out, w, serial_g);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  kernels::relu_net_gradient(in, tg, out, w, one_thread_g);
  const double v1 = kernels::relu_net_value(in, tg, out, w);
  omp_set_num_threads(GetParam());
  kernels::relu_net_gradient(in, tg, out, w, parallel_g);
  const double pv = kernels::relu_net_value(in, tg, out, w);
  omp_set_num_threads(saved);
  for (Eigen::Index j = 0; j < w.size(); ++j) EXPECT_EQ(parallel_g[j], one_thread_g[j]);
  EXPECT_EQ(pv, v1);
  EXPECT_LT((parallel_g - serial_g).norm(), 1e-12 * serial_g.norm());
  EXPECT_NEAR(pv, kernels::serial::relu_net_value(in, tg, out, w), 1e-12 * pv);
}

INSTANTIATE_TEST_SUITE_P(Threads, ThreadCount, ::testing::Values(1, 2, 3, 8));

TEST(Kernels, ReluValueMatchesComponentAverage) {
  const auto net = make_two_layer_relu(50, 16, 5, 9);
  const Vector w = random_vector(80, 10);
  double sum = 0.0;
  for (std::size_t i = 0; i < 50; ++i) sum += net->component_value(i, w);
  EXPECT_NEAR(net->value(w), sum / 50.0, 1e-12);
}

TEST(Kernels, SingleRowAndEmptyTail) {
  const RowMatrix a = random_matrix(1, 3, 11);
  const Vector y = random_vector(1, 12);
  const Vector x = random_vector(3, 13);
  Vector g, gs;
  kernels::least_squares_gradient(a, y, x, g);
  kernels::serial::least_squares_gradient(a, y, x, gs);
  EXPECT_LT((g - gs).norm(), 1e-14 * gs.norm());
  const RowMatrix block = random_matrix(kernels::kBlockRows * 2, 3, 14);
  const Vector yb = random_vector(block.rows(), 15);
  kernels::least_squares_gradient(block, yb, x, g);
  kernels::serial::least_squares_gradient(block, yb, x, gs);
  EXPECT_LT((g - gs).norm(), 1e-12 * gs.norm());
}
