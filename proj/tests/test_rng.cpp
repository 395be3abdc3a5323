#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "adanorm/rng.hpp"

using namespace adanorm;

TEST(Rng, Mix64IsInjectiveOnSmallRange) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t z = 0; z < 10000; ++z) seen.insert(mix64(z));
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(Rng, DeriveSeedSeparatesStreams) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(Rng, CounterRngIsRandomAccess) {
  CounterRng a(42);
  std::vector<std::uint64_t> draws;
  for (int i = 0; i < 100; ++i) draws.push_back(a());
  const CounterRng b(42);
  for (std::uint64_t k = 0; k < 100; ++k) EXPECT_EQ(b.at(k), draws[k]);
  CounterRng c(42, 50);
  EXPECT_EQ(c(), draws[50]);
  EXPECT_EQ(a.counter(), 100u);
}

TEST(Rng, UniformIndexInRangeAndRoughlyUniform) {
  CounterRng rng(5);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto k = rng.uniform_index(10);
    ASSERT_LT(k, 10u);
    ++counts[k];
  }
  // 5 sigma of a binomial(1e5, 0.1) count is about 475.
  for (int c : counts) EXPECT_NEAR(c, draws / 10, 500);
}

TEST(Rng, Uniform01InUnitInterval) {
  CounterRng rng(9);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Rng, MakeEngineIsSeeded) {
  auto a = make_engine(3, 1);
  auto b = make_engine(3, 1);
  auto c = make_engine(3, 2);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
}
