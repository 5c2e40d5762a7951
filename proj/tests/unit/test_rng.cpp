#include <gtest/gtest.h>

#include <random>
#include <set>

#include "robust_bandits/rng.hpp"

using namespace robust_bandits;

TEST(CounterRng, SameSeedAndStreamRepeat) {
  CounterRng a(42, Stream::noise), b(42, Stream::noise);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, StreamsAreIndependent) {
  CounterRng noise(42, Stream::noise), contexts(42, Stream::contexts);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += noise() == contexts();
  EXPECT_EQ(equal, 0);
}

TEST(CounterRng, SeekReplaysOutput) {
  CounterRng rng(7, Stream::learner);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 10; ++i) first.push_back(rng());
  rng.seek(5);
  for (int i = 5; i < 10; ++i) EXPECT_EQ(rng(), first[static_cast<std::size_t>(i)]);
}

TEST(CounterRng, UniformMeanIsCentered) {
  CounterRng rng(3, Stream::adversary);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += u(rng);
  // sd of the mean is sqrt(1/12/n) ~ 9e-4
  EXPECT_NEAR(sum / n, 0.5, 5e-3);
}

TEST(CounterRng, NoShortCycles) {
  CounterRng rng(0, Stream::instance);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) seen.insert(rng());
  EXPECT_EQ(seen.size(), 10000u);
}
