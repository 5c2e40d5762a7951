#include <gtest/gtest.h>

#include <cmath>

#include "robust_bandits/linucb.hpp"

using namespace robust_bandits;

TEST(LinUcb, PriorOnlyPicksLargestNorm) {
  LinUcb l(2);
  ContextMatrix ctx(2, 3);
  ctx << 0.3, 0.0, 0.5, 0.0, 0.2, 0.6;
  const Vector idx = l.indices(ctx);
  const double beta0 = 1.0 + std::sqrt(2.0 * std::log(10.0));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(idx(i), beta0 * ctx.col(i).norm(), 1e-12);
  EXPECT_EQ(l.select_action(ctx), 2u);
}

TEST(LinUcb, OneObservationByHand) {
  LinUcb l(2);
  Vector a(2);
  a << 0.6, 0.8;
  l.select_action(ContextMatrix(a));
  l.observe(0.5);
  // V = I + a a^T = [[1.36, .48], [.48, 1.64]], det = 2
  Matrix v(2, 2);
  v << 1.36, 0.48, 0.48, 1.64;
  EXPECT_TRUE(l.design_matrix().isApprox(v, 1e-14));
  Matrix vinv(2, 2);
  vinv << 1.64 / 2.0, -0.48 / 2.0, -0.48 / 2.0, 1.36 / 2.0;
  const Vector theta = vinv * (0.5 * a);
  EXPECT_LE((l.estimate() - theta).norm(), 1e-14);
  Vector b(2);
  b << 0.0, 1.0;
  const double beta = 1.0 + std::sqrt(2.0 * std::log(10.0) + 2.0 * std::log(1.0 + 1.0 / 2.0));
  const double expected = theta.dot(b) + beta * std::sqrt(b.dot(vinv * b));
  EXPECT_NEAR(l.indices(ContextMatrix(b))(0), expected, 1e-12);
}

TEST(LinUcb, RadiusNondecreasing) {
  double prev = 0;
  for (std::size_t t = 0; t < 10000; t += 37) {
    const double r = LinUcb::radius(t, 5, {});
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(LinUcb, RejectsBadConfig) {
  EXPECT_THROW(LinUcb(2, {.lambda = 0.0}), ValidationError);
  EXPECT_THROW(LinUcb(2, {.lambda = 1.0, .delta = 1.0}), ValidationError);
}
