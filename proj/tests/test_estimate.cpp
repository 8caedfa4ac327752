#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "alrs/error.hpp"
#include "alrs/estimate.hpp"
#include "alrs/eval.hpp"
#include "test_support.hpp"

namespace alrs::estimate {
namespace {

using testing::applyByHand;

double sse(const CorrespondenceSet& cs, const AffineTransform& t) {
  double s = 0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Point2 r = applyByHand(t, cs.refPoints[i]) - cs.sensedPoints[i];
    s += r.x * r.x + r.y * r.y;
  }
  return s;
}

void expectCoefficientsNear(const AffineTransform& a, const AffineTransform& b, double tol) {
  EXPECT_NEAR(a.a, b.a, tol);
  EXPECT_NEAR(a.b, b.b, tol);
  EXPECT_NEAR(a.c, b.c, tol);
  EXPECT_NEAR(a.d, b.d, tol);
  EXPECT_NEAR(a.tx, b.tx, tol);
  EXPECT_NEAR(a.ty, b.ty, tol);
}

CorrespondenceSet exactSet(const AffineTransform& t, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 500.0);
  CorrespondenceSet cs;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p{u(rng), u(rng)};
    cs.add(p, applyByHand(t, p));
  }
  return cs;
}

TEST(Lsm, IdentityOnFourPoints) {
  CorrespondenceSet cs;
  for (Point2 p : {Point2{0, 0}, Point2{10, 0}, Point2{0, 7}, Point2{3, 9}}) cs.add(p, p);
  const auto fit = fitAffineLSM(cs);
  expectCoefficientsNear(fit.transform, AffineTransform::identity(), 1e-12);
  EXPECT_NEAR(fit.rmse, 0.0, 1e-12);
}

TEST(Lsm, RecoversExactMapsFromFivePoints) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = testing::randomAffine(rng);
    const auto fit = fitAffineLSM(exactSet(t, 5, rng));
    expectCoefficientsNear(fit.transform, t, 1e-9);
  }
}

TEST(Lsm, NoisyRmseWithinMonteCarloBand) {
  // Expected rmse is 0.5 * sqrt(2 (N - 3) / N), about 0.696 for N = 100.
  std::normal_distribution<double> noise(0.0, 0.5);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const auto t = testing::randomAffine(rng);
    auto cs = exactSet(t, 100, rng);
    for (auto& q : cs.sensedPoints) q = q + Point2{noise(rng), noise(rng)};
    const auto fit = fitAffineLSM(cs);
    EXPECT_GE(fit.rmse, 0.4);
    EXPECT_LE(fit.rmse, 0.8);
  }
}

TEST(Lsm, ResidualBookkeeping) {
  std::mt19937_64 rng(2);
  auto cs = exactSet(testing::randomAffine(rng), 30, rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (auto& q : cs.sensedPoints) q = q + Point2{noise(rng), noise(rng)};
  const auto fit = fitAffineLSM(cs);
  ASSERT_EQ(fit.residuals.size(), cs.size());
  double s = 0;
  for (double r : fit.residuals) s += r * r;
  EXPECT_NEAR(fit.rmse, std::sqrt(s / cs.size()), 1e-12);
  EXPECT_NEAR(s, sse(cs, fit.transform), 1e-9);
}

TEST(Lsm, Errors) {
  CorrespondenceSet two;
  two.add({0, 0}, {1, 1});
  two.add({1, 0}, {2, 1});
  try {
    fitAffineLSM(two);
    FAIL();
  } catch (const DegenerateError& e) {
    EXPECT_STREQ(e.what(), "insufficient correspondences");
  }
  CorrespondenceSet line;
  for (int i = 0; i < 6; ++i) line.add({1.0 * i, 2.0 * i + 1}, {3.0 * i, 1.0});
  try {
    fitAffineLSM(line);
    FAIL();
  } catch (const DegenerateError& e) {
    EXPECT_STREQ(e.what(), "degenerate configuration");
  }
}

TEST(Lsm, LocallyOptimal) {
  std::normal_distribution<double> noise(0.0, 2.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    auto cs = exactSet(testing::randomAffine(rng), 25, rng);
    for (auto& q : cs.sensedPoints) q = q + Point2{noise(rng), noise(rng)};
    const auto t = fitAffineLSM(cs).transform;
    const double best = sse(cs, t);
    double AffineTransform::*fields[] = {&AffineTransform::a, &AffineTransform::b,  &AffineTransform::c,
                                         &AffineTransform::d, &AffineTransform::tx, &AffineTransform::ty};
    for (auto f : fields) {
      for (double step : {1e-3, -1e-3}) {
        AffineTransform probe = t;
        probe.*f += step;
        EXPECT_GE(sse(cs, probe), best);
      }
    }
  }
}

TEST(Lsm, TranslationEquivariance) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = testing::randomAffine(rng);
    const auto cs = exactSet(t, 8, rng);
    const Point2 shift{17.25, -4.5};
    CorrespondenceSet moved = cs;
    for (auto& p : moved.refPoints) p = p + shift;
    const auto a = fitAffineLSM(cs).transform;
    const auto b = fitAffineLSM(moved).transform;
    EXPECT_NEAR(b.a, a.a, 1e-9);
    EXPECT_NEAR(b.b, a.b, 1e-9);
    EXPECT_NEAR(b.c, a.c, 1e-9);
    EXPECT_NEAR(b.d, a.d, 1e-9);
    EXPECT_NEAR(b.tx, a.tx - (a.a * shift.x + a.b * shift.y), 1e-8);
    EXPECT_NEAR(b.ty, a.ty - (a.c * shift.x + a.d * shift.y), 1e-8);
  }
}

TEST(ScaledRmse, Arithmetic) {
  FitResult fit;
  fit.rmse = 0.0;
  for (int L = 0; L < 4; ++L) EXPECT_EQ(scaledRmse(fit, L), 0.0);
  fit.rmse = 1.0;
  EXPECT_DOUBLE_EQ(scaledRmse(fit, 1), 2.0);
  fit.rmse = 0.3;
  EXPECT_DOUBLE_EQ(scaledRmse(fit, 2), 1.2);
  EXPECT_EQ(scaledRmse(fit, 0), fit.rmse);
  EXPECT_THROW(scaledRmse(fit, -1), InvalidArgument);
}

TEST(Ransac, AllExact) {
  std::mt19937_64 rng(4);
  const auto cs = exactSet(testing::randomAffine(rng), 30, rng);
  const auto r = fitAffineRansac(cs);
  EXPECT_EQ(std::count(r.inlierMask.begin(), r.inlierMask.end(), true), 30);
  expectCoefficientsNear(r.fit.transform, fitAffineLSM(cs).transform, 1e-9);
}

TEST(Ransac, ThreeExactPoints) {
  const AffineTransform t{1.1, 0.2, -0.1, 0.9, 5, -3};
  CorrespondenceSet cs;
  for (Point2 p : {Point2{0, 0}, Point2{10, 1}, Point2{2, 8}}) cs.add(p, applyByHand(t, p));
  const auto r = fitAffineRansac(cs);
  EXPECT_EQ(r.inlierMask, (std::vector<bool>{true, true, true}));
  expectCoefficientsNear(r.fit.transform, t, 1e-9);
}

TEST(Ransac, RecoversInliersAmongOutliers) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    const auto t = eval::rotationScale(30, 0.9, {256, 256});
    const auto base = eval::exactCorrespondences(t, 80, 512, 512, seed);
    const auto cs = eval::injectOutliers(base, 20, 512, 512, seed + 100).set;
    const auto r = fitAffineRansac(cs, {1.0, 500, seed});
    const auto found = std::count(r.inlierMask.begin(), r.inlierMask.begin() + 80, true);
    EXPECT_GE(found, 78) << "seed " << seed;
  }
}

TEST(Ransac, ReproducibleAndFailsWithoutConsensus) {
  std::mt19937_64 rng(6);
  const auto base = exactSet(testing::randomAffine(rng), 20, rng);
  const auto cs = eval::injectOutliers(base, 20, 500, 500, 3).set;
  const auto a = fitAffineRansac(cs, {1.0, 200, 42});
  const auto b = fitAffineRansac(cs, {1.0, 200, 42});
  EXPECT_EQ(a.inlierMask, b.inlierMask);
  EXPECT_EQ(a.fit.transform, b.fit.transform);

  CorrespondenceSet line;
  for (int i = 0; i < 3; ++i) line.add({1.0 * i, 1.0 * i}, {2.0 * i, 0.0});
  try {
    fitAffineRansac(line);
    FAIL();
  } catch (const DegenerateError& e) {
    EXPECT_STREQ(e.what(), "ransac failed");
  }
}

}  // namespace
}  // namespace alrs::estimate
