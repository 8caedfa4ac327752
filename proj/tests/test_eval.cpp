#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "alrs/error.hpp"
#include "alrs/estimate.hpp"
#include "alrs/eval.hpp"
#include "test_support.hpp"

namespace alrs::eval {
namespace {

/// Independent least-squares affine fit: 2N x 6 system solved by QR.
AffineTransform eigenFit(const CorrespondenceSet& cs) {
  const auto n = static_cast<Eigen::Index>(cs.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 6);
  Eigen::VectorXd b(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point2 p = cs.refPoints[i], q = cs.sensedPoints[i];
    A.row(2 * i) << p.x, p.y, 1, 0, 0, 0;
    A.row(2 * i + 1) << 0, 0, 0, p.x, p.y, 1;
    b(2 * i) = q.x;
    b(2 * i + 1) = q.y;
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  return {x(0), x(1), x(3), x(4), x(2), x(5)};
}

CorrespondenceSet pairsWithCorrectness(const AffineTransform& t, const std::vector<bool>& correct) {
  CorrespondenceSet cs;
  for (std::size_t i = 0; i < correct.size(); ++i) {
    const Point2 p{10.0 * i, 3.0 * i + 1};
    cs.add(p, t(p) + Point2{correct[i] ? 0.5 : 9.0, 0.0});
  }
  return cs;
}

TEST(ScoreMatching, EightOfTwentyThenFourOfFive) {
  const GroundTruth gt{AffineTransform::identity(), 2.0};
  std::vector<bool> flags(20, false);
  for (int i : {0, 2, 4, 6, 8, 10, 12, 14}) flags[i] = true;
  const auto initial = pairsWithCorrectness(gt.transform, flags);
  const auto survivors = initial.select({0, 2, 4, 6, 1});
  const auto s = scoreMatching(initial, survivors, gt);
  EXPECT_EQ(s.initialCorrect, 8u);
  EXPECT_EQ(s.residualCorrect, 4u);
  EXPECT_EQ(s.residualTotal, 5u);
  EXPECT_DOUBLE_EQ(s.recall, 0.5);
  EXPECT_DOUBLE_EQ(s.precision, 0.8);
}

TEST(ScoreMatching, AllCorrectKeptAll) {
  const GroundTruth gt{AffineTransform::translation(2, 3), 2.0};
  const auto initial = pairsWithCorrectness(gt.transform, std::vector<bool>(6, true));
  const auto s = scoreMatching(initial, initial, gt);
  EXPECT_DOUBLE_EQ(s.recall, 1.0);
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
}

TEST(ScoreMatching, UndefinedRatiosAndForeignSurvivors) {
  const GroundTruth gt{AffineTransform::identity(), 2.0};
  const auto initial = pairsWithCorrectness(gt.transform, std::vector<bool>(4, false));
  const auto s = scoreMatching(initial, CorrespondenceSet{}, gt);
  EXPECT_FALSE(s.recallDefined);
  EXPECT_FALSE(s.precisionDefined);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.precision, 0.0);
  CorrespondenceSet foreign;
  foreign.add({1000, 1000}, {0, 0});
  EXPECT_THROW(scoreMatching(initial, foreign, gt), InvalidArgument);
  // A pair may only be claimed as often as it occurs.
  EXPECT_THROW(scoreMatching(initial.select({0}), initial.select({0, 0}), gt), InvalidArgument);
}

TEST(ScoreMatching, RemovingIncorrectNeverLowersPrecision) {
  std::mt19937_64 rng(1);
  const GroundTruth gt{AffineTransform::identity(), 2.0};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<bool> flags(30);
    for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = rng() % 2;
    const auto initial = pairsWithCorrectness(gt.transform, flags);
    std::vector<std::size_t> keep(30);
    std::iota(keep.begin(), keep.end(), 0);
    double last = scoreMatching(initial, initial.select(keep), gt).precision;
    while (true) {
      auto it = std::find_if(keep.begin(), keep.end(), [&](std::size_t i) { return !flags[i]; });
      if (it == keep.end()) break;
      keep.erase(it);
      const auto s = scoreMatching(initial, initial.select(keep), gt);
      if (!s.precisionDefined) break;
      EXPECT_GE(s.precision, last);
      last = s.precision;
    }
  }
}

TEST(ScoreRegistration, ExactSurvivors) {
  const auto t = rotationScale(30, 1.2, {0, 0});
  CorrespondenceSet cs;
  for (Point2 p : {Point2{0, 0}, Point2{10, 0}, Point2{0, 10}, Point2{7, 3}, Point2{2, 9}, Point2{5, 5}}) cs.add(p, t(p));
  const auto s = scoreRegistration(cs, estimate::fitAffineLSM(cs).transform);
  EXPECT_EQ(s.nRed, 6u);
  EXPECT_NEAR(s.rmsAll, 0.0, 1e-9);
  EXPECT_NEAR(s.rmsLoo, 0.0, 1e-9);
  EXPECT_EQ(s.bpp2, 0.0);
}

TEST(ScoreRegistration, OneDisplacedPointAgainstEnumeration) {
  // Regular pentagon of inliers around a displaced centre point. The centre
  // has the lowest leverage, so its pull on each inlier stays below 2 px.
  const auto t = rotationScale(15, 1.0, {50, 50});
  CorrespondenceSet cs;
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 5.0;
    const Point2 p{50.0 + 50.0 * std::cos(a), 50.0 + 50.0 * std::sin(a)};
    cs.add(p, t(p));
  }
  cs.add(Point2{50, 50}, t(Point2{50, 50}));
  cs.sensedPoints[5] = cs.sensedPoints[5] + Point2{3.0, 4.0};  // 5 px

  const auto fitted = eigenFit(cs);
  double all = 0, loo = 0;
  int bad = 0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    all += std::pow(norm(testing::applyByHand(fitted, cs.refPoints[k]) - cs.sensedPoints[k]), 2);
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (i != k) rest.push_back(i);
    const double r = norm(testing::applyByHand(eigenFit(cs.select(rest)), cs.refPoints[k]) - cs.sensedPoints[k]);
    loo += r * r;
    bad += r > 2.0;
  }
  const double rmsAll = std::sqrt(all / 6), rmsLoo = std::sqrt(loo / 6);

  const auto s = scoreRegistration(cs, estimate::fitAffineLSM(cs).transform);
  EXPECT_NEAR(s.rmsAll, rmsAll, 1e-9);
  EXPECT_NEAR(s.rmsLoo, rmsLoo, 1e-9);
  EXPECT_DOUBLE_EQ(s.bpp2, bad / 6.0);
  EXPECT_DOUBLE_EQ(s.bpp2, 1.0 / 6.0);
  EXPECT_GT(s.rmsLoo, s.rmsAll);
}

TEST(ScoreRegistration, NeedsFourAndNonDegenerateSubsets) {
  CorrespondenceSet three;
  for (Point2 p : {Point2{0, 0}, Point2{1, 0}, Point2{0, 1}}) three.add(p, p);
  EXPECT_THROW(scoreRegistration(three, AffineTransform::identity()), InvalidArgument);
  CorrespondenceSet almostLine;
  for (Point2 p : {Point2{0, 0}, Point2{1, 1}, Point2{2, 2}, Point2{0, 5}}) almostLine.add(p, p);
  EXPECT_THROW(scoreRegistration(almostLine, AffineTransform::identity()), DegenerateError);
}

TEST(ScoreRegistration, FiniteOnNoisyData) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0, 1);
  auto cs = exactCorrespondences(rotationScale(50, 0.9, {100, 100}), 20, 200, 200, 2);
  for (auto& q : cs.sensedPoints) q = q + Point2{noise(rng), noise(rng)};
  const auto s = scoreRegistration(cs, estimate::fitAffineLSM(cs).transform);
  EXPECT_TRUE(std::isfinite(s.rmsAll));
  EXPECT_TRUE(std::isfinite(s.rmsLoo));
  EXPECT_GE(s.bpp2, 0.0);
  EXPECT_LE(s.bpp2, 1.0);
}

TEST(Protocols, LinearParts) {
  const auto r = rotationScale(120, 0.8, {0, 0});
  const double c = std::cos(120 * std::numbers::pi / 180), s = std::sin(120 * std::numbers::pi / 180);
  EXPECT_NEAR(r.a, 0.8 * c, 1e-15);
  EXPECT_NEAR(r.b, -0.8 * s, 1e-15);
  EXPECT_NEAR(r.c, 0.8 * s, 1e-15);
  EXPECT_NEAR(r.d, 0.8 * c, 1e-15);
  const auto sh = shear(0.1, 0.1, {0, 0});
  EXPECT_EQ(sh, (AffineTransform{1, 0.1, 0.1, 1, 0, 0}));
  // Both fix the centre they are built around.
  const Point2 centre{255.5, 255.5};
  EXPECT_NEAR(norm(rotationScale(120, 0.8, centre)(centre) - centre), 0.0, 1e-12);
  EXPECT_NEAR(norm(shear(0.1, 0.1, centre)(centre) - centre), 0.0, 1e-12);
}

TEST(SynthesizePair, IdentityAndWarp) {
  const GrayImage src = renderSyntheticScene(64, 48, 1);
  const auto same = synthesizePair(src, AffineTransform::identity());
  EXPECT_EQ(same.sensed, src);
  EXPECT_EQ(same.ref, src);
  const auto t = rotationScale(120, 0.8, imageCenter(src));
  const auto pair = synthesizePair(src, t);
  EXPECT_EQ(pair.sensed, warpImage(src, t, 64, 48));
  EXPECT_EQ(pair.truth.transform, t);
}

TEST(InjectOutliers, Bookkeeping) {
  const auto base = exactCorrespondences(AffineTransform::identity(), 50, 512, 512, 1);
  const auto none = injectOutliers(base, 0, 512, 512, 2);
  EXPECT_EQ(none.set, base);
  EXPECT_TRUE(none.injected.empty());
  const auto more = injectOutliers(base, 30, 512, 512, 2);
  EXPECT_EQ(more.set.size(), 80u);
  ASSERT_EQ(more.injected.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(more.injected[i], 50 + i);
  EXPECT_EQ(injectOutliers(base, 30, 512, 512, 2).set, more.set);
  for (std::size_t i = 50; i < 80; ++i) {
    EXPECT_GE(more.set.sensedPoints[i].x, 0.0);
    EXPECT_LE(more.set.sensedPoints[i].x, 512.0);
  }
}

TEST(ExactCorrespondences, WithinGridTolerance) {
  const auto t = shear(0.1, 0.1, {256, 256});
  const auto cs = exactCorrespondences(t, 60, 512, 512, 3);
  ASSERT_EQ(cs.size(), 60u);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    EXPECT_LE(norm(t(cs.refPoints[i]) - cs.sensedPoints[i]), 1.0 / 256);
    EXPECT_EQ(cs.refPoints[i].x * 256, std::round(cs.refPoints[i].x * 256));
  }
}

TEST(CornerDisplacement, Translation) {
  EXPECT_DOUBLE_EQ(maxCornerDisplacement(AffineTransform::translation(3, 4), AffineTransform::identity(), 10, 10), 5.0);
  // Scaling about the origin: the far corner moves the most.
  EXPECT_DOUBLE_EQ(maxCornerDisplacement(AffineTransform::scaling(2), AffineTransform::identity(), 4, 5),
                   std::hypot(3.0, 4.0));
}

TEST(SyntheticScene, DeterministicAndTextured) {
  const GrayImage a = renderSyntheticScene(128, 96, 9);
  EXPECT_EQ(a, renderSyntheticScene(128, 96, 9));
  EXPECT_NE(a, renderSyntheticScene(128, 96, 10));
  EXPECT_GT(computeGradientField(a).definedCount(), 500u);
}

}  // namespace
}  // namespace alrs::eval
