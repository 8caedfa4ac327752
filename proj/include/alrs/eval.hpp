#pragma once

#include <cstdint>
#include <vector>

#include "alrs/affine.hpp"
#include "alrs/features.hpp"
#include "alrs/image.hpp"

namespace alrs::eval {

struct GroundTruth {
  AffineTransform transform;  // reference -> sensed
  double inlierTol = 2.0;     // a pair is correct when ||T(p) - q|| <= inlierTol
};

bool isCorrect(const GroundTruth& gt, Point2 p, Point2 q);

struct MatchingScore {
  std::size_t initialCorrect = 0;
  std::size_t residualCorrect = 0;
  std::size_t residualTotal = 0;
  double recall = 0.0;     // residualCorrect / initialCorrect
  double precision = 0.0;  // residualCorrect / residualTotal
  bool recallDefined = false;
  bool precisionDefined = false;
};

/// Recall and precision of an outlier filter. Throws InvalidArgument when a
/// survivor pair does not occur in the initial set.
MatchingScore scoreMatching(const CorrespondenceSet& initial, const CorrespondenceSet& survivors,
                            const GroundTruth& gt);

struct RegistrationScore {
  std::size_t nRed = 0;
  double rmsAll = 0.0;
  double rmsLoo = 0.0;
  double bpp2 = 0.0;
};

inline constexpr double kBadPointNorm = 2.0;

/// Control-point count, all-point RMSE of `fitted`, leave-one-out RMSE, and
/// the share of leave-one-out residual norms above 2 px. Needs >= 4 pairs;
/// throws DegenerateError when a leave-one-out subset cannot be fitted.
RegistrationScore scoreRegistration(const CorrespondenceSet& survivors, const AffineTransform& fitted);

/// Rotation by `clockwiseDeg` (on screen) combined with isotropic scaling,
/// about `center`.
AffineTransform rotationScale(double clockwiseDeg, double scale, Point2 center);
/// Linear part [1 h; v 1] about `center`.
AffineTransform shear(double h, double v, Point2 center);
Point2 imageCenter(const GrayImage& img);

struct SyntheticPair {
  GrayImage ref;
  GrayImage sensed;
  GroundTruth truth;
};

/// ref = src, sensed = src warped by t onto the same canvas.
SyntheticPair synthesizePair(const GrayImage& src, const AffineTransform& t);

/// Largest distance between two transforms over the four image corners.
double maxCornerDisplacement(const AffineTransform& estimated, const AffineTransform& truth, int width, int height);

struct InjectedSet {
  CorrespondenceSet set;
  std::vector<std::size_t> injected;  // indices of the appended pairs
};

/// Appends `count` pairs with both endpoints uniform in [0, w) x [0, h).
InjectedSet injectOutliers(const CorrespondenceSet& cs, std::size_t count, int width, int height, std::uint64_t seed);

/// `count` reference points uniform in the frame (on the 1/256 grid) paired
/// with their images under `t`, also snapped to the grid. Points are redrawn
/// until no triple is close enough to collinear for the snapping to change
/// its orientation sign, so orientation-preserving `t` leaves every sign
/// intact. Throws InvalidArgument when the frame cannot hold that many.
CorrespondenceSet exactCorrespondences(const AffineTransform& t, std::size_t count, int width, int height,
                                       std::uint64_t seed);

/// Deterministic textured test scene: anti-aliased polygons and bars of
/// varied grey levels over a smooth background.
GrayImage renderSyntheticScene(int width, int height, std::uint64_t seed);

}  // namespace alrs::eval
