#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alrs/estimate.hpp"
#include "alrs/features.hpp"
#include "alrs/gor.hpp"
#include "alrs/image.hpp"
#include "alrs/lsr.hpp"

namespace alrs::pipeline {

struct PipelineConfig {
  double tau = lsr::kDefaultTau;
  double dRatio = features::kDefaultRatio;
  double epsilon = 1.0;  ///< stop once the scaled RMSE drops below this (pixels)
  int maxLevels = 3;
  double flatThreshold = kDefaultFlatThreshold;
  int minRegionSize = lsr::kDefaultMinRegionSize;
  std::uint64_t seed = 0;
  features::SiftParams sift;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

enum class LevelStatus {
  Success,        ///< scaled RMSE below epsilon
  AboveEpsilon,   ///< fitted, but not accurate enough
  TooFewMatches,  ///< fewer than 3 initial matches
  GorDegenerate,  ///< fewer than 3 survivors after outlier removal
  FitDegenerate,  ///< survivors collinear
};

std::string toString(LevelStatus s);

struct LevelDiagnostics {
  int level = 0;
  int width = 0;
  int height = 0;
  std::size_t initialMatches = 0;
  std::size_t survivors = 0;
  std::optional<double> scaledRmse;
  LevelStatus status = LevelStatus::TooFewMatches;
};

struct RegistrationReport {
  bool success = false;
  /// Full-resolution map from reference to sensed coordinates; empty on failure.
  std::optional<AffineTransform> finalTransform;
  /// Level that produced the result (the lowest-error fitted level on failure, -1 if none fitted).
  int levelUsed = -1;
  std::optional<double> scaledRmse;
  /// Matches of the reported level, in full-resolution coordinates.
  CorrespondenceSet initialMatches;
  CorrespondenceSet survivors;
  std::vector<gor::RemovalEvent> removals;
  std::vector<LevelDiagnostics> levels;

  bool allLevelsDegenerate() const;
};

/// Correspondences for one pyramid level, expressed in that level's frame
/// where full-resolution coordinates are exactly 2^level times larger.
struct LevelMatches {
  int width = 0;
  int height = 0;
  CorrespondenceSet matches;
};

using LevelMatcher = std::function<LevelMatches(int level)>;

/// S * t * S^-1 with S scaling by 2^level: same linear part, translation
/// multiplied by 2^level.
AffineTransform rescaleTransform(const AffineTransform& t, int level);

/// Level loop shared by image registration and correspondence-only runs:
/// match, remove outliers, fit, evaluate 2^L * rmse, stop below epsilon.
RegistrationReport registerLevels(const LevelMatcher& matcher, const PipelineConfig& cfg);

/// Per-level image products kept for diagnostics.
struct LevelProducts {
  int level = 0;
  lsr::Segmentation refSegmentation;
  lsr::Segmentation sensedSegmentation;
};

/// Offset that maps a level-L pixel-centre coordinate into the frame where
/// full resolution is exactly 2^L larger: (1 - 2^-L) / 2.
double levelFrameOffset(int level);

/// Segment, detect and match one pyramid level of an image pair.
LevelMatches matchLevel(const GrayImage& ref, const GrayImage& sensed, int level, const PipelineConfig& cfg,
                        std::vector<LevelProducts>* products = nullptr);

/// Full image pipeline. Requires both images to be at least
/// 2^maxLevels pixels on each side. When `products` is non-null the
/// segmentations of every visited level are appended to it.
RegistrationReport registerImages(const GrayImage& ref, const GrayImage& sensed, const PipelineConfig& cfg,
                                  std::vector<LevelProducts>* products = nullptr);

}  // namespace alrs::pipeline
