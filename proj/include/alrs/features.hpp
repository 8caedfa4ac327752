#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "alrs/affine.hpp"
#include "alrs/image.hpp"
#include "alrs/lsr.hpp"

namespace alrs {

/// Paired point lists: refPoints[i] corresponds to sensedPoints[i].
struct CorrespondenceSet {
  std::vector<Point2> refPoints;
  std::vector<Point2> sensedPoints;

  std::size_t size() const { return refPoints.size(); }
  bool empty() const { return refPoints.empty(); }
  void add(Point2 p, Point2 q) {
    refPoints.push_back(p);
    sensedPoints.push_back(q);
  }
  /// Subset in the given index order.
  CorrespondenceSet select(const std::vector<std::size_t>& indices) const;
  /// Both sides multiplied by `factor`.
  CorrespondenceSet scaled(double factor) const;

  friend bool operator==(const CorrespondenceSet&, const CorrespondenceSet&) = default;
};

}  // namespace alrs

namespace alrs::features {

inline constexpr double kDefaultRatio = 0.8;
inline constexpr std::size_t kDescriptorSize = 128;

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double scale = 0.0;
  double orientationDeg = 0.0;
  std::uint8_t maskValue = 0;
};

using Descriptor = std::array<float, kDescriptorSize>;

struct Feature {
  Keypoint keypoint;
  Descriptor descriptor{};
};

/// Difference-of-Gaussians detector and 4x4x8 gradient descriptor.
struct SiftParams {
  int intervals = 3;                ///< scales per octave
  double sigma = 1.6;               ///< base blur of each octave
  double contrastThreshold = 0.03;  ///< |D(x)| at the refined extremum
  double edgeRatio = 10.0;          ///< principal-curvature ratio bound
  double maskBlur = 1.0;            ///< Gaussian applied to the binary mask first
  bool upsampleFirstOctave = true;  ///< start the pyramid at twice the input size
  double inputBlur = 0.5;           ///< blur assumed present in the input
};

/// Detects keypoints on the (blurred) binary mask and describes them on the
/// same image. Each keypoint records the mask bit at its nearest pixel.
/// Throws InvalidArgument when mask and image dimensions differ.
std::vector<Feature> detectAndDescribe(const GrayImage& img, const lsr::SegmentationMask& mask,
                                       const SiftParams& params = {});

/// Detector on an arbitrary intensity image; maskValue is left at 0.
std::vector<Feature> detectAndDescribeImage(const GrayImage& img, const SiftParams& params = {});

/// Nearest/second-nearest ratio test restricted to equal mask values, then a
/// one-to-one pass keeping, per sensed feature, the reference match with the
/// smallest distance. Exact duplicate coordinate pairs are collapsed.
CorrespondenceSet ratioMatch(const std::vector<Feature>& refFeats, const std::vector<Feature>& sensedFeats,
                             double dRatio = kDefaultRatio);

}  // namespace alrs::features
