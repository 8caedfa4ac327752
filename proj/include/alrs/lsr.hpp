#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "alrs/image.hpp"

namespace alrs::lsr {

inline constexpr double kDefaultTau = 22.5;
inline constexpr int kDefaultMinRegionSize = 20;

struct PixelCoord {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// A growing region: member pixels plus the running sums of the sines and
/// cosines of their level-line angles. The region angle is atan2 of the sums.
class RegionState {
 public:
  void add(PixelCoord p, double angleDeg);

  const std::vector<PixelCoord>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  double sumSin() const { return sumSin_; }
  double sumCos() const { return sumCos_; }
  /// Radians in (-pi, pi].
  double angleRad() const;
  /// Degrees in [0, 360).
  double angleDeg() const;

 private:
  std::vector<PixelCoord> members_;
  double sumSin_ = 0.0;
  double sumCos_ = 0.0;
};

/// Rectangle approximation of a line-support region.
struct LineSupportRegion {
  Point2 center;
  double angleDeg = 0.0;  // direction of the long axis, [0, 360)
  double length = 0.0;
  double width = 0.0;
  std::size_t memberCount = 0;

  /// Point-in-oriented-rectangle test, boundary inclusive.
  bool contains(Point2 p) const;
};

struct SegmentationMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  SegmentationMask() = default;
  SegmentationMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::size_t popcount() const;
  /// 0/1 intensity image.
  GrayImage toImage() const;

  friend bool operator==(const SegmentationMask&, const SegmentationMask&) = default;
};

/// One accepted pixel during growth: the pixel's angle and the region angle it
/// was compared against.
struct JoinEvent {
  std::size_t region = 0;
  PixelCoord pixel;
  double pixelAngleDeg = 0.0;
  double regionAngleDeg = 0.0;
  bool seed = false;
};

/// Tolerance-tau region growing over 8-connected neighbours. Seeds are
/// visited in decreasing gradient magnitude (ties by raster index); each
/// candidate is compared with the running region angle. Regions with fewer
/// than minRegionSize pixels are dropped but their pixels stay consumed.
/// When `trace` is non-null every join is recorded, indexed by the position
/// of the region in the returned list (dropped regions are not traced).
std::vector<RegionState> growRegions(const GradientField& field, double tau = kDefaultTau,
                                     int minRegionSize = kDefaultMinRegionSize,
                                     std::vector<JoinEvent>* trace = nullptr);

/// Magnitude-weighted centroid and second-moment axes; extents along the
/// axes are widened by half a pixel on each side. Member coordinates are used
/// as-is. The long axis is oriented to agree with the region angle.
LineSupportRegion rectangleApprox(const RegionState& region, const GradientField& field);

SegmentationMask renderMask(const std::vector<LineSupportRegion>& regions, int width, int height);

struct Segmentation {
  SegmentationMask mask;
  std::vector<LineSupportRegion> regions;
};

/// Gradient -> growth -> rectangles -> mask. Rectangles are returned in image
/// coordinates: the gradient quad anchored at pixel (x, y) is centred at
/// (x + 0.5, y + 0.5), and the rectangle centres are shifted accordingly.
Segmentation segment(const GrayImage& img, double tau = kDefaultTau,
                     double flatThreshold = kDefaultFlatThreshold,
                     int minRegionSize = kDefaultMinRegionSize);

}  // namespace alrs::lsr
