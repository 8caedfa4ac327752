#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "alrs/affine.hpp"

namespace alrs {

/// Row-major grayscale raster with intensities in [0, 1].
class GrayImage {
 public:
  /// Throws InvalidArgument on zero dimensions, size mismatch, or values that
  /// are non-finite or outside [0, 1].
  GrayImage(int width, int height, std::vector<double> data);
  /// Constant image.
  GrayImage(int width, int height, double value = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  std::span<const double> data() const { return data_; }

  double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  /// Bilinear sample at a sub-pixel position; 0 outside [0, w-1] x [0, h-1].
  double sampleBilinear(double x, double y) const;

  double mean() const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> data_;
};

struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> magnitude;
  /// Level-line angle in degrees, [0, 360). Meaningless where !defined.
  std::vector<double> angleDeg;
  std::vector<std::uint8_t> defined;

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  bool isDefined(int x, int y) const { return defined[index(x, y)] != 0; }
  double magnitudeAt(int x, int y) const { return magnitude[index(x, y)]; }
  double angleAt(int x, int y) const { return angleDeg[index(x, y)]; }
  std::size_t definedCount() const;
};

inline constexpr double kDefaultFlatThreshold = 2.0 / 255.0;

/// Mean over 2^level x 2^level windows. Partial border windows average only
/// the pixels they cover. Throws InvalidArgument when 2^level exceeds the
/// smaller image side.
GrayImage downsample(const GrayImage& img, int level);

/// 2x2 forward-difference gradient. The quad anchored at (x, y) covers
/// (x..x+1, y..y+1); the last row and column have no quad and are undefined,
/// as is any pixel whose magnitude is below flatThreshold or zero.
GradientField computeGradientField(const GrayImage& img, double flatThreshold = kDefaultFlatThreshold);

/// Circular distance between two angles in degrees, in [0, 180].
double circularDistanceDeg(double a, double b);

/// Output pixel (x, y) = bilinear sample of src at t^-1(x, y).
GrayImage warpImage(const GrayImage& src, const AffineTransform& t, int outWidth, int outHeight);

/// Alternating cell x cell blocks, ref at the (0, 0) block.
GrayImage checkerboardMosaic(const GrayImage& ref, const GrayImage& warpedSensed, int cell);

}  // namespace alrs
