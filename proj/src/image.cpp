#include "alrs/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "alrs/error.hpp"
#include "alrs/parallel.hpp"

namespace alrs {

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width_ < 1 || height_ < 1) throw InvalidArgument("zero-dimension image");
  if (data_.size() != static_cast<std::size_t>(width_) * height_)
    throw InvalidArgument("image data length does not match dimensions");
  for (double v : data_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw InvalidArgument("image intensity outside [0, 1]: " + std::to_string(v));
  }
}

GrayImage::GrayImage(int width, int height, double value)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0),
                                    value)) {}

double GrayImage::sampleBilinear(double x, double y) const {
  constexpr double kSlack = 1e-9;
  if (!(x >= -kSlack && y >= -kSlack && x <= width_ - 1 + kSlack && y <= height_ - 1 + kSlack)) return 0.0;
  x = std::clamp(x, 0.0, width_ - 1.0);
  y = std::clamp(y, 0.0, height_ - 1.0);
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * at(x0, y0) + fx * at(x1, y0);
  const double bottom = (1.0 - fx) * at(x0, y1) + fx * at(x1, y1);
  return (1.0 - fy) * top + fy * bottom;
}

double GrayImage::mean() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

std::size_t GradientField::definedCount() const {
  return static_cast<std::size_t>(std::count(defined.begin(), defined.end(), std::uint8_t{1}));
}

GrayImage downsample(const GrayImage& img, int level) {
  if (level < 0) throw InvalidArgument("downsample level must be non-negative");
  if (level == 0) return img;
  if (level >= 30 || (1 << level) > std::min(img.width(), img.height()))
    throw InvalidArgument("downsample level too large for image size");
  const int win = 1 << level;
  const int ow = (img.width() + win - 1) / win;
  const int oh = (img.height() + win - 1) / win;
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  parallelFor(0, static_cast<std::size_t>(oh), [&](std::size_t oyi) {
    const int oy = static_cast<int>(oyi);
    for (int ox = 0; ox < ow; ++ox) {
      const int x1 = std::min((ox + 1) * win, img.width());
      const int y1 = std::min((oy + 1) * win, img.height());
      double sum = 0.0;
      for (int y = oy * win; y < y1; ++y)
        for (int x = ox * win; x < x1; ++x) sum += img.at(x, y);
      const int n = (x1 - ox * win) * (y1 - oy * win);
      out[oyi * ow + ox] = std::clamp(sum / n, 0.0, 1.0);
    }
  });
  return GrayImage(ow, oh, std::move(out));
}

GradientField computeGradientField(const GrayImage& img, double flatThreshold) {
  if (img.width() < 2 || img.height() < 2) throw InvalidArgument("gradient needs an image of at least 2x2");
  if (!(flatThreshold >= 0.0)) throw InvalidArgument("flat threshold must be non-negative");
  GradientField f;
  f.width = img.width();
  f.height = img.height();
  const std::size_t n = img.size();
  f.magnitude.assign(n, 0.0);
  f.angleDeg.assign(n, 0.0);
  f.defined.assign(n, 0);
  for (int y = 0; y + 1 < f.height; ++y) {
    for (int x = 0; x + 1 < f.width; ++x) {
      const double tl = img.at(x, y), tr = img.at(x + 1, y);
      const double bl = img.at(x, y + 1), br = img.at(x + 1, y + 1);
      const double gx = 0.5 * ((tr + br) - (tl + bl));
      const double gy = 0.5 * ((bl + br) - (tl + tr));
      const double mag = std::hypot(gx, gy);
      const std::size_t i = f.index(x, y);
      f.magnitude[i] = mag;
      if (mag <= 0.0 || mag < flatThreshold) continue;
      // Level line is the gradient direction turned by +90 degrees.
      double ang = std::atan2(gx, -gy) * 180.0 / std::numbers::pi;
      if (ang < 0.0) ang += 360.0;
      if (ang >= 360.0) ang -= 360.0;
      f.angleDeg[i] = ang;
      f.defined[i] = 1;
    }
  }
  return f;
}

double circularDistanceDeg(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

GrayImage warpImage(const GrayImage& src, const AffineTransform& t, int outWidth, int outHeight) {
  if (outWidth < 1 || outHeight < 1) throw InvalidArgument("zero-dimension warp output");
  const AffineTransform inv = t.inverse();
  std::vector<double> out(static_cast<std::size_t>(outWidth) * outHeight);
  parallelFor(0, static_cast<std::size_t>(outHeight), [&](std::size_t yi) {
    const double y = static_cast<double>(yi);
    for (int x = 0; x < outWidth; ++x) {
      const Point2 s = inv.apply({static_cast<double>(x), y});
      out[yi * outWidth + x] = std::clamp(src.sampleBilinear(s.x, s.y), 0.0, 1.0);
    }
  });
  return GrayImage(outWidth, outHeight, std::move(out));
}

GrayImage checkerboardMosaic(const GrayImage& ref, const GrayImage& warpedSensed, int cell) {
  if (ref.width() != warpedSensed.width() || ref.height() != warpedSensed.height())
    throw InvalidArgument("mosaic inputs differ in dimensions");
  if (cell < 1) throw InvalidArgument("mosaic cell must be >= 1");
  std::vector<double> out(ref.size());
  for (int y = 0; y < ref.height(); ++y) {
    for (int x = 0; x < ref.width(); ++x) {
      const bool fromRef = ((x / cell) + (y / cell)) % 2 == 0;
      out[static_cast<std::size_t>(y) * ref.width() + x] = fromRef ? ref.at(x, y) : warpedSensed.at(x, y);
    }
  }
  return GrayImage(ref.width(), ref.height(), std::move(out));
}

}  // namespace alrs
