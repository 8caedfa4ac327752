#include "alrs/lsr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "alrs/error.hpp"

namespace alrs::lsr {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double wrap360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

}  // namespace

void RegionState::add(PixelCoord p, double angleDeg) {
  members_.push_back(p);
  sumSin_ += std::sin(angleDeg * kDegToRad);
  sumCos_ += std::cos(angleDeg * kDegToRad);
}

double RegionState::angleRad() const { return std::atan2(sumSin_, sumCos_); }

double RegionState::angleDeg() const { return wrap360(angleRad() * kRadToDeg); }

bool LineSupportRegion::contains(Point2 p) const {
  const double r = angleDeg * kDegToRad;
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  const double u = dx * std::cos(r) + dy * std::sin(r);
  const double v = -dx * std::sin(r) + dy * std::cos(r);
  constexpr double slack = 1e-9;
  return std::abs(u) <= 0.5 * length + slack && std::abs(v) <= 0.5 * width + slack;
}

std::size_t SegmentationMask::popcount() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

GrayImage SegmentationMask::toImage() const {
  std::vector<double> data(bits.begin(), bits.end());
  return GrayImage(width, height, std::move(data));
}

std::vector<RegionState> growRegions(const GradientField& field, double tau, int minRegionSize,
                                     std::vector<JoinEvent>* trace) {
  if (!(tau > 0.0 && tau < 180.0)) throw InvalidArgument("tau must lie in (0, 180) degrees");
  const std::size_t n = static_cast<std::size_t>(field.width) * field.height;

  std::vector<std::size_t> seeds;
  seeds.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (field.defined[i]) seeds.push_back(i);
  std::stable_sort(seeds.begin(), seeds.end(),
                   [&](std::size_t a, std::size_t b) { return field.magnitude[a] > field.magnitude[b]; });

  std::vector<std::uint8_t> used(n, 0);
  std::vector<RegionState> regions;
  std::vector<JoinEvent> pending;

  for (std::size_t seed : seeds) {
    if (used[seed]) continue;
    RegionState region;
    pending.clear();
    const PixelCoord s{static_cast<int>(seed % field.width), static_cast<int>(seed / field.width)};
    used[seed] = 1;
    region.add(s, field.angleDeg[seed]);
    if (trace) pending.push_back({regions.size(), s, field.angleDeg[seed], field.angleDeg[seed], true});

    for (std::size_t head = 0; head < region.size(); ++head) {
      const PixelCoord c = region.members()[head];
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = c.x + dx, ny = c.y + dy;
          if (nx < 0 || ny < 0 || nx >= field.width || ny >= field.height) continue;
          const std::size_t ni = field.index(nx, ny);
          if (used[ni] || !field.defined[ni]) continue;
          const double regionAngle = region.angleDeg();
          if (circularDistanceDeg(field.angleDeg[ni], regionAngle) < tau) {
            used[ni] = 1;
            region.add({nx, ny}, field.angleDeg[ni]);
            if (trace) pending.push_back({regions.size(), {nx, ny}, field.angleDeg[ni], regionAngle, false});
          }
        }
      }
    }

    if (static_cast<int>(region.size()) < minRegionSize) continue;
    if (trace) trace->insert(trace->end(), pending.begin(), pending.end());
    regions.push_back(std::move(region));
  }
  return regions;
}

LineSupportRegion rectangleApprox(const RegionState& region, const GradientField& field) {
  if (region.empty()) throw InvalidArgument("rectangle approximation of an empty region");
  const auto& pts = region.members();

  auto weightOf = [&](const PixelCoord& p) {
    const double m = field.magnitude[field.index(p.x, p.y)];
    return std::isfinite(m) && m > 0.0 ? m : 0.0;
  };
  double wsum = 0.0;
  for (const auto& p : pts) wsum += weightOf(p);
  const bool uniform = !(wsum > 0.0);
  auto w = [&](const PixelCoord& p) { return uniform ? 1.0 : weightOf(p); };
  if (uniform) wsum = static_cast<double>(pts.size());

  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += w(p) * p.x;
    cy += w(p) * p.y;
  }
  cx /= wsum;
  cy /= wsum;

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    const double dx = p.x - cx, dy = p.y - cy;
    sxx += w(p) * dx * dx;
    syy += w(p) * dy * dy;
    sxy += w(p) * dx * dy;
  }
  // Orientation of the eigenvector with the larger eigenvalue of the
  // symmetric moment matrix.
  double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  double ux = std::cos(theta), uy = std::sin(theta);

  // Point the long axis along the region's level-line direction.
  const double regionRad = region.angleRad();
  if (ux * std::cos(regionRad) + uy * std::sin(regionRad) < 0.0) {
    ux = -ux;
    uy = -uy;
  }

  double umin = 0.0, umax = 0.0, vmin = 0.0, vmax = 0.0;
  bool first = true;
  for (const auto& p : pts) {
    const double dx = p.x - cx, dy = p.y - cy;
    const double u = dx * ux + dy * uy;
    const double v = -dx * uy + dy * ux;
    if (first) {
      umin = umax = u;
      vmin = vmax = v;
      first = false;
    } else {
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }

  LineSupportRegion out;
  out.center = {cx, cy};
  out.length = (umax - umin) + 1.0;
  out.width = (vmax - vmin) + 1.0;
  double axisDeg = std::atan2(uy, ux) * kRadToDeg;
  if (out.width > out.length) {
    std::swap(out.width, out.length);
    axisDeg += 90.0;
  }
  out.angleDeg = wrap360(axisDeg);
  out.memberCount = pts.size();
  return out;
}

SegmentationMask renderMask(const std::vector<LineSupportRegion>& regions, int width, int height) {
  SegmentationMask mask(std::max(width, 0), std::max(height, 0));
  for (const auto& r : regions) {
    const double reach = 0.5 * std::hypot(r.length, r.width) + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(r.center.x - reach)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(r.center.x + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(r.center.y - reach)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(r.center.y + reach)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (r.contains({static_cast<double>(x), static_cast<double>(y)}))
          mask.bits[static_cast<std::size_t>(y) * width + x] = 1;
  }
  return mask;
}

Segmentation segment(const GrayImage& img, double tau, double flatThreshold, int minRegionSize) {
  const GradientField field = computeGradientField(img, flatThreshold);
  const auto states = growRegions(field, tau, minRegionSize);
  Segmentation out;
  out.regions.reserve(states.size());
  for (const auto& s : states) {
    LineSupportRegion r = rectangleApprox(s, field);
    r.center = r.center + Point2{0.5, 0.5};
    out.regions.push_back(r);
  }
  out.mask = renderMask(out.regions, img.width(), img.height());
  return out;
}

}  // namespace alrs::lsr
