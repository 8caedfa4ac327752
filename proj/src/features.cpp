#include "alrs/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "alrs/error.hpp"
#include "alrs/parallel.hpp"

namespace alrs {

CorrespondenceSet CorrespondenceSet::select(const std::vector<std::size_t>& indices) const {
  CorrespondenceSet out;
  out.refPoints.reserve(indices.size());
  out.sensedPoints.reserve(indices.size());
  for (std::size_t i : indices) out.add(refPoints.at(i), sensedPoints.at(i));
  return out;
}

CorrespondenceSet CorrespondenceSet::scaled(double factor) const {
  CorrespondenceSet out = *this;
  for (auto& p : out.refPoints) p = factor * p;
  for (auto& q : out.sensedPoints) q = factor * q;
  return out;
}

}  // namespace alrs

namespace alrs::features {
namespace {

constexpr int kBorder = 5;
constexpr int kMaxInterpSteps = 5;
constexpr int kOriBins = 36;
constexpr double kOriSigmaFactor = 1.5;
constexpr double kOriRadiusFactor = 3.0 * kOriSigmaFactor;
constexpr double kOriPeakRatio = 0.8;
constexpr int kDescWidth = 4;
constexpr int kDescBins = 8;
constexpr double kDescScaleFactor = 3.0;
constexpr double kDescMagThreshold = 0.2;

struct Raster {
  int w = 0;
  int h = 0;
  std::vector<float> v;

  Raster() = default;
  Raster(int w_, int h_) : w(w_), h(h_), v(static_cast<std::size_t>(w_) * h_, 0.0f) {}
  float at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
  float& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
};

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

Raster gaussianBlur(const Raster& src, double sigma) {
  if (sigma <= 0.0) return src;
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<float> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double k = std::exp(-0.5 * i * i / (sigma * sigma));
    kernel[i + radius] = static_cast<float>(k);
    sum += k;
  }
  for (auto& k : kernel) k = static_cast<float>(k / sum);

  Raster tmp(src.w, src.h);
  parallelFor(0, static_cast<std::size_t>(src.h), [&](std::size_t yi) {
    const int y = static_cast<int>(yi);
    for (int x = 0; x < src.w; ++x) {
      float acc = 0.0f;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * src.at(reflect101(x + i, src.w), y);
      tmp.at(x, y) = acc;
    }
  });
  Raster out(src.w, src.h);
  parallelFor(0, static_cast<std::size_t>(src.h), [&](std::size_t yi) {
    const int y = static_cast<int>(yi);
    for (int x = 0; x < src.w; ++x) {
      float acc = 0.0f;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.at(x, reflect101(y + i, src.h));
      out.at(x, y) = acc;
    }
  });
  return out;
}

// dst(X, Y) samples src at (X / 2, Y / 2).
Raster upsample2(const Raster& src) {
  Raster out(2 * src.w, 2 * src.h);
  for (int y = 0; y < out.h; ++y) {
    const int y0 = y / 2;
    const int y1 = std::min(y0 + 1, src.h - 1);
    const float fy = (y % 2) ? 0.5f : 0.0f;
    for (int x = 0; x < out.w; ++x) {
      const int x0 = x / 2;
      const int x1 = std::min(x0 + 1, src.w - 1);
      const float fx = (x % 2) ? 0.5f : 0.0f;
      const float top = (1 - fx) * src.at(x0, y0) + fx * src.at(x1, y0);
      const float bot = (1 - fx) * src.at(x0, y1) + fx * src.at(x1, y1);
      out.at(x, y) = (1 - fy) * top + fy * bot;
    }
  }
  return out;
}

Raster decimate2(const Raster& src) {
  Raster out(std::max(1, (src.w + 1) / 2), std::max(1, (src.h + 1) / 2));
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) out.at(x, y) = src.at(2 * x, 2 * y);
  return out;
}

Raster toRaster(const GrayImage& img) {
  Raster r(img.width(), img.height());
  const auto d = img.data();
  for (std::size_t i = 0; i < d.size(); ++i) r.v[i] = static_cast<float>(d[i]);
  return r;
}

struct ScaleSpace {
  int intervals = 3;
  double sigma = 1.6;
  double baseToInput = 0.5;  // multiply base-image coordinates by this for input coordinates
  std::vector<std::vector<Raster>> gauss;  // [octave][intervals + 3]
  std::vector<std::vector<Raster>> dog;    // [octave][intervals + 2]
};

ScaleSpace buildScaleSpace(const Raster& input, const SiftParams& p) {
  ScaleSpace ss;
  ss.intervals = p.intervals;
  ss.sigma = p.sigma;
  Raster base;
  double present = p.inputBlur;
  if (p.upsampleFirstOctave) {
    base = upsample2(input);
    present *= 2.0;
    ss.baseToInput = 0.5;
  } else {
    base = input;
    ss.baseToInput = 1.0;
  }
  base = gaussianBlur(base, std::sqrt(std::max(p.sigma * p.sigma - present * present, 0.01)));

  const int minSide = std::min(base.w, base.h);
  const int octaves = std::max(1, static_cast<int>(std::lround(std::log2(static_cast<double>(minSide)))) - 2);
  const int levels = p.intervals + 3;
  const double k = std::pow(2.0, 1.0 / p.intervals);
  std::vector<double> incr(levels, 0.0);
  for (int i = 1; i < levels; ++i) {
    const double prev = p.sigma * std::pow(k, i - 1);
    const double total = prev * k;
    incr[i] = std::sqrt(total * total - prev * prev);
  }

  ss.gauss.resize(octaves);
  ss.dog.resize(octaves);
  for (int o = 0; o < octaves; ++o) {
    auto& g = ss.gauss[o];
    g.reserve(levels);
    g.push_back(o == 0 ? base : decimate2(ss.gauss[o - 1][p.intervals]));
    for (int i = 1; i < levels; ++i) g.push_back(gaussianBlur(g[i - 1], incr[i]));
    auto& d = ss.dog[o];
    for (int i = 0; i + 1 < levels; ++i) {
      Raster diff(g[i].w, g[i].h);
      for (std::size_t j = 0; j < diff.v.size(); ++j) diff.v[j] = g[i + 1].v[j] - g[i].v[j];
      d.push_back(std::move(diff));
    }
  }
  return ss;
}

struct Candidate {
  int octave = 0;
  int layer = 0;
  int x = 0;
  int y = 0;
  double subLayer = 0.0;
  Point2 baseXY;          // refined position in base-image coordinates
  double octaveSigma = 0.0;  // scale within the octave
};

bool isExtremum(const ScaleSpace& ss, int o, int layer, int x, int y, float threshold) {
  const float v = ss.dog[o][layer].at(x, y);
  if (std::abs(v) <= threshold) return false;
  const bool isMax = v > 0;
  for (int dl = -1; dl <= 1; ++dl) {
    const Raster& img = ss.dog[o][layer + dl];
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dl == 0 && dx == 0 && dy == 0) continue;
        const float n = img.at(x + dx, y + dy);
        if (isMax ? n > v : n < v) return false;
      }
    }
  }
  return true;
}

// Quadratic refinement, contrast and edge tests.
bool refine(const ScaleSpace& ss, const SiftParams& p, Candidate& c) {
  const int o = c.octave;
  int layer = c.layer, x = c.x, y = c.y;
  double ox = 0, oy = 0, ol = 0;
  double g[3] = {0, 0, 0};
  int step = 0;
  for (; step < kMaxInterpSteps; ++step) {
    const Raster& cur = ss.dog[o][layer];
    const Raster& prv = ss.dog[o][layer - 1];
    const Raster& nxt = ss.dog[o][layer + 1];
    const double v2 = 2.0 * cur.at(x, y);
    g[0] = 0.5 * (cur.at(x + 1, y) - cur.at(x - 1, y));
    g[1] = 0.5 * (cur.at(x, y + 1) - cur.at(x, y - 1));
    g[2] = 0.5 * (nxt.at(x, y) - prv.at(x, y));
    const double dxx = cur.at(x + 1, y) + cur.at(x - 1, y) - v2;
    const double dyy = cur.at(x, y + 1) + cur.at(x, y - 1) - v2;
    const double dss = nxt.at(x, y) + prv.at(x, y) - v2;
    const double dxy = 0.25 * (cur.at(x + 1, y + 1) - cur.at(x - 1, y + 1) - cur.at(x + 1, y - 1) + cur.at(x - 1, y - 1));
    const double dxs = 0.25 * (nxt.at(x + 1, y) - nxt.at(x - 1, y) - prv.at(x + 1, y) + prv.at(x - 1, y));
    const double dys = 0.25 * (nxt.at(x, y + 1) - nxt.at(x, y - 1) - prv.at(x, y + 1) + prv.at(x, y - 1));
    // Solve H * off = -g by Cramer's rule.
    const double h[3][3] = {{dxx, dxy, dxs}, {dxy, dyy, dys}, {dxs, dys, dss}};
    const double det = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) -
                       h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0]) +
                       h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
    if (std::abs(det) < 1e-18) return false;
    auto solveCol = [&](int col) {
      double m[3][3];
      for (int r = 0; r < 3; ++r)
        for (int cc = 0; cc < 3; ++cc) m[r][cc] = (cc == col) ? -g[r] : h[r][cc];
      return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
              m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
             det;
    };
    ox = solveCol(0);
    oy = solveCol(1);
    ol = solveCol(2);
    if (std::abs(ox) < 0.5 && std::abs(oy) < 0.5 && std::abs(ol) < 0.5) break;
    if (std::abs(ox) > 1e6 || std::abs(oy) > 1e6 || std::abs(ol) > 1e6) return false;
    x += static_cast<int>(std::lround(ox));
    y += static_cast<int>(std::lround(oy));
    layer += static_cast<int>(std::lround(ol));
    if (layer < 1 || layer > p.intervals || x < kBorder || x >= cur.w - kBorder || y < kBorder ||
        y >= cur.h - kBorder)
      return false;
  }
  if (step >= kMaxInterpSteps) return false;

  const Raster& cur = ss.dog[o][layer];
  const double contrast = cur.at(x, y) + 0.5 * (g[0] * ox + g[1] * oy + g[2] * ol);
  if (std::abs(contrast) < p.contrastThreshold) return false;

  const double v2 = 2.0 * cur.at(x, y);
  const double dxx = cur.at(x + 1, y) + cur.at(x - 1, y) - v2;
  const double dyy = cur.at(x, y + 1) + cur.at(x, y - 1) - v2;
  const double dxy = 0.25 * (cur.at(x + 1, y + 1) - cur.at(x - 1, y + 1) - cur.at(x + 1, y - 1) + cur.at(x - 1, y - 1));
  const double tr = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  const double r = p.edgeRatio;
  if (det <= 0.0 || tr * tr * r >= (r + 1.0) * (r + 1.0) * det) return false;

  c.layer = layer;
  c.x = x;
  c.y = y;
  c.subLayer = ol;
  const double octScale = std::ldexp(1.0, o);
  c.baseXY = {(x + ox) * octScale, (y + oy) * octScale};
  c.octaveSigma = p.sigma * std::pow(2.0, (layer + ol) / p.intervals);
  return true;
}

std::vector<double> orientations(const Raster& img, int x, int y, double octaveSigma) {
  const int radius = static_cast<int>(std::lround(kOriRadiusFactor * octaveSigma));
  const double sigmaW = kOriSigmaFactor * octaveSigma;
  const double expScale = -1.0 / (2.0 * sigmaW * sigmaW);
  std::array<double, kOriBins> raw{};
  for (int dy = -radius; dy <= radius; ++dy) {
    const int yy = y + dy;
    if (yy <= 0 || yy >= img.h - 1) continue;
    for (int dx = -radius; dx <= radius; ++dx) {
      const int xx = x + dx;
      if (xx <= 0 || xx >= img.w - 1) continue;
      const double gx = img.at(xx + 1, yy) - img.at(xx - 1, yy);
      const double gy = img.at(xx, yy + 1) - img.at(xx, yy - 1);
      const double w = std::exp((dx * dx + dy * dy) * expScale);
      double ang = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (ang < 0) ang += 360.0;
      int bin = static_cast<int>(std::lround(ang * kOriBins / 360.0));
      if (bin >= kOriBins) bin -= kOriBins;
      raw[bin] += w * std::hypot(gx, gy);
    }
  }
  std::array<double, kOriBins> hist{};
  for (int i = 0; i < kOriBins; ++i) {
    auto at = [&](int j) { return raw[(j + kOriBins) % kOriBins]; };
    hist[i] = (at(i - 2) + at(i + 2)) * (1.0 / 16.0) + (at(i - 1) + at(i + 1)) * (4.0 / 16.0) + at(i) * (6.0 / 16.0);
  }
  const double peak = *std::max_element(hist.begin(), hist.end());
  std::vector<double> out;
  if (!(peak > 0.0)) return out;
  for (int i = 0; i < kOriBins; ++i) {
    const double l = hist[(i + kOriBins - 1) % kOriBins];
    const double r = hist[(i + 1) % kOriBins];
    const double c = hist[i];
    if (c > l && c > r && c >= kOriPeakRatio * peak) {
      double bin = i + 0.5 * (l - r) / (l - 2.0 * c + r);
      if (bin < 0) bin += kOriBins;
      if (bin >= kOriBins) bin -= kOriBins;
      double ang = bin * 360.0 / kOriBins;
      if (ang >= 360.0) ang -= 360.0;
      out.push_back(ang);
    }
  }
  return out;
}

// Returns false for the all-zero descriptor.
bool describe(const Raster& img, Point2 pos, double octaveSigma, double orientationDeg, Descriptor& out) {
  constexpr int d = kDescWidth;
  constexpr int n = kDescBins;
  const double ori = orientationDeg * std::numbers::pi / 180.0;
  const double histWidth = kDescScaleFactor * octaveSigma;
  int radius = static_cast<int>(std::lround(histWidth * std::numbers::sqrt2 * (d + 1) * 0.5));
  radius = std::min(radius, static_cast<int>(std::hypot(img.w, img.h)));
  const double cosT = std::cos(ori) / histWidth;
  const double sinT = std::sin(ori) / histWidth;
  const double expScale = -1.0 / (d * d * 0.5);
  const double binsPerDeg = n / 360.0;
  const int px = static_cast<int>(std::lround(pos.x));
  const int py = static_cast<int>(std::lround(pos.y));

  std::vector<double> hist((d + 2) * (d + 2) * (n + 2), 0.0);
  auto hidx = [&](int r, int c, int o) { return (static_cast<std::size_t>(r) * (d + 2) + c) * (n + 2) + o; };

  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      const double cRot = j * cosT + i * sinT;
      const double rRot = -j * sinT + i * cosT;
      const double rbin = rRot + d / 2.0 - 0.5;
      const double cbin = cRot + d / 2.0 - 0.5;
      const int r = py + i, c = px + j;
      if (!(rbin > -1 && rbin < d && cbin > -1 && cbin < d && r > 0 && r < img.h - 1 && c > 0 && c < img.w - 1))
        continue;
      const double gx = img.at(c + 1, r) - img.at(c - 1, r);
      const double gy = img.at(c, r + 1) - img.at(c, r - 1);
      const double mag = std::hypot(gx, gy) * std::exp((cRot * cRot + rRot * rRot) * expScale);
      double ang = std::atan2(gy, gx) * 180.0 / std::numbers::pi - orientationDeg;
      ang = std::fmod(ang, 360.0);
      if (ang < 0) ang += 360.0;
      const double obin = ang * binsPerDeg;

      const int r0 = static_cast<int>(std::floor(rbin));
      const int c0 = static_cast<int>(std::floor(cbin));
      int o0 = static_cast<int>(std::floor(obin));
      const double fr = rbin - r0, fc = cbin - c0, fo = obin - o0;
      if (o0 < 0) o0 += n;
      if (o0 >= n) o0 -= n;

      const double v_r1 = mag * fr, v_r0 = mag - v_r1;
      const double v_rc11 = v_r1 * fc, v_rc10 = v_r1 - v_rc11;
      const double v_rc01 = v_r0 * fc, v_rc00 = v_r0 - v_rc01;
      const double v_rco111 = v_rc11 * fo, v_rco110 = v_rc11 - v_rco111;
      const double v_rco101 = v_rc10 * fo, v_rco100 = v_rc10 - v_rco101;
      const double v_rco011 = v_rc01 * fo, v_rco010 = v_rc01 - v_rco011;
      const double v_rco001 = v_rc00 * fo, v_rco000 = v_rc00 - v_rco001;

      hist[hidx(r0 + 1, c0 + 1, o0)] += v_rco000;
      hist[hidx(r0 + 1, c0 + 1, o0 + 1)] += v_rco001;
      hist[hidx(r0 + 1, c0 + 2, o0)] += v_rco010;
      hist[hidx(r0 + 1, c0 + 2, o0 + 1)] += v_rco011;
      hist[hidx(r0 + 2, c0 + 1, o0)] += v_rco100;
      hist[hidx(r0 + 2, c0 + 1, o0 + 1)] += v_rco101;
      hist[hidx(r0 + 2, c0 + 2, o0)] += v_rco110;
      hist[hidx(r0 + 2, c0 + 2, o0 + 1)] += v_rco111;
    }
  }

  std::array<double, kDescriptorSize> vec{};
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      // fold the wrap-around orientation bins
      hist[hidx(r + 1, c + 1, 0)] += hist[hidx(r + 1, c + 1, n)];
      hist[hidx(r + 1, c + 1, 1)] += hist[hidx(r + 1, c + 1, n + 1)];
      for (int o = 0; o < n; ++o) vec[(r * d + c) * n + o] = hist[hidx(r + 1, c + 1, o)];
    }
  }
  double norm2 = 0.0;
  for (double v : vec) norm2 += v * v;
  if (!(norm2 > 0.0)) return false;
  const double clampAt = kDescMagThreshold * std::sqrt(norm2);
  norm2 = 0.0;
  for (double& v : vec) {
    v = std::min(v, clampAt);
    norm2 += v * v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < kDescriptorSize; ++i) out[i] = static_cast<float>(vec[i] * inv);
  return true;
}

struct Oriented {
  Candidate cand;
  double orientationDeg = 0.0;
};

std::vector<Feature> runSift(const Raster& input, const SiftParams& p) {
  if (p.intervals < 1 || !(p.sigma > 0.0)) throw InvalidArgument("invalid SIFT parameters");
  const ScaleSpace ss = buildScaleSpace(input, p);
  const float prefilter = static_cast<float>(0.5 * p.contrastThreshold / p.intervals);

  std::vector<Oriented> oriented;
  for (std::size_t o = 0; o < ss.dog.size(); ++o) {
    const int w = ss.dog[o][0].w, h = ss.dog[o][0].h;
    if (w <= 2 * kBorder || h <= 2 * kBorder) continue;
    for (int layer = 1; layer <= p.intervals; ++layer) {
      for (int y = kBorder; y < h - kBorder; ++y) {
        for (int x = kBorder; x < w - kBorder; ++x) {
          if (!isExtremum(ss, static_cast<int>(o), layer, x, y, prefilter)) continue;
          Candidate c;
          c.octave = static_cast<int>(o);
          c.layer = layer;
          c.x = x;
          c.y = y;
          if (!refine(ss, p, c)) continue;
          const Raster& g = ss.gauss[o][c.layer];
          for (double ang : orientations(g, c.x, c.y, c.octaveSigma)) oriented.push_back({c, ang});
        }
      }
    }
  }

  std::vector<Feature> feats(oriented.size());
  std::vector<std::uint8_t> valid(oriented.size(), 0);
  parallelFor(0, oriented.size(), [&](std::size_t i) {
    const auto& oc = oriented[i];
    const double octScale = std::ldexp(1.0, oc.cand.octave);
    const Point2 inOctave = (1.0 / octScale) * oc.cand.baseXY;
    Feature f;
    if (!describe(ss.gauss[oc.cand.octave][oc.cand.layer], inOctave, oc.cand.octaveSigma, oc.orientationDeg,
                  f.descriptor))
      return;
    f.keypoint.x = oc.cand.baseXY.x * ss.baseToInput;
    f.keypoint.y = oc.cand.baseXY.y * ss.baseToInput;
    f.keypoint.scale = oc.cand.octaveSigma * octScale * ss.baseToInput;
    f.keypoint.orientationDeg = oc.orientationDeg;
    feats[i] = f;
    valid[i] = 1;
  });

  std::vector<Feature> out;
  out.reserve(feats.size());
  for (std::size_t i = 0; i < feats.size(); ++i) {
    if (!valid[i]) continue;
    const auto& k = feats[i].keypoint;
    if (k.x < 0 || k.y < 0 || k.x > input.w - 1 || k.y > input.h - 1) continue;
    out.push_back(feats[i]);
  }
  return out;
}

double squaredDistance(const Descriptor& a, const Descriptor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kDescriptorSize; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<Feature> detectAndDescribeImage(const GrayImage& img, const SiftParams& params) {
  return runSift(toRaster(img), params);
}

std::vector<Feature> detectAndDescribe(const GrayImage& img, const lsr::SegmentationMask& mask,
                                       const SiftParams& params) {
  if (mask.width != img.width() || mask.height != img.height())
    throw InvalidArgument("mask and image dimensions differ");
  if (mask.popcount() == 0) return {};
  Raster maskImg(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) maskImg.v[i] = mask.bits[i] ? 1.0f : 0.0f;
  maskImg = gaussianBlur(maskImg, params.maskBlur);
  SiftParams p = params;
  // The mask blur adds to whatever blur the scale space assumes is present.
  p.inputBlur = std::sqrt(params.inputBlur * params.inputBlur + params.maskBlur * params.maskBlur);
  auto feats = runSift(maskImg, p);
  for (auto& f : feats) {
    const int x = std::clamp(static_cast<int>(std::lround(f.keypoint.x)), 0, mask.width - 1);
    const int y = std::clamp(static_cast<int>(std::lround(f.keypoint.y)), 0, mask.height - 1);
    f.keypoint.maskValue = mask.at(x, y);
  }
  return feats;
}

CorrespondenceSet ratioMatch(const std::vector<Feature>& refFeats, const std::vector<Feature>& sensedFeats,
                             double dRatio) {
  if (!(dRatio > 0.0 && dRatio < 1.0)) throw InvalidArgument("dRatio must lie in (0, 1)");
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  struct Best {
    std::size_t sensed = kNone;
    double d1 = 0.0;
  };
  std::vector<Best> proposals(refFeats.size());
  parallelFor(0, refFeats.size(), [&](std::size_t i) {
    const auto& rf = refFeats[i];
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    std::size_t bestIdx = kNone;
    for (std::size_t j = 0; j < sensedFeats.size(); ++j) {
      if (sensedFeats[j].keypoint.maskValue != rf.keypoint.maskValue) continue;
      const double d = squaredDistance(rf.descriptor, sensedFeats[j].descriptor);
      if (d < best) {
        second = best;
        best = d;
        bestIdx = j;
      } else if (d < second) {
        second = d;
      }
    }
    if (bestIdx == kNone || !std::isfinite(second)) return;
    const double d1 = std::sqrt(best), d2 = std::sqrt(second);
    if (d2 > 0.0 && d1 / d2 < dRatio) proposals[i] = {bestIdx, d1};
  });

  // One-to-one: per sensed feature keep the closest reference (lowest index on ties).
  std::vector<std::size_t> owner(sensedFeats.size(), kNone);
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const auto& pr = proposals[i];
    if (pr.sensed == kNone) continue;
    std::size_t& cur = owner[pr.sensed];
    if (cur == kNone || pr.d1 < proposals[cur].d1) cur = i;
  }

  CorrespondenceSet out;
  std::set<std::array<double, 4>> seen;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const auto& pr = proposals[i];
    if (pr.sensed == kNone || owner[pr.sensed] != i) continue;
    const auto& rk = refFeats[i].keypoint;
    const auto& sk = sensedFeats[pr.sensed].keypoint;
    if (!seen.insert({rk.x, rk.y, sk.x, sk.y}).second) continue;
    out.add({rk.x, rk.y}, {sk.x, sk.y});
  }
  return out;
}

}  // namespace alrs::features
