#include "alrs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "alrs/error.hpp"
#include "alrs/estimate.hpp"
#include "alrs/gor.hpp"

namespace alrs::eval {

bool isCorrect(const GroundTruth& gt, Point2 p, Point2 q) { return norm(gt.transform.apply(p) - q) <= gt.inlierTol; }

MatchingScore scoreMatching(const CorrespondenceSet& initial, const CorrespondenceSet& survivors,
                            const GroundTruth& gt) {
  using Key = std::array<double, 4>;
  std::map<Key, std::size_t> available;
  MatchingScore s;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    ++available[{initial.refPoints[i].x, initial.refPoints[i].y, initial.sensedPoints[i].x, initial.sensedPoints[i].y}];
    s.initialCorrect += isCorrect(gt, initial.refPoints[i], initial.sensedPoints[i]);
  }
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    const Key k{survivors.refPoints[i].x, survivors.refPoints[i].y, survivors.sensedPoints[i].x,
                survivors.sensedPoints[i].y};
    auto it = available.find(k);
    if (it == available.end() || it->second == 0)
      throw InvalidArgument("survivor pair absent from initial set");
    --it->second;
    s.residualCorrect += isCorrect(gt, survivors.refPoints[i], survivors.sensedPoints[i]);
  }
  s.residualTotal = survivors.size();
  s.recallDefined = s.initialCorrect > 0;
  s.precisionDefined = s.residualTotal > 0;
  s.recall = s.recallDefined ? static_cast<double>(s.residualCorrect) / static_cast<double>(s.initialCorrect) : 0.0;
  s.precision =
      s.precisionDefined ? static_cast<double>(s.residualCorrect) / static_cast<double>(s.residualTotal) : 0.0;
  return s;
}

RegistrationScore scoreRegistration(const CorrespondenceSet& survivors, const AffineTransform& fitted) {
  const std::size_t n = survivors.size();
  if (n < 4) throw InvalidArgument("registration scoring needs at least 4 correspondences");
  RegistrationScore s;
  s.nRed = n;
  s.rmsAll = estimate::evaluateFit(survivors, fitted).rmse;

  double sum = 0.0;
  std::size_t bad = 0;
  std::vector<std::size_t> rest;
  rest.reserve(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    rest.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != k) rest.push_back(j);
    const auto fit = estimate::fitAffineLSM(survivors.select(rest));
    const double r = norm(fit.transform.apply(survivors.refPoints[k]) - survivors.sensedPoints[k]);
    sum += r * r;
    bad += r > kBadPointNorm;
  }
  s.rmsLoo = std::sqrt(sum / static_cast<double>(n));
  s.bpp2 = static_cast<double>(bad) / static_cast<double>(n);
  return s;
}

AffineTransform rotationScale(double clockwiseDeg, double scale, Point2 center) {
  return AffineTransform::about(AffineTransform::scaling(scale) * AffineTransform::rotation(clockwiseDeg), center);
}

AffineTransform shear(double h, double v, Point2 center) {
  return AffineTransform::about({1.0, h, v, 1.0, 0.0, 0.0}, center);
}

Point2 imageCenter(const GrayImage& img) { return {0.5 * (img.width() - 1), 0.5 * (img.height() - 1)}; }

SyntheticPair synthesizePair(const GrayImage& src, const AffineTransform& t) {
  if (!t.isInvertible()) throw InvalidArgument("non-invertible transform");
  return {src, warpImage(src, t, src.width(), src.height()), GroundTruth{t, 2.0}};
}

double maxCornerDisplacement(const AffineTransform& estimated, const AffineTransform& truth, int width, int height) {
  const double w = width - 1.0, h = height - 1.0;
  double worst = 0.0;
  for (Point2 c : {Point2{0, 0}, Point2{w, 0}, Point2{0, h}, Point2{w, h}})
    worst = std::max(worst, norm(estimated.apply(c) - truth.apply(c)));
  return worst;
}

namespace {

double snap(double v) { return std::round(v * gor::kGridStepsPerPixel) / gor::kGridStepsPerPixel; }

}  // namespace

InjectedSet injectOutliers(const CorrespondenceSet& cs, std::size_t count, int width, int height,
                           std::uint64_t seed) {
  InjectedSet out{cs, {}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, height);
  for (std::size_t k = 0; k < count; ++k) {
    const Point2 p{snap(ux(rng)), snap(uy(rng))};
    const Point2 q{snap(ux(rng)), snap(uy(rng))};
    out.injected.push_back(out.set.size());
    out.set.add(p, q);
  }
  return out;
}

CorrespondenceSet exactCorrespondences(const AffineTransform& t, std::size_t count, int width, int height,
                                       std::uint64_t seed) {
  // Snapping t(p) to the grid moves each sensed point by at most delta, which
  // changes the doubled triangle area det(b - a, c - a) by at most
  // 2 delta (|b - a| + |c - a|) + 4 delta^2. Candidates that would form a
  // triple within twice that bound are redrawn, so no orientation sign can
  // flip and the set is in general position on both sides.
  const double delta = std::sqrt(2.0) / (2.0 * gor::kGridStepsPerPixel);
  auto robust = [&](Point2 a, Point2 b, Point2 c) {
    const Point2 u = b - a, v = c - a;
    const double det = u.x * v.y - u.y * v.x;
    const double bound = 2.0 * delta * (norm(u) + norm(v)) + 4.0 * delta * delta;
    return std::abs(det) > 2.0 * bound;
  };

  CorrespondenceSet cs;
  std::vector<Point2> exact;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, height);
  const std::size_t maxDraws = 1000 * (count + 1);
  for (std::size_t draws = 0; cs.size() < count; ++draws) {
    if (draws >= maxDraws) throw InvalidArgument("cannot place points in general position");
    const Point2 p{snap(ux(rng)), snap(uy(rng))};
    const Point2 q = t.apply(p);
    bool ok = true;
    for (std::size_t i = 0; ok && i < exact.size(); ++i)
      for (std::size_t j = i + 1; ok && j < exact.size(); ++j) ok = robust(exact[i], exact[j], q);
    for (std::size_t i = 0; ok && i < exact.size(); ++i) ok = norm(exact[i] - q) > 4.0 * delta;
    if (!ok) continue;
    exact.push_back(q);
    cs.add(p, {snap(q.x), snap(q.y)});
  }
  return cs;
}

GrayImage renderSyntheticScene(int width, int height, std::uint64_t seed) {
  if (width < 1 || height < 1) throw InvalidArgument("zero-dimension scene");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct Shape {
    std::vector<Point2> poly;  // convex
    double value;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  };
  std::vector<Shape> shapes;
  auto addRect = [&](Point2 c, double len, double wid, double angle, double value) {
    const double cs = std::cos(angle), sn = std::sin(angle);
    std::vector<Point2> poly;
    for (auto [u, v] : {std::pair{-1.0, -1.0}, std::pair{1.0, -1.0}, std::pair{1.0, 1.0}, std::pair{-1.0, 1.0}}) {
      const double du = 0.5 * len * u, dv = 0.5 * wid * v;
      poly.push_back({c.x + du * cs - dv * sn, c.y + du * sn + dv * cs});
    }
    shapes.push_back({poly, value});
  };
  auto addTriangle = [&](Point2 c, double r, double angle, double value) {
    std::vector<Point2> poly;
    for (int k = 0; k < 3; ++k) {
      const double a = angle + k * 2.0 * std::numbers::pi / 3.0 + 0.35 * (unit(rng) - 0.5);
      const double rr = r * (0.75 + 0.5 * unit(rng));
      poly.push_back({c.x + rr * std::cos(a), c.y + rr * std::sin(a)});
    }
    shapes.push_back({poly, value});
  };

  const double area = static_cast<double>(width) * height;
  // Long bars, like roads or field boundaries.
  const int bars = std::max(1, static_cast<int>(area / 26000.0));
  for (int k = 0; k < bars; ++k) {
    const Point2 c{unit(rng) * width, unit(rng) * height};
    addRect(c, 80.0 + 160.0 * unit(rng), 3.0 + 5.0 * unit(rng), unit(rng) * std::numbers::pi,
            0.15 + 0.7 * unit(rng));
  }
  // Blocks and triangles, like buildings and parcels.
  const int blocks = std::max(1, static_cast<int>(area / 3000.0));
  for (int k = 0; k < blocks; ++k) {
    const Point2 c{unit(rng) * width, unit(rng) * height};
    const double value = 0.1 + 0.8 * unit(rng);
    if (unit(rng) < 0.7)
      addRect(c, 10.0 + 30.0 * unit(rng), 6.0 + 18.0 * unit(rng), unit(rng) * std::numbers::pi, value);
    else
      addTriangle(c, 7.0 + 12.0 * unit(rng), unit(rng) * 2.0 * std::numbers::pi, value);
  }

  auto inside = [](const std::vector<Point2>& poly, Point2 p) {
    bool pos = false, neg = false;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point2 a = poly[k], b = poly[(k + 1) % poly.size()];
      const double cr = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      pos |= cr > 0;
      neg |= cr < 0;
    }
    return !(pos && neg);
  };

  for (auto& s : shapes) {
    s.x0 = s.x1 = s.poly[0].x;
    s.y0 = s.y1 = s.poly[0].y;
    for (const auto& p : s.poly) {
      s.x0 = std::min(s.x0, p.x);
      s.x1 = std::max(s.x1, p.x);
      s.y0 = std::min(s.y0, p.y);
      s.y1 = std::max(s.y1, p.y);
    }
  }

  // Smooth background.
  const double gx = (unit(rng) - 0.5) * 0.3 / width, gy = (unit(rng) - 0.5) * 0.3 / height;
  const double base = 0.45;

  constexpr int ss = 4;  // supersamples per axis
  std::vector<double> data(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int sy = 0; sy < ss; ++sy) {
        for (int sx = 0; sx < ss; ++sx) {
          const Point2 p{x - 0.5 + (sx + 0.5) / ss, y - 0.5 + (sy + 0.5) / ss};
          double v = base + gx * (p.x - 0.5 * width) + gy * (p.y - 0.5 * height);
          for (const auto& s : shapes)
            if (p.x >= s.x0 && p.x <= s.x1 && p.y >= s.y0 && p.y <= s.y1 && inside(s.poly, p)) v = s.value;
          acc += v;
        }
      }
      data[static_cast<std::size_t>(y) * width + x] = std::clamp(acc / (ss * ss), 0.0, 1.0);
    }
  }
  return GrayImage(width, height, std::move(data));
}

}  // namespace alrs::eval
