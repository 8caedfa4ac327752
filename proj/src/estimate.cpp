#include "alrs/estimate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>

#include "alrs/error.hpp"

namespace alrs::estimate {
namespace {

constexpr double kRankThreshold = 1e-9;

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Gaussian elimination with partial pivoting.
std::optional<Vec3> solve3(Mat3 m, Vec3 rhs) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (m[pivot][col] == 0.0) return std::nullopt;
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  Vec3 x{};
  for (int r = 2; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < 3; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return x;
}

// Maps reference coordinates into [-1, 1] around their centroid.
struct Normalizer {
  double cx = 0.0, cy = 0.0, s = 1.0;

  explicit Normalizer(const std::vector<Point2>& pts) {
    for (const auto& p : pts) {
      cx += p.x;
      cy += p.y;
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    double extent = 0.0;
    for (const auto& p : pts) extent = std::max({extent, std::abs(p.x - cx), std::abs(p.y - cy)});
    s = extent > 0.0 ? 1.0 / extent : 1.0;
  }
  Point2 operator()(Point2 p) const { return {(p.x - cx) * s, (p.y - cy) * s}; }
};

}  // namespace

FitResult evaluateFit(const CorrespondenceSet& cs, const AffineTransform& t) {
  FitResult fit;
  fit.transform = t;
  fit.residuals.reserve(cs.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const Point2 e = t.apply(cs.refPoints[k]) - cs.sensedPoints[k];
    const double sq = e.x * e.x + e.y * e.y;
    fit.residuals.push_back(std::sqrt(sq));
    sum += sq;
  }
  fit.rmse = cs.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(cs.size()));
  return fit;
}

FitResult fitAffineLSM(const CorrespondenceSet& cs) {
  if (cs.refPoints.size() != cs.sensedPoints.size()) throw InvalidArgument("correspondence lists differ in length");
  if (cs.size() < 3) throw DegenerateError("insufficient correspondences");
  const Normalizer norm(cs.refPoints);

  Mat3 m{};
  Vec3 bx{}, by{};
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const Point2 p = norm(cs.refPoints[k]);
    const Vec3 row{p.x, p.y, 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += row[r] * row[c];
      bx[r] += row[r] * cs.sensedPoints[k].x;
      by[r] += row[r] * cs.sensedPoints[k].y;
    }
  }
  Mat3 moment = m;
  for (auto& row : moment)
    for (double& v : row) v /= static_cast<double>(cs.size());
  if (!(std::abs(det3(moment)) >= kRankThreshold)) throw DegenerateError("degenerate configuration");

  const auto sx = solve3(m, bx);
  const auto sy = solve3(m, by);
  if (!sx || !sy) throw DegenerateError("degenerate configuration");

  // Undo the normalization: p_n = s * (p - c).
  AffineTransform t;
  t.a = (*sx)[0] * norm.s;
  t.b = (*sx)[1] * norm.s;
  t.tx = (*sx)[2] - t.a * norm.cx - t.b * norm.cy;
  t.c = (*sy)[0] * norm.s;
  t.d = (*sy)[1] * norm.s;
  t.ty = (*sy)[2] - t.c * norm.cx - t.d * norm.cy;
  if (!t.isFinite()) throw DegenerateError("degenerate configuration");
  return evaluateFit(cs, t);
}

double scaledRmse(const FitResult& fit, int level) {
  if (level < 0) throw InvalidArgument("level must be non-negative");
  return std::ldexp(fit.rmse, level);
}

RansacResult fitAffineRansac(const CorrespondenceSet& cs, const RansacParams& params) {
  if (cs.size() < 3) throw DegenerateError("insufficient correspondences");
  if (!(params.inlierTol > 0.0) || params.iterations < 1) throw InvalidArgument("invalid RANSAC parameters");
  const std::size_t n = cs.size();
  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::vector<bool> bestMask;
  std::size_t bestCount = 0;
  std::vector<bool> mask(n);
  for (int trial = 0; trial < params.iterations; ++trial) {
    std::size_t idx[3];
    idx[0] = pick(rng);
    do idx[1] = pick(rng);
    while (idx[1] == idx[0]);
    do idx[2] = pick(rng);
    while (idx[2] == idx[0] || idx[2] == idx[1]);

    FitResult sample;
    try {
      sample = fitAffineLSM(cs.select({idx[0], idx[1], idx[2]}));
    } catch (const DegenerateError&) {
      continue;
    }
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = norm(sample.transform.apply(cs.refPoints[k]) - cs.sensedPoints[k]);
      mask[k] = r <= params.inlierTol;
      count += mask[k];
    }
    if (count > bestCount) {
      bestCount = count;
      bestMask = mask;
    }
    if (n == 3 && bestCount == 3) break;
  }
  if (bestCount < 3) throw DegenerateError("ransac failed");

  std::vector<std::size_t> inliers;
  for (std::size_t k = 0; k < n; ++k)
    if (bestMask[k]) inliers.push_back(k);
  RansacResult out;
  try {
    out.fit = fitAffineLSM(cs.select(inliers));
  } catch (const DegenerateError&) {
    throw DegenerateError("ransac failed");
  }
  out.fit = evaluateFit(cs, out.fit.transform);
  out.inlierMask = std::move(bestMask);
  return out;
}

}  // namespace alrs::estimate
