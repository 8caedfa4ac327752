#include "alrs/gor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alrs/error.hpp"

namespace alrs::gor {
namespace {

using Wide = __int128;

struct Vec {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool zero() const { return x == 0 && y == 0; }
};

Vec operator-(GridPoint a, GridPoint b) { return {a.x - b.x, a.y - b.y}; }

int sign(Wide v) { return (v > 0) - (v < 0); }

Wide cross(Vec u, Vec v) { return static_cast<Wide>(u.x) * v.y - static_cast<Wide>(u.y) * v.x; }

// 0 for angles in [0, pi), 1 for [pi, 2pi).
int half(Vec v) { return (v.y < 0 || (v.y == 0 && v.x < 0)) ? 1 : 0; }

bool angleLess(Vec u, Vec v) {
  const int hu = half(u), hv = half(v);
  if (hu != hv) return hu < hv;
  return cross(u, v) > 0;
}

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : t_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < t_.size(); i += i & (~i + 1)) ++t_[i];
  }
  // count in [0, i)
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += t_[i];
    return s;
  }
  std::int64_t range(std::size_t lo, std::size_t hi) const { return hi > lo ? prefix(hi) - prefix(lo) : 0; }

 private:
  std::vector<std::int64_t> t_;
};

struct Interval {
  std::size_t lo = 0;
  std::size_t hi = 0;  // exclusive
  std::size_t length() const { return hi > lo ? hi - lo : 0; }
};

// Others of anchor i sorted by angle around it in one image. Points
// coincident with the anchor are kept apart; they classify as 0 for all edges.
struct AngularOrder {
  std::vector<std::size_t> sorted;   // point indices, by angle
  std::vector<Vec> dirs;             // direction of sorted[k] from the anchor
  std::vector<std::size_t> coincident;
  std::vector<std::size_t> position;  // point index -> position in `sorted`, npos if coincident/anchor

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  AngularOrder(const std::vector<GridPoint>& pts, std::size_t anchor) : position(pts.size(), npos) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k == anchor) continue;
      if ((pts[k] - pts[anchor]).zero())
        coincident.push_back(k);
      else
        sorted.push_back(k);
    }
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      const Vec u = pts[a] - pts[anchor], v = pts[b] - pts[anchor];
      if (angleLess(u, v)) return true;
      if (angleLess(v, u)) return false;
      return a < b;
    });
    dirs.reserve(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      position[sorted[k]] = k;
      dirs.push_back(pts[sorted[k]] - pts[anchor]);
    }
  }

  std::size_t lowerBound(Vec v) const {
    return static_cast<std::size_t>(
        std::partition_point(dirs.begin(), dirs.end(), [&](const Vec& d) { return angleLess(d, v); }) -
        dirs.begin());
  }
  std::size_t upperBound(Vec v) const {
    return static_cast<std::size_t>(
        std::partition_point(dirs.begin(), dirs.end(), [&](const Vec& d) { return !angleLess(v, d); }) -
        dirs.begin());
  }

  // Positions strictly left of the ray towards v: angles in (theta, theta + pi).
  void positiveArc(Vec v, Interval out[2], int& count) const {
    const std::size_t s = upperBound(v);
    const std::size_t e = lowerBound({-v.x, -v.y});
    count = 0;
    if (s <= e) {
      out[count++] = {s, e};
    } else {
      out[count++] = {s, sorted.size()};
      out[count++] = {0, e};
    }
  }

  // Positions on the line through the anchor with direction v (either ray).
  void zeroRuns(Vec v, Interval out[2]) const {
    out[0] = {lowerBound(v), upperBound(v)};
    const Vec o{-v.x, -v.y};
    out[1] = {lowerBound(o), upperBound(o)};
  }
};

// Rectangle count query over (refPos, sensedPos) points.
struct RectQuery {
  Interval ref;
  Interval sensed;
  std::size_t edge = 0;
};

}  // namespace

GridPoint toGrid(Point2 p) {
  return {static_cast<std::int64_t>(std::llround(p.x * kGridStepsPerPixel)),
          static_cast<std::int64_t>(std::llround(p.y * kGridStepsPerPixel))};
}

int edgeSign(GridPoint a, GridPoint b, GridPoint c) { return sign(cross(b - a, c - a)); }

int edgeSign(Point2 a, Point2 b, Point2 c) { return edgeSign(toGrid(a), toGrid(b), toGrid(c)); }

SignTable::SignTable(const CorrespondenceSet& cs) {
  if (cs.refPoints.size() != cs.sensedPoints.size()) throw InvalidArgument("correspondence lists differ in length");
  p_.reserve(cs.size());
  q_.reserve(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Point2 p = cs.refPoints[i], q = cs.sensedPoints[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(q.x) || !std::isfinite(q.y))
      throw InvalidArgument("non-finite correspondence coordinate");
    p_.push_back(toGrid(p));
    q_.push_back(toGrid(q));
  }
}

SignTable classify(const CorrespondenceSet& cs) {
  if (cs.size() < 3) throw DegenerateError("insufficient correspondences");
  return SignTable(cs);
}

bool DisparityLedger::allZero() const {
  return std::all_of(perEdge.begin(), perEdge.end(), [](std::int64_t v) { return v == 0; });
}

DisparityLedger computeLedger(const SignTable& table) {
  const std::size_t n = table.size();
  const auto& P = table.refGrid();
  const auto& Q = table.sensedGrid();
  DisparityLedger L;
  L.n = n;
  L.perEdge.assign(n * n, 0);
  L.perPoint.assign(n, 0);
  if (n < 3) return L;

  for (std::size_t i = 0; i < n; ++i) {
    const AngularOrder ordP(P, i);
    const AngularOrder ordQ(Q, i);

    // |P+ ∩ Q+| for every edge via an offline sweep over reference positions.
    std::vector<RectQuery> queries;
    std::vector<std::int64_t> bothPositive(n, 0);
    std::vector<std::int64_t> refPositive(n, 0), sensedPositive(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec vp = P[j] - P[i], vq = Q[j] - Q[i];
      Interval ap[2], aq[2];
      int np = 0, nq = 0;
      if (!vp.zero()) ordP.positiveArc(vp, ap, np);
      if (!vq.zero()) ordQ.positiveArc(vq, aq, nq);
      for (int a = 0; a < np; ++a) refPositive[j] += static_cast<std::int64_t>(ap[a].length());
      for (int b = 0; b < nq; ++b) sensedPositive[j] += static_cast<std::int64_t>(aq[b].length());
      for (int a = 0; a < np; ++a)
        for (int b = 0; b < nq; ++b)
          if (ap[a].length() && aq[b].length()) queries.push_back({ap[a], aq[b], j});
    }

    // Points sorted in the reference image that also have a sensed position.
    // A point coincident with the anchor in one image only never lands in a
    // positive arc of that image, so it cannot contribute to the intersection.
    std::vector<std::vector<std::size_t>> events(ordP.sorted.size() + 1);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      events[queries[q].ref.lo].push_back(2 * q);
      events[queries[q].ref.hi].push_back(2 * q + 1);
    }
    Fenwick bit(ordQ.sorted.size());
    for (std::size_t pos = 0; pos <= ordP.sorted.size(); ++pos) {
      for (std::size_t e : events[pos]) {
        const RectQuery& rq = queries[e / 2];
        const std::int64_t c = bit.range(rq.sensed.lo, rq.sensed.hi);
        bothPositive[rq.edge] += (e % 2) ? c : -c;
      }
      if (pos < ordP.sorted.size()) {
        const std::size_t qpos = ordQ.position[ordP.sorted[pos]];
        if (qpos != AngularOrder::npos) bit.add(qpos);
      }
    }

    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec vp = P[j] - P[i], vq = Q[j] - Q[i];
      // Points with a zero sign in either image are settled directly.
      std::vector<std::size_t> zeroSet;
      auto collect = [&](const AngularOrder& ord, Vec v) {
        if (v.zero()) {
          zeroSet.insert(zeroSet.end(), ord.sorted.begin(), ord.sorted.end());
        } else {
          Interval runs[2];
          ord.zeroRuns(v, runs);
          for (const auto& r : runs)
            for (std::size_t k = r.lo; k < r.hi; ++k) zeroSet.push_back(ord.sorted[k]);
        }
        zeroSet.insert(zeroSet.end(), ord.coincident.begin(), ord.coincident.end());
      };
      collect(ordP, vp);
      collect(ordQ, vq);
      std::sort(zeroSet.begin(), zeroSet.end());
      zeroSet.erase(std::unique(zeroSet.begin(), zeroSet.end()), zeroSet.end());

      std::int64_t zeroDiff = 0, zeroRefPos = 0, zeroSensedPos = 0;
      for (std::size_t k : zeroSet) {
        if (k == j) continue;
        const int sp = edgeSign(P[i], P[j], P[k]);
        const int sq = edgeSign(Q[i], Q[j], Q[k]);
        zeroDiff += (sp != sq);
        zeroRefPos += (sp > 0);
        zeroSensedPos += (sq > 0);
      }
      // Outside the zero set both signs are +/-1 and differ iff exactly one
      // of them is positive.
      const std::int64_t d = refPositive[j] + sensedPositive[j] - 2 * bothPositive[j] - zeroRefPos -
                             zeroSensedPos + zeroDiff;
      L.perEdge[i * n + j] = d;
      L.perPoint[i] += d;
    }
  }
  return L;
}

DisparityLedger bruteForceOracle(const CorrespondenceSet& cs) {
  if (cs.size() > kOracleMaxSize) throw InvalidArgument("oracle limited to at most 12 correspondences");
  const std::size_t n = cs.size();
  DisparityLedger L;
  L.n = n;
  L.perEdge.assign(n * n, 0);
  L.perPoint.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const GridPoint pi = toGrid(cs.refPoints[i]), pj = toGrid(cs.refPoints[j]), pk = toGrid(cs.refPoints[k]);
        const GridPoint qi = toGrid(cs.sensedPoints[i]), qj = toGrid(cs.sensedPoints[j]),
                        qk = toGrid(cs.sensedPoints[k]);
        const Wide detP = static_cast<Wide>(pj.x - pi.x) * (pk.y - pi.y) - static_cast<Wide>(pk.x - pi.x) * (pj.y - pi.y);
        const Wide detQ = static_cast<Wide>(qj.x - qi.x) * (qk.y - qi.y) - static_cast<Wide>(qk.x - qi.x) * (qj.y - qi.y);
        if (sign(detP) != sign(detQ)) {
          ++L.perEdge[i * n + j];
          ++L.perPoint[i];
        }
      }
    }
  }
  return L;
}

RemovalResult removeOutliers(const CorrespondenceSet& cs) {
  const SignTable table = classify(cs);
  const std::size_t n = table.size();
  DisparityLedger ledger = computeLedger(table);
  std::vector<std::uint8_t> live(n, 1);
  std::size_t liveCount = n;

  RemovalResult result;
  for (;;) {
    std::int64_t best = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (live[i]) best = std::max(best, ledger.perPoint[i]);
    if (best == 0) break;

    ++result.iterations;
    std::vector<std::size_t> removed;
    for (std::size_t i = 0; i < n; ++i)
      if (live[i] && ledger.perPoint[i] == best) removed.push_back(i);
    for (std::size_t r : removed) {
      live[r] = 0;
      result.removedIndices.push_back(r);
      result.events.push_back({result.iterations, r, best});
    }
    liveCount -= removed.size();
    if (liveCount < 3) {
      result.degenerate = true;
      break;
    }

    // Drop every term that mentions a removed index.
    for (std::size_t i = 0; i < n; ++i) {
      if (!live[i]) continue;
      std::int64_t total = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !live[j]) continue;
        std::int64_t& d = ledger.perEdge[i * n + j];
        for (std::size_t r : removed) d -= table.diff(i, j, r);
        total += d;
      }
      ledger.perPoint[i] = total;
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    if (live[i]) result.keptIndices.push_back(i);
  if (liveCount < 3) result.degenerate = true;
  result.survivors = cs.select(result.keptIndices);
  return result;
}

}  // namespace alrs::gor
