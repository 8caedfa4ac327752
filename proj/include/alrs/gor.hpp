#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "alrs/features.hpp"

namespace alrs::gor {

/// Coordinates are snapped to this many steps per pixel before any sign test.
inline constexpr double kGridStepsPerPixel = 256.0;

struct GridPoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

GridPoint toGrid(Point2 p);

/// Sign of |xa xb xc; ya yb yc; 1 1 1|, i.e. which side of the directed edge
/// a -> b the point c lies on. Exact on the grid.
int edgeSign(GridPoint a, GridPoint b, GridPoint c);
int edgeSign(Point2 a, Point2 b, Point2 c);

/// Side classifications of every point against every directed edge, for the
/// reference and sensed point sets. Signs are evaluated on demand.
class SignTable {
 public:
  explicit SignTable(const CorrespondenceSet& cs);

  std::size_t size() const { return p_.size(); }
  int signRef(std::size_t i, std::size_t j, std::size_t k) const { return edgeSign(p_[i], p_[j], p_[k]); }
  int signSensed(std::size_t i, std::size_t j, std::size_t k) const { return edgeSign(q_[i], q_[j], q_[k]); }
  /// 1 when the two images classify k differently against edge i -> j.
  int diff(std::size_t i, std::size_t j, std::size_t k) const { return signRef(i, j, k) != signSensed(i, j, k); }

  const std::vector<GridPoint>& refGrid() const { return p_; }
  const std::vector<GridPoint>& sensedGrid() const { return q_; }

 private:
  std::vector<GridPoint> p_;
  std::vector<GridPoint> q_;
};

/// Throws DegenerateError("insufficient correspondences") when N < 3.
SignTable classify(const CorrespondenceSet& cs);

/// perEdge(i, j) = sum_k diff_{i->j}(k); perPoint[i] = sum_j perEdge(i, j).
struct DisparityLedger {
  std::size_t n = 0;
  std::vector<std::int64_t> perEdge;
  std::vector<std::int64_t> perPoint;

  std::int64_t edge(std::size_t i, std::size_t j) const { return perEdge[i * n + j]; }
  bool allZero() const;
  friend bool operator==(const DisparityLedger&, const DisparityLedger&) = default;
};

/// Angular-sweep computation: per anchor i the other points are sorted by
/// angle in both images, and the disagreement count for every edge i -> j is
/// read off with range counting. O(n^2 log n) for points in general position.
DisparityLedger computeLedger(const SignTable& table);

/// Direct triple loop over fresh determinant evaluations. N <= 12.
DisparityLedger bruteForceOracle(const CorrespondenceSet& cs);

inline constexpr std::size_t kOracleMaxSize = 12;

struct RemovalEvent {
  int iteration = 0;
  std::size_t index = 0;  // into the input set
  std::int64_t score = 0;
};

struct RemovalResult {
  CorrespondenceSet survivors;
  std::vector<std::size_t> keptIndices;     // ascending
  std::vector<std::size_t> removedIndices;  // in removal order, ascending within an iteration
  std::vector<RemovalEvent> events;
  int iterations = 0;
  bool degenerate = false;  // fewer than 3 survivors
};

/// Iterative geometrical outlier removal: every iteration removes all
/// correspondences whose accumulated disparity equals the current maximum,
/// until no edge classifies any point differently. The ledger is built once
/// and updated by subtracting the removed points' contributions.
/// Orientation-preserving inter-image maps only: a mirrored pair flips every
/// sign and nothing survives. Throws DegenerateError when N < 3.
RemovalResult removeOutliers(const CorrespondenceSet& cs);

}  // namespace alrs::gor
