#pragma once

#include <cstdint>
#include <vector>

#include "alrs/affine.hpp"
#include "alrs/features.hpp"

namespace alrs::estimate {

struct FitResult {
  AffineTransform transform;
  std::vector<double> residuals;  // ||T(p_k) - q_k|| per correspondence
  double rmse = 0.0;
};

/// Residual norms and their root mean square for a given transform.
FitResult evaluateFit(const CorrespondenceSet& cs, const AffineTransform& t);

/// Least-squares affine fit: two decoupled 3-unknown normal systems on
/// normalized reference coordinates, solved by pivoted elimination.
/// Throws DegenerateError("insufficient correspondences") for N < 3 and
/// DegenerateError("degenerate configuration") for collinear designs.
FitResult fitAffineLSM(const CorrespondenceSet& cs);

/// Resolution-scaled error: 2^level * rmse.
double scaledRmse(const FitResult& fit, int level);

struct RansacParams {
  double inlierTol = 1.0;
  int iterations = 1000;
  std::uint64_t seed = 0;
};

struct RansacResult {
  FitResult fit;
  std::vector<bool> inlierMask;
};

/// Minimal 3-point consensus search followed by an LSM refit on the best
/// consensus set. Deterministic for a fixed seed; ties on consensus size go
/// to the earliest trial. Throws DegenerateError("ransac failed") when no
/// sample reaches a consensus of 3.
RansacResult fitAffineRansac(const CorrespondenceSet& cs, const RansacParams& params = {});

}  // namespace alrs::estimate
