#pragma once

#include <cmath>

namespace alrs {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }

/// Planar affine map (x, y) -> (a*x + b*y + tx, c*x + d*y + ty).
struct AffineTransform {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double tx = 0.0, ty = 0.0;

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(double dx, double dy) { return {1, 0, 0, 1, dx, dy}; }
  static AffineTransform scaling(double s) { return {s, 0, 0, s, 0, 0}; }
  /// Rotation by `degrees` in the image frame (y axis pointing down), so a
  /// positive angle turns content clockwise on screen.
  static AffineTransform rotation(double degrees);
  /// Linear map `linear` applied about the fixed point `center`.
  static AffineTransform about(const AffineTransform& linear, Point2 center);

  Point2 apply(Point2 p) const { return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty}; }
  Point2 operator()(Point2 p) const { return apply(p); }

  double linearDeterminant() const { return a * d - b * c; }
  bool isFinite() const;
  bool isInvertible() const;

  /// Throws InvalidArgument when the linear part is singular.
  AffineTransform inverse() const;

  friend bool operator==(const AffineTransform&, const AffineTransform&) = default;
};

/// Composition: (lhs * rhs)(p) == lhs(rhs(p)).
AffineTransform operator*(const AffineTransform& lhs, const AffineTransform& rhs);

}  // namespace alrs
