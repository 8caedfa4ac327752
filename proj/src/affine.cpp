#include "alrs/affine.hpp"

#include <numbers>

#include "alrs/error.hpp"

namespace alrs {

AffineTransform AffineTransform::rotation(double degrees) {
  const double r = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(r);
  const double sn = std::sin(r);
  return {cs, -sn, sn, cs, 0.0, 0.0};
}

AffineTransform AffineTransform::about(const AffineTransform& linear, Point2 center) {
  return translation(center.x, center.y) * linear * translation(-center.x, -center.y);
}

bool AffineTransform::isFinite() const {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d) &&
         std::isfinite(tx) && std::isfinite(ty);
}

bool AffineTransform::isInvertible() const {
  const double det = linearDeterminant();
  return isFinite() && det != 0.0 && std::isfinite(1.0 / det);
}

AffineTransform AffineTransform::inverse() const {
  if (!isInvertible()) throw InvalidArgument("non-invertible transform");
  const double det = linearDeterminant();
  AffineTransform inv;
  inv.a = d / det;
  inv.b = -b / det;
  inv.c = -c / det;
  inv.d = a / det;
  inv.tx = -(inv.a * tx + inv.b * ty);
  inv.ty = -(inv.c * tx + inv.d * ty);
  return inv;
}

AffineTransform operator*(const AffineTransform& l, const AffineTransform& r) {
  AffineTransform out;
  out.a = l.a * r.a + l.b * r.c;
  out.b = l.a * r.b + l.b * r.d;
  out.c = l.c * r.a + l.d * r.c;
  out.d = l.c * r.b + l.d * r.d;
  out.tx = l.a * r.tx + l.b * r.ty + l.tx;
  out.ty = l.c * r.tx + l.d * r.ty + l.ty;
  return out;
}

}  // namespace alrs
