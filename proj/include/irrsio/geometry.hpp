#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace irrsio {

// Points live in R^2 or R^3; we store three coordinates everywhere and keep
// z == 0 for planar data, so most code paths are dimension-agnostic.
using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline double dist2(const Vec3& a, const Vec3& b) { return norm2(a - b); }
inline double dist(const Vec3& a, const Vec3& b) { return std::sqrt(dist2(a, b)); }

/// Open ball B(center, radius).
struct Ball {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 0.0;

  bool contains(const Vec3& p) const { return dist2(p, center) < radius * radius; }
};

}  // namespace irrsio
