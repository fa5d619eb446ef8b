#ifndef PEERLOC_GEOMETRY_HPP
#define PEERLOC_GEOMETRY_HPP

#include <cmath>

namespace peerloc {

/// 2D position or displacement in meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

using Position = Vec2;

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

inline double squared_norm(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double norm(const Vec2& v) { return std::sqrt(squared_norm(v)); }

inline double squared_distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}
inline double distance(const Vec2& a, const Vec2& b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace peerloc

#endif  // PEERLOC_GEOMETRY_HPP
