#pragma once

#include <cmath>

namespace bubbles {

struct Point {
  double x = 0.0;
  double y = 0.0;

  constexpr Point& operator+=(const Point& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Point& operator-=(const Point& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Point& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr bool operator==(const Point&, const Point&) = default;
};

constexpr Point operator+(Point a, const Point& b) { return a += b; }
constexpr Point operator-(Point a, const Point& b) { return a -= b; }
constexpr Point operator-(const Point& a) { return {-a.x, -a.y}; }
constexpr Point operator*(Point a, double s) { return a *= s; }
constexpr Point operator*(double s, Point a) { return a *= s; }
constexpr Point operator/(Point a, double s) { return {a.x / s, a.y / s}; }

constexpr double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point& a, const Point& b) { return norm(b - a); }

// Counterclockwise quarter turn.
constexpr Point perp(const Point& a) { return {-a.y, a.x}; }

inline Point rotate(const Point& a, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline bool is_finite(const Point& a) { return std::isfinite(a.x) && std::isfinite(a.y); }

}  // namespace bubbles
