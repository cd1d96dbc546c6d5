#pragma once

#include <cmath>

namespace rham {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Planar vector; also used for unreduced lifts of torus points.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;

  double norm() const { return std::hypot(x, y); }
};

/// Reduces a coordinate into [0, 1).
inline double wrap_unit(double v) {
  double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}

/// Point of the flat torus [0,1)^2 with coordinates reduced on construction.
class TorusPoint {
 public:
  TorusPoint() = default;
  TorusPoint(double x, double y) : x_(wrap_unit(x)), y_(wrap_unit(y)) {}
  explicit TorusPoint(Vec2 lift) : TorusPoint(lift.x, lift.y) {}

  double x() const { return x_; }
  double y() const { return y_; }
  Vec2 vec() const { return {x_, y_}; }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
};

/// Signed difference b - a reduced to [-1/2, 1/2) per axis.
inline Vec2 torus_delta(Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  d.x -= std::floor(d.x + 0.5);
  d.y -= std::floor(d.y + 0.5);
  return d;
}

/// Flat torus metric.
inline double torus_distance(Vec2 a, Vec2 b) { return torus_delta(a, b).norm(); }
inline double torus_distance(TorusPoint a, TorusPoint b) {
  return torus_distance(a.vec(), b.vec());
}

}  // namespace rham
