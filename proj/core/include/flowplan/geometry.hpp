#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace flowplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  // z-component of the 2-D cross product; sign gives the side of *this that o lies on
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }
  double heading() const { return std::atan2(y, x); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

inline double distance(Vec2 a, Vec2 b) { return (b - a).norm(); }

inline Vec2 unit_from_heading(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  else if (a > std::numbers::pi) a -= two_pi;
  return a;
}

constexpr double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Box2 {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  constexpr double width() const { return x_max - x_min; }
  constexpr double height() const { return y_max - y_min; }
  constexpr bool valid() const { return x_max > x_min && y_max > y_min; }
  constexpr bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

// Signed perpendicular distance of p from the infinite line through a and b,
// positive on the left of the a->b direction.
inline double cross_track_error(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  return (ab.cross(p - a)) / len;
}

// Scalar projection of p onto the a->b direction, measured from a.
inline double along_track(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  return ab.dot(p - a) / ab.norm();
}

}  // namespace flowplan
