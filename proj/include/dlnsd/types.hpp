#pragma once

#include <array>
#include <cmath>

namespace dlnsd {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  double operator[](int i) const { return i == 0 ? x : y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Row-major 2x2 tensor; for gradients m[i][j] = d u_i / d x_j.
using Mat2 = std::array<std::array<double, 2>, 2>;

inline Vec2 mat_vec(const Mat2& m, Vec2 v) {
  return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
}

inline double trace(const Mat2& m) { return m[0][0] + m[1][1]; }

inline Mat2 identity2(double s = 1.0) { return Mat2{{{s, 0.0}, {0.0, s}}}; }

/// Symmetric and positive definite, with a relative symmetry tolerance.
inline bool is_spd(const Mat2& m) {
  const double scale = std::abs(m[0][0]) + std::abs(m[1][1]) + std::abs(m[0][1]);
  if (std::abs(m[0][1] - m[1][0]) > 1e-14 * scale) return false;
  return m[0][0] > 0.0 && m[0][0] * m[1][1] - m[0][1] * m[1][0] > 0.0;
}

}  // namespace dlnsd
