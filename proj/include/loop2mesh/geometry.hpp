// Copyright 2026 The Loop2Mesh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "loop2mesh/error.hpp"

namespace loop2mesh {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;

  Point2& operator+=(Point2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
constexpr double squared_norm(Point2 a) { return dot(a, a); }
inline double norm(Point2 a) { return std::sqrt(squared_norm(a)); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Coordinate frame a point set lives in. Only the standardisation
/// functions move a set between frames.
enum class Frame { kOriginal, kStandardised };

inline const char* to_string(Frame f) {
  return f == Frame::kOriginal ? "original" : "standardised";
}

/// Ordered, non-empty list of finite 2D points tagged with its frame.
class PointSet {
 public:
  explicit PointSet(std::vector<Point2> points, Frame frame = Frame::kOriginal)
      : points_(std::move(points)), frame_(frame) {
    if (points_.empty()) throw Error(ErrorKind::kInvalidInput, "point set is empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!is_finite(points_[i])) {
        throw Error(ErrorKind::kInvalidInput, "non-finite coordinate at point " + std::to_string(i));
      }
    }
  }

  std::size_t size() const { return points_.size(); }
  const Point2& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point2> points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  Frame frame() const { return frame_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::vector<Point2> points_;
  Frame frame_;
};

/// Closed interval; infinite bounds are allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool valid() const { return !std::isnan(lo) && !std::isnan(hi) && lo <= hi; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return std::min(std::max(v, lo), hi); }

  static Interval unbounded() { return {}; }
};

// ---------------------------------------------------------------------------
// Polygon helpers

inline double signed_area(std::span<const Point2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    twice += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * twice;
}

inline double perimeter(std::span<const Point2> poly) {
  double total = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) total += norm(poly[(i + 1) % n] - poly[i]);
  return total;
}

inline Point2 closest_point_on_segment(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 == 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

namespace detail {

inline int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

inline bool within_box(Point2 a, Point2 b, Point2 p) {
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && within_box(p1, p2, q1)) return true;
  if (o2 == 0 && within_box(p1, p2, q2)) return true;
  if (o3 == 0 && within_box(q1, q2, p1)) return true;
  if (o4 == 0 && within_box(q1, q2, p2)) return true;
  return false;
}

// Boundary tolerance for containment, scaled by coordinate magnitude.
inline bool on_segment(Point2 p, Point2 a, Point2 b) {
  const double scale = 1.0 + std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x), std::abs(b.y)});
  const double tol = 1e-12 * scale;
  return squared_norm(p - closest_point_on_segment(p, a, b)) <= tol * tol;
}

}  // namespace detail

/// True when no two non-adjacent edges of the closed polygon touch.
inline bool is_simple_polygon(std::span<const Point2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (detail::segments_intersect(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

/// Closed polygon of boundary vertices; the last vertex connects back to
/// the first. Construction rejects fewer than 3 vertices, zero area and
/// self-intersection.
class AirfoilLoop {
 public:
  explicit AirfoilLoop(std::vector<Point2> vertices, Frame frame = Frame::kOriginal)
      : vertices_(std::move(vertices)), frame_(frame) {
    if (vertices_.size() < 3) {
      throw Error(ErrorKind::kInvalidGeometry,
                  "loop needs at least 3 vertices, got " + std::to_string(vertices_.size()));
    }
    double extent = 0.0;
    for (const Point2& v : vertices_) {
      if (!is_finite(v)) throw Error(ErrorKind::kInvalidGeometry, "non-finite loop vertex");
      extent = std::max({extent, std::abs(v.x), std::abs(v.y)});
    }
    const double area = signed_area(vertices_);
    if (!(std::abs(area) > 1e-14 * std::max(extent * extent, 1e-300))) {
      throw Error(ErrorKind::kInvalidGeometry, "loop has zero signed area");
    }
    if (!is_simple_polygon(vertices_)) {
      throw Error(ErrorKind::kInvalidGeometry, "loop self-intersects");
    }
  }

  std::size_t size() const { return vertices_.size(); }
  std::span<const Point2> vertices() const { return vertices_; }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }
  Frame frame() const { return frame_; }
  double area() const { return signed_area(vertices_); }
  double perimeter() const { return loop2mesh::perimeter(vertices_); }

  /// Start and end vertex of edge i (i wraps to the first vertex at the end).
  std::pair<Point2, Point2> edge(std::size_t i) const {
    return {vertices_[i], vertices_[(i + 1) % vertices_.size()]};
  }

  PointSet as_point_set() const { return PointSet(vertices_, frame_); }

 private:
  std::vector<Point2> vertices_;
  Frame frame_;
};

/// Strict interior test by ray casting. Points on an edge count as outside,
/// so mesh nodes lying on the wall are legal.
inline bool point_in_polygon(Point2 p, const AirfoilLoop& loop) {
  bool inside = false;
  for (std::size_t i = 0, n = loop.size(); i < n; ++i) {
    const auto [a, b] = loop.edge(i);
    if (detail::on_segment(p, a, b)) return false;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

struct EdgeProjection {
  std::size_t edge = 0;
  Point2 closest;
  double distance = 0.0;
};

/// Nearest loop edge to p; ties resolve to the lowest edge index.
inline EdgeProjection nearest_edge(Point2 p, const AirfoilLoop& loop) {
  EdgeProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = loop.size(); i < n; ++i) {
    const auto [a, b] = loop.edge(i);
    const Point2 c = closest_point_on_segment(p, a, b);
    const double d2 = squared_norm(p - c);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = {i, c, 0.0};
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

/// Drops consecutive duplicates and a repeated closing vertex.
inline std::vector<Point2> distinct_contour_points(std::span<const Point2> raw) {
  std::vector<Point2> pts;
  pts.reserve(raw.size());
  double extent = 0.0;
  for (const Point2& p : raw) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  const double tol = 1e-12 * std::max(extent, 1.0);
  for (const Point2& p : raw) {
    if (pts.empty() || norm(p - pts.back()) > tol) pts.push_back(p);
  }
  while (pts.size() > 1 && norm(pts.back() - pts.front()) <= tol) pts.pop_back();
  return pts;
}

/// Resamples a closed contour to `target` vertices spaced uniformly in arc
/// length. The first output vertex is the contour's first vertex and the
/// traversal direction is kept. A repeated closing vertex is dropped.
inline AirfoilLoop resample_loop(const PointSet& raw, std::size_t target) {
  if (target < 3) throw Error(ErrorKind::kInvalidGeometry, "resample target must be >= 3");

  const std::vector<Point2> pts = distinct_contour_points(raw.points());
  if (pts.size() < 3) {
    throw Error(ErrorKind::kInvalidGeometry,
                "contour has " + std::to_string(pts.size()) + " distinct points, need 3");
  }

  const std::size_t n = pts.size();
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cumulative[i + 1] = cumulative[i] + norm(pts[(i + 1) % n] - pts[i]);
  }
  const double total = cumulative[n];

  std::vector<Point2> out;
  out.reserve(target);
  std::size_t edge = 0;
  for (std::size_t k = 0; k < target; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(target);
    while (edge + 1 < n && cumulative[edge + 1] <= s) ++edge;
    const double len = cumulative[edge + 1] - cumulative[edge];
    const double t = len > 0.0 ? (s - cumulative[edge]) / len : 0.0;
    const Point2 a = pts[edge];
    const Point2 b = pts[(edge + 1) % n];
    out.push_back(a + t * (b - a));
  }
  return AirfoilLoop(std::move(out), raw.frame());
}

// ---------------------------------------------------------------------------
// Standardisation

/// Per-axis affine map (v - mean) / scale, with scale the population
/// standard deviation of the data it was fit on.
struct StandardizeTransform {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double scale_x = 1.0;
  double scale_y = 1.0;

  Point2 apply(Point2 p) const { return {(p.x - mean_x) / scale_x, (p.y - mean_y) / scale_y}; }
  Point2 invert(Point2 p) const { return {p.x * scale_x + mean_x, p.y * scale_y + mean_y}; }

  friend bool operator==(const StandardizeTransform&, const StandardizeTransform&) = default;
};

inline StandardizeTransform fit_standardize(const PointSet& ps) {
  if (ps.size() < 2) throw Error(ErrorKind::kDegenerateData, "standardisation needs >= 2 points");
  const double n = static_cast<double>(ps.size());
  double sx = 0.0, sy = 0.0;
  for (const Point2& p : ps) {
    sx += p.x;
    sy += p.y;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double vx = 0.0, vy = 0.0;
  for (const Point2& p : ps) {
    vx += (p.x - mx) * (p.x - mx);
    vy += (p.y - my) * (p.y - my);
  }
  const double sdx = std::sqrt(vx / n);
  const double sdy = std::sqrt(vy / n);
  if (!(sdx > 0.0) || !(sdy > 0.0)) {
    throw Error(ErrorKind::kDegenerateData, "zero variance on the " + std::string(sdx > 0.0 ? "y" : "x") + " axis");
  }
  return {mx, my, sdx, sdy};
}

namespace detail {

inline void require_frame(Frame actual, Frame expected) {
  if (actual != expected) {
    throw Error(ErrorKind::kFrameMismatch, std::string("expected ") + to_string(expected) +
                                               " frame, got " + to_string(actual));
  }
}

template <typename Fn>
std::vector<Point2> map_points(std::span<const Point2> pts, Fn fn) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const Point2& p : pts) out.push_back(fn(p));
  return out;
}

}  // namespace detail

inline PointSet apply_standardize(const StandardizeTransform& t, const PointSet& ps) {
  detail::require_frame(ps.frame(), Frame::kOriginal);
  return PointSet(detail::map_points(ps.points(), [&](Point2 p) { return t.apply(p); }),
                  Frame::kStandardised);
}

inline PointSet invert_standardize(const StandardizeTransform& t, const PointSet& ps) {
  detail::require_frame(ps.frame(), Frame::kStandardised);
  return PointSet(detail::map_points(ps.points(), [&](Point2 p) { return t.invert(p); }),
                  Frame::kOriginal);
}

inline AirfoilLoop apply_standardize(const StandardizeTransform& t, const AirfoilLoop& loop) {
  detail::require_frame(loop.frame(), Frame::kOriginal);
  return AirfoilLoop(detail::map_points(loop.vertices(), [&](Point2 p) { return t.apply(p); }),
                     Frame::kStandardised);
}

inline AirfoilLoop invert_standardize(const StandardizeTransform& t, const AirfoilLoop& loop) {
  detail::require_frame(loop.frame(), Frame::kStandardised);
  return AirfoilLoop(detail::map_points(loop.vertices(), [&](Point2 p) { return t.invert(p); }),
                     Frame::kOriginal);
}

/// Componentwise clip into the two ranges.
inline PointSet clamp_points(const PointSet& ps, const Interval& x_range, const Interval& y_range) {
  if (!x_range.valid() || !y_range.valid()) {
    throw Error(ErrorKind::kInvalidInput, "clamp range has lo > hi");
  }
  return PointSet(detail::map_points(ps.points(),
                                     [&](Point2 p) {
                                       return Point2{x_range.clamp(p.x), y_range.clamp(p.y)};
                                     }),
                  ps.frame());
}

/// Mean Euclidean distance over distinct pairs; 0 for a single point.
inline double mean_pairwise_distance(std::span<const Point2> pts) {
  const std::size_t n = pts.size();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) total += norm(pts[i] - pts[j]);
  }
  return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace loop2mesh
