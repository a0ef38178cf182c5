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
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "loop2mesh/error.hpp"
#include "loop2mesh/geometry.hpp"
#include "loop2mesh/rng.hpp"

// Synthetic stand-ins for the contour/mesh file pairs: NACA 4-digit contours
// and graded unstructured node clouds around them, plus writers for the two
// file formats the ingest layer reads.

namespace loop2mesh::synth {

/// Closed-trailing-edge NACA 4-digit contour in Selig order (upper trailing
/// edge -> leading edge -> lower trailing edge), cosine spaced, unit chord.
inline PointSet naca4(const std::string& digits, std::size_t points_per_side = 61) {
  if (digits.size() != 4 || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
    throw Error(ErrorKind::kInvalidInput, "NACA designation must be 4 digits, got '" + digits + "'");
  }
  if (points_per_side < 3) throw Error(ErrorKind::kInvalidInput, "need at least 3 points per side");
  const double m = (digits[0] - '0') / 100.0;
  const double p = (digits[1] - '0') / 10.0;
  const double t = std::stoi(digits.substr(2)) / 100.0;

  auto thickness = [t](double x) {
    return 5.0 * t * (0.2969 * std::sqrt(x) - 0.1260 * x - 0.3516 * x * x + 0.2843 * x * x * x - 0.1036 * x * x * x * x);
  };
  auto camber = [m, p](double x) -> std::pair<double, double> {
    if (m == 0.0 || p == 0.0) return {0.0, 0.0};
    if (x < p) return {m / (p * p) * (2.0 * p * x - x * x), 2.0 * m / (p * p) * (p - x)};
    return {m / ((1.0 - p) * (1.0 - p)) * (1.0 - 2.0 * p + 2.0 * p * x - x * x),
            2.0 * m / ((1.0 - p) * (1.0 - p)) * (p - x)};
  };
  auto surface = [&](double x, bool upper) {
    const auto [yc, slope] = camber(x);
    const double theta = std::atan(slope);
    const double yt = thickness(x);
    return upper ? Point2{x - yt * std::sin(theta), yc + yt * std::cos(theta)}
                 : Point2{x + yt * std::sin(theta), yc - yt * std::cos(theta)};
  };

  const std::size_t n = points_per_side;
  std::vector<Point2> pts;
  pts.reserve(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double beta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back(surface(0.5 * (1.0 + std::cos(beta)), true));
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double beta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back(surface(0.5 * (1.0 - std::cos(beta)), false));
  }
  return PointSet(std::move(pts));
}

struct MeshOptions {
  Interval x{-1.0, 2.5};
  Interval y{-1.2, 1.2};
  double wall_spacing = 0.008;
  double growth = 0.16;       // spacing increase per unit distance from the wall
  double max_spacing = 0.12;
  double wake_spacing = 0.03;  // spacing on the wake centerline at the trailing edge
  std::size_t candidates = 200000;
  std::uint64_t seed = 7;
};

namespace detail {

inline double distance_to_contour(Point2 p, std::span<const Point2> contour) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = contour.size(); i < n; ++i) {
    const Point2 c = closest_point_on_segment(p, contour[i], contour[(i + 1) % n]);
    best = std::min(best, squared_norm(p - c));
  }
  return std::sqrt(best);
}

// Uniform bucket grid for minimum-distance queries during dart throwing.
class SpatialHash {
 public:
  SpatialHash(Interval x, Interval y, double cell)
      : x0_(x.lo), y0_(y.lo), cell_(cell),
        nx_(static_cast<std::size_t>(std::ceil((x.hi - x.lo) / cell)) + 1),
        ny_(static_cast<std::size_t>(std::ceil((y.hi - y.lo) / cell)) + 1),
        buckets_(nx_ * ny_) {}

  void insert(Point2 p) { buckets_[index(p)].push_back(p); }

  bool any_within(Point2 p, double r) const {
    const auto span = static_cast<long>(std::ceil(r / cell_));
    const long ci = cx(p.x), cj = cy(p.y);
    for (long i = std::max(0L, ci - span); i <= std::min<long>(static_cast<long>(nx_) - 1, ci + span); ++i) {
      for (long j = std::max(0L, cj - span); j <= std::min<long>(static_cast<long>(ny_) - 1, cj + span); ++j) {
        for (const Point2& q : buckets_[static_cast<std::size_t>(i) * ny_ + static_cast<std::size_t>(j)]) {
          if (squared_norm(p - q) < r * r) return true;
        }
      }
    }
    return false;
  }

 private:
  long cx(double x) const { return std::clamp<long>(static_cast<long>((x - x0_) / cell_), 0, static_cast<long>(nx_) - 1); }
  long cy(double y) const { return std::clamp<long>(static_cast<long>((y - y0_) / cell_), 0, static_cast<long>(ny_) - 1); }
  std::size_t index(Point2 p) const { return static_cast<std::size_t>(cx(p.x)) * ny_ + static_cast<std::size_t>(cy(p.y)); }

  double x0_, y0_, cell_;
  std::size_t nx_, ny_;
  std::vector<std::vector<Point2>> buckets_;
};

}  // namespace detail

/// Node cloud resembling an unstructured CFD mesh: wall nodes on the
/// contour, farfield nodes on the box edges and a graded interior fill whose
/// spacing grows with wall distance and is refined in the wake.
inline PointSet graded_mesh(const PointSet& contour, const MeshOptions& opt = {}) {
  const AirfoilLoop body(distinct_contour_points(contour.points()));
  const double chord_te = std::max_element(contour.begin(), contour.end(),
                                           [](Point2 a, Point2 b) { return a.x < b.x; })->x;
  auto spacing = [&](Point2 p, double wall_distance) {
    double s = std::min(opt.max_spacing, opt.wall_spacing + opt.growth * wall_distance);
    if (p.x > chord_te) {
      const double wake = opt.wake_spacing + 0.5 * std::abs(p.y) + 0.04 * (p.x - chord_te);
      s = std::min(s, wake);
    }
    return s;
  };

  std::vector<Point2> nodes;
  detail::SpatialHash hash(opt.x, opt.y, opt.max_spacing);
  auto add = [&](Point2 p) {
    nodes.push_back(p);
    hash.insert(p);
  };

  const auto perimeter_len = loop2mesh::perimeter(contour.points());
  const auto wall_count = static_cast<std::size_t>(std::ceil(perimeter_len / opt.wall_spacing));
  const AirfoilLoop wall = resample_loop(contour, wall_count);
  for (const Point2& p : wall.vertices()) add(p);

  auto edge_nodes = [&](Point2 a, Point2 b) {
    const auto k = static_cast<std::size_t>(std::ceil(norm(b - a) / opt.max_spacing));
    for (std::size_t i = 0; i < k; ++i) add(a + (static_cast<double>(i) / static_cast<double>(k)) * (b - a));
  };
  const Point2 c00{opt.x.lo, opt.y.lo}, c10{opt.x.hi, opt.y.lo}, c11{opt.x.hi, opt.y.hi}, c01{opt.x.lo, opt.y.hi};
  edge_nodes(c00, c10);
  edge_nodes(c10, c11);
  edge_nodes(c11, c01);
  edge_nodes(c01, c00);

  Rng rng(opt.seed);
  for (std::size_t k = 0; k < opt.candidates; ++k) {
    const Point2 p{rng.uniform(opt.x.lo, opt.x.hi), rng.uniform(opt.y.lo, opt.y.hi)};
    if (point_in_polygon(p, body)) continue;
    const double d = detail::distance_to_contour(p, contour.points());
    const double s = spacing(p, d);
    if (d < 0.7 * s) continue;
    if (hash.any_within(p, 0.85 * s)) continue;
    add(p);
  }
  return PointSet(std::move(nodes));
}

inline void write_airfoil_dat(std::ostream& out, const std::string& name, const PointSet& contour) {
  out << name << '\n' << std::fixed << std::setprecision(7);
  for (const Point2& p : contour) out << ' ' << p.x << ' ' << p.y << '\n';
}

inline void write_msh_nodes(std::ostream& out, const PointSet& nodes) {
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << nodes.size() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < nodes.size(); ++i) out << i + 1 << ' ' << nodes[i].x << ' ' << nodes[i].y << " 0\n";
  out << "$EndNodes\n$Elements\n0\n$EndElements\n";
}

}  // namespace loop2mesh::synth
