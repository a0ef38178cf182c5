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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loop2mesh/error.hpp"
#include "loop2mesh/format.hpp"
#include "loop2mesh/geometry.hpp"

namespace loop2mesh {

enum class Region { kCenter, kWhole };

inline char region_code(Region r) { return r == Region::kCenter ? 'c' : 'w'; }

struct EvalWindow {
  Region region = Region::kWhole;
  Interval x;
  Interval y;
  std::size_t grid_nx = 100;
  std::size_t grid_ny = 100;

  void validate() const {
    if (!(x.valid() && y.valid() && x.lo < x.hi && y.lo < y.hi) || !std::isfinite(x.lo) || !std::isfinite(x.hi) ||
        !std::isfinite(y.lo) || !std::isfinite(y.hi)) {
      throw Error(ErrorKind::kInvalidInput, "evaluation window must have finite, non-empty ranges");
    }
    if (grid_nx < 2 || grid_ny < 2) throw Error(ErrorKind::kInvalidInput, "evaluation grid needs >= 2 cells per axis");
  }

  double cell_x(std::size_t i) const {
    return x.lo + (static_cast<double>(i) + 0.5) * (x.hi - x.lo) / static_cast<double>(grid_nx);
  }
  double cell_y(std::size_t j) const {
    return y.lo + (static_cast<double>(j) + 0.5) * (y.hi - y.lo) / static_cast<double>(grid_ny);
  }

  bool contains(Point2 p) const { return x.contains(p.x) && y.contains(p.y); }

  friend bool operator==(const EvalWindow& a, const EvalWindow& b) {
    return a.region == b.region && a.x.lo == b.x.lo && a.x.hi == b.x.hi && a.y.lo == b.y.lo && a.y.hi == b.y.hi &&
           a.grid_nx == b.grid_nx && a.grid_ny == b.grid_ny;
  }
};

/// Band around the unit chord.
inline EvalWindow center_window(std::size_t grid = 100) {
  return {Region::kCenter, {-0.5, 1.5}, {-0.4, 0.4}, grid, grid};
}

/// Bounding box of the reference set, padded by 5% of its extent per side.
inline EvalWindow whole_window(const PointSet& truth, std::size_t grid = 100) {
  double x0 = truth[0].x, x1 = x0, y0 = truth[0].y, y1 = y0;
  for (const Point2& p : truth) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double px = 0.05 * std::max(x1 - x0, 1e-12);
  const double py = 0.05 * std::max(y1 - y0, 1e-12);
  return {Region::kWhole, {x0 - px, x1 + px}, {y0 - py, y1 + py}, grid, grid};
}

/// Probability mass per grid cell; mass(i, j) is the cell at x index i, y index j.
struct DensityGrid {
  EvalWindow window;
  Eigen::MatrixXd mass;

  double total() const { return mass.sum(); }
};

/// Per-axis Gaussian kernel widths.
struct Bandwidth {
  double x = 0.0;
  double y = 0.0;
};

/// Scott's rule, sigma * n^(-1/6), on the points inside the window. Falls
/// back to the whole set when the window holds too few points or no spread.
inline Bandwidth scott_bandwidth(const PointSet& ps, const EvalWindow& window) {
  auto spread = [](const std::vector<Point2>& pts) {
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const Point2& p : pts) {
      mx += p.x;
      my += p.y;
    }
    mx /= n;
    my /= n;
    double vx = 0.0, vy = 0.0;
    for (const Point2& p : pts) {
      vx += (p.x - mx) * (p.x - mx);
      vy += (p.y - my) * (p.y - my);
    }
    return Point2{std::sqrt(vx / n), std::sqrt(vy / n)};
  };
  std::vector<Point2> inside;
  for (const Point2& p : ps) {
    if (window.contains(p)) inside.push_back(p);
  }
  std::vector<Point2> used = inside.size() >= 2 ? inside : std::vector<Point2>(ps.begin(), ps.end());
  Point2 sigma = used.size() >= 2 ? spread(used) : Point2{0.0, 0.0};
  if (!(sigma.x > 0.0 && sigma.y > 0.0) && used.size() != ps.size()) {
    used.assign(ps.begin(), ps.end());
    sigma = used.size() >= 2 ? spread(used) : Point2{0.0, 0.0};
  }
  const double factor = std::pow(static_cast<double>(std::max<std::size_t>(used.size(), 1)), -1.0 / 6.0);
  // Last resort for a single point or collapsed spread: one grid cell.
  const double cell_x = (window.x.hi - window.x.lo) / static_cast<double>(window.grid_nx);
  const double cell_y = (window.y.hi - window.y.lo) / static_cast<double>(window.grid_ny);
  return {sigma.x > 0.0 ? sigma.x * factor : cell_x, sigma.y > 0.0 ? sigma.y * factor : cell_y};
}

/// Gaussian kernel sum at every cell center, normalised to unit mass.
inline DensityGrid kde(const PointSet& ps, const EvalWindow& window, const Bandwidth& bw) {
  window.validate();
  if (!(bw.x > 0.0 && bw.y > 0.0)) throw Error(ErrorKind::kInvalidInput, "bandwidth must be > 0");
  const auto n = static_cast<Eigen::Index>(ps.size());
  const auto nx = static_cast<Eigen::Index>(window.grid_nx);
  const auto ny = static_cast<Eigen::Index>(window.grid_ny);

  // The kernel is separable: mass = Kx^T * Ky.
  Eigen::MatrixXd kx(n, nx), ky(n, ny);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Point2 p = ps[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double u = (window.cell_x(static_cast<std::size_t>(i)) - p.x) / bw.x;
      kx(k, i) = std::exp(-0.5 * u * u);
    }
    for (Eigen::Index j = 0; j < ny; ++j) {
      const double u = (window.cell_y(static_cast<std::size_t>(j)) - p.y) / bw.y;
      ky(k, j) = std::exp(-0.5 * u * u);
    }
  }
  DensityGrid grid{window, kx.transpose() * ky};
  const double total = grid.total();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorKind::kDegenerateData, "no kernel mass falls inside the evaluation window");
  }
  grid.mass /= total;
  return grid;
}

/// Isotropic kernel of the given width; nullopt selects Scott's rule.
inline DensityGrid kde(const PointSet& ps, const EvalWindow& window, std::optional<double> bandwidth = std::nullopt) {
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw Error(ErrorKind::kInvalidInput, "bandwidth must be > 0");
    return kde(ps, window, Bandwidth{*bandwidth, *bandwidth});
  }
  return kde(ps, window, scott_bandwidth(ps, window));
}

/// sum P log(P / (Q + epsilon)) in nats, with 0 log 0 = 0, clipped below at 0.
inline double kl_divergence(const DensityGrid& p, const DensityGrid& q, double epsilon = 1e-10) {
  if (!(p.window == q.window) || p.mass.rows() != q.mass.rows() || p.mass.cols() != q.mass.cols()) {
    throw Error(ErrorKind::kInvalidInput, "density grids are defined over different windows");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kInvalidInput, "KL epsilon must be > 0");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p.mass.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.mass.rows(); ++i) {
      const double pv = p.mass(i, j);
      if (pv > 0.0) sum += pv * std::log(pv / (q.mass(i, j) + epsilon));
    }
  }
  return std::max(sum, 0.0);
}

struct WindowKL {
  Region region = Region::kWhole;
  double kl = 0.0;
};

/// KL(pred || truth) per window. Both densities share the bandwidth fit on
/// the reference set.
inline std::vector<WindowKL> evaluate(const PointSet& pred, const PointSet& truth, std::span<const EvalWindow> windows,
                                      double epsilon = 1e-10) {
  std::vector<WindowKL> out;
  for (const EvalWindow& w : windows) {
    w.validate();
    const Bandwidth bw = scott_bandwidth(truth, w);
    out.push_back({w.region, kl_divergence(kde(pred, w, bw), kde(truth, w, bw), epsilon)});
  }
  return out;
}

/// Center and whole windows for a reference set.
inline std::vector<EvalWindow> default_windows(const PointSet& truth, std::size_t grid = 100) {
  return {center_window(grid), whole_window(truth, grid)};
}

// ---------------------------------------------------------------------------
// Reports

struct KLRow {
  double ratio = 0.0;
  Region region = Region::kCenter;
  std::size_t nodes = 0;
  std::optional<double> kl;  // empty when the cell could not be evaluated
};

/// ratio ascending, then center before whole, then nodes ascending.
inline void sort_kl_rows(std::vector<KLRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const KLRow& a, const KLRow& b) {
    if (a.ratio != b.ratio) return a.ratio < b.ratio;
    if (a.region != b.region) return a.region == Region::kCenter;
    return a.nodes < b.nodes;
  });
}

inline void write_kl_csv(std::ostream& out, const std::vector<KLRow>& rows) {
  out << "ratio,region,nodes,kl\n";
  for (const KLRow& r : rows) {
    out << format_double(r.ratio) << ',' << region_code(r.region) << ',' << r.nodes << ',';
    if (r.kl) out << format_double(*r.kl);
    out << '\n';
  }
}

/// Wide layout: one row per (ratio, region), one column per node count.
inline void write_kl_table(std::ostream& out, const std::vector<KLRow>& rows) {
  std::vector<double> ratios;
  std::vector<std::size_t> nodes;
  for (const KLRow& r : rows) {
    if (std::find(ratios.begin(), ratios.end(), r.ratio) == ratios.end()) ratios.push_back(r.ratio);
    if (std::find(nodes.begin(), nodes.end(), r.nodes) == nodes.end()) nodes.push_back(r.nodes);
  }
  out << "ratio,region";
  for (std::size_t n : nodes) out << ',' << n;
  out << '\n';
  for (double ratio : ratios) {
    for (Region region : {Region::kCenter, Region::kWhole}) {
      out << format_double(ratio) << ',' << region_code(region);
      for (std::size_t n : nodes) {
        out << ',';
        for (const KLRow& r : rows) {
          if (r.ratio == ratio && r.region == region && r.nodes == n && r.kl) out << format_double(*r.kl);
        }
      }
      out << '\n';
    }
  }
}

}  // namespace loop2mesh
