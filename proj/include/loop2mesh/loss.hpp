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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "loop2mesh/error.hpp"
#include "loop2mesh/geometry.hpp"

namespace loop2mesh {

/// A loss value together with its gradient with respect to each predicted point.
struct PointLoss {
  double value = 0.0;
  std::vector<Point2> grad;
};

/// Sum-form Chamfer distance:
///   sum_p min_g |p - g|^2 + sum_g min_p |g - p|^2.
/// Nearest-neighbour ties go to the lowest index, and only the winner
/// receives gradient.
inline PointLoss chamfer(const PointSet& pred, const PointSet& truth) {
  const std::size_t np = pred.size();
  const std::size_t ng = truth.size();
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> row_min(np, inf);
  std::vector<std::size_t> row_arg(np, 0);
  std::vector<double> col_min(ng, inf);
  std::vector<std::size_t> col_arg(ng, 0);

  // One pass over the pairwise distance rows fills both directions.
  std::vector<double> row(ng);
  for (std::size_t i = 0; i < np; ++i) {
    const double px = pred[i].x;
    const double py = pred[i].y;
    for (std::size_t j = 0; j < ng; ++j) {
      const double dx = px - truth[j].x;
      const double dy = py - truth[j].y;
      row[j] = dx * dx + dy * dy;
    }
    double best = inf;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < ng; ++j) {
      if (row[j] < best) {
        best = row[j];
        best_j = j;
      }
    }
    row_min[i] = best;
    row_arg[i] = best_j;
    for (std::size_t j = 0; j < ng; ++j) {
      const bool closer = row[j] < col_min[j];
      col_min[j] = closer ? row[j] : col_min[j];
      col_arg[j] = closer ? i : col_arg[j];
    }
  }

  PointLoss out;
  out.grad.assign(np, Point2{});
  double forward_sum = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    forward_sum += row_min[i];
    out.grad[i] += 2.0 * (pred[i] - truth[row_arg[i]]);
  }
  double backward_sum = 0.0;
  for (std::size_t j = 0; j < ng; ++j) {
    backward_sum += col_min[j];
    out.grad[col_arg[j]] += 2.0 * (pred[col_arg[j]] - truth[j]);
  }
  out.value = forward_sum + backward_sum;
  return out;
}

/// Inverse of the mean pairwise distance, averaged over all N^2 ordered
/// pairs. Off-diagonal distances are sqrt(|pi - pj|^2 + epsilon); self-pairs
/// contribute exactly zero.
inline PointLoss repulsion(const PointSet& pred, double epsilon) {
  const std::size_t n = pred.size();
  if (n < 2) throw Error(ErrorKind::kInvalidInput, "repulsion needs at least 2 points");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kInvalidInput, "repulsion epsilon must be > 0");

  std::vector<Point2> acc(n);
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 pi = pred[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 diff = pi - pred[j];
      const double r = std::sqrt(squared_norm(diff) + epsilon);
      pair_sum += r;
      const Point2 c = (1.0 / r) * diff;
      acc[i] += c;
      acc[j] += -1.0 * c;
    }
  }
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const double mean = 2.0 * pair_sum / nn;

  PointLoss out;
  out.value = 1.0 / mean;
  // d(mean)/d(p_k) = (2 / N^2) * sum_j (p_k - p_j) / r_kj
  const double scale = -(out.value * out.value) * 2.0 / nn;
  out.grad.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.grad[k] = scale * acc[k];
  return out;
}

struct InteriorLoss : PointLoss {
  std::size_t inside_count = 0;
};

/// Mean over predicted points of the squared distance to the nearest loop
/// edge, counted only for points strictly inside the loop.
inline InteriorLoss interior_penalty(const PointSet& pred, const AirfoilLoop& loop) {
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  InteriorLoss out;
  out.grad.assign(pred.size(), Point2{});
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Point2 p = pred[i];
    if (!point_in_polygon(p, loop)) continue;
    ++out.inside_count;
    const EdgeProjection e = nearest_edge(p, loop);
    sum += e.distance * e.distance;
    out.grad[i] = (2.0 * inv_n) * (p - e.closest);
  }
  out.value = sum * inv_n;
  return out;
}

struct LossWeights {
  double chamfer = 1.0;
  double repulsion = 0.0;
  double interior = 0.0;
  double epsilon = 1e-8;

  void validate() const {
    if (!(chamfer >= 0.0) || !(repulsion >= 0.0) || !(interior >= 0.0)) {
      throw Error(ErrorKind::kConfig, "loss weights must be >= 0");
    }
    if (!(chamfer > 0.0 || repulsion > 0.0 || interior > 0.0)) {
      throw Error(ErrorKind::kConfig, "at least one loss weight must be > 0");
    }
    if (!(epsilon > 0.0)) throw Error(ErrorKind::kConfig, "loss epsilon must be > 0");
  }

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

struct LossBreakdown {
  double chamfer = 0.0;
  double repulsion = 0.0;
  double interior = 0.0;
  double total = 0.0;
  std::size_t inside_count = 0;
  std::vector<Point2> grad;
};

/// Weighted Chamfer + repulsion + interior penalty. Every component is
/// evaluated for logging; only weighted ones contribute gradient.
inline LossBreakdown composite(const PointSet& pred, const PointSet& truth, const AirfoilLoop& loop,
                               const LossWeights& w) {
  w.validate();
  if (pred.frame() != truth.frame() || pred.frame() != loop.frame()) {
    throw Error(ErrorKind::kFrameMismatch, "prediction, truth and loop must share one frame");
  }
  const PointLoss c = chamfer(pred, truth);
  const PointLoss r = (pred.size() >= 2 || w.repulsion > 0.0)
                          ? repulsion(pred, w.epsilon)
                          : PointLoss{0.0, std::vector<Point2>(pred.size())};
  const InteriorLoss in = interior_penalty(pred, loop);

  LossBreakdown out;
  out.chamfer = c.value;
  out.repulsion = r.value;
  out.interior = in.value;
  out.inside_count = in.inside_count;
  out.total = w.chamfer * c.value + w.repulsion * r.value + w.interior * in.value;
  out.grad.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    out.grad[i] = w.chamfer * c.grad[i] + w.repulsion * r.grad[i] + w.interior * in.grad[i];
  }
  return out;
}

}  // namespace loop2mesh
