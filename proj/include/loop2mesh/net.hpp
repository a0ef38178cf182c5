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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loop2mesh/error.hpp"
#include "loop2mesh/geometry.hpp"
#include "loop2mesh/rng.hpp"

namespace loop2mesh {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Layer sizes of the generator: 2L -> h1 -> h2 -> 2N.
struct NetworkDims {
  std::size_t loop_size = 35;
  std::size_t hidden1 = 256;
  std::size_t hidden2 = 512;
  std::size_t nodes = 400;

  std::size_t input_size() const { return 2 * loop_size; }
  std::size_t output_size() const { return 2 * nodes; }

  friend bool operator==(const NetworkDims&, const NetworkDims&) = default;
};

/// Weights and biases of the three fully connected layers. Gradients and
/// optimizer moments reuse the same layout.
struct LayerTensors {
  Matrix w1, w2, w3;
  Vector b1, b2, b3;

  static LayerTensors zeros(const NetworkDims& d) {
    LayerTensors t;
    const auto l2 = static_cast<Eigen::Index>(d.input_size());
    const auto h1 = static_cast<Eigen::Index>(d.hidden1);
    const auto h2 = static_cast<Eigen::Index>(d.hidden2);
    const auto n2 = static_cast<Eigen::Index>(d.output_size());
    t.w1 = Matrix::Zero(h1, l2);
    t.b1 = Vector::Zero(h1);
    t.w2 = Matrix::Zero(h2, h1);
    t.b2 = Vector::Zero(h2);
    t.w3 = Matrix::Zero(n2, h2);
    t.b3 = Vector::Zero(n2);
    return t;
  }

  /// Visits the six tensors as flat spans in a fixed order (W1 b1 W2 b2 W3 b3).
  template <typename Fn>
  void for_each(Fn&& fn) {
    fn(std::span<double>(w1.data(), static_cast<std::size_t>(w1.size())));
    fn(std::span<double>(b1.data(), static_cast<std::size_t>(b1.size())));
    fn(std::span<double>(w2.data(), static_cast<std::size_t>(w2.size())));
    fn(std::span<double>(b2.data(), static_cast<std::size_t>(b2.size())));
    fn(std::span<double>(w3.data(), static_cast<std::size_t>(w3.size())));
    fn(std::span<double>(b3.data(), static_cast<std::size_t>(b3.size())));
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    fn(std::span<const double>(w1.data(), static_cast<std::size_t>(w1.size())));
    fn(std::span<const double>(b1.data(), static_cast<std::size_t>(b1.size())));
    fn(std::span<const double>(w2.data(), static_cast<std::size_t>(w2.size())));
    fn(std::span<const double>(b2.data(), static_cast<std::size_t>(b2.size())));
    fn(std::span<const double>(w3.data(), static_cast<std::size_t>(w3.size())));
    fn(std::span<const double>(b3.data(), static_cast<std::size_t>(b3.size())));
  }

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size());
  }

  bool same_shape(const LayerTensors& o) const {
    return w1.rows() == o.w1.rows() && w1.cols() == o.w1.cols() && w2.rows() == o.w2.rows() &&
           w2.cols() == o.w2.cols() && w3.rows() == o.w3.rows() && w3.cols() == o.w3.cols() &&
           b1.size() == o.b1.size() && b2.size() == o.b2.size() && b3.size() == o.b3.size();
  }

  friend bool operator==(const LayerTensors& a, const LayerTensors& b) {
    return a.same_shape(b) && a.w1 == b.w1 && a.w2 == b.w2 && a.w3 == b.w3 && a.b1 == b.b1 &&
           a.b2 == b.b2 && a.b3 == b.b3;
  }
};

struct NetworkParams : LayerTensors {
  NetworkDims dims;
};

/// d(loss)/d(parameter), same shapes as NetworkParams.
struct ParamGrads : LayerTensors {};

struct ForwardTrace {
  Vector input;
  Vector z1, a1;
  Vector z2, a2;
  Vector raw_output;
  Vector output;
  /// 1 where the output coordinate passed through the clamp, 0 where it was clipped.
  Vector gate;
};

/// Optional hard clip applied to the y coordinate of every predicted point.
struct OutputClamp {
  Interval y;
};

inline double xavier_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

/// Xavier-uniform weights, zero biases. Fill order is W1, W2, W3, row-major.
inline NetworkParams init_params(std::uint64_t seed, const NetworkDims& dims) {
  if (dims.loop_size < 1 || dims.hidden1 < 1 || dims.hidden2 < 1 || dims.nodes < 1) {
    throw Error(ErrorKind::kShape, "network dimensions must all be >= 1");
  }
  NetworkParams p;
  static_cast<LayerTensors&>(p) = LayerTensors::zeros(dims);
  p.dims = dims;
  Rng rng(seed);
  auto fill = [&](Matrix& w) {
    const double a = xavier_bound(static_cast<std::size_t>(w.cols()), static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = a * (2.0 * rng.uniform() - 1.0);
  };
  fill(p.w1);
  fill(p.w2);
  fill(p.w3);
  return p;
}

inline Vector flatten(std::span<const Point2> pts) {
  Vector v(static_cast<Eigen::Index>(2 * pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    v[static_cast<Eigen::Index>(2 * i)] = pts[i].x;
    v[static_cast<Eigen::Index>(2 * i + 1)] = pts[i].y;
  }
  return v;
}

inline std::vector<Point2> unflatten(const Vector& v) {
  std::vector<Point2> pts(static_cast<std::size_t>(v.size() / 2));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i] = {v[static_cast<Eigen::Index>(2 * i)], v[static_cast<Eigen::Index>(2 * i + 1)]};
  }
  return pts;
}

inline Vector relu(const Vector& z) { return z.cwiseMax(0.0); }

inline ForwardTrace forward_trace(const NetworkParams& params, std::span<const Point2> loop,
                                  const std::optional<OutputClamp>& clamp = std::nullopt) {
  if (loop.size() != params.dims.loop_size) {
    throw Error(ErrorKind::kShape, "network expects " + std::to_string(params.dims.loop_size) +
                                       " loop points, got " + std::to_string(loop.size()));
  }
  ForwardTrace t;
  t.input = flatten(loop);
  t.z1 = params.w1 * t.input + params.b1;
  t.a1 = relu(t.z1);
  t.z2 = params.w2 * t.a1 + params.b2;
  t.a2 = relu(t.z2);
  t.raw_output = params.w3 * t.a2 + params.b3;
  t.output = t.raw_output;
  t.gate = Vector::Ones(t.output.size());
  if (clamp) {
    for (Eigen::Index i = 1; i < t.output.size(); i += 2) {
      const double v = t.raw_output[i];
      if (!clamp->y.contains(v)) {
        t.output[i] = clamp->y.clamp(v);
        t.gate[i] = 0.0;
      }
    }
  }
  return t;
}

struct ForwardResult {
  PointSet prediction;
  ForwardTrace trace;
};

/// Maps a loop to N predicted points. The prediction carries the loop's frame.
inline ForwardResult forward(const NetworkParams& params, const AirfoilLoop& loop,
                             const std::optional<OutputClamp>& clamp = std::nullopt) {
  ForwardTrace trace = forward_trace(params, loop.vertices(), clamp);
  PointSet prediction(unflatten(trace.output), loop.frame());
  return {std::move(prediction), std::move(trace)};
}

/// Adds one sample's exact gradients into `grads`, which must already have
/// the network's shapes. The ReLU derivative is 0 at z <= 0 and clipped
/// outputs pass no gradient.
inline void accumulate_backward(const NetworkParams& params, const ForwardTrace& trace, const Vector& d_output,
                                ParamGrads& grads) {
  if (d_output.size() != static_cast<Eigen::Index>(params.dims.output_size()) ||
      trace.output.size() != d_output.size() || trace.input.size() != params.w1.cols()) {
    throw Error(ErrorKind::kShape, "backward: cotangent/trace shape does not match the network");
  }
  if (!params.same_shape(grads)) throw Error(ErrorKind::kShape, "backward: gradient buffers have the wrong shape");
  const Vector d3 = d_output.cwiseProduct(trace.gate);
  grads.w3.noalias() += d3 * trace.a2.transpose();
  grads.b3 += d3;
  const Vector d2 = (params.w3.transpose() * d3).cwiseProduct((trace.z2.array() > 0.0).cast<double>().matrix());
  grads.w2.noalias() += d2 * trace.a1.transpose();
  grads.b2 += d2;
  const Vector d1 = (params.w2.transpose() * d2).cwiseProduct((trace.z1.array() > 0.0).cast<double>().matrix());
  grads.w1.noalias() += d1 * trace.input.transpose();
  grads.b1 += d1;
}

/// Exact gradients for one sample.
inline ParamGrads backward(const NetworkParams& params, const ForwardTrace& trace, const Vector& d_output) {
  ParamGrads g;
  static_cast<LayerTensors&>(g) = LayerTensors::zeros(params.dims);
  accumulate_backward(params, trace, d_output, g);
  return g;
}

}  // namespace loop2mesh
