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

#include <gtest/gtest.h>

#include <cmath>

#include "loop2mesh/loss.hpp"
#include "loop2mesh/net.hpp"
#include "test_support.hpp"

namespace loop2mesh {
namespace {

TEST(InitParams, XavierBoundsZeroBiasesAndShapes) {
  const NetworkDims d{35, 16, 24, 30};
  const NetworkParams p = init_params(42, d);
  EXPECT_EQ(p.w1.rows(), 16);
  EXPECT_EQ(p.w1.cols(), 70);
  EXPECT_EQ(p.w2.rows(), 24);
  EXPECT_EQ(p.w2.cols(), 16);
  EXPECT_EQ(p.w3.rows(), 60);
  EXPECT_EQ(p.w3.cols(), 24);
  // sqrt(6 / (fan_in + fan_out)) written out per layer.
  EXPECT_LE(p.w1.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 86.0));
  EXPECT_LE(p.w2.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 40.0));
  EXPECT_LE(p.w3.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 84.0));
  // The draw should actually use the range, not a sliver of it.
  EXPECT_GT(p.w1.cwiseAbs().maxCoeff(), 0.9 * std::sqrt(6.0 / 86.0));
  EXPECT_EQ(p.b1.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(p.b2.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(p.b3.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(p.parameter_count(), 16u * 70 + 16 + 24u * 16 + 24 + 60u * 24 + 60);
}

TEST(InitParams, XavierBoundValue) { EXPECT_DOUBLE_EQ(xavier_bound(2, 4), 1.0); }

TEST(InitParams, SeedDeterminism) {
  const NetworkDims d{5, 8, 8, 7};
  EXPECT_EQ(init_params(1, d), init_params(1, d));
  EXPECT_FALSE(init_params(1, d) == init_params(2, d));
}

TEST(Forward, ZeroParamsGiveOrigin) {
  const NetworkDims d{4, 6, 5, 9};
  NetworkParams p;
  static_cast<LayerTensors&>(p) = LayerTensors::zeros(d);
  p.dims = d;
  const auto out = forward(p, AirfoilLoop({{0, 0}, {1, 0}, {1, 1}, {0, 1}})).prediction;
  ASSERT_EQ(out.size(), 9u);
  for (const Point2& q : out) EXPECT_EQ(q, (Point2{0, 0}));
}

TEST(Forward, BiasOnlyMap) {
  const NetworkDims d{3, 4, 4, 3};
  NetworkParams p;
  static_cast<LayerTensors&>(p) = LayerTensors::zeros(d);
  p.dims = d;
  p.b3 << 0.5, -1, 0.5, -1, 0.5, -1;
  const auto out = forward(p, AirfoilLoop({{0, 0}, {1, 0}, {0, 1}})).prediction;
  for (const Point2& q : out) EXPECT_EQ(q, (Point2{0.5, -1}));
}

TEST(Forward, ClampAppliesToYOnly) {
  const NetworkDims d{3, 4, 4, 2};
  NetworkParams p;
  static_cast<LayerTensors&>(p) = LayerTensors::zeros(d);
  p.dims = d;
  p.b3 << 3.0, 2.5, -4.0, -0.25;
  const auto fr = forward(p, AirfoilLoop({{0, 0}, {1, 0}, {0, 1}}), OutputClamp{{-1, 1}});
  EXPECT_EQ(fr.prediction[0], (Point2{3.0, 1.0}));
  EXPECT_EQ(fr.prediction[1], (Point2{-4.0, -0.25}));
  EXPECT_EQ(fr.trace.gate(1), 0.0);
  EXPECT_EQ(fr.trace.gate(3), 1.0);
}

TEST(Forward, TraceHoldsReluActivations) {
  const auto prob = testing::small_problem(3);
  const auto t = forward(prob.params, prob.loop).trace;
  for (Eigen::Index i = 0; i < t.z1.size(); ++i) EXPECT_EQ(t.a1(i), std::max(t.z1(i), 0.0));
  for (Eigen::Index i = 0; i < t.z2.size(); ++i) EXPECT_EQ(t.a2(i), std::max(t.z2(i), 0.0));
  EXPECT_EQ(t.output.size(), 10);
}

TEST(Forward, WrongLoopSizeIsShapeError) {
  const NetworkParams p = init_params(0, NetworkDims{4, 3, 3, 2});
  try {
    forward(p, AirfoilLoop({{0, 0}, {1, 0}, {0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(Backward, ZeroCotangentGivesZeroGrads) {
  const auto prob = testing::small_problem(4);
  const auto t = forward(prob.params, prob.loop).trace;
  const ParamGrads g = backward(prob.params, t, Vector::Zero(10));
  g.for_each([](std::span<const double> s) {
    for (double v : s) EXPECT_EQ(v, 0.0);
  });
}

TEST(Backward, WrongCotangentSizeIsShapeError) {
  const auto prob = testing::small_problem(4);
  const auto t = forward(prob.params, prob.loop).trace;
  try {
    backward(prob.params, t, Vector::Zero(9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(Backward, MatchesFiniteDifferencesOnCompositeLoss) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto prob = testing::small_problem(seed);
    const LossWeights w{1.0, 2.0, 10.0, 1e-8};
    const auto r = testing::check_network_gradients(prob.params, prob.loop, prob.truth, w, std::nullopt);
    EXPECT_EQ(r.passed, r.checked) << "seed " << seed << " worst " << r.worst;
  }
}

TEST(Backward, ClippedOutputsPassNoGradient) {
  const auto prob = testing::small_problem(8);
  const OutputClamp clamp{{-0.05, 0.05}};
  const auto fr = forward(prob.params, prob.loop, clamp);
  Vector d = Vector::Zero(10);
  for (Eigen::Index i = 1; i < 10; i += 2) {
    if (fr.trace.gate(i) == 0.0) d(i) = 1.0;
  }
  ASSERT_GT(d.sum(), 0.0) << "expected at least one clipped coordinate";
  const ParamGrads g = backward(prob.params, fr.trace, d);
  g.for_each([](std::span<const double> s) {
    for (double v : s) EXPECT_EQ(v, 0.0);
  });
}

TEST(Flatten, RoundTrip) {
  const std::vector<Point2> pts{{1, 2}, {3, 4}, {-5, 6}};
  const Vector v = flatten(pts);
  EXPECT_EQ(v(0), 1.0);
  EXPECT_EQ(v(3), 4.0);
  EXPECT_EQ(unflatten(v), pts);
}

}  // namespace
}  // namespace loop2mesh
