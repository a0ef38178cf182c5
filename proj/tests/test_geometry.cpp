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
#include <random>

#include "loop2mesh/geometry.hpp"
#include "loop2mesh/synth.hpp"
#include "test_support.hpp"

namespace loop2mesh {
namespace {

using testing::unit_square;
using testing::winding_number;

TEST(PointSet, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(PointSet({}), Error);
  EXPECT_THROW(PointSet({{0, std::nan("")}}), Error);
  EXPECT_THROW(PointSet({{INFINITY, 0}}), Error);
  EXPECT_NO_THROW(PointSet({{1, 2}}));
}

TEST(AirfoilLoop, RejectsDegenerateInput) {
  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  EXPECT_EQ(kind([] { AirfoilLoop({{0, 0}, {1, 0}}); }), ErrorKind::kInvalidGeometry);
  EXPECT_EQ(kind([] { AirfoilLoop({{0, 0}, {1, 0}, {2, 0}}); }), ErrorKind::kInvalidGeometry);
  // Bow tie.
  EXPECT_EQ(kind([] { AirfoilLoop({{0, 0}, {1, 1}, {1, 0}, {0, 1}}); }), ErrorKind::kInvalidGeometry);
}

TEST(PointInPolygon, UnitSquare) {
  const AirfoilLoop sq = unit_square();
  EXPECT_TRUE(point_in_polygon({0.5, 0.5}, sq));
  EXPECT_FALSE(point_in_polygon({2.0, 2.0}, sq));
  // Boundary points count as outside.
  EXPECT_FALSE(point_in_polygon({0.5, 0.0}, sq));
  EXPECT_FALSE(point_in_polygon({1.0, 0.5}, sq));
  EXPECT_FALSE(point_in_polygon({0.0, 0.0}, sq));
}

TEST(PointInPolygon, NacaCamberRegionMatchesWindingNumber) {
  const PointSet contour = synth::naca4("2220");
  const AirfoilLoop loop = resample_loop(contour, 35);
  const Point2 p{0.5, 0.0};
  EXPECT_EQ(winding_number(p, loop.vertices()) != 0, true);
  EXPECT_TRUE(point_in_polygon(p, loop));
}

TEST(PointInPolygon, AgreesWithWindingNumberOnRandomPolygons) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> radius(0.3, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    // Star-shaped polygon around the origin is always simple.
    const int n = 5 + trial % 20;
    std::vector<Point2> v;
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * M_PI * k / n;
      const double r = radius(gen);
      v.push_back({r * std::cos(a), r * std::sin(a)});
    }
    const AirfoilLoop loop(v);
    for (const Point2& p : testing::random_points(gen, 200, -1.1, 1.1)) {
      EXPECT_EQ(point_in_polygon(p, loop), winding_number(p, loop.vertices()) != 0);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 50 * 200);
}

TEST(ResampleLoop, SquareToFourKeepsCorners) {
  const AirfoilLoop out = resample_loop(PointSet({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 4);
  const std::vector<Point2> want{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  ASSERT_EQ(out.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(out[i].x, want[i].x, 1e-12);
    EXPECT_NEAR(out[i].y, want[i].y, 1e-12);
  }
}

TEST(ResampleLoop, SquareToEightAlternatesCornersAndMidpoints) {
  const AirfoilLoop out = resample_loop(PointSet({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 8);
  // Arc length s = 0.5 k along the perimeter starting at (0,0).
  auto at = [](double s) -> Point2 {
    if (s <= 1) return {s, 0};
    if (s <= 2) return {1, s - 1};
    if (s <= 3) return {3 - s, 1};
    return {0, 4 - s};
  };
  ASSERT_EQ(out.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) {
    const Point2 w = at(0.5 * static_cast<double>(k));
    EXPECT_NEAR(out[k].x, w.x, 1e-12) << k;
    EXPECT_NEAR(out[k].y, w.y, 1e-12) << k;
  }
}

TEST(ResampleLoop, NacaPerimeterWithinTwoPercent) {
  const PointSet raw = synth::naca4("2220", 60);
  const AirfoilLoop loop = resample_loop(raw, 35);
  EXPECT_EQ(loop.size(), 35u);
  const auto distinct = distinct_contour_points(raw.points());
  const double p_in = perimeter(distinct);
  EXPECT_NEAR(loop.perimeter() / p_in, 1.0, 0.02);
}

TEST(ResampleLoop, GapsAreEqualAlongAPolygonalContour) {
  // Dense resampling of a convex polygon: all output points lie on the
  // input edges, so arc gaps along the input polyline must be equal.
  const std::vector<Point2> poly{{0, 0}, {3, 0}, {4, 2}, {1, 3}, {-1, 1}};
  const std::size_t target = 97;
  const AirfoilLoop out = resample_loop(PointSet(poly), target);
  auto arc = [&](Point2 p) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
      const double len = norm(b - a);
      if (std::abs(cross(b - a, p - a)) < 1e-9 * len && dot(p - a, b - a) >= -1e-12 && dot(p - b, a - b) >= -1e-12) {
        return s + norm(p - a);
      }
      s += len;
    }
    return -1.0;
  };
  const double total = perimeter(poly);
  std::vector<double> gaps;
  for (std::size_t k = 0; k < target; ++k) {
    const double s0 = arc(out[k]);
    double s1 = arc(out[(k + 1) % target]);
    ASSERT_GE(s0, 0.0);
    ASSERT_GE(s1, 0.0);
    if (s1 <= s0) s1 += total;
    gaps.push_back(s1 - s0);
  }
  const auto [lo, hi] = std::minmax_element(gaps.begin(), gaps.end());
  EXPECT_LT((*hi - *lo) / (total / target), 1e-9);
}

TEST(ResampleLoop, TooFewDistinctPointsIsInvalidGeometry) {
  try {
    resample_loop(PointSet({{0, 0}, {1, 0}, {0, 0}, {1, 0}}), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidGeometry);
  }
}

TEST(Standardize, TwoPointExample) {
  const auto t = fit_standardize(PointSet({{0, 0}, {2, 2}}));
  EXPECT_DOUBLE_EQ(t.mean_x, 1.0);
  EXPECT_DOUBLE_EQ(t.mean_y, 1.0);
  EXPECT_DOUBLE_EQ(t.scale_x, 1.0);
  EXPECT_DOUBLE_EQ(t.scale_y, 1.0);
}

TEST(Standardize, ZeroVarianceIsDegenerate) {
  try {
    fit_standardize(PointSet({{0, 1}, {2, 1}, {3, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateData);
  }
}

TEST(Standardize, AlreadyStandardisedGivesIdentityLikeTransform) {
  std::mt19937_64 gen(3);
  const PointSet ps(testing::random_points(gen, 500, -5, 7));
  const PointSet s = apply_standardize(fit_standardize(ps), ps);
  const auto t2 = fit_standardize(PointSet(std::vector<Point2>(s.begin(), s.end())));
  EXPECT_NEAR(t2.mean_x, 0.0, 1e-12);
  EXPECT_NEAR(t2.mean_y, 0.0, 1e-12);
  EXPECT_NEAR(t2.scale_x, 1.0, 1e-12);
  EXPECT_NEAR(t2.scale_y, 1.0, 1e-12);
}

TEST(Standardize, RoundTripOnRandomSets) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const PointSet ps(testing::random_points(gen, 1 + 2 + trial, -100.0 * trial, 3.0 + trial));
    const auto t = fit_standardize(ps);
    const PointSet back = invert_standardize(t, apply_standardize(t, ps));
    EXPECT_EQ(back.frame(), Frame::kOriginal);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      EXPECT_LE(std::abs(back[i].x - ps[i].x), 1e-12 * std::max(1.0, std::abs(ps[i].x)));
      EXPECT_LE(std::abs(back[i].y - ps[i].y), 1e-12 * std::max(1.0, std::abs(ps[i].y)));
    }
  }
}

TEST(Standardize, IdentityTransformAndBandMapping) {
  const PointSet ps({{0.3, -0.7}, {2, 5}});
  const PointSet s = apply_standardize(StandardizeTransform{}, ps);
  EXPECT_EQ(s.frame(), Frame::kStandardised);
  EXPECT_EQ(s[0].x, 0.3);
  EXPECT_EQ(s[1].y, 5.0);

  const StandardizeTransform t{0.0, 0.0, 1.0, 0.4};
  const PointSet band = invert_standardize(t, PointSet({{0, -1}, {0, 1}}, Frame::kStandardised));
  EXPECT_DOUBLE_EQ(band[0].y, -0.4);
  EXPECT_DOUBLE_EQ(band[1].y, 0.4);
}

TEST(Standardize, FrameMismatchErrors) {
  const StandardizeTransform t;
  const PointSet orig({{0, 0}});
  const PointSet stand({{0, 0}}, Frame::kStandardised);
  for (auto fn : std::vector<std::function<void()>>{[&] { apply_standardize(t, stand); },
                                                     [&] { invert_standardize(t, orig); },
                                                     [&] { invert_standardize(t, unit_square()); }}) {
    try {
      fn();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kFrameMismatch);
    }
  }
}

TEST(ClampPoints, Examples) {
  const Interval any = Interval::unbounded();
  const PointSet out = clamp_points(PointSet({{0.5, 2.3}, {0.1, -0.2}}), any, {-1, 1});
  EXPECT_EQ(out[0].x, 0.5);
  EXPECT_EQ(out[0].y, 1.0);
  EXPECT_EQ(out[1].x, 0.1);
  EXPECT_EQ(out[1].y, -0.2);
}

TEST(ClampPoints, WideBandIsConfinedAndIdempotent) {
  std::mt19937_64 gen(9);
  const PointSet ps(testing::random_points(gen, 1000, -2.5, 2.5));
  const Interval y{-1, 1};
  const PointSet once = clamp_points(ps, Interval::unbounded(), y);
  for (const Point2& p : once) EXPECT_LE(std::abs(p.y), 1.0);
  EXPECT_EQ(clamp_points(once, Interval::unbounded(), y), once);
}

TEST(MeanPairwiseDistance, SmallCases) {
  const std::vector<Point2> pts{{0, 0}, {3, 4}, {0, 4}};
  EXPECT_DOUBLE_EQ(mean_pairwise_distance(pts), (5.0 + 4.0 + 3.0) / 3.0);
}

TEST(NearestEdge, DistanceToSquareEdges) {
  const auto e = nearest_edge({0.5, 0.1}, unit_square());
  EXPECT_NEAR(e.distance, 0.1, 1e-15);
  EXPECT_EQ(e.edge, 0u);
}

}  // namespace
}  // namespace loop2mesh
