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

#include <optional>
#include <ostream>
#include <string>

#include "loop2mesh/format.hpp"
#include "loop2mesh/geometry.hpp"

namespace loop2mesh {

/// Scatter figure: loop in red, prediction in blue, optional truth in green.
struct SvgScene {
  std::optional<AirfoilLoop> loop;
  std::optional<PointSet> prediction;
  std::optional<PointSet> truth;
  Interval view_x{-1.0, 2.0};
  Interval view_y{-1.0, 1.0};
  double width_px = 900.0;
  std::string title;
};

inline void write_svg(std::ostream& out, const SvgScene& scene) {
  const double w = scene.width_px;
  const double h = w * (scene.view_y.hi - scene.view_y.lo) / (scene.view_x.hi - scene.view_x.lo);
  auto sx = [&](double x) { return (x - scene.view_x.lo) / (scene.view_x.hi - scene.view_x.lo) * w; };
  auto sy = [&](double y) { return (scene.view_y.hi - y) / (scene.view_y.hi - scene.view_y.lo) * h; };
  auto num = [](double v) {
    // Two decimals are plenty at pixel scale and keep files small.
    return format_double(std::round(v * 100.0) / 100.0);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!scene.title.empty()) {
    out << "<text x=\"8\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">" << scene.title << "</text>\n";
  }
  auto points = [&](const PointSet& ps, const char* id, const char* color, double r) {
    out << "<g id=\"" << id << "\" fill=\"" << color << "\">\n";
    for (const Point2& p : ps) {
      if (!scene.view_x.contains(p.x) || !scene.view_y.contains(p.y)) continue;
      out << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y)) << "\" r=\"" << num(r) << "\"/>\n";
    }
    out << "</g>\n";
  };
  if (scene.truth) points(*scene.truth, "truth", "green", 1.5);
  if (scene.prediction) points(*scene.prediction, "prediction", "blue", 1.8);
  if (scene.loop) {
    out << "<g id=\"loop\">\n<polygon fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" points=\"";
    for (const Point2& p : scene.loop->vertices()) out << num(sx(p.x)) << ',' << num(sy(p.y)) << ' ';
    out << "\"/>\n";
    for (const Point2& p : scene.loop->vertices()) {
      out << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y)) << "\" r=\"2.5\" fill=\"red\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace loop2mesh
