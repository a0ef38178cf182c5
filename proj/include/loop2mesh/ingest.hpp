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
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "loop2mesh/error.hpp"
#include "loop2mesh/geometry.hpp"
#include "loop2mesh/rng.hpp"

namespace loop2mesh {

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

inline std::optional<double> parse_double(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

inline std::optional<long long> parse_integer(std::string_view token) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

inline bool is_blank(std::string_view line) { return split_tokens(line).empty(); }

inline Error parse_error(std::size_t line_no, const std::string& what) {
  return Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Airfoil contour (.dat)

/// Reads a Selig-style contour: an optional name line followed by one
/// "x y" pair per line. Blank lines are ignored anywhere.
inline PointSet parse_airfoil_dat(std::string_view text) {
  std::vector<Point2> points;
  bool seen_content = false;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto tokens = detail::split_tokens(lines[i]);
    if (tokens.empty()) continue;
    const bool first = !seen_content;
    seen_content = true;
    std::optional<double> x, y;
    if (tokens.size() == 2) {
      x = detail::parse_double(tokens[0]);
      y = detail::parse_double(tokens[1]);
    }
    if (x && y) {
      points.push_back({*x, *y});
    } else if (!first) {
      throw detail::parse_error(i + 1, "expected two numeric values, got '" + std::string(lines[i]) + "'");
    }
    // A non-numeric first line is the airfoil name.
  }
  if (points.size() < 3) {
    throw Error(ErrorKind::kInvalidGeometry,
                "airfoil contour has " + std::to_string(points.size()) + " points, need at least 3");
  }
  return PointSet(std::move(points));
}

/// Leading edge to x = 0, chord to unit length, uniform scale on both axes.
struct ChordTransform {
  double x_offset = 0.0;
  double chord = 1.0;

  Point2 apply(Point2 p) const { return {(p.x - x_offset) / chord, p.y / chord}; }

  PointSet apply(const PointSet& ps) const {
    return PointSet(detail::map_points(ps.points(), [&](Point2 p) { return apply(p); }), ps.frame());
  }
};

inline ChordTransform fit_chord(const PointSet& contour) {
  const auto [lo, hi] = std::minmax_element(contour.begin(), contour.end(),
                                            [](Point2 a, Point2 b) { return a.x < b.x; });
  const double chord = hi->x - lo->x;
  if (!(chord > 0.0)) throw Error(ErrorKind::kDegenerateData, "contour has zero chord length");
  return {lo->x, chord};
}

inline PointSet normalise_chord(const PointSet& ps) { return fit_chord(ps).apply(ps); }

// ---------------------------------------------------------------------------
// Gmsh ASCII v2 nodes (.msh)

/// Extracts (x, y) for every node of the $Nodes block, ordered by node id.
/// Element blocks and anything else are skipped.
inline PointSet parse_msh_nodes(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const auto tokens = detail::split_tokens(lines[i]);
    if (tokens.size() == 1 && tokens[0] == "$MeshFormat") {
      std::size_t k = i + 1;
      while (k < lines.size() && detail::is_blank(lines[k])) ++k;
      const auto fmt = k < lines.size() ? detail::split_tokens(lines[k]) : std::vector<std::string_view>{};
      const auto version = fmt.empty() ? std::nullopt : detail::parse_double(fmt[0]);
      if (!version || *version < 2.0 || *version >= 3.0) {
        throw detail::parse_error(k + 1, "unsupported mesh format, only ASCII v2 is read");
      }
      if (fmt.size() >= 2 && fmt[1] != "0") {
        throw detail::parse_error(k + 1, "binary mesh files are not supported");
      }
    }
    if (tokens.size() == 1 && tokens[0] == "$Nodes") break;
  }
  if (i == lines.size()) throw Error(ErrorKind::kParse, "no $Nodes block found");

  std::size_t count_at = i + 1;
  while (count_at < lines.size() && detail::is_blank(lines[count_at])) ++count_at;
  std::size_t line_no = count_at + 1;
  if (count_at >= lines.size()) throw detail::parse_error(line_no, "missing node count");
  const auto count_tokens = detail::split_tokens(lines[count_at]);
  const auto declared = count_tokens.size() == 1 ? detail::parse_integer(count_tokens[0]) : std::nullopt;
  if (!declared || *declared < 0) throw detail::parse_error(line_no, "invalid node count");

  std::vector<std::pair<long long, Point2>> nodes;
  bool closed = false;
  for (std::size_t k = count_at + 1; k < lines.size(); ++k) {
    line_no = k + 1;
    const auto tokens = detail::split_tokens(lines[k]);
    if (tokens.empty()) continue;
    if (tokens.size() == 1 && tokens[0] == "$EndNodes") {
      closed = true;
      break;
    }
    if (tokens.size() != 4) throw detail::parse_error(line_no, "expected 'id x y z'");
    const auto id = detail::parse_integer(tokens[0]);
    const auto x = detail::parse_double(tokens[1]);
    const auto y = detail::parse_double(tokens[2]);
    const auto z = detail::parse_double(tokens[3]);
    if (!id || !x || !y || !z) throw detail::parse_error(line_no, "malformed node line");
    nodes.push_back({*id, {*x, *y}});
  }
  if (!closed) throw Error(ErrorKind::kParse, "$Nodes block is not terminated by $EndNodes");
  if (static_cast<long long>(nodes.size()) != *declared) {
    throw Error(ErrorKind::kParse, "node count mismatch: header declares " + std::to_string(*declared) +
                                       ", block has " + std::to_string(nodes.size()));
  }
  if (nodes.empty()) throw Error(ErrorKind::kParse, "$Nodes block is empty");

  std::stable_sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    if (nodes[k].first == nodes[k - 1].first) {
      throw Error(ErrorKind::kParse, "duplicate node id " + std::to_string(nodes[k].first));
    }
  }
  std::vector<Point2> points;
  points.reserve(nodes.size());
  for (const auto& [id, p] : nodes) points.push_back(p);
  return PointSet(std::move(points));
}

// ---------------------------------------------------------------------------
// Fixed-size targets

/// Brings a node set to exactly m points. Larger sets are subsampled without
/// replacement (kept in original order); smaller sets keep every original and
/// are topped up by sampling with replacement.
inline PointSet upsample_target(const PointSet& ps, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw Error(ErrorKind::kInvalidInput, "target count must be >= 1");
  Rng rng(seed);
  const std::size_t n = ps.size();
  std::vector<Point2> out;
  out.reserve(m);
  if (n >= m) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(n - k));
      std::swap(idx[k], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    for (std::size_t k : idx) out.push_back(ps[k]);
  } else {
    out.assign(ps.begin(), ps.end());
    while (out.size() < m) out.push_back(ps[static_cast<std::size_t>(rng.below(n))]);
  }
  return PointSet(std::move(out), ps.frame());
}

// ---------------------------------------------------------------------------
// Dataset assembly

struct MeshSample {
  std::string name;
  AirfoilLoop loop;
  PointSet target;
  std::size_t dropped_interior = 0;
};

struct Dataset {
  std::vector<MeshSample> samples;
  std::size_t upsample_count = 1500;
  std::size_t loop_size = 35;
};

struct DatasetConfig {
  std::size_t loop_size = 35;
  std::size_t upsample_count = 1500;
  std::uint64_t seed = 0;
};

struct SamplePaths {
  std::string name;
  std::filesystem::path dat;
  std::filesystem::path msh;
};

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs one contour/mesh pair through the preprocessing chain.
inline MeshSample make_sample(std::string name, const PointSet& contour, const PointSet& mesh,
                              const DatasetConfig& config, std::uint64_t stream) {
  const ChordTransform chord = fit_chord(contour);
  AirfoilLoop loop = resample_loop(chord.apply(contour), config.loop_size);
  PointSet target = upsample_target(chord.apply(mesh), config.upsample_count,
                                    derive_seed(config.seed, 2 * stream));

  std::vector<Point2> kept;
  kept.reserve(target.size());
  for (const Point2& p : target) {
    if (!point_in_polygon(p, loop)) kept.push_back(p);
  }
  const std::size_t dropped = target.size() - kept.size();
  if (dropped > 0) {
    if (kept.empty()) {
      throw Error(ErrorKind::kDegenerateData, "sample '" + name + "': every mesh node lies inside the airfoil");
    }
    std::clog << "warning: sample '" << name << "': dropped " << dropped
              << " target nodes inside the airfoil loop\n";
    target = upsample_target(PointSet(std::move(kept)), config.upsample_count,
                             derive_seed(config.seed, 2 * stream + 1));
  }
  return MeshSample{std::move(name), std::move(loop), std::move(target), dropped};
}

inline Dataset build_dataset(std::span<const SamplePaths> pairs, const DatasetConfig& config) {
  if (pairs.empty()) throw Error(ErrorKind::kInvalidInput, "dataset has no samples");
  Dataset ds;
  ds.loop_size = config.loop_size;
  ds.upsample_count = config.upsample_count;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const SamplePaths& sp = pairs[i];
    auto with_path = [](const std::filesystem::path& path, auto&& fn) {
      try {
        return fn();
      } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
      }
    };
    const PointSet contour = with_path(sp.dat, [&] { return parse_airfoil_dat(read_text_file(sp.dat)); });
    const PointSet mesh = with_path(sp.msh, [&] { return parse_msh_nodes(read_text_file(sp.msh)); });
    ds.samples.push_back(with_path(sp.dat, [&] { return make_sample(sp.name, contour, mesh, config, i); }));
  }
  return ds;
}

/// Reads a manifest of the form {"samples": [{"name", "dat", "msh"}, ...]}.
/// Paths are resolved relative to the manifest's directory.
inline std::vector<SamplePaths> load_manifest(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  std::vector<SamplePaths> out;
  try {
    for (const auto& rec : doc.at("samples")) {
      SamplePaths sp;
      sp.dat = base / rec.at("dat").get<std::string>();
      sp.msh = base / rec.at("msh").get<std::string>();
      sp.name = rec.contains("name") ? rec.at("name").get<std::string>() : sp.dat.stem().string();
      out.push_back(std::move(sp));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": malformed manifest: " + e.what());
  }
  if (out.empty()) throw Error(ErrorKind::kInvalidInput, path.string() + ": manifest lists no samples");
  return out;
}

}  // namespace loop2mesh
