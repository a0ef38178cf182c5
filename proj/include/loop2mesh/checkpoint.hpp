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
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loop2mesh/error.hpp"
#include "loop2mesh/net.hpp"
#include "loop2mesh/train.hpp"

namespace loop2mesh {

// ---------------------------------------------------------------------------
// Config <-> JSON

inline nlohmann::json config_to_json(const TrainConfig& c) {
  nlohmann::json weights = {{"chamfer", c.chamfer_weight}, {"repulsion", c.repulsion_weight},
                            {"epsilon", c.loss_epsilon}};
  if (c.interior_weight) weights["interior"] = *c.interior_weight;
  return {
      {"mode", to_string(c.mode)},
      {"clamp_y", {c.clamp_y.lo, c.clamp_y.hi}},
      {"nodes", c.nodes},
      {"weights", weights},
      {"lr", c.lr},
      {"adam", {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"epsilon", c.adam.epsilon}}},
      {"epochs", c.epochs},
      {"seed", c.seed},
      {"hidden1", c.hidden1},
      {"hidden2", c.hidden2},
      {"upsample", c.upsample},
      {"loop_size", c.loop_size},
  };
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw Error(ErrorKind::kConfig, "unknown key '" + key + "' in " + where);
  }
}

}  // namespace detail

/// Overlays the fields present in `j` onto `base`. Unknown keys and wrongly
/// typed values are config errors.
inline TrainConfig config_from_json(const nlohmann::json& j, TrainConfig base = {}) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "config must be a JSON object");
  detail::reject_unknown_keys(j, {"mode", "clamp_y", "nodes", "weights", "lr", "adam", "epochs", "seed", "hidden1",
                                  "hidden2", "upsample", "loop_size"},
                              "config");
  try {
    if (j.contains("mode")) base.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("clamp_y")) {
      const auto& cy = j.at("clamp_y");
      if (!cy.is_array() || cy.size() != 2) throw Error(ErrorKind::kConfig, "clamp_y must be [lo, hi]");
      base.clamp_y = {cy[0].get<double>(), cy[1].get<double>()};
    }
    if (j.contains("nodes")) base.nodes = j.at("nodes").get<std::size_t>();
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      detail::reject_unknown_keys(w, {"chamfer", "repulsion", "interior", "epsilon"}, "weights");
      if (w.contains("chamfer")) base.chamfer_weight = w.at("chamfer").get<double>();
      if (w.contains("repulsion")) base.repulsion_weight = w.at("repulsion").get<double>();
      if (w.contains("interior")) base.interior_weight = w.at("interior").get<double>();
      if (w.contains("epsilon")) base.loss_epsilon = w.at("epsilon").get<double>();
    }
    if (j.contains("lr")) base.lr = j.at("lr").get<double>();
    if (j.contains("adam")) {
      const auto& a = j.at("adam");
      detail::reject_unknown_keys(a, {"beta1", "beta2", "epsilon"}, "adam");
      if (a.contains("beta1")) base.adam.beta1 = a.at("beta1").get<double>();
      if (a.contains("beta2")) base.adam.beta2 = a.at("beta2").get<double>();
      if (a.contains("epsilon")) base.adam.epsilon = a.at("epsilon").get<double>();
    }
    if (j.contains("epochs")) base.epochs = j.at("epochs").get<std::size_t>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("hidden1")) base.hidden1 = j.at("hidden1").get<std::size_t>();
    if (j.contains("hidden2")) base.hidden2 = j.at("hidden2").get<std::size_t>();
    if (j.contains("upsample")) base.upsample = j.at("upsample").get<std::size_t>();
    if (j.contains("loop_size")) base.loop_size = j.at("loop_size").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("bad config value: ") + e.what());
  }
  return base;
}

inline TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j, base);
}

// ---------------------------------------------------------------------------
// Checkpoint

/// Versioned binary record:
///   8 bytes  magic "L2MCKPT\0"
///   u32      format version
///   u64      length of the JSON metadata that follows (config, dims, transforms)
///   ...      metadata bytes
///   f64[]    W1 b1 W2 b2 W3 b3, row-major, little-endian IEEE-754
/// Parameters are stored bit-exactly.
struct Checkpoint {
  TrainConfig config;
  NetworkParams params;
  std::vector<NamedTransform> transforms;

  /// Transform for a named sample, or the first one when the name is empty.
  std::optional<StandardizeTransform> transform_for(const std::string& sample = {}) const {
    if (transforms.empty()) return std::nullopt;
    if (sample.empty()) return transforms.front().transform;
    for (const auto& t : transforms) {
      if (t.sample == sample) return t.transform;
    }
    throw Error(ErrorKind::kInvalidInput, "checkpoint has no transform for sample '" + sample + "'");
  }
};

inline constexpr char kCheckpointMagic[8] = {'L', '2', 'M', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw Error(ErrorKind::kParse, "checkpoint is truncated");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  nlohmann::json meta;
  meta["config"] = config_to_json(ck.config);
  meta["dims"] = {{"loop_size", ck.params.dims.loop_size},
                  {"hidden1", ck.params.dims.hidden1},
                  {"hidden2", ck.params.dims.hidden2},
                  {"nodes", ck.params.dims.nodes}};
  meta["transforms"] = nlohmann::json::array();
  for (const auto& t : ck.transforms) {
    meta["transforms"].push_back({{"sample", t.sample},
                                  {"mean_x", t.transform.mean_x},
                                  {"mean_y", t.transform.mean_y},
                                  {"scale_x", t.transform.scale_x},
                                  {"scale_y", t.transform.scale_y}});
  }
  const std::string text = meta.dump();
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::write_le<std::uint32_t>(out, kCheckpointVersion);
  detail::write_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  ck.params.for_each([&](std::span<const double> block) {
    for (double v : block) detail::write_le<double>(out, v);
  });
}

inline Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw Error(ErrorKind::kParse, "not a loop2mesh checkpoint");
  }
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kParse, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto meta_len = detail::read_le<std::uint64_t>(in);
  if (meta_len > (1u << 26)) throw Error(ErrorKind::kParse, "checkpoint metadata is implausibly large");
  std::string text(meta_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(meta_len))) {
    throw Error(ErrorKind::kParse, "checkpoint is truncated");
  }

  Checkpoint ck;
  try {
    const auto meta = nlohmann::json::parse(text);
    ck.config = config_from_json(meta.at("config"));
    const auto& d = meta.at("dims");
    ck.params.dims = {d.at("loop_size").get<std::size_t>(), d.at("hidden1").get<std::size_t>(),
                      d.at("hidden2").get<std::size_t>(), d.at("nodes").get<std::size_t>()};
    for (const auto& t : meta.at("transforms")) {
      ck.transforms.push_back({t.at("sample").get<std::string>(),
                               {t.at("mean_x").get<double>(), t.at("mean_y").get<double>(),
                                t.at("scale_x").get<double>(), t.at("scale_y").get<double>()}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad checkpoint metadata: ") + e.what());
  }
  if (ck.params.dims != ck.config.dims()) throw Error(ErrorKind::kParse, "checkpoint dims disagree with its config");

  static_cast<LayerTensors&>(ck.params) = LayerTensors::zeros(ck.params.dims);
  ck.params.for_each([&](std::span<double> block) {
    for (double& v : block) v = detail::read_le<double>(in);
  });
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorKind::kParse, "trailing bytes after checkpoint");
  return ck;
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  write_checkpoint(out, ck);
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot read checkpoint " + path.string());
  try {
    return read_checkpoint(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace loop2mesh
