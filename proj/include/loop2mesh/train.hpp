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
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "loop2mesh/error.hpp"
#include "loop2mesh/format.hpp"
#include "loop2mesh/geometry.hpp"
#include "loop2mesh/ingest.hpp"
#include "loop2mesh/loss.hpp"
#include "loop2mesh/net.hpp"

namespace loop2mesh {

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

/// Bias-corrected Adam update of one flat parameter block; t is 1-based.
inline void adam_update(std::span<double> w, std::span<const double> g, std::span<double> m,
                        std::span<double> v, double lr, const AdamConfig& cfg, std::uint64_t t) {
  if (w.size() != g.size() || w.size() != m.size() || w.size() != v.size()) {
    throw Error(ErrorKind::kShape, "adam: parameter, gradient and moment sizes differ");
  }
  if (t < 1) throw Error(ErrorKind::kInvalidInput, "adam step index starts at 1");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  using Arr = Eigen::Map<Eigen::ArrayXd>;
  const auto n = static_cast<Eigen::Index>(w.size());
  Arr wa(w.data(), n), ma(m.data(), n), va(v.data(), n);
  const Eigen::Map<const Eigen::ArrayXd> ga(g.data(), n);
  ma = cfg.beta1 * ma + (1.0 - cfg.beta1) * ga;
  va = cfg.beta2 * va + (1.0 - cfg.beta2) * ga.square();
  wa -= lr * (ma / c1) / ((va / c2).sqrt() + cfg.epsilon);
}

struct AdamState {
  LayerTensors m;
  LayerTensors v;
  std::uint64_t step = 0;

  static AdamState zeros(const NetworkDims& dims) {
    return {LayerTensors::zeros(dims), LayerTensors::zeros(dims), 0};
  }
};

/// Advances the optimizer by one step (t = state.step + 1).
inline void adam_step(NetworkParams& params, const ParamGrads& grads, AdamState& state, double lr,
                      const AdamConfig& cfg = {}) {
  if (!params.same_shape(grads) || !params.same_shape(state.m) || !params.same_shape(state.v)) {
    throw Error(ErrorKind::kShape, "adam: state does not match the parameter shapes");
  }
  const std::uint64_t t = ++state.step;
  std::vector<std::span<double>> w, m, v;
  std::vector<std::span<const double>> g;
  params.for_each([&](std::span<double> s) { w.push_back(s); });
  state.m.for_each([&](std::span<double> s) { m.push_back(s); });
  state.v.for_each([&](std::span<double> s) { v.push_back(s); });
  grads.for_each([&](std::span<const double> s) { g.push_back(s); });
  for (std::size_t k = 0; k < w.size(); ++k) adam_update(w[k], g[k], m[k], v[k], lr, cfg, t);
}

// ---------------------------------------------------------------------------
// Configuration

enum class Mode { kRaw, kStandardised, kStandardisedClamped };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::kRaw: return "raw";
    case Mode::kStandardised: return "stand";
    case Mode::kStandardisedClamped: return "stand-clamp";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "raw") return Mode::kRaw;
  if (s == "stand") return Mode::kStandardised;
  if (s == "stand-clamp") return Mode::kStandardisedClamped;
  throw Error(ErrorKind::kConfig, "unknown mode '" + s + "' (expected raw, stand or stand-clamp)");
}

struct TrainConfig {
  Mode mode = Mode::kStandardisedClamped;
  Interval clamp_y{-1.0, 1.0};
  std::size_t nodes = 400;

  double chamfer_weight = 1.0;
  double repulsion_weight = 2.0;
  // Unset means 10 for unclamped modes and 0 when the clamp confines outputs.
  std::optional<double> interior_weight;
  double loss_epsilon = 1e-8;

  double lr = 1e-3;
  AdamConfig adam;
  std::size_t epochs = 5000;
  std::uint64_t seed = 0;

  std::size_t hidden1 = 256;
  std::size_t hidden2 = 512;
  std::size_t upsample = 1500;
  std::size_t loop_size = 35;

  bool standardised() const { return mode != Mode::kRaw; }

  LossWeights weights() const {
    const double interior = interior_weight.value_or(mode == Mode::kStandardisedClamped ? 0.0 : 10.0);
    return {chamfer_weight, repulsion_weight, interior, loss_epsilon};
  }

  NetworkDims dims() const { return {loop_size, hidden1, hidden2, nodes}; }

  std::optional<OutputClamp> output_clamp() const {
    if (mode != Mode::kStandardisedClamped) return std::nullopt;
    return OutputClamp{clamp_y};
  }

  DatasetConfig dataset_config() const { return {loop_size, upsample, seed}; }

  void validate() const {
    if (!(lr > 0.0)) throw Error(ErrorKind::kConfig, "lr must be > 0");
    if (epochs < 1) throw Error(ErrorKind::kConfig, "epochs must be >= 1");
    if (nodes < 1) throw Error(ErrorKind::kConfig, "nodes must be >= 1");
    if (hidden1 < 1 || hidden2 < 1) throw Error(ErrorKind::kConfig, "hidden widths must be >= 1");
    if (loop_size < 3) throw Error(ErrorKind::kConfig, "loop_size must be >= 3");
    if (upsample < 1) throw Error(ErrorKind::kConfig, "upsample must be >= 1");
    if (mode == Mode::kStandardisedClamped && !(clamp_y.valid() && clamp_y.lo < clamp_y.hi)) {
      throw Error(ErrorKind::kConfig, "clamp_y must be a non-empty interval");
    }
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 && adam.epsilon > 0.0)) {
      throw Error(ErrorKind::kConfig, "adam betas must lie in [0, 1) and epsilon must be > 0");
    }
    weights().validate();
  }
};

// ---------------------------------------------------------------------------
// Training

struct EpochRecord {
  std::size_t epoch = 0;
  double chamfer = 0.0;
  double repulsion = 0.0;
  double interior = 0.0;
  double total = 0.0;
  double mean_pairwise = 0.0;
};

using TrainLog = std::vector<EpochRecord>;

inline void write_train_log(std::ostream& out, const TrainLog& log) {
  out << "epoch,chamfer,repulsion,interior,total,mean_pairwise\n";
  for (const EpochRecord& r : log) {
    out << r.epoch << ',' << format_double(r.chamfer) << ',' << format_double(r.repulsion) << ','
        << format_double(r.interior) << ',' << format_double(r.total) << ','
        << format_double(r.mean_pairwise) << '\n';
  }
}

struct NamedTransform {
  std::string sample;
  StandardizeTransform transform;

  friend bool operator==(const NamedTransform&, const NamedTransform&) = default;
};

struct TrainResult {
  NetworkParams params;
  // One per sample in standardised modes, empty in raw mode.
  std::vector<NamedTransform> transforms;
  TrainLog log;
};

/// A sample moved into the frame the network trains in.
struct TrainingSample {
  AirfoilLoop loop;
  PointSet target;
  std::optional<StandardizeTransform> transform;
};

inline TrainingSample to_training_frame(const MeshSample& s, const TrainConfig& config) {
  if (!config.standardised()) return {s.loop, s.target, std::nullopt};
  const StandardizeTransform t = fit_standardize(s.target);
  return {apply_standardize(t, s.loop), apply_standardize(t, s.target), t};
}

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Full-batch training: every epoch averages the loss and gradients over all
/// samples, then takes one Adam step.
inline TrainResult train(const Dataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch = {}) {
  config.validate();
  if (dataset.samples.empty()) throw Error(ErrorKind::kInvalidInput, "dataset is empty");
  for (const MeshSample& s : dataset.samples) {
    if (s.loop.size() != config.loop_size) {
      throw Error(ErrorKind::kShape, "sample '" + s.name + "' loop has " + std::to_string(s.loop.size()) +
                                         " vertices, config expects " + std::to_string(config.loop_size));
    }
  }

  std::vector<TrainingSample> samples;
  TrainResult result;
  for (const MeshSample& s : dataset.samples) {
    samples.push_back(to_training_frame(s, config));
    if (samples.back().transform) result.transforms.push_back({s.name, *samples.back().transform});
  }

  const LossWeights weights = config.weights();
  const auto clamp = config.output_clamp();
  const double inv_s = 1.0 / static_cast<double>(samples.size());

  result.params = init_params(config.seed, config.dims());
  NetworkParams& params = result.params;
  AdamState state = AdamState::zeros(params.dims);
  ParamGrads grads;
  static_cast<LayerTensors&>(grads) = LayerTensors::zeros(params.dims);
  result.log.reserve(config.epochs);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    grads.for_each([](std::span<double> block) { std::fill(block.begin(), block.end(), 0.0); });
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const TrainingSample& s = samples[k];
      ForwardTrace trace = forward_trace(params, s.loop.vertices(), clamp);
      if (!trace.output.allFinite()) {
        throw Error(ErrorKind::kDivergence, "network output became non-finite at epoch " + std::to_string(epoch));
      }
      const ForwardResult fr{PointSet(unflatten(trace.output), s.loop.frame()), std::move(trace)};
      const LossBreakdown loss = composite(fr.prediction, s.target, s.loop, weights);
      accumulate_backward(params, fr.trace, inv_s * flatten(loss.grad), grads);
      rec.chamfer += inv_s * loss.chamfer;
      rec.repulsion += inv_s * loss.repulsion;
      rec.interior += inv_s * loss.interior;
      rec.total += inv_s * loss.total;
      const PointSet original = s.transform ? invert_standardize(*s.transform, fr.prediction) : fr.prediction;
      rec.mean_pairwise += inv_s * mean_pairwise_distance(original.points());
    }
    if (!std::isfinite(rec.total) || !std::isfinite(rec.chamfer) || !std::isfinite(rec.repulsion) ||
        !std::isfinite(rec.interior)) {
      throw Error(ErrorKind::kDivergence, "loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
    adam_step(params, grads, state, config.lr, config.adam);
    bool finite = true;
    params.for_each([&](std::span<const double> block) {
      finite = finite && std::all_of(block.begin(), block.end(), [](double v) { return std::isfinite(v); });
    });
    if (!finite) {
      throw Error(ErrorKind::kDivergence, "parameters became non-finite after the update at epoch " +
                                              std::to_string(epoch));
    }
  }
  return result;
}

/// Runs the generator on a loop given in the original frame and returns the
/// prediction in the original frame.
inline PointSet predict(const NetworkParams& params, const std::optional<StandardizeTransform>& transform,
                        const AirfoilLoop& loop, const TrainConfig& config) {
  if (params.dims != config.dims()) throw Error(ErrorKind::kShape, "parameters do not match the config dimensions");
  if (loop.frame() != Frame::kOriginal) throw Error(ErrorKind::kFrameMismatch, "predict expects an original-frame loop");
  if (config.standardised() && !transform) {
    throw Error(ErrorKind::kInvalidInput, "standardised model needs its sample transform");
  }
  if (!config.standardised()) return forward(params, loop, config.output_clamp()).prediction;
  const AirfoilLoop input = apply_standardize(*transform, loop);
  return invert_standardize(*transform, forward(params, input, config.output_clamp()).prediction);
}

}  // namespace loop2mesh
