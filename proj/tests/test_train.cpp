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
#include <sstream>

#include "loop2mesh/checkpoint.hpp"
#include "loop2mesh/train.hpp"
#include "test_support.hpp"

namespace loop2mesh {
namespace {

TEST(Adam, FirstStepOnScalar) {
  std::vector<double> w{1.0}, g{1.0}, m{0.0}, v{0.0};
  adam_update(w, g, m, v, 0.001, AdamConfig{}, 1);
  // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps).
  EXPECT_NEAR(w[0], 1.0 - 0.001 / (1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(w[0], 0.999, 1e-9);
}

TEST(Adam, SecondStepByHand) {
  std::vector<double> w{0.5}, m{0.0}, v{0.0};
  adam_update(w, std::vector<double>{2.0}, m, v, 0.01, AdamConfig{}, 1);
  adam_update(w, std::vector<double>{-1.0}, m, v, 0.01, AdamConfig{}, 2);
  const double m2 = 0.9 * (0.1 * 2.0) + 0.1 * -1.0;
  const double v2 = 0.999 * (0.001 * 4.0) + 0.001 * 1.0;
  const double mh = m2 / (1 - 0.81), vh = v2 / (1 - 0.999 * 0.999);
  // Step 1: m_hat = 2, v_hat = 4.
  const double want = 0.5 - 0.01 * 2.0 / (2.0 + 1e-8) - 0.01 * mh / (std::sqrt(vh) + 1e-8);
  EXPECT_NEAR(w[0], want, 1e-14);
}

TEST(Adam, ZeroGradLeavesParamsUnchanged) {
  NetworkParams p = init_params(1, NetworkDims{3, 4, 5, 2});
  const NetworkParams before = p;
  ParamGrads g;
  static_cast<LayerTensors&>(g) = LayerTensors::zeros(p.dims);
  AdamState s = AdamState::zeros(p.dims);
  for (int k = 0; k < 3; ++k) adam_step(p, g, s, 1e-3);
  EXPECT_EQ(p, before);
  EXPECT_EQ(s.step, 3u);
}

TEST(Adam, StepIndexStartsAtOne) {
  std::vector<double> w{1.0}, g{1.0}, m{0.0}, v{0.0};
  EXPECT_THROW(adam_update(w, g, m, v, 0.001, AdamConfig{}, 0), Error);
}

TEST(Mode, ParseAndPrint) {
  for (Mode m : {Mode::kRaw, Mode::kStandardised, Mode::kStandardisedClamped}) EXPECT_EQ(parse_mode(to_string(m)), m);
  EXPECT_THROW(parse_mode("clamped"), Error);
}

TEST(TrainConfig, InteriorDefaultDependsOnMode) {
  TrainConfig c;
  c.mode = Mode::kRaw;
  EXPECT_EQ(c.weights().interior, 10.0);
  c.mode = Mode::kStandardised;
  EXPECT_EQ(c.weights().interior, 10.0);
  c.mode = Mode::kStandardisedClamped;
  EXPECT_EQ(c.weights().interior, 0.0);
  c.interior_weight = 3.0;
  EXPECT_EQ(c.weights().interior, 3.0);
}

TEST(TrainConfig, ValidationErrorsAreConfigErrors) {
  std::vector<std::function<void(TrainConfig&)>> breakers{
      [](TrainConfig& c) { c.lr = 0; },
      [](TrainConfig& c) { c.epochs = 0; },
      [](TrainConfig& c) { c.nodes = 0; },
      [](TrainConfig& c) { c.clamp_y = {1, -1}; },
      [](TrainConfig& c) { c.loss_epsilon = 0; },
      [](TrainConfig& c) {
        c.chamfer_weight = 0;
        c.repulsion_weight = 0;
      },
  };
  for (auto& brk : breakers) {
    TrainConfig c;
    brk(c);
    try {
      c.validate();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    }
  }
}

TEST(ConfigJson, RoundTripAndUnknownKeys) {
  TrainConfig c;
  c.mode = Mode::kRaw;
  c.nodes = 300;
  c.repulsion_weight = 0.0;
  c.interior_weight = 4.5;
  c.seed = 77;
  c.clamp_y = {-0.5, 2.0};
  const auto j = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(j)), j);
  EXPECT_EQ(config_from_json(nlohmann::json{{"nodes", 700}}).nodes, 700u);
  try {
    config_from_json(nlohmann::json{{"nodez", 700}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
  EXPECT_THROW(config_from_json(nlohmann::json{{"weights", {{"ratio", 1}}}}), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"nodes", "many"}}), Error);
}

/// A small but real training problem built from a synthetic airfoil.
Dataset small_dataset() {
  const PointSet contour = synth::naca4("2220", 41);
  synth::MeshOptions opt;
  opt.wall_spacing = 0.03;
  opt.max_spacing = 0.3;
  opt.candidates = 20000;
  const PointSet mesh = synth::graded_mesh(contour, opt);
  Dataset ds;
  ds.upsample_count = 300;
  ds.samples.push_back(make_sample("foil", contour, mesh, DatasetConfig{35, 300, 0}, 0));
  return ds;
}

TrainConfig small_config(Mode mode) {
  TrainConfig c;
  c.mode = mode;
  c.nodes = 60;
  c.hidden1 = 32;
  c.hidden2 = 48;
  c.upsample = 300;
  c.epochs = 150;
  c.repulsion_weight = 1.0;
  c.seed = 5;
  return c;
}

TEST(Train, ReducesChamferAndLogsEveryEpoch) {
  const Dataset ds = small_dataset();
  const TrainConfig c = small_config(Mode::kStandardised);
  std::size_t calls = 0;
  const auto r = train(ds, c, [&](const EpochRecord&) { ++calls; });
  ASSERT_EQ(r.log.size(), c.epochs);
  EXPECT_EQ(calls, c.epochs);
  for (std::size_t k = 0; k < r.log.size(); ++k) {
    EXPECT_EQ(r.log[k].epoch, k + 1);
    EXPECT_TRUE(std::isfinite(r.log[k].total));
  }
  EXPECT_LT(r.log.back().chamfer, 0.5 * r.log.front().chamfer);
  ASSERT_EQ(r.transforms.size(), 1u);
  EXPECT_EQ(r.transforms[0].sample, "foil");
}

TEST(Train, BitIdenticalAcrossRuns) {
  const Dataset ds = small_dataset();
  TrainConfig c = small_config(Mode::kStandardisedClamped);
  c.epochs = 40;
  const auto a = train(ds, c);
  const auto b = train(ds, c);
  EXPECT_EQ(a.params, b.params);
  std::ostringstream la, lb;
  write_train_log(la, a.log);
  write_train_log(lb, b.log);
  EXPECT_EQ(la.str(), lb.str());
}

TEST(Train, RawAndStandardisedStartFromTheSameInit) {
  TrainConfig raw = small_config(Mode::kRaw);
  TrainConfig stand = small_config(Mode::kStandardised);
  EXPECT_EQ(init_params(raw.seed, raw.dims()), init_params(stand.seed, stand.dims()));
}

TEST(Train, ClampedPredictionsRespectBoundsInStandardisedFrame) {
  const Dataset ds = small_dataset();
  const TrainConfig c = small_config(Mode::kStandardisedClamped);
  const auto r = train(ds, c);
  const MeshSample& s = ds.samples[0];
  const auto t = r.transforms[0].transform;
  const PointSet pred = predict(r.params, t, s.loop, c);
  EXPECT_EQ(pred.size(), c.nodes);
  const PointSet std_pred = apply_standardize(t, pred);
  for (const Point2& p : std_pred) {
    EXPECT_GE(p.y, -1.0 - 1e-12);
    EXPECT_LE(p.y, 1.0 + 1e-12);
  }
  const auto fr = forward(r.params, apply_standardize(t, s.loop), c.output_clamp());
  for (const Point2& p : fr.prediction) {
    EXPECT_GE(p.y, -1.0);
    EXPECT_LE(p.y, 1.0);
  }
}

TEST(Predict, RawIsForwardAndStandardisedIsComposition) {
  const Dataset ds = small_dataset();
  const MeshSample& s = ds.samples[0];
  TrainConfig raw = small_config(Mode::kRaw);
  const NetworkParams p = init_params(9, raw.dims());
  EXPECT_EQ(predict(p, std::nullopt, s.loop, raw), forward(p, s.loop).prediction);

  TrainConfig stand = small_config(Mode::kStandardised);
  const auto t = fit_standardize(s.target);
  const PointSet want = invert_standardize(t, forward(p, apply_standardize(t, s.loop)).prediction);
  EXPECT_EQ(predict(p, t, s.loop, stand), want);
  EXPECT_THROW(predict(p, std::nullopt, s.loop, stand), Error);

  TrainConfig other = raw;
  other.nodes = 61;
  try {
    predict(p, std::nullopt, s.loop, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(Train, DivergenceIsReported) {
  const Dataset ds = small_dataset();
  TrainConfig c = small_config(Mode::kRaw);
  c.lr = 1e300;
  c.epochs = 20;
  try {
    train(ds, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivergence);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(Checkpoint, BinaryRoundTripIsExact) {
  const Dataset ds = small_dataset();
  TrainConfig c = small_config(Mode::kStandardisedClamped);
  c.epochs = 5;
  c.interior_weight = 2.0;
  auto r = train(ds, c);
  const Checkpoint ck{c, r.params, r.transforms};
  std::stringstream buf;
  write_checkpoint(buf, ck);
  const std::string bytes = buf.str();
  const Checkpoint back = read_checkpoint(buf);
  EXPECT_EQ(back.params, ck.params);
  EXPECT_EQ(back.transforms, ck.transforms);
  EXPECT_EQ(config_to_json(back.config), config_to_json(c));

  std::stringstream again;
  write_checkpoint(again, back);
  EXPECT_EQ(again.str(), bytes);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_checkpoint(truncated), Error);
  std::stringstream trailing(bytes + "x");
  EXPECT_THROW(read_checkpoint(trailing), Error);
  std::stringstream bad_magic("NOTACKPT" + bytes.substr(8));
  EXPECT_THROW(read_checkpoint(bad_magic), Error);
}

TEST(Checkpoint, TransformLookup) {
  Checkpoint ck;
  EXPECT_FALSE(ck.transform_for().has_value());
  ck.transforms = {{"a", {1, 2, 3, 4}}, {"b", {5, 6, 7, 8}}};
  EXPECT_EQ(ck.transform_for()->mean_x, 1.0);
  EXPECT_EQ(ck.transform_for("b")->mean_x, 5.0);
  EXPECT_THROW(ck.transform_for("c"), Error);
}

}  // namespace
}  // namespace loop2mesh
