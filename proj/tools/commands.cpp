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

#include "commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "loop2mesh/loop2mesh.hpp"

#ifndef LOOP2MESH_VERSION
#define LOOP2MESH_VERSION "dev"
#endif

namespace fs = std::filesystem;

namespace loop2mesh::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kShape:
    case ErrorKind::kInvalidInput:
      return kConfigError;
    case ErrorKind::kParse:
    case ErrorKind::kInvalidGeometry:
    case ErrorKind::kDegenerateData:
      return kParseError;
    case ErrorKind::kDivergence:
      return kDivergenceError;
    case ErrorKind::kFrameMismatch:
    case ErrorKind::kIo:
      return kFailure;
  }
  return kFailure;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kIo, "sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text_file(path)); }

PointSet read_points_csv(const fs::path& path) {
  const std::string text = read_text_file(path);
  const auto lines = detail::split_lines(text);
  std::vector<Point2> pts;
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::is_blank(lines[i])) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const std::string_view line = lines[i];
    const auto comma = line.find(',');
    std::optional<double> x, y;
    if (comma != std::string_view::npos && line.find(',', comma + 1) == std::string_view::npos) {
      const auto tx = detail::split_tokens(line.substr(0, comma));
      const auto ty = detail::split_tokens(line.substr(comma + 1));
      if (tx.size() == 1 && ty.size() == 1) {
        x = detail::parse_double(tx[0]);
        y = detail::parse_double(ty[0]);
      }
    }
    if (!x || !y) {
      throw Error(ErrorKind::kParse, path.string() + ": row " + std::to_string(i + 1) + ": expected 'x,y', got '" +
                                         std::string(line) + "'");
    }
    pts.push_back({*x, *y});
  }
  if (pts.empty()) throw Error(ErrorKind::kParse, path.string() + ": no data rows");
  return PointSet(std::move(pts));
}

namespace {

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kIo, "failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream ss;
  fn(ss);
  write_file_atomic(path, ss.str());
}

PointSet read_dat(const fs::path& path) {
  try {
    return parse_airfoil_dat(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

PointSet read_msh(const fs::path& path) {
  try {
    return parse_msh_nodes(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

Interval parse_view_axis(const std::vector<double>& v, std::size_t offset) {
  return {v[offset], v[offset + 1]};
}

}  // namespace

void write_points_csv(const fs::path& path, const PointSet& ps) {
  write_with(path, [&](std::ostream& out) {
    out << "x,y\n";
    for (const Point2& p : ps) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
  });
}

namespace {

struct GlobalOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string mode;
  std::size_t nodes = 0;
  double ratio = 0.0;
  std::size_t epochs = 0;
  double interior = 0.0;
  std::size_t hidden1 = 0;
  std::size_t hidden2 = 0;
  double lr = 0.0;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* nodes_opt = nullptr;
  CLI::Option* ratio_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* interior_opt = nullptr;
  CLI::Option* hidden1_opt = nullptr;
  CLI::Option* hidden2_opt = nullptr;
  CLI::Option* lr_opt = nullptr;

  /// Config file first, then any flags given on the command line.
  TrainConfig resolve() const {
    TrainConfig c = config_path.empty() ? TrainConfig{} : load_config(config_path);
    if (seed_opt->count()) c.seed = seed;
    if (mode_opt->count()) c.mode = parse_mode(mode);
    if (nodes_opt->count()) c.nodes = nodes;
    if (ratio_opt->count()) c.repulsion_weight = ratio;
    if (epochs_opt->count()) c.epochs = epochs;
    if (interior_opt->count()) c.interior_weight = interior;
    if (hidden1_opt->count()) c.hidden1 = hidden1;
    if (hidden2_opt->count()) c.hidden2 = hidden2;
    if (lr_opt->count()) c.lr = lr;
    c.validate();
    return c;
  }
};

struct InputHash {
  std::string path;
  std::string sha256;
};

std::vector<InputHash> hash_inputs(const fs::path& manifest, const std::vector<SamplePaths>& samples) {
  std::vector<InputHash> out{{manifest.string(), sha256_file(manifest)}};
  for (const auto& s : samples) {
    out.push_back({s.dat.string(), sha256_file(s.dat)});
    out.push_back({s.msh.string(), sha256_file(s.msh)});
  }
  return out;
}

nlohmann::json hashes_json(const std::vector<InputHash>& hashes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& h : hashes) arr.push_back({{"path", h.path}, {"sha256", h.sha256}});
  return arr;
}

/// Chord-normalised mesh nodes of a sample, used as the evaluation reference.
PointSet reference_nodes(const SamplePaths& s) {
  const PointSet contour = read_dat(s.dat);
  return fit_chord(contour).apply(read_msh(s.msh));
}

AirfoilLoop loop_from_dat(const fs::path& dat, std::size_t loop_size, std::optional<ChordTransform>* chord_out = nullptr) {
  const PointSet contour = read_dat(dat);
  const ChordTransform chord = fit_chord(contour);
  if (chord_out) *chord_out = chord;
  return resample_loop(chord.apply(contour), loop_size);
}

std::size_t count_inside(const PointSet& ps, const AirfoilLoop& loop) {
  return static_cast<std::size_t>(
      std::count_if(ps.begin(), ps.end(), [&](Point2 p) { return point_in_polygon(p, loop); }));
}

// ---------------------------------------------------------------------------

int cmd_train(const GlobalOptions& g, const std::string& manifest_path, std::size_t log_every, std::ostream& out) {
  const TrainConfig config = g.resolve();
  const fs::path out_dir = g.out_dir;
  const fs::path manifest(manifest_path);
  const auto samples = load_manifest(manifest);
  const auto hashes = hash_inputs(manifest, samples);

  fs::create_directories(out_dir);
  const fs::path ckpt_path = out_dir / "checkpoint.l2m";
  const fs::path log_path = out_dir / "train_log.csv";
  const fs::path run_path = out_dir / "run_manifest.json";

  nlohmann::json run = {
      {"tool", "loop2mesh"},
      {"version", LOOP2MESH_VERSION},
      {"command", "train"},
      {"config", config_to_json(config)},
      {"seed", config.seed},
      {"inputs", hashes_json(hashes)},
      {"outputs", {{"checkpoint", ckpt_path.string()}, {"log", log_path.string()}}},
  };
  write_file_atomic(run_path, run.dump(2) + "\n");

  const Dataset dataset = build_dataset(samples, config.dataset_config());
  const auto result = train(dataset, config, [&](const EpochRecord& r) {
    if (log_every > 0 && (r.epoch == 1 || r.epoch % log_every == 0 || r.epoch == config.epochs)) {
      out << "epoch " << r.epoch << " chamfer " << r.chamfer << " repulsion " << r.repulsion << " interior "
          << r.interior << " total " << r.total << '\n';
    }
  });

  write_with(ckpt_path, [&](std::ostream& o) { write_checkpoint(o, {config, result.params, result.transforms}); });
  write_with(log_path, [&](std::ostream& o) { write_train_log(o, result.log); });
  out << "wrote " << ckpt_path.string() << ", " << log_path.string() << ", " << run_path.string() << '\n';
  return kOk;
}

struct PredictOptions {
  std::string checkpoint;
  std::string dat;
  std::string truth;
  std::string sample;
  std::vector<double> view;
};

int cmd_predict(const GlobalOptions& g, const PredictOptions& o, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(o.checkpoint);
  if (g.nodes_opt->count() && g.nodes != ck.config.nodes) {
    throw Error(ErrorKind::kShape, "checkpoint predicts " + std::to_string(ck.config.nodes) + " nodes, --nodes asks for " +
                                       std::to_string(g.nodes));
  }
  std::optional<ChordTransform> chord;
  const AirfoilLoop loop = loop_from_dat(o.dat, ck.config.loop_size, &chord);
  const PointSet pred = predict(ck.params, ck.transform_for(o.sample), loop, ck.config);

  const fs::path out_dir = g.out_dir;
  fs::create_directories(out_dir);
  write_points_csv(out_dir / "predictions.csv", pred);

  SvgScene scene;
  scene.loop = loop;
  scene.prediction = pred;
  if (!o.truth.empty()) scene.truth = chord->apply(read_msh(o.truth));
  if (o.view.size() == 4) {
    scene.view_x = parse_view_axis(o.view, 0);
    scene.view_y = parse_view_axis(o.view, 2);
    if (!(scene.view_x.lo < scene.view_x.hi && scene.view_y.lo < scene.view_y.hi)) {
      throw Error(ErrorKind::kConfig, "--view needs xmin < xmax and ymin < ymax");
    }
  }
  scene.title = std::string(to_string(ck.config.mode)) + ", " + std::to_string(ck.config.nodes) +
                " nodes, ratio 1:" + format_double(ck.config.repulsion_weight);
  write_with(out_dir / "prediction.svg", [&](std::ostream& s) { write_svg(s, scene); });

  out << "nodes: " << pred.size() << '\n';
  out << "interior: " << count_inside(pred, loop) << '\n';
  out << "wrote " << (out_dir / "predictions.csv").string() << ", " << (out_dir / "prediction.svg").string() << '\n';
  return kOk;
}

struct EvaluateOptions {
  std::string pred;
  std::string checkpoint;
  std::string dat;
  std::string truth;
  std::string sample;
  std::size_t grid = 100;
};

int cmd_evaluate(const GlobalOptions& g, const EvaluateOptions& o, std::ostream& out) {
  if (o.pred.empty() == o.checkpoint.empty()) {
    throw Error(ErrorKind::kConfig, "give exactly one of --pred or --checkpoint");
  }
  std::optional<PointSet> pred;
  double ratio = g.ratio_opt->count() ? g.ratio : 0.0;
  if (!o.pred.empty()) {
    pred = read_points_csv(o.pred);
  } else {
    if (o.dat.empty()) throw Error(ErrorKind::kConfig, "--checkpoint needs --dat for the input loop");
    const Checkpoint ck = load_checkpoint(o.checkpoint);
    pred = predict(ck.params, ck.transform_for(o.sample), loop_from_dat(o.dat, ck.config.loop_size), ck.config);
    if (!g.ratio_opt->count()) ratio = ck.config.repulsion_weight;
  }
  PointSet truth = read_msh(o.truth);
  if (!o.dat.empty()) truth = fit_chord(read_dat(o.dat)).apply(truth);

  const std::size_t nodes = g.nodes_opt->count() ? g.nodes : pred->size();
  std::vector<KLRow> rows;
  for (const WindowKL& w : evaluate(*pred, truth, default_windows(truth, o.grid))) {
    rows.push_back({ratio, w.region, nodes, w.kl});
  }
  sort_kl_rows(rows);

  const fs::path out_dir = g.out_dir;
  fs::create_directories(out_dir);
  std::ostringstream csv;
  write_kl_csv(csv, rows);
  write_file_atomic(out_dir / "kl.csv", csv.str());
  out << csv.str();
  return kOk;
}

struct SweepOptions {
  std::string manifest;
  std::vector<double> ratios{0.0, 1.0, 2.0, 3.0};
  std::vector<std::size_t> node_counts{300, 400, 500, 700};
  std::size_t grid = 100;
};

int cmd_sweep(const GlobalOptions& g, const SweepOptions& o, std::ostream& out, std::ostream& err) {
  if (o.ratios.empty() || o.node_counts.empty()) throw Error(ErrorKind::kConfig, "sweep grid is empty");
  const TrainConfig base = g.resolve();
  const fs::path manifest(o.manifest);
  const auto samples = load_manifest(manifest);
  const auto hashes = hash_inputs(manifest, samples);
  std::string input_key;
  for (const auto& h : hashes) input_key += h.sha256 + "\n";

  const fs::path out_dir = g.out_dir;
  const fs::path cell_dir = out_dir / "cells";
  fs::create_directories(cell_dir);

  const Dataset dataset = build_dataset(samples, base.dataset_config());
  const MeshSample& first = dataset.samples.front();
  const PointSet truth = reference_nodes(samples.front());
  const auto windows = default_windows(truth, o.grid);

  std::vector<KLRow> rows;
  std::size_t reused = 0, trained = 0, failed = 0;
  for (double ratio : o.ratios) {
    for (std::size_t nodes : o.node_counts) {
      TrainConfig cfg = base;
      cfg.repulsion_weight = ratio;
      cfg.nodes = nodes;
      const std::string key = sha256_hex(config_to_json(cfg).dump() + "\n" + input_key).substr(0, 16);
      const fs::path ckpt_path = cell_dir / (key + ".l2m");
      const std::string label = "ratio 1:" + format_double(ratio) + ", " + std::to_string(nodes) + " nodes";
      try {
        cfg.validate();
        Checkpoint ck;
        if (fs::exists(ckpt_path)) {
          ck = load_checkpoint(ckpt_path);
          ++reused;
          out << label << ": reused " << ckpt_path.filename().string() << '\n';
        } else {
          auto result = train(dataset, cfg);
          ck = {cfg, std::move(result.params), std::move(result.transforms)};
          write_with(ckpt_path, [&](std::ostream& s) { write_checkpoint(s, ck); });
          ++trained;
          out << label << ": trained " << ckpt_path.filename().string() << '\n';
        }
        const PointSet pred = predict(ck.params, ck.transform_for(first.name), first.loop, ck.config);
        const auto kls = evaluate(pred, truth, windows);
        for (Region region : {Region::kCenter, Region::kWhole}) {
          for (const auto& w : kls) {
            if (w.region == region) rows.push_back({ratio, region, nodes, w.kl});
          }
        }
        SvgScene scene;
        scene.loop = first.loop;
        scene.prediction = pred;
        scene.title = std::string(to_string(cfg.mode)) + ", " + label;
        write_with(cell_dir / (key + ".svg"), [&](std::ostream& s) { write_svg(s, scene); });
      } catch (const Error& e) {
        ++failed;
        err << "warning: " << label << ": " << e.what() << '\n';
        rows.push_back({ratio, Region::kCenter, nodes, std::nullopt});
        rows.push_back({ratio, Region::kWhole, nodes, std::nullopt});
      }
    }
  }

  // Rows follow the input grid: ratio-major, center before whole, then nodes.
  std::stable_sort(rows.begin(), rows.end(), [&](const KLRow& a, const KLRow& b) {
    auto rank = [&](double r) { return std::find(o.ratios.begin(), o.ratios.end(), r) - o.ratios.begin(); };
    if (a.ratio != b.ratio) return rank(a.ratio) < rank(b.ratio);
    if (a.region != b.region) return a.region == Region::kCenter;
    return false;
  });
  std::ostringstream csv, table;
  write_kl_csv(csv, rows);
  write_kl_table(table, rows);
  write_file_atomic(out_dir / "kl.csv", csv.str());
  write_file_atomic(out_dir / "kl_table.csv", table.str());
  out << "cells: " << trained << " trained, " << reused << " reused, " << failed << " failed\n";
  out << table.str();
  return kOk;
}

struct SynthOptions {
  std::string naca = "2220";
  std::size_t points_per_side = 61;
  std::uint64_t mesh_seed = 7;
};

int cmd_synth(const GlobalOptions& g, const SynthOptions& o, std::ostream& out) {
  const PointSet contour = synth::naca4(o.naca, o.points_per_side);
  synth::MeshOptions mo;
  mo.seed = o.mesh_seed;
  const PointSet mesh = synth::graded_mesh(contour, mo);

  const fs::path out_dir = g.out_dir;
  fs::create_directories(out_dir);
  const std::string stem = "naca" + o.naca;
  write_with(out_dir / (stem + ".dat"), [&](std::ostream& s) { synth::write_airfoil_dat(s, "NACA " + o.naca, contour); });
  write_with(out_dir / (stem + ".msh"), [&](std::ostream& s) { synth::write_msh_nodes(s, mesh); });
  const nlohmann::json manifest = {
      {"samples", {{{"name", stem}, {"dat", stem + ".dat"}, {"msh", stem + ".msh"}}}}};
  write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << contour.size() << " contour points and " << mesh.size() << " mesh nodes to "
      << out_dir.string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned CFD mesh-point generation around airfoils", "loop2mesh"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", LOOP2MESH_VERSION);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON training config")->check(CLI::ExistingFile);
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");
  g.mode_opt = app.add_option("--mode", g.mode, "raw | stand | stand-clamp");
  g.nodes_opt = app.add_option("--nodes", g.nodes, "Predicted node count");
  g.ratio_opt = app.add_option("--ratio", g.ratio, "Repulsion weight (Chamfer weight is 1)");
  g.epochs_opt = app.add_option("--epochs", g.epochs, "Training epochs");
  g.interior_opt = app.add_option("--interior", g.interior, "Interior penalty weight");
  g.hidden1_opt = app.add_option("--hidden1", g.hidden1, "First hidden width");
  g.hidden2_opt = app.add_option("--hidden2", g.hidden2, "Second hidden width");
  g.lr_opt = app.add_option("--lr", g.lr, "Adam learning rate");

  std::string manifest;
  std::size_t log_every = 500;
  auto* train_cmd = app.add_subcommand("train", "Train a generator on a dataset manifest");
  train_cmd->add_option("--manifest", manifest, "Dataset manifest JSON")->required();
  train_cmd->add_option("--log-every", log_every, "Print progress every N epochs (0 = quiet)");

  PredictOptions po;
  auto* predict_cmd = app.add_subcommand("predict", "Predict mesh points for an airfoil contour");
  predict_cmd->add_option("--checkpoint", po.checkpoint)->required();
  predict_cmd->add_option("--dat", po.dat, "Airfoil contour (.dat)")->required();
  predict_cmd->add_option("--truth", po.truth, "Reference mesh (.msh) drawn in green");
  predict_cmd->add_option("--sample", po.sample, "Sample whose standardisation to use");
  predict_cmd->add_option("--view", po.view, "Plot window xmin,xmax,ymin,ymax")->delimiter(',')->expected(4);

  EvaluateOptions eo;
  auto* eval_cmd = app.add_subcommand("evaluate", "KL divergence of a prediction against a reference mesh");
  eval_cmd->add_option("--pred", eo.pred, "Predicted points CSV (x,y)");
  eval_cmd->add_option("--checkpoint", eo.checkpoint, "Predict from a checkpoint instead");
  eval_cmd->add_option("--dat", eo.dat, "Airfoil contour; also chord-normalises the reference");
  eval_cmd->add_option("--truth", eo.truth, "Reference mesh (.msh)")->required();
  eval_cmd->add_option("--sample", eo.sample);
  eval_cmd->add_option("--grid", eo.grid, "Grid cells per axis");

  SweepOptions so;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train/evaluate a ratio x node-count grid");
  sweep_cmd->add_option("--manifest", so.manifest)->required();
  sweep_cmd->add_option("--ratios", so.ratios)->delimiter(',');
  sweep_cmd->add_option("--node-counts", so.node_counts)->delimiter(',');
  sweep_cmd->add_option("--grid", so.grid, "Grid cells per axis");

  SynthOptions syo;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic NACA contour/mesh pair and manifest");
  synth_cmd->add_option("--naca", syo.naca, "4-digit NACA designation");
  synth_cmd->add_option("--points-per-side", syo.points_per_side);
  synth_cmd->add_option("--mesh-seed", syo.mesh_seed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*train_cmd) return cmd_train(g, manifest, log_every, out);
    if (*predict_cmd) return cmd_predict(g, po, out);
    if (*eval_cmd) return cmd_evaluate(g, eo, out);
    if (*sweep_cmd) return cmd_sweep(g, so, out, err);
    if (*synth_cmd) return cmd_synth(g, syo, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace loop2mesh::cli
