// Copyright 2026 The UniInst Engine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uniinst/assignment.hpp"
#include "uniinst/errors.hpp"
#include "uniinst/eval.hpp"
#include "uniinst/losses.hpp"
#include "uniinst/nms.hpp"
#include "uniinst/oyor.hpp"
#include "uniinst/parallel.hpp"
#include "uniinst/rng.hpp"
#include "uniinst/scene_io.hpp"
#include "uniinst/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uniinst;

namespace {

// Exit codes: 0 success, 1 internal error, 2 usage or validation error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw UsageError("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw UsageError("write failed for " + path.string());
  }
}

std::vector<fs::path> list_scene_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw UsageError(dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("scene_", 0) == 0 && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<LoadedScene> load_scenes(const fs::path& dir,
                                     std::vector<std::string>* names) {
  const std::vector<fs::path> files = list_scene_files(dir);
  std::vector<LoadedScene> scenes(files.size());
  parallel_for(static_cast<int>(files.size()), [&](int i) {
    scenes[i] = scene_from_json(read_json_file(files[i]),
                                files[i].filename().string());
  });
  if (names) {
    for (const auto& f : files) names->push_back(f.filename().string());
  }
  return scenes;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 int num_scenes, long long seed_flag) {
  SimulationConfig cfg = sim_config_from_json(read_json_file(config_path));
  if (seed_flag >= 0) {
    cfg.scene.seed = static_cast<std::uint64_t>(seed_flag);
  }
  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw UsageError("cannot create output directory " + out.string());
  }

  std::vector<std::string> rendered(num_scenes);
  parallel_for(num_scenes, [&](int i) {
    LoadedScene scene;
    scene.image_height = cfg.scene.image_height;
    scene.image_width = cfg.scene.image_width;
    scene.gts = generate_scene(cfg.scene, i);
    const std::uint64_t synth_seed =
        StreamRng(cfg.scene.seed, {static_cast<std::uint64_t>(i), 0xFEEDull})
            .next_u64();
    const auto scored = synthesize_predictions(scene.gts, cfg.predictor,
                                               cfg.levels, synth_seed);
    scene.preds.reserve(scored.size());
    for (const auto& sp : scored) scene.preds.push_back(sp.pred);
    rendered[i] = scene_to_json(scene).dump(2) + "\n";
  });

  json manifest;
  manifest["config"] = sim_config_to_json(cfg);
  manifest["config_hash"] = fnv1a_hex(manifest["config"].dump());
  manifest["num_scenes"] = num_scenes;
  json file_list = json::array();
  for (int i = 0; i < num_scenes; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%05d.json", i);
    write_text_file(out / name, rendered[i]);
    file_list.push_back(name);
  }
  manifest["scene_files"] = file_list;
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << num_scenes << " scenes to " << out.string()
            << "\n";
  return 0;
}

int cmd_assign(const std::string& scenes_dir, double alpha,
               const std::string& out_path) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw UsageError("--alpha must lie in [0, 1]");
  }
  std::vector<std::string> names;
  const std::vector<LoadedScene> scenes = load_scenes(scenes_dir, &names);

  OyorConfig cfg;
  cfg.alpha = alpha;
  const MaskOpsConfig mcfg;

  std::vector<Assignment> results(scenes.size());
  parallel_for(static_cast<int>(scenes.size()), [&](int i) {
    results[i] = assign(scenes[i].preds, scenes[i].gts, cfg, mcfg);
  });

  json per_scene = json::array();
  double quality_sum = 0.0;
  std::int64_t matched = 0, unmatched = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    json pairs = json::array();
    for (const auto& p : results[i].pairs) {
      pairs.push_back({{"gt", p.gt_index},
                       {"pred", p.pred_index},
                       {"quality", p.quality}});
      quality_sum += p.quality;
      ++matched;
    }
    unmatched += static_cast<std::int64_t>(results[i].unmatched_gts.size());
    per_scene.push_back({{"file", names[i]},
                         {"pairs", pairs},
                         {"unmatched_gts", results[i].unmatched_gts}});
  }
  const std::int64_t total_gts = matched + unmatched;
  json report;
  report["alpha"] = alpha;
  report["num_scenes"] = scenes.size();
  report["scenes"] = per_scene;
  report["summary"] = {
      {"mean_quality", matched > 0 ? quality_sum / matched : 0.0},
      {"matched_pairs", matched},
      {"unmatched_gts", unmatched},
      {"unmatched_fraction",
       total_gts > 0 ? static_cast<double>(unmatched) / total_gts : 0.0}};
  write_text_file(out_path, report.dump(2) + "\n");
  std::cout << "assigned " << scenes.size() << " scenes, unmatched fraction "
            << report["summary"]["unmatched_fraction"].dump() << "\n";
  return 0;
}

int cmd_eval(const std::string& scenes_dir, const std::string& ranking_name,
             const std::string& nms_name, const std::string& out_path) {
  Ranking ranking;
  if (ranking_name == "cls") {
    ranking = Ranking::kClsOnly;
  } else if (ranking_name == "rerank") {
    ranking = Ranking::kRerank;
  } else {
    throw UsageError("--ranking must be cls or rerank");
  }
  bool use_nms;
  if (nms_name == "on") {
    use_nms = true;
  } else if (nms_name == "off") {
    use_nms = false;
  } else {
    throw UsageError("--nms must be on or off");
  }

  const std::vector<LoadedScene> loaded = load_scenes(scenes_dir, nullptr);
  const NmsConfig nms_cfg;
  const MaskOpsConfig mcfg;

  std::vector<EvalScene> scenes(loaded.size());
  parallel_for(static_cast<int>(loaded.size()), [&](int i) {
    EvalScene scene;
    scene.gts = loaded[i].gts;
    std::vector<ScoredPrediction> scored =
        rank_predictions(loaded[i].preds, ranking);
    if (use_nms) {
      std::vector<ScoredPrediction> kept;
      for (int k : greedy_mask_nms(scored, nms_cfg, mcfg)) {
        kept.push_back(std::move(scored[k]));
      }
      scene.preds = std::move(kept);
    } else {
      scene.preds = std::move(scored);
    }
    scenes[i] = std::move(scene);
  });

  const EvalReport report = evaluate(scenes, mcfg);
  json out = report_to_json(report);
  out["ranking"] = ranking_name;
  out["nms"] = nms_name;
  out["num_scenes"] = scenes.size();
  out["duplicate_rate"] = duplicate_rate(scenes, nms_cfg.iou_threshold, mcfg);
  write_text_file(out_path, out.dump(2) + "\n");
  std::cout << "ap " << out["ap"].dump() << " ar " << out["ar"].dump()
            << " duplicate_rate " << out["duplicate_rate"].dump() << "\n";
  return 0;
}

struct BenchRow {
  int gts = 0;
  int preds = 0;
  double solve_median_ms = 0.0;
  double solve_min_ms = 0.0;
  double solve_max_ms = 0.0;
  double eval_median_ms = 0.0;
};

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return xs.empty() ? 0.0 : xs[xs.size() / 2];
}

int cmd_bench(const std::string& sizes_flag, int reps,
              const std::string& out_path) {
  std::vector<std::pair<int, int>> sizes;
  std::string token;
  std::stringstream stream(sizes_flag);
  while (std::getline(stream, token, ',')) {
    int g = 0, n = 0;
    if (std::sscanf(token.c_str(), "%dx%d", &g, &n) != 2 || g < 0 || n < 0) {
      throw UsageError("--sizes entries must look like GxN");
    }
    sizes.emplace_back(g, n);
  }
  if (sizes.empty()) throw UsageError("--sizes must not be empty");

  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point start) {
    return std::chrono::duration<double, std::milli>(clock::now() - start)
        .count();
  };

  std::vector<BenchRow> rows;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const auto [g, n] = sizes[s];
    BenchRow row;
    row.gts = g;
    row.preds = n;

    QualityMatrix q{g, n, {}};
    q.q.resize(static_cast<std::size_t>(g) * n);
    StreamRng rng(12345, {s});
    for (auto& x : q.q) x = rng.next_unit();

    std::vector<double> solve_times;
    for (int r = 0; r < reps; ++r) {
      const auto start = clock::now();
      const Assignment a = solve(q);
      const double elapsed = ms_since(start);
      if (static_cast<int>(a.pairs.size()) != std::min(g, n)) {
        throw std::logic_error("bench solve produced a wrong pair count");
      }
      solve_times.push_back(elapsed);
    }
    row.solve_median_ms = median(solve_times);
    row.solve_min_ms =
        *std::min_element(solve_times.begin(), solve_times.end());
    row.solve_max_ms =
        *std::max_element(solve_times.begin(), solve_times.end());

    // Evaluation workload scaled to the same (G, N): G instances per scene
    // and N predictions spread over them.
    std::vector<double> eval_times;
    if (g > 0 && n > 0) {
      SceneConfig scfg;
      scfg.image_height = 96;
      scfg.image_width = 96;
      scfg.min_instances = std::min(g, 8);
      scfg.max_instances = std::min(g, 8);
      scfg.occlusion_level = 0.2;
      scfg.seed = 500 + s;
      PredictorModel model;
      const int dups = std::max(1, n / std::max(1, std::min(g, 8)));
      model.kind =
          dups > 1 ? PredictorKind::kRedundant : PredictorKind::kUnique;
      model.duplicates_per_instance = dups > 1 ? dups : 1;
      model.mask_noise = 0.05;
      const std::vector<LevelSpec> levels = {LevelSpec{3}, LevelSpec{4},
                                             LevelSpec{5}};
      std::vector<EvalScene> scenes(8);
      for (int i = 0; i < 8; ++i) {
        scenes[i].gts = generate_scene(scfg, i);
        scenes[i].preds =
            synthesize_predictions(scenes[i].gts, model, levels, 900 + i);
      }
      for (int r = 0; r < reps; ++r) {
        const auto start = clock::now();
        evaluate(scenes);
        eval_times.push_back(ms_since(start));
      }
    } else {
      eval_times.assign(reps, 0.0);
    }
    row.eval_median_ms = median(eval_times);
    rows.push_back(row);
  }

  std::printf("%8s %8s %14s %14s %14s %14s\n", "gts", "preds",
              "solve med(ms)", "solve min(ms)", "solve max(ms)",
              "eval med(ms)");
  for (const auto& row : rows) {
    std::printf("%8d %8d %14.4f %14.4f %14.4f %14.4f\n", row.gts, row.preds,
                row.solve_median_ms, row.solve_min_ms, row.solve_max_ms,
                row.eval_median_ms);
  }

  // Empirical scaling exponent of solve against the classical cubic-cost
  // size cbrt(G * N * min(G, N)); sub-cubic means a slope below 3.
  double slope = 0.0;
  int fit_points = 0;
  {
    std::vector<double> xs, ys;
    for (const auto& row : rows) {
      const double work = static_cast<double>(row.gts) * row.preds *
                          std::min(row.gts, row.preds);
      if (work <= 0.0 || row.solve_median_ms <= 0.0) continue;
      xs.push_back(std::log(std::cbrt(work)));
      ys.push_back(std::log(row.solve_median_ms));
    }
    fit_points = static_cast<int>(xs.size());
    if (fit_points >= 2) {
      double mx = 0, my = 0;
      for (int i = 0; i < fit_points; ++i) {
        mx += xs[i];
        my += ys[i];
      }
      mx /= fit_points;
      my /= fit_points;
      double num = 0, den = 0;
      for (int i = 0; i < fit_points; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
      }
      slope = den > 0 ? num / den : 0.0;
    }
  }
  bool subcubic = true;
  if (fit_points >= 3) {
    subcubic = slope < 3.0;
    std::printf("solve scaling exponent: %.2f (sub-cubic: %s)\n", slope,
                subcubic ? "yes" : "no");
  }

  if (!out_path.empty()) {
    json out;
    out["sizes"] = json::array();
    for (const auto& row : rows) {
      out["sizes"].push_back({{"gts", row.gts},
                              {"preds", row.preds},
                              {"solve_median_ms", row.solve_median_ms},
                              {"solve_min_ms", row.solve_min_ms},
                              {"solve_max_ms", row.solve_max_ms},
                              {"eval_median_ms", row.eval_median_ms}});
    }
    out["solve_scaling_exponent"] = slope;
    out["subcubic"] = subcubic;
    write_text_file(out_path, out.dump(2) + "\n");
  }
  if (!subcubic) {
    std::cerr << "solve timing grew at least cubically on this grid\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-to-one instance assignment engine"};
  app.require_subcommand(1);

  std::string config_path, out_dir, out_path, scenes_dir;
  std::string ranking = "cls", nms = "off";
  std::string sizes = "8x64,16x128,32x256,64x512";
  int num_scenes = 10;
  int reps = 5;
  long long seed_flag = -1;
  double alpha = 0.9;

  CLI::App* simulate =
      app.add_subcommand("simulate", "generate synthetic scene files");
  simulate->add_option("--config", config_path, "scene config JSON")
      ->required();
  simulate->add_option("--out", out_dir, "output directory")->required();
  simulate->add_option("--num-scenes", num_scenes, "number of scenes")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", seed_flag, "override the config seed");

  CLI::App* assign_cmd =
      app.add_subcommand("assign", "run one-to-one assignment over scenes");
  assign_cmd->add_option("--scenes", scenes_dir, "scene directory")
      ->required();
  assign_cmd->add_option("--alpha", alpha, "quality balance in [0,1]");
  assign_cmd->add_option("--out", out_path, "report path")->required();

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "rank, optionally suppress, then score");
  eval_cmd->add_option("--scenes", scenes_dir, "scene directory")->required();
  eval_cmd->add_option("--ranking", ranking, "cls or rerank");
  eval_cmd->add_option("--nms", nms, "on or off");
  eval_cmd->add_option("--out", out_path, "report path")->required();

  CLI::App* bench =
      app.add_subcommand("bench", "time the solver and the evaluator");
  bench->add_option("--sizes", sizes, "comma-separated GxN grid");
  bench->add_option("--reps", reps, "repetitions per size")
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", out_path, "optional JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(config_path, out_dir, num_scenes, seed_flag);
    }
    if (assign_cmd->parsed()) {
      return cmd_assign(scenes_dir, alpha, out_path);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(scenes_dir, ranking, nms, out_path);
    }
    if (bench->parsed()) {
      return cmd_bench(sizes, reps, out_path);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SceneFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
