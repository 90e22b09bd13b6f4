// semclique: generate scenes, inspect cliques, predict, evaluate, ablate.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "semclique/clique_engine.h"
#include "semclique/harness.h"
#include "semclique/scene_io.h"
#include "semclique/scene_synth.h"
#include "semclique/svg_render.h"

namespace semclique {
namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct Tunables {
  RunSettings settings;
  bool no_distance = false;
  bool no_direction = false;
  bool no_barrier = false;
  bool no_lane_overlap = false;
  bool distance_only = false;
  double d0_vehicle = 0.0;
  double d0_pedestrian = 0.0;
  CLI::Option* d0_vehicle_opt = nullptr;
  CLI::Option* d0_pedestrian_opt = nullptr;
};

void AddCriteriaFlags(CLI::App* cmd, Tunables* t) {
  CriteriaConfig& c = t->settings.criteria;
  cmd->add_flag("--no-distance", t->no_distance,
                "Use the cap weight for every pair instead of d0/d");
  cmd->add_flag("--no-direction", t->no_direction,
                "Disable the closest-approach direction gate");
  cmd->add_flag("--no-barrier", t->no_barrier, "Disable the barrier gate");
  cmd->add_flag("--no-lane-overlap", t->no_lane_overlap,
                "Disable the lane-overlap gate");
  cmd->add_flag("--distance-only", t->distance_only,
                "Only the distance criterion");
  cmd->add_option("--relevance-distance", c.relevance_distance,
                  "Direction gate radius D, meters")
      ->capture_default_str();
  cmd->add_option("--alpha-threshold", c.alpha_threshold,
                  "Edges need alpha strictly above this")
      ->capture_default_str();
  cmd->add_option("--max-clique-size", c.max_clique_size)
      ->capture_default_str();
  cmd->add_option("--time-samples", c.time_samples,
                  "History timesteps sampled for clique snapshots")
      ->capture_default_str();
  cmd->add_option("--weight-cap", c.weight_cap)->capture_default_str();
  cmd->add_option("--association-radius", c.association_radius)
      ->capture_default_str();
  cmd->add_option("--reachability-depth", c.reachability_depth)
      ->capture_default_str();
  cmd->add_flag("--lane-overlap-pedestrians", c.lane_overlap_for_pedestrians,
                "Apply the lane gate to pairs involving pedestrians");
  t->d0_vehicle_opt = cmd->add_option("--d0-vehicle", t->d0_vehicle,
                                      "Override d0 for vehicles, meters");
  t->d0_pedestrian_opt = cmd->add_option(
      "--d0-pedestrian", t->d0_pedestrian, "Override d0 for pedestrians");
  cmd->add_option("--raster-size", t->settings.raster.size, "K, cells")
      ->capture_default_str();
  cmd->add_option("--raster-resolution", t->settings.raster.resolution,
                  "Meters per cell")
      ->capture_default_str();
}

void AddPredictFlags(CLI::App* cmd, Tunables* t) {
  RunSettings& s = t->settings;
  cmd->add_option("--predictor", s.predictor, "cv, ctrv or lane")
      ->capture_default_str();
  cmd->add_option("--modes", s.modes, "Modes generated per agent")
      ->capture_default_str();
  cmd->add_option("--heading-step", s.predictor_config.heading_step,
                  "Heading offset between perturbation modes, radians")
      ->capture_default_str();
}

void AddEvalFlags(CLI::App* cmd, Tunables* t) {
  EvalOptions& e = t->settings.eval;
  cmd->add_option("-n,--best-of", e.n, "Best-of-N")->capture_default_str();
  cmd->add_option("--mu-floor", e.mu_floor, "mAC speed floor, m/s")
      ->capture_default_str();
  cmd->add_option("--stamps", e.stamps, "FDE timestamps, seconds")
      ->delimiter(',');
}

// Folds the boolean switches and optional overrides into the settings.
RunSettings Resolve(const Tunables& t) {
  RunSettings s = t.settings;
  CriteriaConfig& c = s.criteria;
  c.use_distance = !t.no_distance;
  c.use_direction = !t.no_direction && !t.distance_only;
  c.use_barrier = !t.no_barrier && !t.distance_only;
  c.use_lane_overlap = !t.no_lane_overlap && !t.distance_only;
  s.predictor_config.association_radius = c.association_radius;
  if (t.d0_vehicle_opt->count() > 0) s.d0_vehicle = t.d0_vehicle;
  if (t.d0_pedestrian_opt->count() > 0) s.d0_pedestrian = t.d0_pedestrian;
  return s;
}

int Fail(int code, std::string_view message) {
  std::cerr << "semclique: " << message << "\n";
  return code;
}

int Fail(int code, const absl::Status& status) {
  return Fail(code, status.ToString());
}

// Writes to `path`, or stdout when it is empty or "-".
bool Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

int Run(int argc, char** argv) {
  CLI::App app{"Semantics-aware interaction cliques for multiagent scenes"};
  app.set_config("--config", "", "TOML or INI file with flag values");
  app.require_subcommand(1);

  // gen
  std::string gen_kind;
  uint64_t gen_seed = 0;
  std::string gen_out;
  ScenarioParams gen_params;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic scene");
  gen->add_option("--kind", gen_kind, ScenarioKindList())->required();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("-o,--out", gen_out, "Output path (stdout if omitted)");
  gen->add_option("--history-steps", gen_params.history_steps)
      ->capture_default_str();
  gen->add_option("--dt", gen_params.dt)->capture_default_str();
  gen->add_option("--horizon", gen_params.horizon)->capture_default_str();
  gen->add_option("--agents", gen_params.agent_count,
                  "crossing, mixed and random only; 0 = default")
      ->capture_default_str();
  gen->add_option("--jitter", gen_params.jitter)->capture_default_str();

  // cliques
  Tunables cliques_t;
  std::string cliques_scene;
  std::string cliques_format = "text";
  std::string cliques_svg;
  bool cliques_final = false;
  CLI::App* cliques =
      app.add_subcommand("cliques", "List clique partitions per timestep");
  cliques->add_option("scene", cliques_scene)->required();
  cliques->add_option("--format", cliques_format)
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
  cliques->add_flag("--final-only", cliques_final,
                    "Only the partition used for prediction");
  cliques->add_option("--svg", cliques_svg, "Write a top-down plot");
  AddCriteriaFlags(cliques, &cliques_t);

  // batches
  Tunables batches_t;
  std::string batches_scene;
  CLI::App* batches = app.add_subcommand(
      "batches", "Summarize per-node clique batches and local map rasters");
  batches->add_option("scene", batches_scene)->required();
  AddCriteriaFlags(batches, &batches_t);

  // predict
  Tunables predict_t;
  std::string predict_scene;
  std::string predict_out;
  CLI::App* predict =
      app.add_subcommand("predict", "Forecast every final-timestep clique");
  predict->add_option("scene", predict_scene)->required();
  predict->add_option("-o,--out", predict_out, "CSV path (stdout if omitted)");
  AddCriteriaFlags(predict, &predict_t);
  AddPredictFlags(predict, &predict_t);

  // eval
  Tunables eval_t;
  std::string eval_scene;
  std::string eval_csv;
  std::string eval_svg;
  CLI::App* eval = app.add_subcommand("eval", "Predict and score a scene");
  eval->add_option("scene", eval_scene)->required();
  eval->add_option("--csv", eval_csv, "CSV path; '-' for stdout");
  eval->add_option("--svg", eval_svg, "Write a top-down plot");
  AddCriteriaFlags(eval, &eval_t);
  AddPredictFlags(eval, &eval_t);
  AddEvalFlags(eval, &eval_t);

  // ablate
  Tunables ablate_t;
  ablate_t.settings.eval.stamps = {0.5, 1.5, 2.5, 3.5};
  std::string ablate_dir;
  std::string ablate_out;
  int ablate_threads =
      std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  CLI::App* ablate = app.add_subcommand(
      "ablate", "Evaluate a scene directory under each criterion toggle");
  ablate->add_option("scene_dir", ablate_dir)->required();
  ablate->add_option("-o,--out", ablate_out, "CSV path (stdout if omitted)");
  ablate->add_option("--threads", ablate_threads)->check(CLI::PositiveNumber);
  AddCriteriaFlags(ablate, &ablate_t);
  AddPredictFlags(ablate, &ablate_t);
  AddEvalFlags(ablate, &ablate_t);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  if (gen->parsed()) {
    absl::StatusOr<Scene> scene = GenScenario(gen_kind, gen_seed, gen_params);
    if (!scene.ok()) {
      return Fail(scene.status().code() == absl::StatusCode::kInvalidArgument
                      ? kUsageError
                      : kDataError,
                  scene.status());
    }
    if (!Emit(gen_out, SerializeScene(*scene))) {
      return Fail(kDataError, absl::StrCat("cannot write ", gen_out));
    }
    return 0;
  }

  auto load = [](const std::string& path) { return LoadScene(path); };

  if (cliques->parsed() || batches->parsed()) {
    const bool is_batches = batches->parsed();
    const RunSettings settings = Resolve(is_batches ? batches_t : cliques_t);
    if (absl::Status s = settings.Validate(); !s.ok()) {
      return Fail(kUsageError, s);
    }
    absl::StatusOr<Scene> scene =
        load(is_batches ? batches_scene : cliques_scene);
    if (!scene.ok()) return Fail(kDataError, scene.status());
    absl::StatusOr<SceneRun> run = RunScene(*scene, settings, false);
    if (!run.ok()) return Fail(kDataError, run.status());

    if (is_batches) {
      const CliqueSnapshot& last = run->timeline.snapshots.back();
      absl::StatusOr<std::vector<CliqueBatch>> b = BuildCliqueBatches(
          WithOverrides(*scene, settings), last.graph, last.cliques,
          settings.raster);
      if (!b.ok()) return Fail(kDataError, b.status());
      std::cout << BatchesCsv(*b);
      return 0;
    }
    std::cout << (cliques_format == "csv"
                      ? CliquesCsv(run->timeline, cliques_final)
                      : CliquesText(run->timeline, settings.criteria,
                                    cliques_final));
    if (!cliques_svg.empty() &&
        !Emit(cliques_svg, RenderSvg(*scene, run->timeline.final_cliques))) {
      return Fail(kDataError, absl::StrCat("cannot write ", cliques_svg));
    }
    return 0;
  }

  if (predict->parsed()) {
    const RunSettings settings = Resolve(predict_t);
    if (absl::Status s = settings.Validate(); !s.ok()) {
      return Fail(kUsageError, s);
    }
    if (absl::Status s = MakePredictor(settings.predictor).status(); !s.ok()) {
      return Fail(kUsageError, s);
    }
    absl::StatusOr<Scene> scene = load(predict_scene);
    if (!scene.ok()) return Fail(kDataError, scene.status());
    absl::StatusOr<SceneRun> run = RunScene(*scene, settings, false);
    if (!run.ok()) return Fail(kDataError, run.status());
    absl::StatusOr<std::unique_ptr<Predictor>> predictor =
        MakePredictor(settings.predictor, settings.predictor_config);
    PredictionSet all;
    for (const Clique& clique : run->timeline.final_cliques) {
      absl::StatusOr<PredictionSet> part =
          (*predictor)->Predict(clique, *scene, settings.modes);
      if (!part.ok()) return Fail(kDataError, part.status());
      all.modes.merge(part->modes);
      all.fallback_agents.merge(part->fallback_agents);
    }
    if (!Emit(predict_out, PredictionsCsv(all, scene->dt))) {
      return Fail(kDataError, absl::StrCat("cannot write ", predict_out));
    }
    return 0;
  }

  if (eval->parsed()) {
    const RunSettings settings = Resolve(eval_t);
    if (absl::Status s = settings.Validate(); !s.ok()) {
      return Fail(kUsageError, s);
    }
    if (absl::Status s = MakePredictor(settings.predictor).status(); !s.ok()) {
      return Fail(kUsageError, s);
    }
    absl::StatusOr<Scene> scene = load(eval_scene);
    if (!scene.ok()) return Fail(kDataError, scene.status());
    absl::StatusOr<SceneRun> run = RunScene(*scene, settings);
    if (!run.ok()) return Fail(kDataError, run.status());
    const std::string name =
        std::filesystem::path(eval_scene).stem().string();
    // The summary moves to stderr when the CSV owns stdout.
    (eval_csv == "-" ? std::cerr : std::cout)
        << EvalSummary(run->report, run->predictions);
    if (!eval_csv.empty() && !Emit(eval_csv, EvalCsv(run->report, name))) {
      return Fail(kDataError, absl::StrCat("cannot write ", eval_csv));
    }
    if (!eval_svg.empty() &&
        !Emit(eval_svg, RenderSvg(*scene, run->timeline.final_cliques,
                                  &run->predictions))) {
      return Fail(kDataError, absl::StrCat("cannot write ", eval_svg));
    }
    return 0;
  }

  if (ablate->parsed()) {
    const RunSettings settings = Resolve(ablate_t);
    if (absl::Status s = settings.Validate(); !s.ok()) {
      return Fail(kUsageError, s);
    }
    if (absl::Status s = MakePredictor(settings.predictor).status(); !s.ok()) {
      return Fail(kUsageError, s);
    }
    absl::StatusOr<std::vector<NamedScene>> scenes = LoadSceneDir(ablate_dir);
    if (!scenes.ok()) return Fail(kDataError, scenes.status());
    absl::StatusOr<std::string> table =
        AblateCsv(*scenes, settings, ablate_threads);
    if (!table.ok()) return Fail(kDataError, table.status());
    if (!Emit(ablate_out, *table)) {
      return Fail(kDataError, absl::StrCat("cannot write ", ablate_out));
    }
    return 0;
  }
  return kUsageError;
}

}  // namespace
}  // namespace semclique

int main(int argc, char** argv) { return semclique::Run(argc, argv); }
