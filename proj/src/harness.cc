#include "semclique/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "semclique/scene_io.h"

namespace semclique {
namespace {

constexpr char kMeanGroup[] = "mean";

std::string StampCell(double stamp) { return FormatNumber(stamp); }

void AppendRow(std::string* out, const std::vector<std::string>& cells) {
  absl::StrAppend(out, absl::StrJoin(cells, ","), "\n");
}

// Clique members always come from the graph they were formed on.
double AlphaBetween(const SceneGraph& graph, const std::string& a,
                    const std::string& b) {
  return graph.alpha(*graph.IndexOf(a), *graph.IndexOf(b));
}

// Weights from `id` to the rest of its clique.
std::pair<double, double> AlphaSpan(const SceneGraph& graph,
                                    const Clique& clique,
                                    const std::string& id) {
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (const std::string& other : clique.member_ids) {
    if (other == id) continue;
    const double a = AlphaBetween(graph, id, other);
    lo = first ? a : std::min(lo, a);
    hi = first ? a : std::max(hi, a);
    first = false;
  }
  return {lo, hi};
}

// Metric rows of one ablation group, in table order.
struct MetricRow {
  std::string metric;
  std::string stamp;
};

std::vector<MetricRow> AblationRows(const std::vector<double>& stamps) {
  std::vector<MetricRow> rows;
  for (double s : stamps) rows.push_back({"fde", StampCell(s)});
  rows.push_back({"ade", ""});
  rows.push_back({"mac_percent", ""});
  rows.push_back({"collision_rate", ""});
  return rows;
}

std::vector<double> AblationValues(const EvalReport& report) {
  std::vector<double> values = report.mean_fde;
  values.push_back(report.mean_ade);
  values.push_back(report.mac_percent);
  values.push_back(report.collision_rate);
  return values;
}

}  // namespace

absl::Status RunSettings::Validate() const {
  if (absl::Status s = criteria.Validate(); !s.ok()) return s;
  if (modes < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("modes must be >= 1, got ", modes));
  }
  if (eval.n < 1 || eval.n > modes) {
    return absl::InvalidArgumentError(absl::StrCat(
        "best-of-n must lie in [1, modes=", modes, "], got ", eval.n));
  }
  if (!(eval.mu_floor > 0.0) || !std::isfinite(eval.mu_floor)) {
    return absl::InvalidArgumentError("mu floor must be positive");
  }
  if (eval.stamps.empty()) {
    return absl::InvalidArgumentError("at least one FDE stamp is required");
  }
  for (double s : eval.stamps) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      return absl::InvalidArgumentError(
          absl::StrCat("FDE stamps must be positive, got ", s));
    }
  }
  for (const std::optional<double>& d0 : {d0_vehicle, d0_pedestrian}) {
    if (d0.has_value() && (!(*d0 > 0.0) || !std::isfinite(*d0))) {
      return absl::InvalidArgumentError("d0 overrides must be positive");
    }
  }
  if (raster.size < 1 || !(raster.resolution > 0.0)) {
    return absl::InvalidArgumentError(
        "raster size and resolution must be positive");
  }
  if (!std::isfinite(predictor_config.heading_step)) {
    return absl::InvalidArgumentError("heading step must be finite");
  }
  return absl::OkStatus();
}

Scene WithOverrides(const Scene& scene, const RunSettings& settings) {
  Scene out = scene;
  for (SceneAgent& a : out.agents) {
    const std::optional<double>& d0 = a.type.kind == AgentKind::kVehicle
                                          ? settings.d0_vehicle
                                          : settings.d0_pedestrian;
    if (d0.has_value()) a.type.d0 = *d0;
  }
  return out;
}

absl::StatusOr<SceneRun> RunScene(const Scene& input,
                                  const RunSettings& settings, bool evaluate) {
  if (absl::Status s = settings.Validate(); !s.ok()) return s;
  const Scene scene = WithOverrides(input, settings);

  SceneRun run;
  absl::StatusOr<CliqueTimeline> timeline =
      CliquesOverTime(scene, settings.criteria);
  if (!timeline.ok()) return timeline.status();
  run.timeline = *std::move(timeline);
  if (!evaluate) return run;

  absl::StatusOr<std::unique_ptr<Predictor>> predictor =
      MakePredictor(settings.predictor, settings.predictor_config);
  if (!predictor.ok()) return predictor.status();
  for (const Clique& clique : run.timeline.final_cliques) {
    absl::StatusOr<PredictionSet> part =
        (*predictor)->Predict(clique, scene, settings.modes);
    if (!part.ok()) return part.status();
    run.predictions.modes.merge(part->modes);
    run.predictions.fallback_agents.merge(part->fallback_agents);
  }

  absl::StatusOr<EvalReport> report = Evaluate(
      run.predictions, scene, run.timeline.final_cliques, settings.eval);
  if (!report.ok()) return report.status();
  run.report = *std::move(report);
  return run;
}

std::string FormatNumber(double value) {
  if (value == 0.0) return "0";  // folds -0
  return absl::StrFormat("%.9g", value);
}

std::string CliquesCsv(const CliqueTimeline& timeline, bool final_only) {
  std::string out = "timestep,clique_id,agent_id,alpha_min,alpha_max\n";
  const size_t begin = final_only && !timeline.snapshots.empty()
                           ? timeline.snapshots.size() - 1
                           : 0;
  for (size_t s = begin; s < timeline.snapshots.size(); ++s) {
    const CliqueSnapshot& snap = timeline.snapshots[s];
    for (size_t c = 0; c < snap.cliques.size(); ++c) {
      for (const std::string& id : snap.cliques[c].member_ids) {
        const auto [lo, hi] = AlphaSpan(snap.graph, snap.cliques[c], id);
        AppendRow(&out, {absl::StrCat(snap.timestep_index), absl::StrCat(c),
                         id, FormatNumber(lo), FormatNumber(hi)});
      }
    }
  }
  return out;
}

std::string CliquesText(const CliqueTimeline& timeline,
                        const CriteriaConfig& config, bool final_only) {
  std::string out;
  const size_t begin = final_only && !timeline.snapshots.empty()
                           ? timeline.snapshots.size() - 1
                           : 0;
  for (size_t s = begin; s < timeline.snapshots.size(); ++s) {
    const CliqueSnapshot& snap = timeline.snapshots[s];
    absl::StrAppend(&out, "timestep ", snap.timestep_index, ": ",
                    snap.graph.size(), " agents, ",
                    snap.graph.EdgeCount(config.alpha_threshold),
                    " edges above ", FormatNumber(config.alpha_threshold),
                    ", ", snap.cliques.size(), " cliques\n");
    for (size_t c = 0; c < snap.cliques.size(); ++c) {
      const Clique& clique = snap.cliques[c];
      absl::StrAppend(&out, "  clique ", c, ": ",
                      absl::StrJoin(clique.member_ids, " "));
      double lo = 0.0;
      double hi = 0.0;
      int edges = 0;
      for (size_t a = 0; a < clique.member_ids.size(); ++a) {
        for (size_t b = a + 1; b < clique.member_ids.size(); ++b) {
          const double w = AlphaBetween(snap.graph, clique.member_ids[a],
                                        clique.member_ids[b]);
          if (w <= config.alpha_threshold) continue;
          lo = edges == 0 ? w : std::min(lo, w);
          hi = edges == 0 ? w : std::max(hi, w);
          ++edges;
        }
      }
      if (edges == 0) {
        absl::StrAppend(&out, "  (singleton)\n");
      } else {
        absl::StrAppend(&out, "  (", edges, " edges, alpha ",
                        FormatNumber(lo), " .. ", FormatNumber(hi), ")\n");
      }
    }
  }
  absl::StrAppend(&out, "tracked pairs: ", timeline.edge_history.size(), "\n");
  return out;
}

std::string BatchesCsv(const std::vector<CliqueBatch>& batches) {
  std::string out =
      "clique_id,agent_id,kind,history_steps,edge_sum,barrier_cells,"
      "divider_cells,vehicle_cells,pedestrian_cells\n";
  for (const CliqueBatch& batch : batches) {
    for (const ActiveNode& node : batch.nodes) {
      double edge_sum = 0.0;
      for (double w : node.edge_weights) edge_sum += w;
      std::vector<std::string> cells = {
          absl::StrCat(batch.clique_id), node.agent_id,
          std::string(AgentKindName(node.kind)),
          absl::StrCat(node.relative_history.size()),
          FormatNumber(edge_sum)};
      for (int ch = 0; ch < node.local_map.channels; ++ch) {
        cells.push_back(absl::StrCat(node.local_map.CountSet(ch)));
      }
      AppendRow(&out, cells);
    }
  }
  return out;
}

std::string PredictionsCsv(const PredictionSet& predictions, double dt) {
  std::string out = "agent_id,mode,confidence,fallback,t,x,y,heading,vx,vy\n";
  for (const auto& [id, modes] : predictions.modes) {
    const std::string fallback =
        predictions.fallback_agents.contains(id) ? "1" : "0";
    for (size_t m = 0; m < modes.size(); ++m) {
      const TrajectoryMode& mode = modes[m];
      for (size_t k = 0; k < mode.states.size(); ++k) {
        const AgentState& s = mode.states[k];
        AppendRow(&out, {id, absl::StrCat(m), FormatNumber(mode.confidence),
                         fallback, FormatNumber((k + 1) * dt),
                         FormatNumber(s.x), FormatNumber(s.y),
                         FormatNumber(s.heading), FormatNumber(s.vx),
                         FormatNumber(s.vy)});
      }
    }
  }
  return out;
}

std::string EvalCsv(const EvalReport& report, const std::string& scene_name) {
  std::string out = "section,id,metric,stamp,value\n";
  auto row = [&](std::string_view section, const std::string& id,
                 std::string_view metric, const std::string& stamp,
                 const std::string& value) {
    AppendRow(&out, {std::string(section), id, std::string(metric), stamp,
                     value});
  };
  row("scene", scene_name, "agents", "", absl::StrCat(report.agents.size()));
  row("scene", scene_name, "cliques", "", absl::StrCat(report.cliques.size()));
  row("scene", scene_name, "ade_mean", "", FormatNumber(report.mean_ade));
  for (size_t s = 0; s < report.stamps.size(); ++s) {
    row("scene", scene_name, "fde_mean", StampCell(report.stamps[s]),
        FormatNumber(report.mean_fde[s]));
  }
  row("scene", scene_name, "mac_percent", "", FormatNumber(report.mac_percent));
  row("scene", scene_name, "collision_rate", "",
      FormatNumber(report.collision_rate));
  for (const CliqueMetrics& c : report.cliques) {
    const std::string id = absl::StrCat(c.clique_id);
    row("clique", id, "size", "", absl::StrCat(c.member_ids.size()));
    row("clique", id, "miss_fraction", "", FormatNumber(c.miss_fraction));
  }
  for (const AgentMetrics& a : report.agents) {
    row("agent", a.agent_id, "clique_id", "", absl::StrCat(a.clique_id));
    row("agent", a.agent_id, "selected_mode", "",
        absl::StrCat(a.selected_mode));
    row("agent", a.agent_id, "ade", "", FormatNumber(a.ade));
    for (size_t s = 0; s < report.stamps.size(); ++s) {
      row("agent", a.agent_id, "fde", StampCell(report.stamps[s]),
          FormatNumber(a.fde[s]));
    }
  }
  return out;
}

std::string EvalSummary(const EvalReport& report, const PredictionSet& preds) {
  std::string out = absl::StrCat(report.agents.size(), " agents in ",
                                 report.cliques.size(), " cliques\n");
  absl::StrAppend(&out, "ADE ", FormatNumber(report.mean_ade), " m\n");
  for (size_t s = 0; s < report.stamps.size(); ++s) {
    absl::StrAppend(&out, "FDE @", FormatNumber(report.stamps[s]), "s ",
                    FormatNumber(report.mean_fde[s]), " m\n");
  }
  absl::StrAppend(&out, "mAC ", FormatNumber(report.mac_percent), " %\n");
  absl::StrAppend(&out, "collision rate ",
                  FormatNumber(report.collision_rate), "\n");
  if (!preds.fallback_agents.empty()) {
    absl::StrAppend(&out, "CV fallback for: ",
                    absl::StrJoin(preds.fallback_agents, " "), "\n");
  }
  return out;
}

std::vector<NamedConfig> AblationConfigs(const CriteriaConfig& base) {
  CriteriaConfig all = base;
  all.use_distance = all.use_direction = all.use_barrier =
      all.use_lane_overlap = true;
  CriteriaConfig wo_direction = all;
  wo_direction.use_direction = false;
  CriteriaConfig wo_barrier = all;
  wo_barrier.use_barrier = false;
  CriteriaConfig wo_lane = all;
  wo_lane.use_lane_overlap = false;
  CriteriaConfig distance_only = all;
  distance_only.use_direction = distance_only.use_barrier =
      distance_only.use_lane_overlap = false;
  return {{"all_on", all},
          {"wo_direction", wo_direction},
          {"wo_barrier", wo_barrier},
          {"wo_lane_overlap", wo_lane},
          {"distance_only", distance_only}};
}

absl::StatusOr<std::vector<NamedScene>> LoadSceneDir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    return absl::NotFoundError(absl::StrCat("not a directory: ", dir));
  }
  std::vector<fs::path> paths;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  if (ec) return absl::UnavailableError(absl::StrCat("cannot list ", dir));
  if (paths.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("no *.json scenes in ", dir));
  }
  std::sort(paths.begin(), paths.end());
  std::vector<NamedScene> scenes;
  for (const fs::path& p : paths) {
    absl::StatusOr<Scene> scene = LoadScene(p.string());
    if (!scene.ok()) return scene.status();
    scenes.emplace_back(p.stem().string(), *std::move(scene));
  }
  return scenes;
}

absl::StatusOr<std::string> AblateCsv(const std::vector<NamedScene>& scenes,
                                      const RunSettings& settings,
                                      int threads) {
  if (scenes.empty()) return absl::InvalidArgumentError("no scenes to ablate");
  if (absl::Status s = settings.Validate(); !s.ok()) return s;
  const std::vector<NamedConfig> configs = AblationConfigs(settings.criteria);

  // values[scene][config] = metric vector in AblationRows order.
  std::vector<std::vector<std::vector<double>>> values(scenes.size());
  std::vector<absl::Status> errors(scenes.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < scenes.size(); i = next++) {
      for (const NamedConfig& config : configs) {
        RunSettings local = settings;
        local.criteria = config.criteria;
        absl::StatusOr<SceneRun> run = RunScene(scenes[i].second, local);
        if (!run.ok()) {
          errors[i] = absl::Status(
              run.status().code(),
              absl::StrCat(scenes[i].first, ": ", run.status().message()));
          break;
        }
        values[i].push_back(AblationValues(run->report));
      }
    }
  };
  const int workers = std::clamp(threads, 1, static_cast<int>(scenes.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const absl::Status& e : errors) {
    if (!e.ok()) return e;
  }

  std::vector<std::string> names(scenes.size());
  std::vector<size_t> order(scenes.size());
  for (size_t i = 0; i < scenes.size(); ++i) {
    names[i] = scenes[i].first;
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return names[a] < names[b]; });

  std::vector<std::pair<std::string, std::vector<std::vector<double>>>> groups;
  for (size_t i : order) groups.emplace_back(names[i], values[i]);
  if (scenes.size() > 1) {
    std::vector<std::vector<double>> mean = values[0];
    for (size_t c = 0; c < configs.size(); ++c) {
      for (size_t m = 0; m < mean[c].size(); ++m) {
        // Summed in sorted scene order so the result is schedule-free.
        double sum = 0.0;
        for (size_t i : order) sum += values[i][c][m];
        mean[c][m] = sum / static_cast<double>(scenes.size());
      }
    }
    groups.emplace_back(kMeanGroup, std::move(mean));
  }

  std::vector<std::string> header = {"group", "metric", "stamp"};
  for (const NamedConfig& c : configs) header.push_back(c.name);
  for (size_t c = 1; c < configs.size(); ++c) {
    header.push_back(absl::StrCat("delta_", configs[c].name));
  }
  std::string out;
  AppendRow(&out, header);
  const std::vector<MetricRow> rows = AblationRows(settings.eval.stamps);
  for (const auto& [group, table] : groups) {
    for (size_t m = 0; m < rows.size(); ++m) {
      std::vector<std::string> cells = {group, rows[m].metric, rows[m].stamp};
      for (size_t c = 0; c < configs.size(); ++c) {
        cells.push_back(FormatNumber(table[c][m]));
      }
      for (size_t c = 1; c < configs.size(); ++c) {
        cells.push_back(FormatNumber(table[c][m] - table[0][m]));
      }
      AppendRow(&out, cells);
    }
  }
  return out;
}

}  // namespace semclique
