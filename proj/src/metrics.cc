#include "semclique/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace semclique {

absl::StatusOr<double> Ade(std::span<const AgentState> pred,
                           std::span<const AgentState> gt) {
  if (pred.size() != gt.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "trajectory lengths differ: ", pred.size(), " vs ", gt.size()));
  }
  if (pred.empty()) {
    return absl::InvalidArgumentError("empty trajectories");
  }
  double total = 0.0;
  for (size_t k = 0; k < pred.size(); ++k) {
    total += Distance(pred[k].position(), gt[k].position());
  }
  return total / static_cast<double>(pred.size());
}

absl::StatusOr<double> Fde(std::span<const AgentState> pred,
                           std::span<const AgentState> gt, double at,
                           double dt) {
  if (pred.size() != gt.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "trajectory lengths differ: ", pred.size(), " vs ", gt.size()));
  }
  const double steps = at / dt;
  const double rounded = std::round(steps);
  if (!(dt > 0.0) || std::abs(steps - rounded) > 1e-6 || rounded < 1.0 ||
      rounded > static_cast<double>(pred.size())) {
    return absl::OutOfRangeError(absl::StrCat(
        "FDE stamp ", at, " s is not a step inside the ",
        pred.size() * dt, " s horizon"));
  }
  const size_t k = static_cast<size_t>(rounded) - 1;
  return Distance(pred[k].position(), gt[k].position());
}

std::vector<size_t> TopModes(const std::vector<TrajectoryMode>& modes, int n) {
  std::vector<size_t> order(modes.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return modes[a].confidence > modes[b].confidence;
  });
  order.resize(std::min(order.size(), static_cast<size_t>(std::max(n, 0))));
  return order;
}

absl::StatusOr<size_t> BestOfN(const std::vector<TrajectoryMode>& modes, int n,
                               std::span<const AgentState> gt) {
  if (modes.empty()) return absl::InvalidArgumentError("no modes");
  if (n < 1 || static_cast<size_t>(n) > modes.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Best-of-N needs 1 <= n <= ", modes.size(), ", got ", n));
  }
  if (gt.empty()) return absl::InvalidArgumentError("empty ground truth");
  size_t best = 0;
  double best_error = std::numeric_limits<double>::infinity();
  for (size_t m : TopModes(modes, n)) {
    const std::vector<AgentState>& states = modes[m].states;
    if (states.size() != gt.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("mode ", m, " length differs from ground truth"));
    }
    const double error =
        Distance(states.back().position(), gt.back().position());
    if (error < best_error) {
      best_error = error;
      best = m;
    }
  }
  return best;
}

absl::StatusOr<std::vector<AgentState>> FutureStates(const Scene& scene,
                                                     const std::string& id,
                                                     int timestep, int steps) {
  auto it = scene.ground_truth.find(id);
  if (it == scene.ground_truth.end()) {
    return absl::NotFoundError(
        absl::StrCat("missing ground truth for agent '", id, "'"));
  }
  std::vector<AgentState> out;
  out.reserve(steps);
  for (int k = 1; k <= steps; ++k) {
    const AgentState* s = it->second.StateAt(timestep + k);
    if (s == nullptr) {
      return absl::NotFoundError(absl::StrCat(
          "ground truth for '", id, "' lacks timestep ", timestep + k));
    }
    out.push_back(*s);
  }
  return out;
}

absl::StatusOr<MacResult> Mac(const PredictionSet& predictions,
                              const Scene& scene,
                              const std::vector<Clique>& cliques, int n,
                              double mu_floor) {
  const int steps = scene.HorizonSteps();
  MacResult result;
  if (cliques.empty()) return result;
  double total = 0.0;
  for (const Clique& clique : cliques) {
    int misses = 0;
    for (const std::string& id : clique.member_ids) {
      auto pit = predictions.modes.find(id);
      const SceneAgent* agent = scene.FindAgent(id);
      if (pit == predictions.modes.end() || agent == nullptr) {
        return absl::NotFoundError(
            absl::StrCat("no prediction for agent '", id, "'"));
      }
      absl::StatusOr<std::vector<AgentState>> gt =
          FutureStates(scene, id, clique.timestep_index, steps);
      if (!gt.ok()) return gt.status();
      if (gt->empty()) {
        return absl::InvalidArgumentError("horizon shorter than one step");
      }

      const AgentState& gt_final = gt->back();
      const Vec2 lon = UnitFromAngle(gt_final.heading);
      const Vec2 lat{-lon.y, lon.x};
      double sum_lon = 0.0;
      double sum_lat = 0.0;
      int count = 0;
      for (const TimedState& ts : agent->history.states) {
        if (ts.index > clique.timestep_index) break;
        sum_lon += std::abs(Dot(ts.state.velocity(), lon));
        sum_lat += std::abs(Dot(ts.state.velocity(), lat));
        ++count;
      }
      const double mu_lon = std::max(count > 0 ? sum_lon / count : 0.0,
                                     mu_floor);
      const double mu_lat = std::max(count > 0 ? sum_lat / count : 0.0,
                                     mu_floor);
      const double limit_lon = scene.horizon / 3.0 * mu_lon;
      const double limit_lat = scene.horizon / 3.0 * mu_lat;

      bool hit = false;
      for (size_t m : TopModes(pit->second, n)) {
        const std::vector<AgentState>& states = pit->second[m].states;
        if (states.size() != gt->size()) {
          return absl::InvalidArgumentError(
              absl::StrCat("prediction length mismatch for '", id, "'"));
        }
        const Vec2 error = states.back().position() - gt_final.position();
        if (std::abs(Dot(error, lon)) <= limit_lon &&
            std::abs(Dot(error, lat)) <= limit_lat) {
          hit = true;
          break;
        }
      }
      if (!hit) ++misses;
    }
    const double fraction =
        static_cast<double>(misses) / clique.member_ids.size();
    result.miss_fraction.push_back(fraction);
    total += fraction;
  }
  result.percent = 100.0 * total / cliques.size();
  return result;
}

double CollisionRate(const PredictionSet& predictions, const Scene& scene) {
  struct Track {
    const std::vector<AgentState>* states;
    double radius;
  };
  std::vector<Track> tracks;
  for (const auto& [id, modes] : predictions.modes) {
    const SceneAgent* agent = scene.FindAgent(id);
    if (agent == nullptr || modes.empty()) continue;
    const size_t top = TopModes(modes, 1).front();
    tracks.push_back({&modes[top].states, agent->type.footprint_radius});
  }
  if (tracks.size() < 2) return 0.0;
  size_t steps = tracks.front().states->size();
  for (const Track& t : tracks) steps = std::min(steps, t.states->size());
  if (steps == 0) return 0.0;

  size_t hits = 0;
  for (size_t i = 0; i < tracks.size(); ++i) {
    for (size_t j = i + 1; j < tracks.size(); ++j) {
      const double limit = tracks[i].radius + tracks[j].radius;
      for (size_t k = 0; k < steps; ++k) {
        if (Distance((*tracks[i].states)[k].position(),
                     (*tracks[j].states)[k].position()) < limit) {
          ++hits;
        }
      }
    }
  }
  const size_t pairs = tracks.size() * (tracks.size() - 1) / 2;
  return static_cast<double>(hits) / static_cast<double>(pairs * steps);
}

absl::StatusOr<EvalReport> Evaluate(const PredictionSet& predictions,
                                    const Scene& scene,
                                    const std::vector<Clique>& cliques,
                                    const EvalOptions& options) {
  const int steps = scene.HorizonSteps();
  EvalReport report;
  report.stamps = options.stamps;
  report.mean_fde.assign(options.stamps.size(), 0.0);

  for (size_t c = 0; c < cliques.size(); ++c) {
    for (const std::string& id : cliques[c].member_ids) {
      auto pit = predictions.modes.find(id);
      if (pit == predictions.modes.end()) {
        return absl::NotFoundError(
            absl::StrCat("no prediction for agent '", id, "'"));
      }
      absl::StatusOr<std::vector<AgentState>> gt =
          FutureStates(scene, id, cliques[c].timestep_index, steps);
      if (!gt.ok()) return gt.status();
      absl::StatusOr<size_t> best = BestOfN(pit->second, options.n, *gt);
      if (!best.ok()) return best.status();
      const std::vector<AgentState>& chosen = pit->second[*best].states;

      AgentMetrics m;
      m.agent_id = id;
      m.clique_id = static_cast<int>(c);
      m.selected_mode = *best;
      absl::StatusOr<double> ade = Ade(chosen, *gt);
      if (!ade.ok()) return ade.status();
      m.ade = *ade;
      for (double stamp : options.stamps) {
        absl::StatusOr<double> fde = Fde(chosen, *gt, stamp, scene.dt);
        if (!fde.ok()) return fde.status();
        m.fde.push_back(*fde);
      }
      report.agents.push_back(std::move(m));
    }
  }
  std::sort(report.agents.begin(), report.agents.end(),
            [](const AgentMetrics& a, const AgentMetrics& b) {
              return a.agent_id < b.agent_id;
            });

  absl::StatusOr<MacResult> mac =
      Mac(predictions, scene, cliques, options.n, options.mu_floor);
  if (!mac.ok()) return mac.status();
  report.mac_percent = mac->percent;
  for (size_t c = 0; c < cliques.size(); ++c) {
    report.cliques.push_back({static_cast<int>(c), cliques[c].member_ids,
                              mac->miss_fraction[c]});
  }
  report.collision_rate = CollisionRate(predictions, scene);

  if (!report.agents.empty()) {
    for (const AgentMetrics& m : report.agents) {
      report.mean_ade += m.ade;
      for (size_t s = 0; s < m.fde.size(); ++s) report.mean_fde[s] += m.fde[s];
    }
    const double count = static_cast<double>(report.agents.size());
    report.mean_ade /= count;
    for (double& f : report.mean_fde) f /= count;
  }
  return report;
}

}  // namespace semclique
