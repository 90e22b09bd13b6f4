#ifndef SEMCLIQUE_METRICS_H_
#define SEMCLIQUE_METRICS_H_

// Forecast metrics: ADE, FDE, Best-of-N selection, mAC and collision rate.

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "semclique/predictor.h"
#include "semclique/scene.h"

namespace semclique {

inline constexpr double kDefaultMuFloor = 0.5;

// Mean L2 position error over aligned steps.
absl::StatusOr<double> Ade(std::span<const AgentState> pred,
                           std::span<const AgentState> gt);

// Position error at `at` seconds into the horizon; state k (0-based) is at
// (k + 1) * dt. `at` must be a multiple of dt inside the horizon.
absl::StatusOr<double> Fde(std::span<const AgentState> pred,
                           std::span<const AgentState> gt, double at,
                           double dt);

// Indices of the n highest-confidence modes, ties by lower index.
std::vector<size_t> TopModes(const std::vector<TrajectoryMode>& modes, int n);

// Among the n highest-confidence modes, the one with the smallest final
// displacement error (ties by confidence rank).
absl::StatusOr<size_t> BestOfN(const std::vector<TrajectoryMode>& modes, int n,
                               std::span<const AgentState> gt);

// Ground-truth states at timesteps t+1 .. t+steps for one agent.
absl::StatusOr<std::vector<AgentState>> FutureStates(const Scene& scene,
                                                     const std::string& id,
                                                     int timestep, int steps);

struct MacResult {
  double percent = 0.0;
  // False-positive fraction per clique, in input order.
  std::vector<double> miss_fraction;
};

// Per agent, tests whether any of the n highest-confidence modes ends within
// (eta/3) * mu of the ground truth along both the longitudinal and lateral
// axes of the ground-truth final heading, where mu per axis is the mean
// absolute history velocity on that axis floored at mu_floor. Clique miss
// fractions are averaged and scaled to percent.
absl::StatusOr<MacResult> Mac(const PredictionSet& predictions,
                              const Scene& scene,
                              const std::vector<Clique>& cliques, int n,
                              double mu_floor = kDefaultMuFloor);

// Fraction of (agent pair, step) cells in which the highest-confidence
// predictions come closer than the sum of the footprint radii.
double CollisionRate(const PredictionSet& predictions, const Scene& scene);

struct EvalOptions {
  int n = 1;
  double mu_floor = kDefaultMuFloor;
  // FDE stamps, seconds.
  std::vector<double> stamps = {1.0, 2.0, 3.0, 4.0};
};

struct AgentMetrics {
  std::string agent_id;
  int clique_id = 0;
  size_t selected_mode = 0;
  double ade = 0.0;
  std::vector<double> fde;  // per stamp
};

struct CliqueMetrics {
  int clique_id = 0;
  std::vector<std::string> member_ids;
  double miss_fraction = 0.0;
};

struct EvalReport {
  std::vector<double> stamps;
  std::vector<AgentMetrics> agents;  // sorted by id
  std::vector<CliqueMetrics> cliques;
  double mac_percent = 0.0;
  double collision_rate = 0.0;
  double mean_ade = 0.0;
  std::vector<double> mean_fde;  // per stamp
};

// ADE and FDE use the Best-of-N mode of each agent.
absl::StatusOr<EvalReport> Evaluate(const PredictionSet& predictions,
                                    const Scene& scene,
                                    const std::vector<Clique>& cliques,
                                    const EvalOptions& options);

}  // namespace semclique

#endif  // SEMCLIQUE_METRICS_H_
