#ifndef SEMCLIQUE_PREDICTOR_H_
#define SEMCLIQUE_PREDICTOR_H_

// Multimodal trajectory predictors. A predictor receives one clique and must
// return N modes per member over the scene horizon; the baselines here are
// deterministic kinematic models.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "semclique/scene.h"

namespace semclique {

struct TrajectoryMode {
  // States at t + dt, ..., t + steps * dt with steps = floor(eta / dt).
  std::vector<AgentState> states;
  double confidence = 0.0;

  friend bool operator==(const TrajectoryMode&,
                         const TrajectoryMode&) = default;
};

struct PredictionSet {
  std::map<std::string, std::vector<TrajectoryMode>> modes;
  // Agents the named model could not handle; they got the CV rollout.
  std::set<std::string> fallback_agents;

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

// Every clique member present, n_modes modes each with `steps` states,
// confidences in [0, 1] summing to 1 within 1e-9.
absl::Status CheckPredictionSet(const PredictionSet& set, const Clique& clique,
                                int n_modes, int steps);

class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual std::string_view name() const = 0;

  // Deterministic; independent of the order of clique.member_ids.
  virtual absl::StatusOr<PredictionSet> Predict(const Clique& clique,
                                                const Scene& scene,
                                                int n_modes) const = 0;
};

struct PredictorConfig {
  // Heading offset between successive CV / CTRV modes, radians.
  double heading_step = 0.1;
  double association_radius = 5.0;
};

// Shared driver for models that forecast each member independently.
class PerAgentPredictor : public Predictor {
 public:
  explicit PerAgentPredictor(PredictorConfig config) : config_(config) {}

  absl::StatusOr<PredictionSet> Predict(const Clique& clique,
                                        const Scene& scene,
                                        int n_modes) const final;

 protected:
  struct AgentForecast {
    std::vector<TrajectoryMode> modes;
    bool fallback = false;
  };

  virtual AgentForecast PredictAgent(const SceneAgent& agent, int timestep,
                                     const Scene& scene, int n_modes,
                                     int steps) const = 0;

  const PredictorConfig& config() const { return config_; }

 private:
  PredictorConfig config_;
};

// Mode 0 is the constant-velocity rollout; mode m > 0 rotates the velocity by
// +ceil(m/2) * step for odd m and -ceil(m/2) * step for even m. Confidences
// are proportional to 2^-m.
class CvPredictor final : public PerAgentPredictor {
 public:
  explicit CvPredictor(PredictorConfig config = {})
      : PerAgentPredictor(config) {}
  std::string_view name() const override { return "cv"; }

 protected:
  AgentForecast PredictAgent(const SceneAgent& agent, int timestep,
                             const Scene& scene, int n_modes,
                             int steps) const override;
};

// Constant turn rate and speed for vehicles, with the turn rate taken from
// the last two history states. Pedestrians and single-state histories fall
// back to CV.
class CtrvPredictor final : public PerAgentPredictor {
 public:
  explicit CtrvPredictor(PredictorConfig config = {})
      : PerAgentPredictor(config) {}
  std::string_view name() const override { return "ctrv"; }

 protected:
  AgentForecast PredictAgent(const SceneAgent& agent, int timestep,
                             const Scene& scene, int n_modes,
                             int steps) const override;
};

// Follows the associated lane divider at current speed, one mode per branch
// at the first fork reached within the horizon. Confidences are proportional
// to (1 + cos(heading change)) / 2. Missing modes are filled with CV heading
// perturbations. Vehicles without a lane fall back to CV.
class LaneFollowPredictor final : public PerAgentPredictor {
 public:
  explicit LaneFollowPredictor(PredictorConfig config = {})
      : PerAgentPredictor(config) {}
  std::string_view name() const override { return "lane"; }

 protected:
  AgentForecast PredictAgent(const SceneAgent& agent, int timestep,
                             const Scene& scene, int n_modes,
                             int steps) const override;
};

// "cv", "ctrv" or "lane".
absl::StatusOr<std::unique_ptr<Predictor>> MakePredictor(
    std::string_view name, PredictorConfig config = {});

// Rollout helpers, states at dt, 2 dt, ..., steps * dt.
std::vector<AgentState> RolloutCv(const AgentState& start, double dt,
                                  int steps);
// Rotates the velocity vector at a constant `yaw_rate`; yaw_rate == 0 is
// exactly RolloutCv.
std::vector<AgentState> RolloutCtrv(const AgentState& start, double yaw_rate,
                                    double dt, int steps);

// Confidences proportional to 2^-m for m = 0..n-1, normalized.
std::vector<double> GeometricConfidences(int n);

}  // namespace semclique

#endif  // SEMCLIQUE_PREDICTOR_H_
