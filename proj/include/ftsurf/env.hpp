#ifndef FTSURF_ENV_HPP
#define FTSURF_ENV_HPP

#include <memory>
#include <random>
#include <string>

#include "ftsurf/dynamics.hpp"
#include "ftsurf/faults.hpp"
#include "ftsurf/observation.hpp"
#include "ftsurf/plants.hpp"

// Episodic surfacing environment. One agent step applies one action held for
// a fixed control period, integrates the plant and rigid-body dynamics at the
// physics rate underneath, and accumulates the dense reward; reaching the
// surface ends the episode with a sparse goal bonus.

namespace ftsurf {

struct RewardWeights {
  double k1 = 4.0;   // world vertical velocity
  double k2 = 0.4;   // uprightness
  double k3 = -4.0;  // horizontal drift at the surface
  double k4 = -20.0; // remaining-time fraction
  double k5 = 500.0; // success bonus
};

// Dense shaping term, evaluated on the instantaneous state.
double step_reward(const BodyState& state, const RewardWeights& w);

// Sparse terminal term. Success applies the full expression; an unsuccessful
// termination yields zero.
double goal_reward(const Eigen::Vector2d& final_xy, const Eigen::Vector2d& start_xy,
                   double elapsed, double time_limit, const RewardWeights& w, bool success,
                   double time_sign = 1.0);

struct EpisodeConfig {
  double start_depth = 5.0;       // m below the surface
  double time_limit = 40.0;       // s
  double dt = 0.05;               // physics step
  double action_period = 0.1;     // control period (integer multiple of dt)
  double surface_depth = 0.1;     // depth at or above which the run succeeds
  double attitude_perturbation = 0.1;  // rad, uniform per Euler axis at reset
  bool goal_on_timeout = false;   // apply the goal expression at timeout too
  double goal_time_sign = 1.0;    // set -1 to flip the remaining-time term

  void validate() const;
  int substeps() const;
};

// Everything needed to build one platform's environment. Exactly one of the
// three plants is used, selected by `platform`.
struct PlatformSpec {
  Platform platform = Platform::hovering;
  RigidBodyParams body;
  ThrusterGeometry thrusters;  // hovering
  RudderPlant rudders;         // torpedo
  FinPlant fins;               // ucat
  double fin_amp_max = 1.5707963267948966;   // rad, ucat action map
  double fin_center_range = 2.0;             // rad, ucat action map
  double fin_rate_max = 12.566370614359172;  // rad/s (2 Hz), ucat action map
  SensorNoiseConfig sensors;
  RandomizationRanges randomization;
  EpisodeConfig episode;
  RewardWeights reward;
  FaultSamplingConfig fault_sampling;

  int action_dim() const;
  void validate() const;
};

struct EnvStepOut {
  Eigen::VectorXd obs;
  double reward = 0.0;
  bool done = false;
};

struct EpisodeInfo {
  bool success = false;
  bool aborted = false;   // non-finite state detected; episode cut short
  double elapsed = 0.0;   // s
  std::string fault_name = "none";
  Eigen::Vector2d start_xy = Eigen::Vector2d::Zero();
  Eigen::Vector2d final_xy = Eigen::Vector2d::Zero();
  std::string diagnostic;
};

// Interface the rollout machinery works against (the toy test environments
// implement it too).
class EnvBase {
 public:
  virtual ~EnvBase() = default;
  virtual Eigen::VectorXd reset() = 0;
  virtual EnvStepOut step(const Eigen::VectorXd& action) = 0;  // action in [-1,1]^dim
  virtual int action_dim() const = 0;
  virtual int obs_dim() const = 0;
  virtual EpisodeInfo info() const = 0;
};

class Environment : public EnvBase {
 public:
  Environment(PlatformSpec spec, std::uint64_t seed);

  // Randomizes parameters, samples a fault mask, perturbs attitude.
  Eigen::VectorXd reset() override;
  // Same, but with the fault mask pinned (evaluation).
  Eigen::VectorXd reset_with_faults(const FaultMask& mask);

  // action components are clipped to [-1,1] and mapped onto command ranges.
  EnvStepOut step(const Eigen::VectorXd& action) override;
  // Bypasses the normalized-action map; used by the scripted baseline.
  EnvStepOut step_raw(const Eigen::VectorXd& command);

  int action_dim() const override { return spec_.action_dim(); }
  int obs_dim() const override { return Observation::kDim; }
  EpisodeInfo info() const override { return info_; }

  // Maps a normalized action in [-1,1]^dim to plant commands.
  Eigen::VectorXd map_action(const Eigen::VectorXd& action) const;

  const BodyState& state() const { return state_; }
  const FaultMask& faults() const { return mask_; }
  const PlatformSpec& spec() const { return spec_; }
  double elapsed() const { return substep_count_ * spec_.episode.dt; }
  double depth() const { return -state_.position.z(); }

 private:
  Eigen::VectorXd reset_common(FaultMask mask);
  EnvStepOut advance(const Eigen::VectorXd& command);
  Wrench actuator_wrench(const Eigen::VectorXd& command) const;
  Eigen::VectorXd observe_now();

  PlatformSpec spec_;
  RigidBodyParams active_params_;  // randomized copy for the current episode
  double actuator_gain_ = 1.0;
  BodyState state_;
  FaultMask mask_;
  SensorFilterState filter_;
  EpisodeInfo info_;
  std::mt19937_64 rng_;
  long substep_count_ = 0;
  bool done_ = true;
  Eigen::VectorXd thruster_cmd_;  // hovering: forces held over the control period
};

std::unique_ptr<Environment> make_environment(const PlatformSpec& spec, std::uint64_t seed);

}  // namespace ftsurf

#endif
