#include "ftsurf/env.hpp"

#include <cmath>
#include <stdexcept>

namespace ftsurf {

double step_reward(const BodyState& state, const RewardWeights& w) {
  return w.k1 * world_vertical_velocity(state) + w.k2 * uprightness(state.orientation);
}

double goal_reward(const Eigen::Vector2d& final_xy, const Eigen::Vector2d& start_xy,
                   double elapsed, double time_limit, const RewardWeights& w, bool success,
                   double time_sign) {
  if (!success) return 0.0;
  const double dist = (final_xy - start_xy).norm();
  const double remaining = time_limit > 0 ? (time_limit - elapsed) / time_limit : 0.0;
  return w.k3 * dist + time_sign * w.k4 * remaining + w.k5;
}

void EpisodeConfig::validate() const {
  if (start_depth <= 0) throw std::invalid_argument("episode: start depth must be positive");
  if (time_limit <= 0) throw std::invalid_argument("episode: time limit must be positive");
  if (dt <= 0) throw std::invalid_argument("episode: dt must be positive");
  if (surface_depth < 0)
    throw std::invalid_argument("episode: surface depth must be non-negative");
  if (attitude_perturbation < 0)
    throw std::invalid_argument("episode: attitude perturbation must be non-negative");
  if (std::abs(std::abs(goal_time_sign) - 1.0) > 1e-12)
    throw std::invalid_argument("episode: goal time sign must be +1 or -1");
  const double ratio = action_period / dt;
  if (action_period < dt || std::abs(ratio - std::round(ratio)) > 1e-9)
    throw std::invalid_argument("episode: action period must be an integer multiple of dt");
}

int EpisodeConfig::substeps() const { return static_cast<int>(std::llround(action_period / dt)); }

int PlatformSpec::action_dim() const {
  switch (platform) {
    case Platform::hovering:
      return static_cast<int>(thrusters.thrusters.size());
    case Platform::torpedo:
      return static_cast<int>(rudders.rudders.size()) + 1;
    case Platform::ucat:
      return 4 * static_cast<int>(fins.fins.size());
  }
  return 0;
}

void PlatformSpec::validate() const {
  body.validate();
  episode.validate();
  sensors.validate();
  randomization.validate();
  switch (platform) {
    case Platform::hovering:
      if (static_cast<int>(thrusters.thrusters.size()) != actuator_count(platform))
        throw std::invalid_argument("spec: hovering platform needs 8 thrusters");
      thrusters.validate();
      break;
    case Platform::torpedo:
      if (static_cast<int>(rudders.rudders.size()) + 1 != actuator_count(platform))
        throw std::invalid_argument("spec: torpedo platform needs 4 rudders");
      break;
    case Platform::ucat:
      if (static_cast<int>(fins.fins.size()) != actuator_count(platform))
        throw std::invalid_argument("spec: ucat platform needs 4 fins");
      if (fin_amp_max <= 0 || fin_rate_max <= 0 || fin_center_range <= 0)
        throw std::invalid_argument("spec: fin action ranges must be positive");
      break;
  }
}

Environment::Environment(PlatformSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {
  spec_.validate();
  active_params_ = spec_.body;
  mask_ = FaultMask::none(spec_.platform);
  thruster_cmd_ = Eigen::VectorXd::Zero(spec_.action_dim());
}

Eigen::VectorXd Environment::reset() {
  FaultMask mask = sample_faults(spec_.platform, rng_, spec_.fault_sampling);
  return reset_common(std::move(mask));
}

Eigen::VectorXd Environment::reset_with_faults(const FaultMask& mask) {
  if (mask.platform != spec_.platform)
    throw std::invalid_argument("reset: fault mask is for a different platform");
  if (!mask.valid()) throw std::invalid_argument("reset: fault mask violates platform rules");
  return reset_common(mask);
}

Eigen::VectorXd Environment::reset_common(FaultMask mask) {
  active_params_ = randomize_params(spec_.body, spec_.randomization, rng_);
  actuator_gain_ = sample_actuator_gain(spec_.randomization, rng_);

  state_ = BodyState{};
  state_.position = Vec3(0.0, 0.0, -spec_.episode.start_depth);
  const double p = spec_.episode.attitude_perturbation;
  std::uniform_real_distribution<double> u(-p, p);
  const double roll = p > 0 ? u(rng_) : 0.0;
  const double pitch = p > 0 ? u(rng_) : 0.0;
  const double yaw = p > 0 ? u(rng_) : 0.0;
  state_.orientation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                       Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                       Eigen::AngleAxisd(roll, Vec3::UnitX());
  state_.linear_velocity.setZero();
  state_.angular_velocity.setZero();

  spec_.rudders.reset_angles();
  spec_.fins.reset(0.0);
  thruster_cmd_.setZero();

  // Faulty position actuators freeze at whatever angle they hold right now.
  mask_ = std::move(mask);
  if (spec_.platform == Platform::torpedo) {
    for (std::size_t i = 0; i < spec_.rudders.rudders.size(); ++i)
      mask_.frozen_angles[i] = spec_.rudders.rudders[i].angle;
  } else if (spec_.platform == Platform::ucat) {
    for (std::size_t i = 0; i < spec_.fins.fins.size(); ++i)
      mask_.frozen_angles[i] = spec_.fins.fins[i].angle;
  }

  filter_.reset();
  substep_count_ = 0;
  done_ = false;
  info_ = EpisodeInfo{};
  info_.fault_name = mask_.name();
  info_.start_xy = state_.position.head<2>();
  info_.final_xy = info_.start_xy;
  return observe_now();
}

Eigen::VectorXd Environment::map_action(const Eigen::VectorXd& action) const {
  if (action.size() != spec_.action_dim())
    throw std::invalid_argument("step: action dimension mismatch");
  Eigen::VectorXd a = action.cwiseMax(-1.0).cwiseMin(1.0);
  Eigen::VectorXd cmd(a.size());
  switch (spec_.platform) {
    case Platform::hovering:
      for (int i = 0; i < a.size(); ++i) cmd(i) = a(i) * spec_.thrusters.thrusters[i].max_force;
      break;
    case Platform::torpedo: {
      const int nr = static_cast<int>(spec_.rudders.rudders.size());
      for (int i = 0; i < nr; ++i) cmd(i) = a(i) * spec_.rudders.rudders[i].max_angle;
      cmd(nr) = a(nr) * spec_.rudders.thruster_max_force;
      break;
    }
    case Platform::ucat:
      for (std::size_t f = 0; f < spec_.fins.fins.size(); ++f) {
        const int k = 4 * static_cast<int>(f);
        cmd(k + 0) = 0.5 * (a(k + 0) + 1.0) * spec_.fin_amp_max;
        cmd(k + 1) = a(k + 1) * spec_.fin_center_range;
        cmd(k + 2) = 0.5 * (a(k + 2) + 1.0) * spec_.fin_rate_max;
        cmd(k + 3) = a(k + 3) * M_PI;
      }
      break;
  }
  return cmd;
}

EnvStepOut Environment::step(const Eigen::VectorXd& action) {
  return advance(map_action(action));
}

EnvStepOut Environment::step_raw(const Eigen::VectorXd& command) {
  if (command.size() != spec_.action_dim())
    throw std::invalid_argument("step_raw: command dimension mismatch");
  return advance(command);
}

Wrench Environment::actuator_wrench(const Eigen::VectorXd& command) const {
  switch (spec_.platform) {
    case Platform::hovering:
      return thruster_wrench(spec_.thrusters, command, mask_);
    case Platform::torpedo:
      return rudder_wrench(spec_.rudders, state_, command(command.size() - 1), mask_,
                           spec_.body.fluid_density);
    case Platform::ucat:
      return fin_wrench(spec_.fins, state_, mask_, spec_.body.fluid_density);
  }
  return Wrench{};
}

EnvStepOut Environment::advance(const Eigen::VectorXd& command) {
  if (done_) throw std::logic_error("step: episode is finished; call reset first");
  const EpisodeConfig& ep = spec_.episode;
  const long limit_substeps = std::llround(ep.time_limit / ep.dt);

  EnvStepOut out;
  out.reward = 0.0;

  auto finish = [&](bool success, bool timeout) {
    done_ = true;
    info_.success = success;
    info_.elapsed = elapsed();
    info_.final_xy = state_.position.head<2>();
    if (success) {
      out.reward += goal_reward(info_.final_xy, info_.start_xy, info_.elapsed, ep.time_limit,
                                spec_.reward, true, ep.goal_time_sign);
    } else if (timeout && ep.goal_on_timeout) {
      out.reward += goal_reward(info_.final_xy, info_.start_xy, info_.elapsed, ep.time_limit,
                                spec_.reward, true, ep.goal_time_sign);
    }
  };

  // A step taken from an already-surfaced state terminates immediately.
  if (depth() <= ep.surface_depth) {
    finish(true, false);
    out.obs = observe_now();
    out.done = true;
    return out;
  }

  const Eigen::VectorXd effective = apply_faults(command, mask_);
  Eigen::VectorXd rudder_targets;
  switch (spec_.platform) {
    case Platform::hovering:
      thruster_cmd_ = effective;
      break;
    case Platform::torpedo:
      rudder_targets = effective.head(effective.size() - 1);
      break;
    case Platform::ucat:
      spec_.fins.set_profiles(effective, mask_);
      break;
  }

  for (int s = 0; s < ep.substeps(); ++s) {
    if (spec_.platform == Platform::torpedo)
      spec_.rudders.advance(rudder_targets, mask_, ep.dt);
    else if (spec_.platform == Platform::ucat)
      spec_.fins.advance(mask_, ep.dt);

    Wrench tau = actuator_wrench(effective);
    tau.force *= actuator_gain_;
    tau.torque *= actuator_gain_;

    BodyState next = dynamics_step(state_, active_params_, tau, ep.dt);
    if (!next.finite()) {
      info_.aborted = true;
      info_.diagnostic = "non-finite state after dynamics step " +
                         std::to_string(substep_count_ + 1);
      finish(false, false);
      break;
    }
    state_ = next;
    ++substep_count_;
    out.reward += ep.dt * step_reward(state_, spec_.reward);

    if (depth() <= ep.surface_depth) {
      finish(true, false);
      break;
    }
    if (substep_count_ >= limit_substeps) {
      finish(false, true);
      break;
    }
  }

  info_.elapsed = elapsed();
  info_.final_xy = state_.position.head<2>();
  out.obs = observe_now();
  out.done = done_;
  return out;
}

Eigen::VectorXd Environment::observe_now() {
  return observe(state_, spec_.sensors, filter_, rng_).vec();
}

std::unique_ptr<Environment> make_environment(const PlatformSpec& spec, std::uint64_t seed) {
  return std::make_unique<Environment>(spec, seed);
}

}  // namespace ftsurf
