#ifndef FTSURF_OBSERVATION_HPP
#define FTSURF_OBSERVATION_HPP

#include <random>

#include "ftsurf/dynamics.hpp"

// Sensor model and domain randomization. The policy observation is the
// 8-vector [world vertical velocity, attitude quaternion (w,x,y,z), body
// angular rates]; additive Gaussian channel noise is passed through a
// first-order exponential smoother standing in for the onboard filter.

namespace ftsurf {

struct Observation {
  static constexpr int kDim = 8;
  double vertical_velocity = 0.0;
  Quat attitude = Quat::Identity();
  Vec3 angular_rates = Vec3::Zero();

  Eigen::Matrix<double, kDim, 1> vec() const;
  static Observation from_vec(const Eigen::Matrix<double, kDim, 1>& v);
};

struct SensorNoiseConfig {
  double velocity_std = 0.0;
  double attitude_std = 0.0;  // per quaternion component, before renormalization
  double rate_std = 0.0;
  double smoothing = 0.0;  // previous-sample weight in [0, 1)

  Eigen::Matrix<double, Observation::kDim, 1> channel_std() const;
  void validate() const;
};

struct SensorFilterState {
  bool initialized = false;
  Eigen::Matrix<double, Observation::kDim, 1> smoothed =
      Eigen::Matrix<double, Observation::kDim, 1>::Zero();
  void reset() { initialized = false; }
};

// Noisy, smoothed observation of a body state. With zero noise and zero
// smoothing this returns the true values exactly. The quaternion block is
// renormalized after noise and smoothing.
Observation observe(const BodyState& state, const SensorNoiseConfig& cfg,
                    SensorFilterState& filter, std::mt19937_64& rng);

// Per-episode multiplicative parameter perturbation p <- p * (1 + u) with
// u ~ U(lo, hi), drawn independently per scalar in a fixed order.
struct RandomizationRanges {
  double inertia_lo = 0.0, inertia_hi = 0.0;    // mass-matrix diagonal
  double damping_lo = 0.0, damping_hi = 0.0;    // both damping vectors
  double buoyancy_lo = 0.0, buoyancy_hi = 0.0;  // buoyancy force
  double actuator_lo = 0.0, actuator_hi = 0.0;  // overall actuator gain

  void validate() const;
};

// Returns a perturbed copy of nominal; resamples (bounded) if a draw fails
// validation and throws std::runtime_error once retries are exhausted.
RigidBodyParams randomize_params(const RigidBodyParams& nominal,
                                 const RandomizationRanges& ranges, std::mt19937_64& rng);

// Multiplicative gain applied to every actuator force for one episode.
double sample_actuator_gain(const RandomizationRanges& ranges, std::mt19937_64& rng);

}  // namespace ftsurf

#endif
