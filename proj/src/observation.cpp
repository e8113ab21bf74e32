#include "ftsurf/observation.hpp"

#include <stdexcept>

namespace ftsurf {

Eigen::Matrix<double, Observation::kDim, 1> Observation::vec() const {
  Eigen::Matrix<double, kDim, 1> v;
  v << vertical_velocity, attitude.w(), attitude.x(), attitude.y(), attitude.z(),
      angular_rates.x(), angular_rates.y(), angular_rates.z();
  return v;
}

Observation Observation::from_vec(const Eigen::Matrix<double, kDim, 1>& v) {
  Observation o;
  o.vertical_velocity = v(0);
  o.attitude = Quat(v(1), v(2), v(3), v(4));
  o.angular_rates = v.segment<3>(5);
  return o;
}

Eigen::Matrix<double, Observation::kDim, 1> SensorNoiseConfig::channel_std() const {
  Eigen::Matrix<double, Observation::kDim, 1> s;
  s << velocity_std, attitude_std, attitude_std, attitude_std, attitude_std, rate_std, rate_std,
      rate_std;
  return s;
}

void SensorNoiseConfig::validate() const {
  if (velocity_std < 0 || attitude_std < 0 || rate_std < 0)
    throw std::invalid_argument("sensor noise: standard deviations must be non-negative");
  if (smoothing < 0 || smoothing >= 1)
    throw std::invalid_argument("sensor noise: smoothing must be in [0, 1)");
}

Observation observe(const BodyState& state, const SensorNoiseConfig& cfg,
                    SensorFilterState& filter, std::mt19937_64& rng) {
  Observation truth;
  truth.vertical_velocity = world_vertical_velocity(state);
  truth.attitude = state.orientation;
  truth.angular_rates = state.angular_velocity;

  Eigen::Matrix<double, Observation::kDim, 1> sample = truth.vec();
  const Eigen::Matrix<double, Observation::kDim, 1> std_dev = cfg.channel_std();
  std::normal_distribution<double> normal(0.0, 1.0);
  // Channels are drawn in index order so a given rng state maps to one
  // observation regardless of which stds are zero.
  for (int i = 0; i < Observation::kDim; ++i) {
    const double n = normal(rng);
    sample(i) += std_dev(i) * n;
  }

  if (!filter.initialized) {
    filter.smoothed = sample;
    filter.initialized = true;
  } else {
    filter.smoothed = cfg.smoothing * filter.smoothed + (1.0 - cfg.smoothing) * sample;
  }

  Observation out = Observation::from_vec(filter.smoothed);
  const double qn = out.attitude.norm();
  if (qn > 1e-9)
    out.attitude.coeffs() /= qn;
  else
    out.attitude = Quat::Identity();
  return out;
}

void RandomizationRanges::validate() const {
  auto check = [](double lo, double hi, const char* what) {
    if (lo > hi) throw std::invalid_argument(std::string("randomization: ") + what + " lo > hi");
    if (lo <= -1.0)
      throw std::invalid_argument(std::string("randomization: ") + what +
                                  " lower bound must exceed -1 (sign flips not allowed)");
  };
  check(inertia_lo, inertia_hi, "inertia");
  check(damping_lo, damping_hi, "damping");
  check(buoyancy_lo, buoyancy_hi, "buoyancy");
  check(actuator_lo, actuator_hi, "actuator");
}

namespace {

double draw_factor(double lo, double hi, std::mt19937_64& rng) {
  if (lo == hi) return 1.0 + lo;
  std::uniform_real_distribution<double> u(lo, hi);
  return 1.0 + u(rng);
}

}  // namespace

RigidBodyParams randomize_params(const RigidBodyParams& nominal,
                                 const RandomizationRanges& ranges, std::mt19937_64& rng) {
  ranges.validate();
  constexpr int kMaxRetries = 100;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    RigidBodyParams p = nominal;
    // Fixed draw order: inertia diagonal (6), linear damping (6), quadratic
    // damping (6), buoyancy (1).
    for (int i = 0; i < 6; ++i)
      p.inertia(i, i) = nominal.inertia(i, i) * draw_factor(ranges.inertia_lo, ranges.inertia_hi, rng);
    for (int i = 0; i < 6; ++i)
      p.linear_damping(i) *= draw_factor(ranges.damping_lo, ranges.damping_hi, rng);
    for (int i = 0; i < 6; ++i)
      p.quadratic_damping(i) *= draw_factor(ranges.damping_lo, ranges.damping_hi, rng);
    p.buoyancy *= draw_factor(ranges.buoyancy_lo, ranges.buoyancy_hi, rng);
    try {
      p.validate();
      return p;
    } catch (const std::invalid_argument&) {
      // Perturbation landed outside the feasible set; redraw.
    }
  }
  throw std::runtime_error("randomize_params: no valid parameter draw after 100 attempts");
}

double sample_actuator_gain(const RandomizationRanges& ranges, std::mt19937_64& rng) {
  return draw_factor(ranges.actuator_lo, ranges.actuator_hi, rng);
}

}  // namespace ftsurf
