#include "ftsurf/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace ftsurf {

double pid_step(PidState& state, const PidGains& gains, double error, double dt) {
  const double derivative = state.has_prev && dt > 0 ? (error - state.prev_error) / dt : 0.0;
  state.integral += error * dt;
  state.integral =
      std::clamp(state.integral, -gains.integral_limit, gains.integral_limit);
  state.prev_error = error;
  state.has_prev = true;
  return gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
}

Eigen::VectorXd pid_baseline(PidState& state, const PidGains& gains, double depth_error,
                             double dt) {
  const double force = pid_step(state, gains, depth_error, dt);

  // The demand is pushed along the body vertical: stroke center 0 points the
  // cycle-mean thrust at body +z, center pi reverses it. Attitude never
  // enters — if the hull tilts, the push tilts with it.
  const double center = force >= 0 ? 0.0 : M_PI;

  // Even split of the demand across all four fins; amplitude saturates, the
  // oscillation rate stays fixed, and no per-fin re-weighting ever happens.
  const double amplitude =
      std::clamp(gains.amp_gain * std::abs(force) / 4.0, 0.0, gains.amp_max);

  Eigen::VectorXd cmd = Eigen::VectorXd::Zero(16);
  for (int f = 0; f < 4; ++f) {
    cmd(4 * f + 0) = amplitude;
    cmd(4 * f + 1) = center;
    cmd(4 * f + 2) = amplitude > 0 ? gains.osc_rate : 0.0;
    cmd(4 * f + 3) = f >= 2 ? M_PI : 0.0;  // rear pair counter-phased
  }
  return cmd;
}

}  // namespace ftsurf
