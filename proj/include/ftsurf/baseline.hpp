#ifndef FTSURF_BASELINE_HPP
#define FTSURF_BASELINE_HPP

#include <Eigen/Dense>

// Scripted depth-PID baseline for the paddling platform: a PID on depth
// error produces a desired vertical force in the robot's own frame, which is
// mapped onto identical oscillation profiles for all four fins (amplitude
// from force magnitude, stroke center pushing along body z). The controller
// is deliberately blind twice over: it splits the demand evenly across fins
// with no way to re-weight the healthy ones, and it never looks at attitude,
// so once asymmetric fin faults tilt the hull the "up" it pushes toward is
// no longer up.

namespace ftsurf {

struct PidGains {
  double kp = 60.0;
  double ki = 6.0;
  double kd = 20.0;
  double integral_limit = 2.0;  // anti-windup clamp on the integral term
  double amp_gain = 0.25;       // rad of amplitude per N of per-fin demand
  double amp_max = 1.4;         // rad
  // Stroke rate pinned at the platform's command ceiling: cycle-mean thrust
  // scales with rate^2, and anything slower leaves the healthy vehicle
  // hovering against its buoyancy trim instead of climbing.
  double osc_rate = 12.566370614359172;  // rad/s
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;
  void reset() { *this = PidState{}; }
};

// One PID evaluation; returns the control force demand.
double pid_step(PidState& state, const PidGains& gains, double error, double dt);

// Maps depth error to the 16 fin oscillation commands
// [amplitude, center, rate, phase offset] x 4 fins. The thrust direction is
// fixed in the body frame (straight up at positive demand, straight down at
// negative); depth error is the only feedback.
Eigen::VectorXd pid_baseline(PidState& state, const PidGains& gains, double depth_error,
                             double dt);

}  // namespace ftsurf

#endif
