#ifndef FTSURF_PLANTS_HPP
#define FTSURF_PLANTS_HPP

#include <Eigen/Dense>
#include <vector>

#include "ftsurf/dynamics.hpp"
#include "ftsurf/faults.hpp"

// Actuator plants for the three vehicle designs. Plants own their internal
// servo state (rudder/fin angles); wrench computations are pure given that
// state. One plant instance belongs to one environment instance.

namespace ftsurf {

// Rate-limited servo motion: moves current toward target by at most
// slew_rate * dt, arriving exactly when within reach.
double servo_step(double current, double target, double slew_rate, double dt);

// ---------------------------------------------------------------------------
// Hovering AUV: 8 independent thrusters, force command per thruster.

struct Thruster {
  Vec3 position{Vec3::Zero()};   // body frame, m
  Vec3 direction{0, 0, 1};       // unit, body frame
  double max_force = 20.0;       // N
  bool heave = true;             // heave group vs 45-degree vectored group
};

struct ThrusterGeometry {
  std::vector<Thruster> thrusters;  // 4 heave (indices 0..3) then 4 vectored

  void validate() const;  // unit directions, 4+4 grouping
};

// Sum of (dir_i f_i, pos_i x dir_i f_i) over healthy thrusters; commands are
// clipped to [-max_force, max_force]; faulty thrusters contribute zero.
Wrench thruster_wrench(const ThrusterGeometry& geom, const Eigen::VectorXd& forces,
                       const FaultMask& mask);

// ---------------------------------------------------------------------------
// Torpedo AUV: 4 rudders at 90-degree intervals around the hull plus one
// surge thruster.

struct RudderCoeffs {
  double lift;   // C_L(alpha)
  double drag;   // C_D(alpha)
};

// Empirical rudder polar:
//   C_L = 0.13058 a + 0.051143 a |a|
//   C_D = 0.0015587 a^2 + 0.058202
RudderCoeffs rudder_coefficients(double alpha);

struct Rudder {
  double mount_angle = 0.0;   // rad about the hull x axis, from +y
  double area = 0.01;         // m^2
  Vec3 position{Vec3::Zero()};
  double max_angle = 0.6;     // rad
  double slew_rate = 1.5;     // rad/s
  // Lift effectiveness multiplier. The published polar above is deliberately
  // conservative (its lift slope is ~20x below a real fin's and its L/D
  // barely reaches 1); at that slope the stern surfaces can neither
  // weathervane the hull against the destabilizing added-mass moment nor
  // overcome the righting moment. The gain restores a realistic combined
  // fin+interference lift slope (~3.3 per rad) without touching the drag
  // budget.
  double lift_gain = 25.0;
  double angle = 0.0;         // current deflection, rad
};

struct RudderPlant {
  std::vector<Rudder> rudders;       // mounted at 0, 90, 180, 270 degrees
  double thruster_max_force = 25.0;  // N, surge thruster
  double wash_fraction = 0.0;        // thruster-wash contribution to local flow

  // Advances rudder servos toward (fault-masked) target angles.
  void advance(const Eigen::VectorXd& target_angles, const FaultMask& mask, double dt);
  void reset_angles();
};

// Lift/drag from each rudder at the current deflection angles plus the surge
// thruster force. Local flow speed is the surge speed |u| plus an optional
// thruster-wash term. Faulty rudders sit at 0 rad and still contribute their
// parasitic drag.
Wrench rudder_wrench(const RudderPlant& plant, const BodyState& state, double thrust_cmd,
                     const FaultMask& mask, double fluid_density);

// ---------------------------------------------------------------------------
// U-CAT: 4 oscillating fins. A fin's blade angle is measured in its mount
// frame (x forward, y hinge axis, z up); 0 rad points the blade straight
// down, and the cycle-averaged paddling thrust points opposite the blade,
// i.e. along +z rotated by the oscillation zero-direction.

struct OscillationProfile {
  double amplitude = 0.0;     // rad
  double center = 0.0;        // zero direction of oscillation, rad
  double rate = 0.0;          // rad/s
  double phase_offset = 0.0;  // rad
  double start_time = 0.0;    // s, profile epoch
};

// Blade target angle A sin(w (t - start) + offset) + center.
double fin_target_angle(const OscillationProfile& profile, double t);

struct FinHydro {
  double lift_coeff = 1.0;   // C_L = lift_coeff * sin(2 gamma)
  double drag0 = 0.05;       // parasitic drag
  double drag1 = 0.9;        // C_D = drag0 + drag1 * (1 - cos(2 gamma))
  // Effective acceleration-reaction mass per fin, kg. Lumps the entrained
  // water and stroke geometry into one thrust coefficient: the cycle-mean
  // paddling force per fin is added_mass * lever * rate^2 * A * J1(A).
  double added_mass = 0.15;
};

struct Fin {
  Vec3 position{Vec3::Zero()};                     // hinge point, body frame
  Eigen::Matrix3d mount{Eigen::Matrix3d::Identity()};  // body <- fin frame
  double area = 0.02;        // m^2
  double lever = 0.15;       // hinge to mid-chord, m
  double slew_rate = 20.0;   // rad/s, blade servo envelope
  // Oscillator state. The blade angle follows the profile analytically;
  // amplitude, zero direction, and phase offset slew toward their commands
  // so that profile changes never teleport the blade.
  double angle = 0.0;
  double rate = 0.0;         // blade angular rate
  double accel = 0.0;        // blade angular acceleration (oscillatory part)
  double phase = 0.0;        // free-running oscillator phase
  double osc_amp = 0.0;      // achieved stroke amplitude
  double osc_center = 0.0;   // achieved zero direction
  double osc_offset = 0.0;   // achieved phase offset
  OscillationProfile profile;
};

struct FinPlant {
  std::vector<Fin> fins;     // FL, FR, RL, RR
  FinHydro hydro;

  // Installs per-fin oscillation profiles (amplitude, center, rate, offset);
  // faulty fins keep a frozen profile pinned at mask.frozen_angles.
  void set_profiles(const Eigen::VectorXd& command, const FaultMask& mask);
  // Advances the oscillator phase by dt and slews the achieved amplitude,
  // center, and offset toward the active profile. The commanded amplitude is
  // capped at slew_rate / rate so the blade never outruns its servo. Faulty
  // fins hold their frozen angle with zero rate and acceleration.
  void advance(const FaultMask& mask, double dt);
  void reset(double initial_angle = 0.0);
};

// Quasi-steady flat-plate lift/drag resolved per the fin-relative flow
// direction, plus an acceleration-reaction term that carries the paddling
// thrust. Faulty fins hold their frozen angle and generate only passive drag.
Wrench fin_wrench(const FinPlant& plant, const BodyState& state, const FaultMask& mask,
                  double fluid_density);

}  // namespace ftsurf

#endif
