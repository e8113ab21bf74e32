#include "ftsurf/plants.hpp"

#include <cmath>
#include <stdexcept>

namespace ftsurf {

double servo_step(double current, double target, double slew_rate, double dt) {
  const double reach = slew_rate * dt;
  const double delta = target - current;
  if (std::abs(delta) <= reach) return target;
  return current + (delta > 0 ? reach : -reach);
}

// ---------------------------------------------------------------------------

void ThrusterGeometry::validate() const {
  if (thrusters.size() != 8) throw std::invalid_argument("hovering platform needs 8 thrusters");
  int heave = 0;
  for (const auto& t : thrusters) {
    if (std::abs(t.direction.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("thruster directions must be unit vectors");
    if (t.heave) ++heave;
  }
  if (heave != 4) throw std::invalid_argument("expected exactly 4 heave thrusters");
}

Wrench thruster_wrench(const ThrusterGeometry& geom, const Eigen::VectorXd& forces,
                       const FaultMask& mask) {
  Wrench w;
  for (int i = 0; i < static_cast<int>(geom.thrusters.size()); ++i) {
    if (mask.faulty[i]) continue;
    const Thruster& t = geom.thrusters[i];
    const double f = std::clamp(forces[i], -t.max_force, t.max_force);
    const Vec3 force = t.direction * f;
    w.force += force;
    w.torque += t.position.cross(force);
  }
  return w;
}

// ---------------------------------------------------------------------------

RudderCoeffs rudder_coefficients(double alpha) {
  return {0.13058 * alpha + 0.051143 * alpha * std::abs(alpha),
          0.0015587 * alpha * alpha + 0.058202};
}

void RudderPlant::advance(const Eigen::VectorXd& target_angles, const FaultMask& mask, double dt) {
  for (int i = 0; i < 4; ++i) {
    Rudder& r = rudders[i];
    double target = mask.faulty[i] ? mask.frozen_angles[i]
                                   : std::clamp(target_angles[i], -r.max_angle, r.max_angle);
    r.angle = servo_step(r.angle, target, r.slew_rate, dt);
  }
}

void RudderPlant::reset_angles() {
  for (auto& r : rudders) r.angle = 0.0;
}

Wrench rudder_wrench(const RudderPlant& plant, const BodyState& state, double thrust_cmd,
                     const FaultMask& mask, double fluid_density) {
  (void)mask;  // faulty rudders are already held at their frozen angle
  Wrench w;

  const double thrust = std::clamp(thrust_cmd, -plant.thruster_max_force, plant.thruster_max_force);
  w.force += Vec3(thrust, 0, 0);  // surge thruster through the origin

  double wash = 0.0;
  if (plant.wash_fraction > 0 && thrust > 0) {
    const double area_ref = plant.rudders.empty() ? 0.01 : plant.rudders[0].area;
    wash = plant.wash_fraction * std::sqrt(thrust / (0.5 * fluid_density * area_ref));
  }

  for (const Rudder& r : plant.rudders) {
    // Each surface works in the 2-D plane spanned by the hull axis and its
    // own lift direction. The angle it presents to the water is its hinge
    // deflection minus the local flow direction at the stern -- the incidence
    // term is what makes undeflected (or frozen) surfaces weathervane the
    // hull and damp pitch/yaw rates; without it nothing opposes the
    // destabilizing added-mass moment at speed.
    const Vec3 lift_dir(0.0, -std::sin(r.mount_angle), std::cos(r.mount_angle));
    const Vec3 v_loc = state.linear_velocity + state.angular_velocity.cross(r.position);
    const double u_loc = v_loc.x() + wash;
    const double v_perp = v_loc.dot(lift_dir);
    const double speed2 = u_loc * u_loc + v_perp * v_perp;
    if (speed2 < 1e-12) continue;
    const double speed = std::sqrt(speed2);
    // Fold onto (-pi/2, pi/2]: the flat plate is symmetric under 180-degree
    // flips, and the motion-frame force directions below absorb the flip.
    const double alpha = std::remainder(r.angle - std::atan2(v_perp, u_loc), M_PI);
    const RudderCoeffs c = rudder_coefficients(alpha);
    const double q_dyn = 0.5 * fluid_density * speed2;
    // Unit vectors along the local motion and perpendicular to it (in the
    // fin plane); drag opposes motion, lift is normal to it.
    const double tx = u_loc / speed, tp = v_perp / speed;
    const double lift = q_dyn * r.area * r.lift_gain * c.lift;
    const double drag = q_dyn * r.area * c.drag;
    const Vec3 force = Vec3(1, 0, 0) * (-tp * lift - tx * drag) +
                       lift_dir * (tx * lift - tp * drag);
    w.force += force;
    w.torque += r.position.cross(force);
  }
  return w;
}

// ---------------------------------------------------------------------------

double fin_target_angle(const OscillationProfile& p, double t) {
  const double rel = t - p.start_time;
  return p.amplitude * std::sin(p.rate * rel + p.phase_offset) + p.center;
}

void FinPlant::set_profiles(const Eigen::VectorXd& command, const FaultMask& mask) {
  for (int i = 0; i < 4; ++i) {
    Fin& f = fins[i];
    if (mask.faulty[i]) {
      f.profile = OscillationProfile{0.0, mask.frozen_angles[i], 0.0, 0.0, 0.0};
      continue;
    }
    f.profile.amplitude = command[4 * i + 0];
    f.profile.center = command[4 * i + 1];
    f.profile.rate = command[4 * i + 2];
    f.profile.phase_offset = command[4 * i + 3];
  }
}

namespace {

// Shortest signed angular distance from `from` to `to`.
double wrap_delta(double from, double to) {
  double d = std::fmod(to - from, 2.0 * M_PI);
  if (d > M_PI) d -= 2.0 * M_PI;
  if (d < -M_PI) d += 2.0 * M_PI;
  return d;
}

}  // namespace

void FinPlant::advance(const FaultMask& mask, double dt) {
  for (int i = 0; i < 4; ++i) {
    Fin& f = fins[i];
    if (mask.faulty[i]) {
      f.angle = mask.frozen_angles[i];
      f.rate = 0.0;
      f.accel = 0.0;
      continue;
    }
    // The free-running phase keeps the stroke continuous while the profile
    // is modulated; amplitude, center, and offset slew toward their commands
    // at the servo rate. The servo also caps the achievable stroke: past
    // amplitude * rate = slew_rate the blade cannot keep up, so the stroke
    // shrinks instead of distorting.
    const double omega = f.profile.rate;
    f.phase += omega * dt;
    double amp_cmd = f.profile.amplitude;
    if (omega > 1e-9) amp_cmd = std::min(amp_cmd, f.slew_rate / omega);

    const double amp_prev = f.osc_amp;
    const double center_prev = f.osc_center;
    f.osc_amp = servo_step(f.osc_amp, amp_cmd, f.slew_rate, dt);
    f.osc_center = servo_step(f.osc_center, f.profile.center, f.slew_rate, dt);
    f.osc_offset += std::clamp(wrap_delta(f.osc_offset, f.profile.phase_offset),
                               -f.slew_rate * dt, f.slew_rate * dt);

    const double arg = f.phase + f.osc_offset;
    const double s = std::sin(arg);
    const double c = std::cos(arg);
    f.angle = f.osc_amp * s + f.osc_center;
    // Analytic stroke derivatives plus the (transient) servo drift; the
    // acceleration keeps only the oscillatory term, which is what the
    // entrained water reacts against.
    f.rate = f.osc_amp * omega * c + (f.osc_amp - amp_prev) / dt * s +
             (f.osc_center - center_prev) / dt;
    f.accel = -f.osc_amp * omega * omega * s;
  }
}

void FinPlant::reset(double initial_angle) {
  for (auto& f : fins) {
    f.angle = initial_angle;
    f.rate = 0.0;
    f.accel = 0.0;
    f.phase = 0.0;
    f.osc_amp = 0.0;
    f.osc_center = initial_angle;
    f.osc_offset = 0.0;
    f.profile = OscillationProfile{};
  }
}

Wrench fin_wrench(const FinPlant& plant, const BodyState& state, const FaultMask& mask,
                  double fluid_density) {
  (void)mask;  // faulty fins already hold zero rate/accel
  Wrench w;
  for (const Fin& f : plant.fins) {
    const double sin_a = std::sin(f.angle);
    const double cos_a = std::cos(f.angle);
    // Blade direction and stroke tangent in the fin frame (x, z components).
    const Eigen::Vector2d blade(sin_a, -cos_a);
    const Eigen::Vector2d tangent(cos_a, sin_a);

    const Vec3 mid_chord = f.position + f.mount * Vec3(f.lever * blade.x(), 0, f.lever * blade.y());
    // Quasi-steady lift/drag sees the hull motion only: the blade's own
    // stroke reacts against the entrained water through the acceleration
    // term below. (Folding the stroke velocity into the quadratic flow
    // forces would swamp the paddle thrust with fictitious damping.)
    const Vec3 v_body = state.linear_velocity + state.angular_velocity.cross(mid_chord);
    const Vec3 rel_flow_fin = f.mount.transpose() * (-v_body);

    Eigen::Vector2d force(0.0, 0.0);  // fin-frame (x, z)

    const Eigen::Vector2d flow(rel_flow_fin.x(), rel_flow_fin.z());
    const double speed = flow.norm();
    if (speed > 1e-9) {
      const double beta = std::atan2(flow.x(), flow.y());
      const Eigen::Vector2d j(std::sin(beta), std::cos(beta));
      // Signed angle from the blade line to the flow; the blade is symmetric
      // under 180-degree flips, which sin/cos of 2*gamma respect.
      const double gamma = std::atan2(j.x() * blade.y() - j.y() * blade.x(), j.dot(blade));
      const double cl = plant.hydro.lift_coeff * std::sin(2.0 * gamma);
      const double cd = plant.hydro.drag0 + plant.hydro.drag1 * (1.0 - std::cos(2.0 * gamma));
      const double q_dyn = 0.5 * fluid_density * speed * speed * f.area;
      const double lift = q_dyn * cl;
      const double drag = q_dyn * cd;
      force.x() += drag * std::sin(beta) + lift * std::cos(beta);
      force.y() += -lift * std::sin(beta) + drag * std::cos(beta);
    }

    // Acceleration reaction of the entrained water; over a stroke cycle this
    // term carries the net paddling thrust.
    force -= plant.hydro.added_mass * f.lever * f.accel * tangent;

    const Vec3 force_body = f.mount * Vec3(force.x(), 0, force.y());
    w.force += force_body;
    w.torque += mid_chord.cross(force_body);
  }
  return w;
}

}  // namespace ftsurf
