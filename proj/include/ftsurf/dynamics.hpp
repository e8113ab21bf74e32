#ifndef FTSURF_DYNAMICS_HPP
#define FTSURF_DYNAMICS_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>

// 6-DOF marine-vehicle rigid-body model:
//   M nu_dot + C(nu) nu + D(nu) nu = tau_actuators + tau_restoring
// Body frame: x forward, y left, z up. World frame: z up, so depth = -z.
// Pose is stored as position + unit quaternion (world <- body); Euler angles
// are derived on demand.

namespace ftsurf {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Quat = Eigen::Quaterniond;

struct Wrench {
  Vec3 force{Vec3::Zero()};    // body frame, N
  Vec3 torque{Vec3::Zero()};   // body frame, N m

  Wrench operator+(const Wrench& o) const { return {force + o.force, torque + o.torque}; }
  Wrench& operator+=(const Wrench& o) {
    force += o.force;
    torque += o.torque;
    return *this;
  }
  Vec6 vec() const {
    Vec6 v;
    v << force, torque;
    return v;
  }
  bool finite() const { return force.allFinite() && torque.allFinite(); }
};

struct BodyState {
  Vec3 position{Vec3::Zero()};          // world frame, m
  Quat orientation{Quat::Identity()};   // world <- body
  Vec3 linear_velocity{Vec3::Zero()};   // body frame u,v,w, m/s
  Vec3 angular_velocity{Vec3::Zero()};  // body frame p,q,r, rad/s

  Vec6 nu() const {
    Vec6 v;
    v << linear_velocity, angular_velocity;
    return v;
  }
  bool finite() const {
    return position.allFinite() && orientation.coeffs().allFinite() &&
           linear_velocity.allFinite() && angular_velocity.allFinite();
  }
};

struct RigidBodyParams {
  Mat6 inertia;                         // rigid-body + added mass, SPD
  Vec6 linear_damping{Vec6::Zero()};    // diagonal coefficients, >= 0
  Vec6 quadratic_damping{Vec6::Zero()}; // diagonal coefficients, >= 0
  double weight = 0.0;                  // N
  double buoyancy = 0.0;                // N
  Vec3 cob_offset{Vec3::Zero()};        // center of buoyancy, body frame, m
  double fluid_density = 1000.0;        // kg/m^3

  // Throws std::invalid_argument on a non-SPD inertia matrix, negative
  // damping, or non-positive density.
  void validate() const;
};

// Coriolis/centripetal matrix built from the inertia matrix. Satisfies
// nu^T C(nu) nu = 0 for every finite nu.
Mat6 coriolis_matrix(const RigidBodyParams& params, const Vec6& nu);

// Net weight + buoyancy wrench expressed in the body frame. Weight acts at
// the body origin (CoG), buoyancy at cob_offset.
Wrench restoring_wrench(const RigidBodyParams& params, const Quat& orientation);

// Diagonal damping wrench contribution D(nu) nu with
// D(nu) = diag(linear) + diag(quadratic .* |nu|).
Vec6 damping_force(const RigidBodyParams& params, const Vec6& nu);

// One semi-implicit Euler step: velocities first, then pose with the new
// velocities. The quaternion is advanced with the exponential map and
// renormalized.
BodyState dynamics_step(const BodyState& state, const RigidBodyParams& params,
                        const Wrench& tau, double dt);

// Upward-positive vertical velocity in the world frame.
double world_vertical_velocity(const BodyState& state);

// Dot product of the body z axis (in world coordinates) with world up;
// 1 when upright, -1 when inverted.
double uprightness(const Quat& orientation);

// Intrinsic Z-Y-X (yaw, pitch, roll) angles derived from the quaternion,
// returned as (roll, pitch, yaw). Logging/eval only.
Vec3 euler_angles(const Quat& orientation);

double kinetic_energy(const RigidBodyParams& params, const Vec6& nu);

}  // namespace ftsurf

#endif
