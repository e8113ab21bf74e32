#include "ftsurf/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace ftsurf {

namespace {

Eigen::Matrix3d skew(const Vec3& a) {
  Eigen::Matrix3d s;
  s << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return s;
}

}  // namespace

void RigidBodyParams::validate() const {
  if (!inertia.allFinite()) throw std::invalid_argument("inertia matrix has non-finite entries");
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("inertia matrix must be symmetric");
  Eigen::LLT<Mat6> llt(inertia);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("inertia matrix must be positive definite");
  if ((linear_damping.array() < 0).any() || (quadratic_damping.array() < 0).any())
    throw std::invalid_argument("damping coefficients must be non-negative");
  if (!(fluid_density > 0)) throw std::invalid_argument("fluid density must be positive");
}

Mat6 coriolis_matrix(const RigidBodyParams& params, const Vec6& nu) {
  // Standard construction from the (possibly coupled) inertia matrix:
  //   C = [      0        -S(M11 v1 + M12 v2) ]
  //       [ -S(M11 v1 + M12 v2)  -S(M21 v1 + M22 v2) ]
  const Vec3 v1 = nu.head<3>();
  const Vec3 v2 = nu.tail<3>();
  const Vec3 a = params.inertia.topLeftCorner<3, 3>() * v1 + params.inertia.topRightCorner<3, 3>() * v2;
  const Vec3 b = params.inertia.bottomLeftCorner<3, 3>() * v1 + params.inertia.bottomRightCorner<3, 3>() * v2;

  Mat6 c = Mat6::Zero();
  c.topRightCorner<3, 3>() = -skew(a);
  c.bottomLeftCorner<3, 3>() = -skew(a);
  c.bottomRightCorner<3, 3>() = -skew(b);
  return c;
}

Wrench restoring_wrench(const RigidBodyParams& params, const Quat& orientation) {
  // World gravity is -z; buoyancy +z. Express both in the body frame.
  const Eigen::Matrix3d r_wb = orientation.toRotationMatrix();
  const Vec3 f_weight = r_wb.transpose() * Vec3(0, 0, -params.weight);
  const Vec3 f_buoy = r_wb.transpose() * Vec3(0, 0, params.buoyancy);

  Wrench w;
  w.force = f_weight + f_buoy;
  w.torque = params.cob_offset.cross(f_buoy);  // weight acts at the origin
  return w;
}

Vec6 damping_force(const RigidBodyParams& params, const Vec6& nu) {
  return (params.linear_damping.array() + params.quadratic_damping.array() * nu.array().abs()) *
         nu.array();
}

BodyState dynamics_step(const BodyState& state, const RigidBodyParams& params, const Wrench& tau,
                        double dt) {
  const Vec6 nu = state.nu();
  const Vec6 rhs = tau.vec() + restoring_wrench(params, state.orientation).vec() -
                   coriolis_matrix(params, nu) * nu - damping_force(params, nu);
  const Vec6 nu_dot = params.inertia.llt().solve(rhs);
  const Vec6 nu_new = nu + dt * nu_dot;

  BodyState next;
  next.linear_velocity = nu_new.head<3>();
  next.angular_velocity = nu_new.tail<3>();
  next.position = state.position + dt * (state.orientation * next.linear_velocity);

  // Exponential-map quaternion update with the new body rates.
  const Vec3 dtheta = dt * next.angular_velocity;
  const double angle = dtheta.norm();
  Quat dq;
  if (angle < 1e-12) {
    dq = Quat(1.0, 0.5 * dtheta.x(), 0.5 * dtheta.y(), 0.5 * dtheta.z());
  } else {
    dq = Quat(Eigen::AngleAxisd(angle, dtheta / angle));
  }
  next.orientation = (state.orientation * dq).normalized();
  return next;
}

double world_vertical_velocity(const BodyState& state) {
  return (state.orientation * state.linear_velocity).z();
}

double uprightness(const Quat& orientation) {
  return (orientation * Vec3(0, 0, 1)).z();
}

Vec3 euler_angles(const Quat& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  const double roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
  double sp = 2.0 * (w * y - z * x);
  sp = std::clamp(sp, -1.0, 1.0);
  const double pitch = std::asin(sp);
  const double yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
  return {roll, pitch, yaw};
}

double kinetic_energy(const RigidBodyParams& params, const Vec6& nu) {
  return 0.5 * nu.dot(params.inertia * nu);
}

}  // namespace ftsurf
