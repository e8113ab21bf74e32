#include "ftsurf/platform.hpp"

#include <cmath>

namespace ftsurf {

namespace {

RigidBodyParams body_params(std::initializer_list<double> inertia_diag,
                            std::initializer_list<double> lin, std::initializer_list<double> quad,
                            double weight, double buoyancy, double cob_z) {
  RigidBodyParams p;
  p.inertia = Mat6::Zero();
  int i = 0;
  for (double v : inertia_diag) p.inertia(i, i) = v, ++i;
  i = 0;
  for (double v : lin) p.linear_damping(i++) = v;
  i = 0;
  for (double v : quad) p.quadratic_damping(i++) = v;
  p.weight = weight;
  p.buoyancy = buoyancy;
  p.cob_offset = Vec3(0.0, 0.0, cob_z);
  return p;
}

PlatformSpec hovering_spec() {
  PlatformSpec s;
  s.platform = Platform::hovering;
  s.body = body_params({17.0, 24.0, 26.0, 0.28, 0.28, 0.28}, {4.0, 6.2, 5.2, 0.07, 0.07, 0.07},
                       {18.2, 21.7, 37.0, 1.55, 1.55, 1.55}, 112.8, 114.8, 0.02);
  const double c = std::sqrt(0.5);
  auto thr = [](double x, double y, double z, double dx, double dy, double dz, bool heave) {
    Thruster t;
    t.position = Vec3(x, y, z);
    t.direction = Vec3(dx, dy, dz);
    t.max_force = 20.0;
    t.heave = heave;
    return t;
  };
  // Indices 0-3 are the vertical (heave) thrusters; 4-7 the vectored
  // horizontal set.
  s.thrusters.thrusters = {
      thr(0.12, 0.218, 0.0, 0, 0, 1, true),    thr(0.12, -0.218, 0.0, 0, 0, 1, true),
      thr(-0.12, 0.218, 0.0, 0, 0, 1, true),   thr(-0.12, -0.218, 0.0, 0, 0, 1, true),
      thr(0.156, 0.111, 0.06, c, -c, 0, false), thr(0.156, -0.111, 0.06, c, c, 0, false),
      thr(-0.156, 0.111, 0.06, c, c, 0, false), thr(-0.156, -0.111, 0.06, c, -c, 0, false)};
  return s;
}

PlatformSpec torpedo_spec() {
  PlatformSpec s;
  s.platform = Platform::torpedo;
  s.body = body_params({31.4, 66.0, 66.0, 0.20, 8.3, 8.3}, {2.0, 10.0, 10.0, 0.1, 1.0, 1.0},
                       {3.1, 131.0, 131.0, 0.5, 9.4, 9.4}, 299.2, 301.0, 0.0196);
  auto fin = [](double mount, double y, double z) {
    Rudder r;
    r.mount_angle = mount;
    r.position = Vec3(-0.8, y, z);
    r.area = 0.02;
    r.max_angle = 0.4;
    r.slew_rate = 1.5;
    return r;
  };
  // Even indices are the horizontal stern planes (pitch authority); odd ones
  // the vertical rudders.
  s.rudders.rudders = {fin(0.0, 0.12, 0.0), fin(M_PI / 2, 0.0, 0.12), fin(M_PI, -0.12, 0.0),
                       fin(3 * M_PI / 2, 0.0, -0.12)};
  s.rudders.thruster_max_force = 25.0;
  // The torpedo climbs by pitching into a glide, which takes far longer than a
  // direct heave ascent.
  s.episode.time_limit = 100.0;
  return s;
}

PlatformSpec ucat_spec() {
  PlatformSpec s;
  s.platform = Platform::ucat;
  s.body = body_params({29.0, 34.0, 39.0, 0.35, 0.45, 0.5}, {5.0, 6.0, 8.0, 0.2, 0.3, 0.3},
                       {25.0, 30.0, 40.0, 1.0, 1.2, 1.2}, 186.4, 188.0, 0.015);
  auto fin = [](double x, double y, bool mirrored) {
    Fin f;
    f.position = Vec3(x, y, 0.0);
    f.mount = mirrored ? Eigen::AngleAxisd(M_PI, Vec3::UnitZ()).toRotationMatrix()
                       : Eigen::Matrix3d::Identity();
    f.area = 0.03;
    f.lever = 0.15;
    f.slew_rate = 20.0;
    return f;
  };
  // Order: front-left, front-right, rear-left, rear-right. Right-side fins
  // mirror the stroke plane so equal center angles cancel laterally.
  s.fins.fins = {fin(0.2, 0.15, false), fin(0.2, -0.15, true), fin(-0.2, 0.15, false),
                 fin(-0.2, -0.15, true)};
  s.fins.hydro.lift_coeff = 1.0;
  s.fins.hydro.drag0 = 0.05;
  s.fins.hydro.drag1 = 0.9;
  s.fins.hydro.added_mass = 0.15;
  // Flapping fins deliver far less thrust than propellers, so the clock is
  // proportionally looser than the hovering platform's.
  s.episode.time_limit = 75.0;
  return s;
}

void read_vec6(const ConfigFile& cfg, const std::string& section, const std::string& key,
               Vec6& out) {
  if (!cfg.has(section, key)) return;
  std::vector<double> v = cfg.get_doubles(section, key);
  if (v.size() != 6)
    throw ConfigError(cfg.origin() + ": key '" + key + "' needs 6 comma-separated values, got " +
                      std::to_string(v.size()));
  for (int i = 0; i < 6; ++i) out(i) = v[i];
}

void read_sym_range(const ConfigFile& cfg, const std::string& key, double& lo, double& hi) {
  if (!cfg.has("randomization", key)) return;
  const double b = cfg.get_double("randomization", key);
  if (b < 0) throw ConfigError(cfg.origin() + ": randomization bound '" + key + "' negative");
  lo = -b;
  hi = b;
}

}  // namespace

PlatformSpec default_platform_spec(Platform p) {
  PlatformSpec s;
  switch (p) {
    case Platform::hovering:
      s = hovering_spec();
      break;
    case Platform::torpedo:
      s = torpedo_spec();
      break;
    case Platform::ucat:
      s = ucat_spec();
      break;
  }
  s.sensors.velocity_std = 0.01;
  s.sensors.attitude_std = 0.005;
  s.sensors.rate_std = 0.01;
  s.sensors.smoothing = 0.3;
  // Buoyancy varies far less than the hydrodynamic coefficients: ballast is
  // trimmed to well under a percent of displacement, and a wider band would
  // hand heavily-degraded vehicles episodes that no control policy can win
  // (a net sink rate beyond the surviving actuators' budget).
  s.randomization = RandomizationRanges{-0.1, 0.1, -0.1, 0.1, -0.01, 0.01, -0.1, 0.1};
  return s;
}

ExperimentConfig load_experiment(const std::string& path) {
  return experiment_from_config(ConfigFile::parse_file(path));
}

ExperimentConfig experiment_from_config(const ConfigFile& cfg) {
  ExperimentConfig ec;
  const std::string pname = cfg.get_string("experiment", "platform");
  Platform platform;
  try {
    platform = parse_platform(pname);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.origin() + ": " + e.what());
  }
  ec.spec = default_platform_spec(platform);
  ec.seed = static_cast<std::uint64_t>(cfg.get_int_or("experiment", "seed", 0));

  EpisodeConfig& ep = ec.spec.episode;
  ep.start_depth = cfg.get_double_or("episode", "start_depth", ep.start_depth);
  ep.time_limit = cfg.get_double_or("episode", "time_limit", ep.time_limit);
  ep.dt = cfg.get_double_or("episode", "dt", ep.dt);
  ep.action_period = cfg.get_double_or("episode", "action_period", ep.action_period);
  ep.surface_depth = cfg.get_double_or("episode", "surface_depth", ep.surface_depth);
  ep.attitude_perturbation =
      cfg.get_double_or("episode", "attitude_perturbation", ep.attitude_perturbation);
  ep.goal_on_timeout = cfg.get_bool_or("episode", "goal_on_timeout", ep.goal_on_timeout);
  ep.goal_time_sign = cfg.get_double_or("episode", "goal_time_sign", ep.goal_time_sign);

  RewardWeights& rw = ec.spec.reward;
  rw.k1 = cfg.get_double_or("reward", "k1", rw.k1);
  rw.k2 = cfg.get_double_or("reward", "k2", rw.k2);
  rw.k3 = cfg.get_double_or("reward", "k3", rw.k3);
  rw.k4 = cfg.get_double_or("reward", "k4", rw.k4);
  rw.k5 = cfg.get_double_or("reward", "k5", rw.k5);

  SensorNoiseConfig& sn = ec.spec.sensors;
  sn.velocity_std = cfg.get_double_or("sensors", "velocity_std", sn.velocity_std);
  sn.attitude_std = cfg.get_double_or("sensors", "attitude_std", sn.attitude_std);
  sn.rate_std = cfg.get_double_or("sensors", "rate_std", sn.rate_std);
  sn.smoothing = cfg.get_double_or("sensors", "smoothing", sn.smoothing);

  RandomizationRanges& rr = ec.spec.randomization;
  read_sym_range(cfg, "inertia", rr.inertia_lo, rr.inertia_hi);
  read_sym_range(cfg, "damping", rr.damping_lo, rr.damping_hi);
  read_sym_range(cfg, "buoyancy", rr.buoyancy_lo, rr.buoyancy_hi);
  read_sym_range(cfg, "actuator", rr.actuator_lo, rr.actuator_hi);

  RigidBodyParams& body = ec.spec.body;
  if (cfg.has("body", "inertia_diag")) {
    std::vector<double> v = cfg.get_doubles("body", "inertia_diag");
    if (v.size() != 6)
      throw ConfigError(cfg.origin() + ": inertia_diag needs 6 values");
    body.inertia.setZero();
    for (int i = 0; i < 6; ++i) body.inertia(i, i) = v[i];
  }
  read_vec6(cfg, "body", "linear_damping", body.linear_damping);
  read_vec6(cfg, "body", "quadratic_damping", body.quadratic_damping);
  body.weight = cfg.get_double_or("body", "weight", body.weight);
  body.buoyancy = cfg.get_double_or("body", "buoyancy", body.buoyancy);
  body.cob_offset.z() = cfg.get_double_or("body", "cob_z", body.cob_offset.z());
  body.fluid_density = cfg.get_double_or("body", "fluid_density", body.fluid_density);

  if (cfg.has("thrusters", "max_force")) {
    const double f = cfg.get_double("thrusters", "max_force");
    for (Thruster& t : ec.spec.thrusters.thrusters) t.max_force = f;
  }
  if (cfg.has("rudders", "area")) {
    const double a = cfg.get_double("rudders", "area");
    for (Rudder& r : ec.spec.rudders.rudders) r.area = a;
  }
  if (cfg.has("rudders", "max_angle")) {
    const double a = cfg.get_double("rudders", "max_angle");
    for (Rudder& r : ec.spec.rudders.rudders) r.max_angle = a;
  }
  if (cfg.has("rudders", "slew_rate")) {
    const double a = cfg.get_double("rudders", "slew_rate");
    for (Rudder& r : ec.spec.rudders.rudders) r.slew_rate = a;
  }
  if (cfg.has("rudders", "lift_gain")) {
    const double a = cfg.get_double("rudders", "lift_gain");
    for (Rudder& r : ec.spec.rudders.rudders) r.lift_gain = a;
  }
  ec.spec.rudders.thruster_max_force =
      cfg.get_double_or("rudders", "thruster_max_force", ec.spec.rudders.thruster_max_force);

  if (cfg.has("fins", "area")) {
    const double a = cfg.get_double("fins", "area");
    for (Fin& f : ec.spec.fins.fins) f.area = a;
  }
  if (cfg.has("fins", "lever")) {
    const double a = cfg.get_double("fins", "lever");
    for (Fin& f : ec.spec.fins.fins) f.lever = a;
  }
  if (cfg.has("fins", "slew_rate")) {
    const double a = cfg.get_double("fins", "slew_rate");
    for (Fin& f : ec.spec.fins.fins) f.slew_rate = a;
  }
  FinHydro& fh = ec.spec.fins.hydro;
  fh.lift_coeff = cfg.get_double_or("fins", "lift_coeff", fh.lift_coeff);
  fh.drag0 = cfg.get_double_or("fins", "drag0", fh.drag0);
  fh.drag1 = cfg.get_double_or("fins", "drag1", fh.drag1);
  fh.added_mass = cfg.get_double_or("fins", "added_mass", fh.added_mass);
  ec.spec.fin_amp_max = cfg.get_double_or("fins", "amp_max", ec.spec.fin_amp_max);
  ec.spec.fin_center_range =
      cfg.get_double_or("fins", "center_range", ec.spec.fin_center_range);
  ec.spec.fin_rate_max = cfg.get_double_or("fins", "rate_max", ec.spec.fin_rate_max);

  ec.spec.fault_sampling.min_faults =
      static_cast<int>(cfg.get_int_or("faults", "min_faults", ec.spec.fault_sampling.min_faults));

  TrainConfig& tr = ec.train;
  tr.learning_rate = cfg.get_double_or("train", "learning_rate", tr.learning_rate);
  tr.gamma = cfg.get_double_or("train", "gamma", tr.gamma);
  tr.gae_lambda = cfg.get_double_or("train", "gae_lambda", tr.gae_lambda);
  tr.clip_epsilon = cfg.get_double_or("train", "clip_epsilon", tr.clip_epsilon);
  tr.value_coeff = cfg.get_double_or("train", "value_coeff", tr.value_coeff);
  tr.entropy_coeff = cfg.get_double_or("train", "entropy_coeff", tr.entropy_coeff);
  tr.grad_clip = cfg.get_double_or("train", "grad_clip", tr.grad_clip);
  tr.epochs = static_cast<int>(cfg.get_int_or("train", "epochs", tr.epochs));
  tr.episodes_per_batch =
      static_cast<int>(cfg.get_int_or("train", "episodes_per_batch", tr.episodes_per_batch));
  tr.max_episodes = static_cast<int>(cfg.get_int_or("train", "max_episodes", tr.max_episodes));
  tr.criterion_window =
      static_cast<int>(cfg.get_int_or("train", "criterion_window", tr.criterion_window));
  tr.criterion_threshold =
      cfg.get_double_or("train", "criterion_threshold", tr.criterion_threshold);
  tr.threads = static_cast<int>(cfg.get_int_or("train", "threads", tr.threads));
  tr.bptt_truncation =
      static_cast<int>(cfg.get_int_or("train", "bptt_truncation", tr.bptt_truncation));
  tr.checkpoint_every =
      static_cast<int>(cfg.get_int_or("train", "checkpoint_every", tr.checkpoint_every));
  tr.seed = ec.seed;

  NetConfig& net = tr.net;
  net.hidden = static_cast<int>(cfg.get_int_or("net", "hidden", net.hidden));
  net.layers = static_cast<int>(cfg.get_int_or("net", "layers", net.layers));
  net.logstd_init = cfg.get_double_or("net", "logstd_init", net.logstd_init);
  net.obs_dim = Observation::kDim;
  net.act_dim = ec.spec.action_dim();

  PidGains& pid = ec.pid;
  pid.kp = cfg.get_double_or("pid", "kp", pid.kp);
  pid.ki = cfg.get_double_or("pid", "ki", pid.ki);
  pid.kd = cfg.get_double_or("pid", "kd", pid.kd);
  pid.integral_limit = cfg.get_double_or("pid", "integral_limit", pid.integral_limit);
  pid.amp_gain = cfg.get_double_or("pid", "amp_gain", pid.amp_gain);
  pid.amp_max = cfg.get_double_or("pid", "amp_max", pid.amp_max);
  pid.osc_rate = cfg.get_double_or("pid", "osc_rate", pid.osc_rate);

  ec.config_hash = cfg.content_hash_hex();
  cfg.reject_unconsumed();
  try {
    ec.spec.validate();
    ec.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.origin() + ": " + e.what());
  }
  return ec;
}

}  // namespace ftsurf
