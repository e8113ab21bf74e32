#include "ftsurf/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ftsurf/rollout.hpp"

namespace ftsurf {

namespace {

namespace fs = std::filesystem;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

std::map<std::string, std::string> run_meta(const ExperimentConfig& ec, int episodes) {
  return {{"platform", platform_name(ec.spec.platform)},
          {"config_hash", ec.config_hash},
          {"seed", std::to_string(ec.seed)},
          {"episodes", std::to_string(episodes)}};
}

}  // namespace

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_training_csv(const TrainLog& log, const std::string& path) {
  std::string out = "episode,success,return,steps,elapsed,fault,trailing_success\n";
  for (const EpisodeRecord& r : log.episodes) {
    out += std::to_string(r.episode) + ',' + (r.success ? '1' : '0') + ',' +
           format_float(r.episode_return) + ',' + std::to_string(r.steps) + ',' +
           format_float(r.elapsed) + ',' + r.fault_name + ',' +
           format_float(r.trailing_success) + '\n';
  }
  write_file(path, out);
}

PolicyWeights load_weights_checked(const std::string& path, const PlatformSpec& spec,
                                   std::map<std::string, std::string>* meta_out) {
  std::map<std::string, std::string> meta;
  PolicyWeights w = load_weights(path, &meta);
  const std::string expect = platform_name(spec.platform);
  auto it = meta.find("platform");
  if (it != meta.end() && it->second != expect)
    throw std::invalid_argument("checkpoint " + path + " was trained for platform '" +
                                it->second + "', not '" + expect + "'");
  if (w.cfg.act_dim != spec.action_dim())
    throw std::invalid_argument("checkpoint " + path + " has action dimension " +
                                std::to_string(w.cfg.act_dim) + "; platform needs " +
                                std::to_string(spec.action_dim()));
  if (w.cfg.obs_dim != Observation::kDim)
    throw std::invalid_argument("checkpoint " + path + " has unexpected observation size");
  if (meta_out) *meta_out = meta;
  return w;
}

TrainRunResult run_training(const TrainRunArgs& args) {
  ExperimentConfig ec = load_experiment(args.config_path);
  if (args.seed) {
    ec.seed = *args.seed;
    ec.train.seed = *args.seed;
  }
  if (args.max_episodes) ec.train.max_episodes = *args.max_episodes;
  if (args.threads) ec.train.threads = *args.threads;

  fs::create_directories(args.output_dir);
  const std::string final_ckpt = args.output_dir + "/checkpoint_final.ckpt";

  std::optional<PolicyWeights> initial;
  if (!args.transfer_from.empty()) {
    PolicyWeights source = load_weights(args.transfer_from);
    if (source.cfg.hidden != ec.train.net.hidden || source.cfg.layers < 1)
      throw std::invalid_argument("transfer source hidden size " +
                                  std::to_string(source.cfg.hidden) + " does not match target " +
                                  std::to_string(ec.train.net.hidden));
    PolicyWeights target = PolicyWeights::initialized(ec.train.net, ec.train.seed);
    std::set<int> layers = args.transfer_layer_set.empty() ? std::set<int>{1}
                                                           : args.transfer_layer_set;
    initial = transfer_layers(source, target, layers);
  }

  CheckpointCallback cb = [&](int episodes_done, const PolicyWeights& w) {
    char name[64];
    std::snprintf(name, sizeof(name), "/checkpoint_ep%06d.ckpt", episodes_done);
    if (ec.train.checkpoint_every > 0)
      save_weights(w, args.output_dir + name, run_meta(ec, episodes_done));
    save_weights(w, final_ckpt, run_meta(ec, episodes_done));
  };

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult tr = train(platform_env_factory(ec.spec), ec.train, initial, cb);
  const auto t1 = std::chrono::steady_clock::now();

  TrainRunResult out;
  out.episodes_run = static_cast<int>(tr.log.episodes.size());
  out.episodes_to_criterion = tr.log.episodes_to_criterion;
  out.diverged = tr.log.diverged;
  out.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  out.checkpoint_path = final_ckpt;
  out.log_path = args.output_dir + "/training_log.csv";
  out.log = tr.log;
  out.weights = tr.weights;

  write_training_csv(tr.log, out.log_path);

  // Wall time stays out of the CSV and checkpoints so identical runs produce
  // identical bytes there; the human-facing summary carries it instead.
  std::string summary;
  summary += "platform: " + std::string(platform_name(ec.spec.platform)) + "\n";
  summary += "config_hash: " + ec.config_hash + "\n";
  summary += "seed: " + std::to_string(ec.seed) + "\n";
  summary += "episodes_run: " + std::to_string(out.episodes_run) + "\n";
  summary += "episodes_to_criterion: " + std::to_string(out.episodes_to_criterion) + "\n";
  summary += "diverged: " + std::string(out.diverged ? "true" : "false") + "\n";
  summary += "wall_seconds: " + format_float(out.wall_seconds) + "\n";
  if (!tr.log.episodes.empty())
    summary +=
        "final_trailing_success: " + format_float(tr.log.episodes.back().trailing_success) + "\n";
  write_file(args.output_dir + "/summary.txt", summary);

  if (out.diverged)
    save_weights(tr.weights, args.output_dir + "/checkpoint_diverged.ckpt",
                 run_meta(ec, out.episodes_run));
  return out;
}

namespace {

struct AttitudeAccum {
  long n = 0;
  double roll_sum = 0, roll_sq = 0, pitch_sum = 0, pitch_sq = 0;

  void add(const BodyState& s) {
    const Vec3 rpy = euler_angles(s.orientation);
    roll_sum += rpy.x();
    roll_sq += rpy.x() * rpy.x();
    pitch_sum += rpy.y();
    pitch_sq += rpy.y() * rpy.y();
    ++n;
  }
  double roll_std() const {
    if (n == 0) return 0;
    const double m = roll_sum / n;
    return std::sqrt(std::max(0.0, roll_sq / n - m * m));
  }
  double pitch_std() const {
    if (n == 0) return 0;
    const double m = pitch_sum / n;
    return std::sqrt(std::max(0.0, pitch_sq / n - m * m));
  }
};

using ActionFn =
    std::function<Eigen::VectorXd(Environment& env, const Eigen::VectorXd& obs, bool raw)>;

// Runs one deterministic episode; `controller` returns either a normalized
// action or a raw command (signalled via the bool it sets).
EpisodeInfo eval_episode(Environment& env, const std::optional<FaultMask>& pinned,
                         const PolicyWeights* w, const PidGains* gains, AttitudeAccum& att) {
  Eigen::VectorXd obs =
      pinned ? env.reset_with_faults(*pinned) : env.reset();
  RecurrentState state = w ? RecurrentState::zero(w->cfg) : RecurrentState{};
  PidState pid;
  const double period = env.spec().episode.action_period;
  for (;;) {
    EnvStepOut out;
    if (w) {
      PolicyOutput po = policy_forward(*w, obs, state);
      out = env.step(po.mean.array().tanh());
    } else {
      const Eigen::VectorXd cmd = pid_baseline(pid, *gains, env.depth(), period);
      out = env.step_raw(cmd);
    }
    att.add(env.state());
    obs = out.obs;
    if (out.done) break;
  }
  return env.info();
}

std::vector<FaultMask> eval_masks(const PlatformSpec& spec, const EvalSpec& eval) {
  switch (eval.mode) {
    case EvalSpec::Mode::enumerate_all:
      return enumerate_fault_set(spec.platform);
    case EvalSpec::Mode::pinned:
      return {eval.pinned_mask};
    case EvalSpec::Mode::sampled:
      return {};  // masks drawn per episode inside the env
  }
  return {};
}

EvalReport evaluate(const PlatformSpec& spec, const PolicyWeights* w, const PidGains* gains,
                    const EvalSpec& eval) {
  EvalReport report;
  AttitudeAccum att;
  std::map<std::string, std::size_t> mask_index;
  auto record = [&](const std::string& name, const EpisodeInfo& info) {
    auto [it, fresh] = mask_index.try_emplace(name, report.per_mask.size());
    if (fresh) report.per_mask.push_back(MaskEval{name, 0, 0, 0.0, 0.0});
    MaskEval& m = report.per_mask[it->second];
    const double drift = (info.final_xy - info.start_xy).norm();
    ++m.trials;
    ++report.trials;
    m.drift_sum += drift;
    report.drift_sum += drift;
    if (info.success) {
      ++m.successes;
      ++report.successes;
      m.time_sum += info.elapsed;
      report.time_sum += info.elapsed;
    }
  };

  if (eval.mode == EvalSpec::Mode::sampled) {
    for (int e = 0; e < eval.episodes; ++e) {
      Environment env(spec, mix_seed(eval.seed, 0xe5a1, static_cast<std::uint64_t>(e)));
      EpisodeInfo info = eval_episode(env, std::nullopt, w, gains, att);
      record(info.fault_name, info);
    }
  } else {
    const std::vector<FaultMask> masks = eval_masks(spec, eval);
    for (std::size_t mi = 0; mi < masks.size(); ++mi) {
      for (int trial = 0; trial < eval.trials_per_mask; ++trial) {
        Environment env(spec, mix_seed(eval.seed, mi, static_cast<std::uint64_t>(trial)));
        EpisodeInfo info = eval_episode(env, masks[mi], w, gains, att);
        record(masks[mi].name(), info);
      }
    }
  }
  report.roll_std = att.roll_std();
  report.pitch_std = att.pitch_std();
  return report;
}

}  // namespace

EvalReport evaluate_policy(const PlatformSpec& spec, const PolicyWeights& w,
                           const EvalSpec& eval) {
  return evaluate(spec, &w, nullptr, eval);
}

EvalReport evaluate_baseline(const PlatformSpec& spec, const PidGains& gains,
                             const EvalSpec& eval) {
  if (spec.platform != Platform::ucat)
    throw std::invalid_argument("the scripted baseline drives oscillating fins only");
  return evaluate(spec, nullptr, &gains, eval);
}

void write_eval_csv(const EvalReport& report, const std::string& path) {
  std::string out = "fault,trials,successes,success_rate,mean_time_to_surface,mean_drift\n";
  for (const MaskEval& m : report.per_mask)
    out += m.mask_name + ',' + std::to_string(m.trials) + ',' + std::to_string(m.successes) +
           ',' + format_float(m.success_rate()) + ',' + format_float(m.mean_time()) + ',' +
           format_float(m.mean_drift()) + '\n';
  out += "TOTAL," + std::to_string(report.trials) + ',' + std::to_string(report.successes) +
         ',' + format_float(report.success_rate()) + ',' + format_float(report.mean_time()) +
         ',' + format_float(report.mean_drift()) + '\n';
  write_file(path, out);
}

std::string format_eval_table(const std::string& label, const EvalReport& report) {
  std::string out = label + "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "  %-28s %7s %9s %12s %10s\n", "fault", "trials",
                "success", "mean-time", "drift");
  out += line;
  for (const MaskEval& m : report.per_mask) {
    std::snprintf(line, sizeof(line), "  %-28s %7d %8.0f%% %10.2fs %9.2fm\n",
                  m.mask_name.c_str(), m.trials, 100.0 * m.success_rate(), m.mean_time(),
                  m.mean_drift());
    out += line;
  }
  std::snprintf(line, sizeof(line), "  %-28s %7d %8.1f%% %10.2fs %9.2fm\n", "TOTAL",
                report.trials, 100.0 * report.success_rate(), report.mean_time(),
                report.mean_drift());
  out += line;
  std::snprintf(line, sizeof(line), "  roll std %.3f rad, pitch std %.3f rad\n",
                report.roll_std, report.pitch_std);
  out += line;
  return out;
}

std::string format_comparison(const EvalReport& learned, const EvalReport& scripted) {
  std::map<std::string, const MaskEval*> script_by_name;
  for (const MaskEval& m : scripted.per_mask) script_by_name[m.mask_name] = &m;
  std::string out;
  char line[200];
  std::snprintf(line, sizeof(line), "  %-28s %16s %16s\n", "fault", "learned", "scripted");
  out += line;
  for (const MaskEval& m : learned.per_mask) {
    const MaskEval* s = script_by_name.count(m.mask_name) ? script_by_name[m.mask_name] : nullptr;
    if (s)
      std::snprintf(line, sizeof(line), "  %-28s %9d/%-5d %10d/%-5d\n", m.mask_name.c_str(),
                    m.successes, m.trials, s->successes, s->trials);
    else
      std::snprintf(line, sizeof(line), "  %-28s %9d/%-5d %16s\n", m.mask_name.c_str(),
                    m.successes, m.trials, "-");
    out += line;
  }
  std::snprintf(line, sizeof(line), "  %-28s %8.1f%% %15.1f%%\n", "TOTAL",
                100.0 * learned.success_rate(), 100.0 * scripted.success_rate());
  out += line;
  return out;
}

EpisodeInfo replay_episode(const PlatformSpec& spec, const PolicyWeights& w,
                           const std::optional<FaultMask>& mask, std::uint64_t seed,
                           const std::string& csv_path) {
  Environment env(spec, seed);
  Eigen::VectorXd obs = mask ? env.reset_with_faults(*mask) : env.reset();
  RecurrentState state = RecurrentState::zero(w.cfg);

  std::string csv = "t,x,y,z,qw,qx,qy,qz,u,v,w,p,q,r,depth,reward";
  for (int i = 0; i < spec.action_dim(); ++i) csv += ",cmd" + std::to_string(i);
  csv += '\n';
  auto emit = [&](double reward, const Eigen::VectorXd& cmd) {
    const BodyState& s = env.state();
    csv += format_float(env.elapsed()) + ',' + format_float(s.position.x()) + ',' +
           format_float(s.position.y()) + ',' + format_float(s.position.z()) + ',' +
           format_float(s.orientation.w()) + ',' + format_float(s.orientation.x()) + ',' +
           format_float(s.orientation.y()) + ',' + format_float(s.orientation.z()) + ',' +
           format_float(s.linear_velocity.x()) + ',' + format_float(s.linear_velocity.y()) +
           ',' + format_float(s.linear_velocity.z()) + ',' +
           format_float(s.angular_velocity.x()) + ',' + format_float(s.angular_velocity.y()) +
           ',' + format_float(s.angular_velocity.z()) + ',' + format_float(env.depth()) + ',' +
           format_float(reward);
    for (Eigen::Index i = 0; i < cmd.size(); ++i) csv += ',' + format_float(cmd(i));
    csv += '\n';
  };
  emit(0.0, Eigen::VectorXd::Zero(spec.action_dim()));
  for (;;) {
    PolicyOutput po = policy_forward(w, obs, state);
    const Eigen::VectorXd action = po.mean.array().tanh();
    const Eigen::VectorXd cmd = env.map_action(action);
    EnvStepOut out = env.step(action);
    emit(out.reward, cmd);
    obs = out.obs;
    if (out.done) break;
  }
  std::ofstream f(csv_path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + csv_path);
  f << csv;
  return env.info();
}

}  // namespace ftsurf
