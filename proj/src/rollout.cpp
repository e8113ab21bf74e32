#include "ftsurf/rollout.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ftsurf {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(a) ^ b) ^ c);
}

double tanh_logdet(const Eigen::VectorXd& raw) {
  // log(1 - tanh(u)^2) = 2*(log 2 - u - softplus(-2u)), stable for large |u|.
  double s = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double u = raw(i);
    const double sp = u > 15.0 ? std::exp(-2.0 * u) : std::log1p(std::exp(-2.0 * u));
    s += 2.0 * (std::log(2.0) - u - sp);
  }
  return s;
}

double squashed_logprob(const Eigen::VectorXd& mean, const Eigen::VectorXd& logstd,
                        const Eigen::VectorXd& raw) {
  constexpr double kLogTwoPi = 1.8378770664093453;
  double lp = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double z = (raw(i) - mean(i)) / std::exp(logstd(i));
    lp += -0.5 * z * z - logstd(i) - 0.5 * kLogTwoPi;
  }
  return lp - tanh_logdet(raw);
}

Eigen::VectorXd sample_raw_action(const Eigen::VectorXd& mean, const Eigen::VectorXd& logstd,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd u(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i)
    u(i) = mean(i) + std::exp(logstd(i)) * normal(rng);
  return u;
}

EpisodeData run_episode(EnvBase& env, const PolicyWeights& w, std::uint64_t action_seed,
                        bool deterministic) {
  constexpr int kHardStepCap = 1000000;
  std::mt19937_64 action_rng(action_seed);
  RecurrentState state = RecurrentState::zero(w.cfg);
  EpisodeData ep;
  Eigen::VectorXd obs = env.reset();
  for (int t = 0;; ++t) {
    if (t >= kHardStepCap)
      throw std::runtime_error("run_episode: environment never terminated");
    PolicyOutput po = policy_forward(w, obs, state);
    Eigen::VectorXd raw =
        deterministic ? po.mean : sample_raw_action(po.mean, po.logstd, action_rng);
    ep.obs.push_back(obs);
    ep.raw_action.push_back(raw);
    ep.logprob.push_back(squashed_logprob(po.mean, po.logstd, raw));
    ep.value.push_back(po.value);
    EnvStepOut out = env.step(raw.array().tanh());
    ep.reward.push_back(out.reward);
    ep.episode_return += out.reward;
    obs = out.obs;
    if (out.done) break;
  }
  ep.info = env.info();
  return ep;
}

EnvFactory platform_env_factory(const PlatformSpec& spec) {
  return [spec](std::uint64_t seed) -> std::unique_ptr<EnvBase> {
    return std::make_unique<Environment>(spec, seed);
  };
}

namespace {

EpisodeData collect_one(const EnvFactory& factory, const PolicyWeights& w,
                        const RolloutConfig& cfg, int episode_index) {
  const std::uint64_t env_seed = mix_seed(cfg.master_seed, cfg.batch_index,
                                          static_cast<std::uint64_t>(episode_index));
  const std::uint64_t action_seed = mix_seed(env_seed, 0x51f15eedULL, 1);
  std::unique_ptr<EnvBase> env = factory(env_seed);
  return run_episode(*env, w, action_seed, cfg.deterministic);
}

}  // namespace

std::vector<EpisodeData> collect_batch_serial(const EnvFactory& factory, const PolicyWeights& w,
                                              const RolloutConfig& cfg) {
  std::vector<EpisodeData> out(cfg.episodes);
  for (int e = 0; e < cfg.episodes; ++e) out[e] = collect_one(factory, w, cfg, e);
  return out;
}

std::vector<EpisodeData> collect_batch(const EnvFactory& factory, const PolicyWeights& w,
                                       const RolloutConfig& cfg) {
#ifdef _OPENMP
  if (cfg.threads > 1) {
    std::vector<EpisodeData> out(cfg.episodes);
    std::string error;
    // Each episode owns its seeds and environment, so iteration order cannot
    // change the result — only the wall time.
#pragma omp parallel for schedule(dynamic) num_threads(cfg.threads)
    for (int e = 0; e < cfg.episodes; ++e) {
      try {
        out[e] = collect_one(factory, w, cfg, e);
      } catch (const std::exception& ex) {
#pragma omp critical
        if (error.empty()) error = ex.what();
      }
    }
    if (!error.empty()) throw std::runtime_error(error);
    return out;
  }
#endif
  return collect_batch_serial(factory, w, cfg);
}

}  // namespace ftsurf
