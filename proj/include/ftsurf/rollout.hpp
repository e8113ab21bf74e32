#ifndef FTSURF_ROLLOUT_HPP
#define FTSURF_ROLLOUT_HPP

#include <functional>
#include <memory>

#include "ftsurf/env.hpp"
#include "ftsurf/net.hpp"

// Episode collection. Policy actions are tanh-squashed diagonal Gaussians:
// the network emits a mean and log-std over a raw variable u, the env
// receives tanh(u), and log-probabilities carry the tanh change-of-variables
// term. Batches are collected with one self-seeded RNG pair per episode, so
// the serial and OpenMP paths produce bitwise-identical results.

namespace ftsurf {

// SplitMix64-style mix of three words into one seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

// log N(u; mean, diag(exp(logstd)^2)) minus the tanh log-det-Jacobian,
// i.e. the log-density of a = tanh(u) evaluated at the stored raw sample.
double squashed_logprob(const Eigen::VectorXd& mean, const Eigen::VectorXd& logstd,
                        const Eigen::VectorXd& raw);

Eigen::VectorXd sample_raw_action(const Eigen::VectorXd& mean, const Eigen::VectorXd& logstd,
                                  std::mt19937_64& rng);

// Numerically stable sum of log(1 - tanh(u)^2).
double tanh_logdet(const Eigen::VectorXd& raw);

struct EpisodeData {
  std::vector<Eigen::VectorXd> obs;         // observation before each action
  std::vector<Eigen::VectorXd> raw_action;  // pre-squash samples
  std::vector<double> logprob;
  std::vector<double> value;
  std::vector<double> reward;
  EpisodeInfo info;
  double episode_return = 0.0;
  int steps() const { return static_cast<int>(obs.size()); }
};

using EnvFactory = std::function<std::unique_ptr<EnvBase>(std::uint64_t seed)>;

EnvFactory platform_env_factory(const PlatformSpec& spec);

struct RolloutConfig {
  int episodes = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t batch_index = 0;
  int threads = 1;
  bool deterministic = false;  // act on the squashed mean, no sampling
};

// Runs one episode to termination on an already-constructed environment.
EpisodeData run_episode(EnvBase& env, const PolicyWeights& w, std::uint64_t action_seed,
                        bool deterministic);

// Serial reference: one episode after another on the calling thread.
std::vector<EpisodeData> collect_batch_serial(const EnvFactory& factory, const PolicyWeights& w,
                                              const RolloutConfig& cfg);

// OpenMP over episodes when cfg.threads > 1; falls back to the serial path
// otherwise. Output is bitwise identical to collect_batch_serial.
std::vector<EpisodeData> collect_batch(const EnvFactory& factory, const PolicyWeights& w,
                                       const RolloutConfig& cfg);

}  // namespace ftsurf

#endif
