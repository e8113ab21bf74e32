#ifndef FTSURF_PPO_HPP
#define FTSURF_PPO_HPP

#include <functional>
#include <optional>
#include <set>

#include "ftsurf/rollout.hpp"

// Proximal policy optimization over whole recurrent episodes: generalized
// advantage estimation, the clipped surrogate objective with exact gradients
// through the LSTM stacks, Adam, and a trailing-success-rate stopping rule.

namespace ftsurf {

class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Generalized advantage estimation over one trajectory segment. dones[t]
// marks terminal steps; the value after a terminal step bootstraps to zero,
// as does the value past the end of the segment.
struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantage + value target
};
GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<std::uint8_t>& dones, double gamma, double lambda);

// In-place normalization to zero mean / unit std across all steps of a
// batch; skipped (mean subtraction only) when the spread is degenerate.
void normalize_advantages(std::vector<std::vector<double>>& advantages);

struct TrainConfig {
  NetConfig net;
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double value_coeff = 0.5;
  double entropy_coeff = 0.0;
  double grad_clip = 0.5;
  int epochs = 10;
  int episodes_per_batch = 8;
  int max_episodes = 100000;
  int criterion_window = 100;
  double criterion_threshold = 0.99;
  std::uint64_t seed = 0;
  int threads = 1;
  int bptt_truncation = 0;  // 0 = backpropagate through the whole episode
  int checkpoint_every = 0; // episodes between checkpoint callbacks (0 = end only)

  void validate() const;
};

struct LossStats {
  double total = 0.0;
  double surrogate = 0.0;   // negated clipped objective
  double value_mse = 0.0;
  double entropy = 0.0;
  double mean_ratio = 1.0;
  double clip_fraction = 0.0;
};

// Evaluates the PPO loss over a batch of episodes and accumulates exact
// parameter gradients into `grads` (which is zeroed first). advantages and
// returns are per-episode vectors aligned with the batch. Throws
// DivergenceError on non-finite ratios or gradients.
LossStats ppo_loss(const std::vector<EpisodeData>& batch,
                   const std::vector<std::vector<double>>& advantages,
                   const std::vector<std::vector<double>>& returns, const PolicyWeights& w,
                   const TrainConfig& cfg, PolicyWeights& grads);

struct AdamState {
  PolicyWeights m, v;
  long step = 0;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  static AdamState zero(const NetConfig& cfg);
};

// One Adam update: w <- w - lr * m_hat / (sqrt(v_hat) + eps).
void adam_update(PolicyWeights& w, const PolicyWeights& grads, AdamState& state, double lr);

// Scales gradients so the global L2 norm is at most max_norm; returns the
// pre-clip norm.
double clip_grad_norm(PolicyWeights& grads, double max_norm);

struct EpisodeRecord {
  int episode = 0;  // 1-based running index
  bool success = false;
  double episode_return = 0.0;
  int steps = 0;
  double elapsed = 0.0;
  std::string fault_name;
  double trailing_success = 0.0;  // over the criterion window so far
};

struct TrainLog {
  std::vector<EpisodeRecord> episodes;
  int episodes_to_criterion = -1;  // -1 = criterion never met
  std::vector<LossStats> batches;
  bool diverged = false;
};

struct TrainResult {
  PolicyWeights weights;
  TrainLog log;
};

using CheckpointCallback = std::function<void(int episodes_done, const PolicyWeights&)>;

// Full training run: collect a batch, rebuild advantages, take `epochs`
// clipped-surrogate steps, repeat until the trailing success criterion or the
// episode budget is hit. Optional initial weights (e.g. transferred layers)
// replace the seeded initialization.
TrainResult train(const EnvFactory& factory, const TrainConfig& cfg,
                  const std::optional<PolicyWeights>& initial_weights = std::nullopt,
                  const CheckpointCallback& on_checkpoint = nullptr);

}  // namespace ftsurf

#endif
