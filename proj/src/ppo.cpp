#include "ftsurf/ppo.hpp"

#include <cmath>
#include <deque>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ftsurf {

GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<std::uint8_t>& dones, double gamma, double lambda) {
  const std::size_t T = rewards.size();
  if (values.size() != T || dones.size() != T)
    throw std::invalid_argument("compute_gae: input length mismatch");
  GaeResult out;
  out.advantages.assign(T, 0.0);
  out.returns.assign(T, 0.0);
  double carried = 0.0;
  for (std::size_t i = T; i-- > 0;) {
    // Terminal steps bootstrap to a zero value and cut the advantage recursion.
    const double next_value = (!dones[i] && i + 1 < T) ? values[i + 1] : 0.0;
    const double next_adv = dones[i] ? 0.0 : carried;
    const double delta = rewards[i] + gamma * next_value - values[i];
    carried = delta + gamma * lambda * next_adv;
    out.advantages[i] = carried;
    out.returns[i] = carried + values[i];
  }
  return out;
}

void normalize_advantages(std::vector<std::vector<double>>& advantages) {
  std::size_t n = 0;
  double mean = 0.0;
  for (const auto& ep : advantages)
    for (double a : ep) {
      mean += a;
      ++n;
    }
  if (n == 0) return;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto& ep : advantages)
    for (double a : ep) var += (a - mean) * (a - mean);
  var /= static_cast<double>(n);
  const double std_dev = std::sqrt(var);
  for (auto& ep : advantages)
    for (double& a : ep) {
      a -= mean;
      if (std_dev > 1e-8) a /= std_dev;
    }
}

void TrainConfig::validate() const {
  if (learning_rate <= 0) throw std::invalid_argument("train: learning rate must be positive");
  if (gamma <= 0 || gamma > 1) throw std::invalid_argument("train: gamma must be in (0, 1]");
  if (gae_lambda < 0 || gae_lambda > 1)
    throw std::invalid_argument("train: gae lambda must be in [0, 1]");
  if (clip_epsilon <= 0) throw std::invalid_argument("train: clip epsilon must be positive");
  if (epochs < 1 || episodes_per_batch < 1 || max_episodes < 1 || criterion_window < 1)
    throw std::invalid_argument("train: counts must be at least 1");
  if (criterion_threshold <= 0 || criterion_threshold > 1)
    throw std::invalid_argument("train: success threshold must be in (0, 1]");
  if (threads < 1) throw std::invalid_argument("train: thread count must be at least 1");
}

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

struct EpisodeLossOut {
  PolicyWeights grads;
  double loss_sum = 0.0;
  double surr_sum = 0.0;
  double vmse_sum = 0.0;
  double entropy_sum = 0.0;
  double ratio_sum = 0.0;
  long clipped = 0;
  bool bad = false;
};

EpisodeLossOut episode_loss(const EpisodeData& ep, const std::vector<double>& adv,
                            const std::vector<double>& ret, const PolicyWeights& w,
                            const TrainConfig& cfg, double inv_n) {
  const int T = ep.steps();
  EpisodeLossOut out;
  out.grads = PolicyWeights::zeros(w.cfg);

  SequenceForward fwd = forward_sequence(w, ep.obs);
  std::vector<Eigen::VectorXd> d_mean(T);
  std::vector<double> d_value(T);
  Eigen::VectorXd d_logstd = Eigen::VectorXd::Zero(w.cfg.act_dim);

  const Eigen::ArrayXd sigma = w.actor_logstd.array().exp();
  double entropy = 0.0;
  for (int j = 0; j < w.cfg.act_dim; ++j)
    entropy += w.actor_logstd(j) + 0.5 * (1.0 + kLogTwoPi);

  for (int t = 0; t < T; ++t) {
    const double lp_new = squashed_logprob(fwd.mean[t], w.actor_logstd, ep.raw_action[t]);
    const double ratio = std::exp(lp_new - ep.logprob[t]);
    if (!std::isfinite(ratio)) {
      out.bad = true;
      return out;
    }
    const double a = adv[t];
    const double clipped_ratio =
        std::min(std::max(ratio, 1.0 - cfg.clip_epsilon), 1.0 + cfg.clip_epsilon);
    const double obj_raw = ratio * a;
    const double obj_clip = clipped_ratio * a;
    const bool use_raw = obj_raw <= obj_clip;  // min() in the negated objective
    const double surr = -std::min(obj_raw, obj_clip);
    const double verr = fwd.value[t] - ret[t];

    out.surr_sum += surr;
    out.vmse_sum += verr * verr;
    out.entropy_sum += entropy;
    out.ratio_sum += ratio;
    if (std::abs(ratio - 1.0) > cfg.clip_epsilon) ++out.clipped;
    out.loss_sum += surr + cfg.value_coeff * verr * verr - cfg.entropy_coeff * entropy;

    // d(-ratio*A)/d logpi = -A*ratio when the unclipped branch is active;
    // the clipped branch is locally constant in the parameters.
    const double coeff = use_raw ? -a * ratio : 0.0;
    const Eigen::ArrayXd z = (ep.raw_action[t] - fwd.mean[t]).array() / sigma;
    d_mean[t] = (coeff * inv_n) * (z / sigma).matrix();
    d_logstd.array() += (coeff * inv_n) * (z.square() - 1.0) - cfg.entropy_coeff * inv_n;
    d_value[t] = 2.0 * cfg.value_coeff * verr * inv_n;
  }

  backward_sequence(w, fwd, d_mean, d_value, out.grads, cfg.bptt_truncation);
  out.grads.actor_logstd += d_logstd;
  return out;
}

}  // namespace

LossStats ppo_loss(const std::vector<EpisodeData>& batch,
                   const std::vector<std::vector<double>>& advantages,
                   const std::vector<std::vector<double>>& returns, const PolicyWeights& w,
                   const TrainConfig& cfg, PolicyWeights& grads) {
  if (batch.size() != advantages.size() || batch.size() != returns.size())
    throw std::invalid_argument("ppo_loss: batch/advantage shape mismatch");
  long total_steps = 0;
  for (const EpisodeData& ep : batch) total_steps += ep.steps();
  if (total_steps == 0) throw std::invalid_argument("ppo_loss: empty batch");
  const double inv_n = 1.0 / static_cast<double>(total_steps);

  const int E = static_cast<int>(batch.size());
  std::vector<EpisodeLossOut> parts(E);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(cfg.threads) if (cfg.threads > 1)
#endif
  for (int e = 0; e < E; ++e)
    parts[e] = episode_loss(batch[e], advantages[e], returns[e], w, cfg, inv_n);

  grads.set_zero();
  LossStats stats;
  long clipped = 0;
  double ratio_sum = 0.0;
  bool bad = false;
  // Fixed-order reduction keeps the update bitwise independent of threading.
  for (int e = 0; e < E; ++e) {
    const EpisodeLossOut& p = parts[e];
    bad = bad || p.bad;
    axpy(grads, p.grads, 1.0);
    stats.total += p.loss_sum * inv_n;
    stats.surrogate += p.surr_sum * inv_n;
    stats.value_mse += p.vmse_sum * inv_n;
    stats.entropy += p.entropy_sum * inv_n;
    ratio_sum += p.ratio_sum;
    clipped += p.clipped;
  }
  if (bad) throw DivergenceError("ppo_loss: non-finite probability ratio");
  stats.mean_ratio = ratio_sum * inv_n;
  stats.clip_fraction = static_cast<double>(clipped) * inv_n;
  return stats;
}

AdamState AdamState::zero(const NetConfig& cfg) {
  AdamState s;
  s.m = PolicyWeights::zeros(cfg);
  s.v = PolicyWeights::zeros(cfg);
  return s;
}

void adam_update(PolicyWeights& w, const PolicyWeights& grads, AdamState& state, double lr) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  std::vector<ParamRef> wr = w.param_refs();
  std::vector<ParamRef> gr = grads.param_refs();
  std::vector<ParamRef> mr = state.m.param_refs();
  std::vector<ParamRef> vr = state.v.param_refs();
  for (std::size_t i = 0; i < wr.size(); ++i) {
    Eigen::Map<Eigen::ArrayXd> wv(wr[i].data, wr[i].size());
    Eigen::Map<const Eigen::ArrayXd> gv(gr[i].data, gr[i].size());
    Eigen::Map<Eigen::ArrayXd> mv(mr[i].data, mr[i].size());
    Eigen::Map<Eigen::ArrayXd> vv(vr[i].data, vr[i].size());
    mv = state.beta1 * mv + (1.0 - state.beta1) * gv;
    vv = state.beta2 * vv + (1.0 - state.beta2) * gv.square();
    wv -= lr * (mv / bc1) / ((vv / bc2).sqrt() + state.epsilon);
  }
}

double clip_grad_norm(PolicyWeights& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (!std::isfinite(norm)) throw DivergenceError("gradient norm is not finite");
  if (max_norm > 0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (ParamRef& p : grads.param_refs())
      Eigen::Map<Eigen::VectorXd>(p.data, p.size()) *= scale;
  }
  return norm;
}

TrainResult train(const EnvFactory& factory, const TrainConfig& cfg,
                  const std::optional<PolicyWeights>& initial_weights,
                  const CheckpointCallback& on_checkpoint) {
  cfg.validate();
  TrainResult result;
  result.weights = initial_weights ? *initial_weights
                                   : PolicyWeights::initialized(cfg.net, cfg.seed);
  if (initial_weights && !(initial_weights->cfg == cfg.net))
    throw std::invalid_argument("train: initial weights do not match the configured network");

  AdamState adam = AdamState::zero(cfg.net);
  PolicyWeights grads = PolicyWeights::zeros(cfg.net);
  std::deque<bool> window;
  long window_successes = 0;
  int episodes_done = 0;
  long next_checkpoint = cfg.checkpoint_every > 0 ? cfg.checkpoint_every : -1;
  bool met = false;

  for (std::uint64_t batch_idx = 0; !met && episodes_done < cfg.max_episodes; ++batch_idx) {
    RolloutConfig rc;
    rc.episodes = std::min(cfg.episodes_per_batch, cfg.max_episodes - episodes_done);
    rc.master_seed = cfg.seed;
    rc.batch_index = batch_idx;
    rc.threads = cfg.threads;
    std::vector<EpisodeData> batch = collect_batch(factory, result.weights, rc);

    for (const EpisodeData& ep : batch) {
      ++episodes_done;
      window.push_back(ep.info.success);
      if (ep.info.success) ++window_successes;
      if (static_cast<int>(window.size()) > cfg.criterion_window) {
        if (window.front()) --window_successes;
        window.pop_front();
      }
      const double trailing =
          static_cast<double>(window_successes) / static_cast<double>(window.size());
      EpisodeRecord rec;
      rec.episode = episodes_done;
      rec.success = ep.info.success;
      rec.episode_return = ep.episode_return;
      rec.steps = ep.steps();
      rec.elapsed = ep.info.elapsed;
      rec.fault_name = ep.info.fault_name;
      rec.trailing_success = trailing;
      result.log.episodes.push_back(rec);
      if (static_cast<int>(window.size()) >= cfg.criterion_window &&
          trailing >= cfg.criterion_threshold) {
        result.log.episodes_to_criterion = episodes_done;
        met = true;
        break;  // later episodes in this batch are discarded; no more updates
      }
    }
    if (met) break;

    std::vector<std::vector<double>> advantages(batch.size());
    std::vector<std::vector<double>> returns(batch.size());
    for (std::size_t e = 0; e < batch.size(); ++e) {
      std::vector<std::uint8_t> dones(batch[e].steps(), 0);
      if (!dones.empty()) dones.back() = 1;
      GaeResult g = compute_gae(batch[e].reward, batch[e].value, dones, cfg.gamma,
                                cfg.gae_lambda);
      advantages[e] = std::move(g.advantages);
      returns[e] = std::move(g.returns);
    }
    normalize_advantages(advantages);

    try {
      for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        LossStats stats = ppo_loss(batch, advantages, returns, result.weights, cfg, grads);
        clip_grad_norm(grads, cfg.grad_clip);
        adam_update(result.weights, grads, adam, cfg.learning_rate);
        result.log.batches.push_back(stats);
      }
    } catch (const DivergenceError&) {
      result.log.diverged = true;
      if (on_checkpoint) on_checkpoint(episodes_done, result.weights);
      return result;
    }

    if (on_checkpoint && next_checkpoint > 0 && episodes_done >= next_checkpoint) {
      on_checkpoint(episodes_done, result.weights);
      while (next_checkpoint <= episodes_done) next_checkpoint += cfg.checkpoint_every;
    }
  }

  if (on_checkpoint) on_checkpoint(episodes_done, result.weights);
  return result;
}

}  // namespace ftsurf
