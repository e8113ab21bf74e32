#include "ftsurf/net.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ftsurf {

namespace {

int layer_input_dim(const NetConfig& cfg, int layer) {
  return layer == 0 ? cfg.obs_dim : cfg.hidden;
}

void check_config(const NetConfig& cfg) {
  if (cfg.obs_dim <= 0 || cfg.hidden <= 0 || cfg.layers <= 0 || cfg.act_dim <= 0)
    throw std::invalid_argument("net config: all dimensions must be positive");
}

std::vector<LstmLayerW> zero_stack(const NetConfig& cfg) {
  std::vector<LstmLayerW> stack(cfg.layers);
  for (int l = 0; l < cfg.layers; ++l) {
    const int in = layer_input_dim(cfg, l);
    stack[l].w_in = Eigen::MatrixXd::Zero(4 * cfg.hidden, in);
    stack[l].w_rec = Eigen::MatrixXd::Zero(4 * cfg.hidden, cfg.hidden);
    stack[l].b = Eigen::VectorXd::Zero(4 * cfg.hidden);
  }
  return stack;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void stack_refs(std::vector<ParamRef>& out, const std::string& prefix,
                std::vector<LstmLayerW>& stack) {
  for (std::size_t l = 0; l < stack.size(); ++l) {
    const std::string base = prefix + "/lstm_" + std::to_string(l + 1) + "/";
    LstmLayerW& lw = stack[l];
    out.push_back({base + "w_in", lw.w_in.data(), lw.w_in.rows(), lw.w_in.cols()});
    out.push_back({base + "w_rec", lw.w_rec.data(), lw.w_rec.rows(), lw.w_rec.cols()});
    out.push_back({base + "b", lw.b.data(), lw.b.size(), 1});
  }
}

}  // namespace

PolicyWeights PolicyWeights::zeros(const NetConfig& cfg) {
  check_config(cfg);
  PolicyWeights w;
  w.cfg = cfg;
  w.actor_lstm = zero_stack(cfg);
  w.critic_lstm = zero_stack(cfg);
  w.actor_mean.w = Eigen::MatrixXd::Zero(cfg.act_dim, cfg.hidden);
  w.actor_mean.b = Eigen::VectorXd::Zero(cfg.act_dim);
  w.actor_logstd = Eigen::VectorXd::Zero(cfg.act_dim);
  w.critic_value.w = Eigen::MatrixXd::Zero(1, cfg.hidden);
  w.critic_value.b = Eigen::VectorXd::Zero(1);
  return w;
}

PolicyWeights PolicyWeights::initialized(const NetConfig& cfg, std::uint64_t seed) {
  PolicyWeights w = zeros(cfg);
  std::uint64_t salt = 0;
  auto next_seed = [&]() { return seed * 0x9e3779b97f4a7c15ULL + ++salt; };
  auto init_stack = [&](std::vector<LstmLayerW>& stack) {
    for (int l = 0; l < cfg.layers; ++l) {
      const int in = layer_input_dim(cfg, l);
      for (int gate = 0; gate < 4; ++gate) {
        stack[l].w_in.middleRows(gate * cfg.hidden, cfg.hidden) =
            orthogonal_matrix(cfg.hidden, in, 1.0, next_seed());
        stack[l].w_rec.middleRows(gate * cfg.hidden, cfg.hidden) =
            orthogonal_matrix(cfg.hidden, cfg.hidden, 1.0, next_seed());
      }
      // Forget-gate bias starts positive so early memories persist.
      stack[l].b.segment(cfg.hidden, cfg.hidden).setOnes();
    }
  };
  init_stack(w.actor_lstm);
  init_stack(w.critic_lstm);
  // Small actor head keeps initial actions near the middle of their range.
  w.actor_mean.w = orthogonal_matrix(cfg.act_dim, cfg.hidden, 0.01, next_seed());
  w.actor_logstd.setConstant(cfg.logstd_init);
  w.critic_value.w = orthogonal_matrix(1, cfg.hidden, 1.0, next_seed());
  return w;
}

void PolicyWeights::set_zero() {
  for (ParamRef& p : param_refs()) Eigen::Map<Eigen::VectorXd>(p.data, p.size()).setZero();
}

std::vector<ParamRef> PolicyWeights::param_refs() {
  std::vector<ParamRef> out;
  stack_refs(out, "actor", actor_lstm);
  out.push_back({"actor/mean/w", actor_mean.w.data(), actor_mean.w.rows(), actor_mean.w.cols()});
  out.push_back({"actor/mean/b", actor_mean.b.data(), actor_mean.b.size(), 1});
  out.push_back({"actor/logstd", actor_logstd.data(), actor_logstd.size(), 1});
  stack_refs(out, "critic", critic_lstm);
  out.push_back(
      {"critic/value/w", critic_value.w.data(), critic_value.w.rows(), critic_value.w.cols()});
  out.push_back({"critic/value/b", critic_value.b.data(), critic_value.b.size(), 1});
  return out;
}

std::vector<ParamRef> PolicyWeights::param_refs() const {
  return const_cast<PolicyWeights*>(this)->param_refs();
}

double PolicyWeights::squared_norm() const {
  double s = 0.0;
  for (const ParamRef& p : param_refs())
    s += Eigen::Map<const Eigen::VectorXd>(p.data, p.size()).squaredNorm();
  return s;
}

void axpy(PolicyWeights& x, const PolicyWeights& g, double scale) {
  std::vector<ParamRef> xs = x.param_refs();
  std::vector<ParamRef> gs = g.param_refs();
  if (xs.size() != gs.size()) throw std::invalid_argument("axpy: parameter count mismatch");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != gs[i].size()) throw std::invalid_argument("axpy: shape mismatch");
    Eigen::Map<Eigen::VectorXd>(xs[i].data, xs[i].size()) +=
        scale * Eigen::Map<const Eigen::VectorXd>(gs[i].data, gs[i].size());
  }
}

LstmState LstmState::zero(const NetConfig& cfg) {
  LstmState s;
  s.h.assign(cfg.layers, Eigen::VectorXd::Zero(cfg.hidden));
  s.c.assign(cfg.layers, Eigen::VectorXd::Zero(cfg.hidden));
  return s;
}

RecurrentState RecurrentState::zero(const NetConfig& cfg) {
  return RecurrentState{LstmState::zero(cfg), LstmState::zero(cfg)};
}

namespace {

// One layer step; optionally records the tape entry.
Eigen::VectorXd layer_step(const LstmLayerW& lw, const Eigen::VectorXd& x, Eigen::VectorXd& h,
                           Eigen::VectorXd& c, LstmStepTape* tape) {
  const int H = static_cast<int>(h.size());
  Eigen::VectorXd z = lw.w_in * x + lw.w_rec * h + lw.b;
  Eigen::VectorXd gi(H), gf(H), gg(H), go(H);
  for (int k = 0; k < H; ++k) {
    gi[k] = sigmoid(z[k]);
    gf[k] = sigmoid(z[H + k]);
    gg[k] = std::tanh(z[2 * H + k]);
    go[k] = sigmoid(z[3 * H + k]);
  }
  Eigen::VectorXd c_new = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
  Eigen::VectorXd tanh_c = c_new.array().tanh();
  Eigen::VectorXd h_new = go.cwiseProduct(tanh_c);
  if (tape) {
    tape->x = x;
    tape->h_prev = h;
    tape->c_prev = c;
    tape->gi = gi;
    tape->gf = gf;
    tape->gg = gg;
    tape->go = go;
    tape->c = c_new;
    tape->tanh_c = tanh_c;
  }
  h = h_new;
  c = c_new;
  return h;
}

Eigen::VectorXd stack_step(const std::vector<LstmLayerW>& stack, const Eigen::VectorXd& input,
                           LstmState& state, std::vector<LstmStepTape>* tapes) {
  Eigen::VectorXd x = input;
  for (std::size_t l = 0; l < stack.size(); ++l)
    x = layer_step(stack[l], x, state.h[l], state.c[l], tapes ? &(*tapes)[l] : nullptr);
  return x;
}

}  // namespace

Eigen::VectorXd lstm_forward(const std::vector<LstmLayerW>& stack, const Eigen::VectorXd& input,
                             LstmState& state) {
  return stack_step(stack, input, state, nullptr);
}

PolicyOutput policy_forward(const PolicyWeights& w, const Eigen::VectorXd& obs,
                            RecurrentState& state) {
  if (obs.size() != w.cfg.obs_dim)
    throw std::invalid_argument("policy_forward: observation dimension mismatch");
  PolicyOutput out;
  Eigen::VectorXd ha = lstm_forward(w.actor_lstm, obs, state.actor);
  out.mean = w.actor_mean.w * ha + w.actor_mean.b;
  out.logstd = w.actor_logstd;
  Eigen::VectorXd hc = lstm_forward(w.critic_lstm, obs, state.critic);
  out.value = (w.critic_value.w * hc)(0) + w.critic_value.b(0);
  return out;
}

SequenceForward forward_sequence(const PolicyWeights& w,
                                 const std::vector<Eigen::VectorXd>& obs) {
  const int T = static_cast<int>(obs.size());
  const int L = w.cfg.layers;
  SequenceForward fwd;
  fwd.mean.resize(T);
  fwd.value.resize(T);
  fwd.actor_tape.steps.assign(T, std::vector<LstmStepTape>(L));
  fwd.actor_tape.top_h.resize(T);
  fwd.critic_tape.steps.assign(T, std::vector<LstmStepTape>(L));
  fwd.critic_tape.top_h.resize(T);
  LstmState sa = LstmState::zero(w.cfg);
  LstmState sc = LstmState::zero(w.cfg);
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd ha = stack_step(w.actor_lstm, obs[t], sa, &fwd.actor_tape.steps[t]);
    fwd.actor_tape.top_h[t] = ha;
    fwd.mean[t] = w.actor_mean.w * ha + w.actor_mean.b;
    Eigen::VectorXd hc = stack_step(w.critic_lstm, obs[t], sc, &fwd.critic_tape.steps[t]);
    fwd.critic_tape.top_h[t] = hc;
    fwd.value[t] = (w.critic_value.w * hc)(0) + w.critic_value.b(0);
  }
  return fwd;
}

namespace {

// Reverse pass over one stack. d_top[t] is the gradient w.r.t. the top-layer
// output at step t. Grad tensors are accumulated (+=).
void stack_backward(const std::vector<LstmLayerW>& stack, const SequenceTape& tape,
                    const std::vector<Eigen::VectorXd>& d_top, std::vector<LstmLayerW>& grads,
                    int truncation) {
  const int T = static_cast<int>(tape.steps.size());
  if (T == 0) return;
  const int L = static_cast<int>(stack.size());
  const int H = static_cast<int>(stack[0].w_rec.cols());
  std::vector<Eigen::VectorXd> dh_carry(L, Eigen::VectorXd::Zero(H));
  std::vector<Eigen::VectorXd> dc_carry(L, Eigen::VectorXd::Zero(H));
  Eigen::VectorXd dz(4 * H);
  for (int t = T - 1; t >= 0; --t) {
    Eigen::VectorXd dx_above = d_top[t];
    for (int l = L - 1; l >= 0; --l) {
      const LstmStepTape& s = tape.steps[t][l];
      Eigen::VectorXd dh = dh_carry[l] + dx_above;
      Eigen::VectorXd dc = dc_carry[l];
      // h = o .* tanh(c)
      Eigen::VectorXd d_o = dh.cwiseProduct(s.tanh_c);
      dc += dh.cwiseProduct(s.go)
                .cwiseProduct(Eigen::VectorXd::Ones(H) - s.tanh_c.cwiseProduct(s.tanh_c));
      Eigen::VectorXd d_i = dc.cwiseProduct(s.gg);
      Eigen::VectorXd d_f = dc.cwiseProduct(s.c_prev);
      Eigen::VectorXd d_g = dc.cwiseProduct(s.gi);
      dz.segment(0, H) = d_i.cwiseProduct(s.gi).cwiseProduct(Eigen::VectorXd::Ones(H) - s.gi);
      dz.segment(H, H) = d_f.cwiseProduct(s.gf).cwiseProduct(Eigen::VectorXd::Ones(H) - s.gf);
      dz.segment(2 * H, H) =
          d_g.cwiseProduct(Eigen::VectorXd::Ones(H) - s.gg.cwiseProduct(s.gg));
      dz.segment(3 * H, H) = d_o.cwiseProduct(s.go).cwiseProduct(Eigen::VectorXd::Ones(H) - s.go);
      grads[l].w_in.noalias() += dz * s.x.transpose();
      grads[l].w_rec.noalias() += dz * s.h_prev.transpose();
      grads[l].b += dz;
      dx_above = stack[l].w_in.transpose() * dz;  // flows to the layer below
      dh_carry[l] = stack[l].w_rec.transpose() * dz;
      dc_carry[l] = dc.cwiseProduct(s.gf);
    }
    if (truncation > 0 && t > 0 && (T - t) % truncation == 0) {
      for (int l = 0; l < L; ++l) {
        dh_carry[l].setZero();
        dc_carry[l].setZero();
      }
    }
  }
}

}  // namespace

void backward_sequence(const PolicyWeights& w, const SequenceForward& fwd,
                       const std::vector<Eigen::VectorXd>& d_mean,
                       const std::vector<double>& d_value, PolicyWeights& grads,
                       int bptt_truncation) {
  const int T = static_cast<int>(fwd.mean.size());
  if (static_cast<int>(d_mean.size()) != T || static_cast<int>(d_value.size()) != T)
    throw std::invalid_argument("backward_sequence: gradient length mismatch");
  std::vector<Eigen::VectorXd> d_top_actor(T), d_top_critic(T);
  for (int t = 0; t < T; ++t) {
    grads.actor_mean.w.noalias() += d_mean[t] * fwd.actor_tape.top_h[t].transpose();
    grads.actor_mean.b += d_mean[t];
    d_top_actor[t] = w.actor_mean.w.transpose() * d_mean[t];
    grads.critic_value.w.noalias() += d_value[t] * fwd.critic_tape.top_h[t].transpose();
    grads.critic_value.b(0) += d_value[t];
    d_top_critic[t] = w.critic_value.w.transpose() * Eigen::VectorXd::Constant(1, d_value[t]);
  }
  stack_backward(w.actor_lstm, fwd.actor_tape, d_top_actor, grads.actor_lstm, bptt_truncation);
  stack_backward(w.critic_lstm, fwd.critic_tape, d_top_critic, grads.critic_lstm,
                 bptt_truncation);
}

PolicyWeights transfer_layers(const PolicyWeights& source, const PolicyWeights& target,
                              const std::set<int>& layer_indices) {
  PolicyWeights out = target;
  for (int idx : layer_indices) {
    if (idx < 1 || idx > target.cfg.layers || idx > source.cfg.layers)
      throw std::invalid_argument("transfer_layers: layer index " + std::to_string(idx) +
                                  " out of range");
    const int l = idx - 1;
    auto copy_layer = [&](const LstmLayerW& src, LstmLayerW& dst) {
      if (src.w_in.rows() != dst.w_in.rows() || src.w_in.cols() != dst.w_in.cols() ||
          src.w_rec.rows() != dst.w_rec.rows() || src.w_rec.cols() != dst.w_rec.cols())
        throw std::invalid_argument("transfer_layers: shape mismatch at layer " +
                                    std::to_string(idx));
      dst = src;
    };
    copy_layer(source.actor_lstm[l], out.actor_lstm[l]);
    copy_layer(source.critic_lstm[l], out.critic_lstm[l]);
  }
  return out;
}

Eigen::MatrixXd orthogonal_matrix(int rows, int cols, double gain, std::uint64_t seed) {
  const int big = std::max(rows, cols);
  const int small = std::min(rows, cols);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(big, small);
  for (int i = 0; i < big; ++i)
    for (int j = 0; j < small; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
  Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
  for (int j = 0; j < small; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  if (rows < cols) return gain * q.transpose();
  return gain * q;
}

}  // namespace ftsurf
