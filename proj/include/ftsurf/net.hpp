#ifndef FTSURF_NET_HPP
#define FTSURF_NET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

// Minimal deterministic recurrent actor-critic engine: stacked LSTM forward
// pass, exact reverse-mode gradients through time, and named-layer access for
// cross-platform weight transfer. Actor and critic are two separate stacks of
// identical shape; float64 throughout.

namespace ftsurf {

struct NetConfig {
  int obs_dim = 8;
  int hidden = 64;
  int layers = 3;
  int act_dim = 0;
  double logstd_init = -0.6931471805599453;  // ln(0.5)

  bool operator==(const NetConfig&) const = default;
};

// One LSTM layer; rows of w_in/w_rec/b are the four gate blocks stacked in
// the order input, forget, cell candidate, output.
struct LstmLayerW {
  Eigen::MatrixXd w_in;   // 4H x input
  Eigen::MatrixXd w_rec;  // 4H x H
  Eigen::VectorXd b;      // 4H
};

struct DenseW {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

struct ParamRef {
  std::string name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  Eigen::Index size() const { return rows * cols; }
};

struct PolicyWeights {
  NetConfig cfg;
  std::vector<LstmLayerW> actor_lstm;
  std::vector<LstmLayerW> critic_lstm;
  DenseW actor_mean;             // act_dim x H
  Eigen::VectorXd actor_logstd;  // act_dim, state independent
  DenseW critic_value;           // 1 x H

  static PolicyWeights zeros(const NetConfig& cfg);
  // Orthogonal gate blocks, zero biases except forget-gate bias +1, small
  // orthogonal actor head, logstd at its configured initial value.
  static PolicyWeights initialized(const NetConfig& cfg, std::uint64_t seed);

  void set_zero();
  // Stable-order named views over every parameter tensor (used by the
  // optimizer, serialization, and transfer).
  std::vector<ParamRef> param_refs();
  std::vector<ParamRef> param_refs() const;  // const data exposed via copy of refs
  double squared_norm() const;
};

// Elementwise x += scale * g over all parameters; shapes must match.
void axpy(PolicyWeights& x, const PolicyWeights& g, double scale);

struct LstmState {
  std::vector<Eigen::VectorXd> h, c;
  static LstmState zero(const NetConfig& cfg);
};

// Hidden/cell state for both stacks; zero-initialized at episode start.
struct RecurrentState {
  LstmState actor, critic;
  static RecurrentState zero(const NetConfig& cfg);
};

// Advances one stack by one step; returns the top-layer output.
Eigen::VectorXd lstm_forward(const std::vector<LstmLayerW>& stack, const Eigen::VectorXd& input,
                             LstmState& state);

struct PolicyOutput {
  Eigen::VectorXd mean;
  Eigen::VectorXd logstd;
  double value = 0.0;
};

PolicyOutput policy_forward(const PolicyWeights& w, const Eigen::VectorXd& obs,
                            RecurrentState& state);

// --- training-time forward with a recorded tape ------------------------------

struct LstmStepTape {
  Eigen::VectorXd x, h_prev, c_prev;
  Eigen::VectorXd gi, gf, gg, go;  // post-activation gates
  Eigen::VectorXd c, tanh_c;
};

struct SequenceTape {
  // steps[t][layer]
  std::vector<std::vector<LstmStepTape>> steps;
  std::vector<Eigen::VectorXd> top_h;  // top-layer output per step
};

struct SequenceForward {
  std::vector<Eigen::VectorXd> mean;  // per step
  std::vector<double> value;
  SequenceTape actor_tape, critic_tape;
};

// Runs both stacks over a whole episode from zero state, recording the tape
// needed for exact backpropagation through time.
SequenceForward forward_sequence(const PolicyWeights& w,
                                 const std::vector<Eigen::VectorXd>& obs);

// Accumulates d(loss)/d(params) into grads, given per-step gradients w.r.t.
// the actor mean and critic value outputs. bptt_truncation > 0 cuts the
// recurrent gradient flow every that many steps (0 = full episode).
void backward_sequence(const PolicyWeights& w, const SequenceForward& fwd,
                       const std::vector<Eigen::VectorXd>& d_mean,
                       const std::vector<double>& d_value, PolicyWeights& grads,
                       int bptt_truncation = 0);

// Copies the selected LSTM layers (1-based; actor and critic both) from
// source into a copy of target; everything else is untouched. Transferred
// layers stay trainable. Throws std::invalid_argument on shape mismatch.
PolicyWeights transfer_layers(const PolicyWeights& source, const PolicyWeights& target,
                              const std::set<int>& layer_indices);

// Deterministic orthogonal matrix (sign-fixed QR of a Gaussian draw).
Eigen::MatrixXd orthogonal_matrix(int rows, int cols, double gain, std::uint64_t seed);

}  // namespace ftsurf

#endif
