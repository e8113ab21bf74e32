#ifndef FTSURF_HARNESS_HPP
#define FTSURF_HARNESS_HPP

#include <optional>

#include "ftsurf/checkpoint.hpp"
#include "ftsurf/platform.hpp"

// Experiment orchestration shared by the CLI and the acceptance tests:
// training runs with logging and checkpoints, fault-sweep evaluation for
// learned and scripted controllers, side-by-side comparison, trajectory
// replay, and checkpoint-to-checkpoint layer transfer. All file output is
// printf("%.17g")-exact so identical runs produce identical bytes.

namespace ftsurf {

struct TrainRunArgs {
  std::string config_path;
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> max_episodes;
  std::optional<int> threads;
  std::string transfer_from;         // source checkpoint (optional)
  std::set<int> transfer_layer_set;  // 1-based LSTM layers to copy
  bool quiet = false;
};

struct TrainRunResult {
  int episodes_run = 0;
  int episodes_to_criterion = -1;
  bool diverged = false;
  double wall_seconds = 0.0;
  std::string checkpoint_path;
  std::string log_path;
  TrainLog log;
  PolicyWeights weights;
};

TrainRunResult run_training(const TrainRunArgs& args);

// --- evaluation ---------------------------------------------------------

struct EvalSpec {
  enum class Mode { enumerate_all, sampled, pinned };
  Mode mode = Mode::enumerate_all;
  int trials_per_mask = 2;  // enumerate_all / pinned
  int episodes = 100;       // sampled
  FaultMask pinned_mask;
  std::uint64_t seed = 0;
};

struct MaskEval {
  std::string mask_name;
  int trials = 0;
  int successes = 0;
  double time_sum = 0.0;   // over successful trials
  double drift_sum = 0.0;  // over all trials

  double success_rate() const { return trials ? double(successes) / trials : 0.0; }
  double mean_time() const { return successes ? time_sum / successes : 0.0; }
  double mean_drift() const { return trials ? drift_sum / trials : 0.0; }
};

struct EvalReport {
  std::vector<MaskEval> per_mask;
  int trials = 0;
  int successes = 0;
  double time_sum = 0.0;
  double drift_sum = 0.0;
  double roll_std = 0.0;   // rad, over every agent step of every trial
  double pitch_std = 0.0;

  double success_rate() const { return trials ? double(successes) / trials : 0.0; }
  double mean_time() const { return successes ? time_sum / successes : 0.0; }
  double mean_drift() const { return trials ? drift_sum / trials : 0.0; }
};

EvalReport evaluate_policy(const PlatformSpec& spec, const PolicyWeights& w,
                           const EvalSpec& eval);
EvalReport evaluate_baseline(const PlatformSpec& spec, const PidGains& gains,
                             const EvalSpec& eval);

void write_eval_csv(const EvalReport& report, const std::string& path);
std::string format_eval_table(const std::string& label, const EvalReport& report);
// Two-column comparison (same mask order in both reports).
std::string format_comparison(const EvalReport& learned, const EvalReport& scripted);

// --- replay -------------------------------------------------------------

// Runs one deterministic episode and writes a per-control-step state/command
// trace; returns the episode info.
EpisodeInfo replay_episode(const PlatformSpec& spec, const PolicyWeights& w,
                           const std::optional<FaultMask>& mask, std::uint64_t seed,
                           const std::string& csv_path);

// --- shared helpers -----------------------------------------------------

// Loads weights and enforces platform/shape agreement before use.
PolicyWeights load_weights_checked(const std::string& path, const PlatformSpec& spec,
                                   std::map<std::string, std::string>* meta_out = nullptr);

void write_training_csv(const TrainLog& log, const std::string& path);
std::string format_float(double v);  // shortest round-trip-exact decimal

}  // namespace ftsurf

#endif
