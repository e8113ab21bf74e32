#include <cstdio>

#include "CLI11.hpp"
#include "ftsurf/harness.hpp"

// surfctl: train, evaluate, compare, replay, and transfer fault-tolerant
// surfacing policies. Exit codes: 0 success, 1 usage or configuration error,
// 2 runtime failure, 3 training diverged.

namespace {

using namespace ftsurf;

std::set<int> parse_layer_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.insert(std::stoi(tok));
  if (out.empty()) throw std::invalid_argument("empty transfer layer list");
  return out;
}

int cmd_train(const std::string& config, const std::string& out_dir, long long seed,
              long long max_episodes, int threads, const std::string& transfer_from,
              const std::string& transfer_layers, bool quiet) {
  TrainRunArgs args;
  args.config_path = config;
  args.output_dir = out_dir;
  if (seed >= 0) args.seed = static_cast<std::uint64_t>(seed);
  if (max_episodes > 0) args.max_episodes = static_cast<int>(max_episodes);
  if (threads > 0) args.threads = threads;
  args.transfer_from = transfer_from;
  if (!transfer_layers.empty()) args.transfer_layer_set = parse_layer_list(transfer_layers);
  args.quiet = quiet;

  TrainRunResult r = run_training(args);
  if (!quiet) {
    std::printf("episodes run:          %d\n", r.episodes_run);
    std::printf("episodes to criterion: %s\n",
                r.episodes_to_criterion >= 0 ? std::to_string(r.episodes_to_criterion).c_str()
                                             : "not met");
    std::printf("wall time:             %.1f s\n", r.wall_seconds);
    std::printf("checkpoint:            %s\n", r.checkpoint_path.c_str());
    std::printf("log:                   %s\n", r.log_path.c_str());
  }
  if (r.diverged) {
    std::fprintf(stderr, "training diverged; emergency checkpoint saved in %s\n",
                 out_dir.c_str());
    return 3;
  }
  return 0;
}

EvalSpec make_eval_spec(const PlatformSpec& spec, const std::string& mask, int episodes,
                        int trials, long long seed) {
  EvalSpec es;
  es.trials_per_mask = trials;
  es.seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : 0;
  if (!mask.empty()) {
    es.mode = EvalSpec::Mode::pinned;
    es.pinned_mask = FaultMask::parse(spec.platform, mask);
  } else if (episodes > 0) {
    es.mode = EvalSpec::Mode::sampled;
    es.episodes = episodes;
  } else {
    es.mode = EvalSpec::Mode::enumerate_all;
  }
  return es;
}

int cmd_eval(const std::string& config, const std::string& checkpoint, const std::string& mask,
             int episodes, int trials, long long seed, const std::string& csv) {
  ExperimentConfig ec = load_experiment(config);
  PolicyWeights w = load_weights_checked(checkpoint, ec.spec);
  EvalSpec es = make_eval_spec(ec.spec, mask, episodes, trials, seed);
  EvalReport report = evaluate_policy(ec.spec, w, es);
  std::fputs(format_eval_table("learned policy", report).c_str(), stdout);
  if (!csv.empty()) write_eval_csv(report, csv);
  return 0;
}

int cmd_compare(const std::string& config, const std::string& checkpoint, int trials,
                long long seed, const std::string& csv_prefix) {
  ExperimentConfig ec = load_experiment(config);
  PolicyWeights w = load_weights_checked(checkpoint, ec.spec);
  EvalSpec es = make_eval_spec(ec.spec, "", 0, trials, seed);
  EvalReport learned = evaluate_policy(ec.spec, w, es);
  EvalReport scripted = evaluate_baseline(ec.spec, ec.pid, es);
  std::fputs(format_comparison(learned, scripted).c_str(), stdout);
  if (!csv_prefix.empty()) {
    write_eval_csv(learned, csv_prefix + "_learned.csv");
    write_eval_csv(scripted, csv_prefix + "_scripted.csv");
  }
  return 0;
}

int cmd_replay(const std::string& config, const std::string& checkpoint, const std::string& mask,
               long long seed, const std::string& out_csv) {
  ExperimentConfig ec = load_experiment(config);
  PolicyWeights w = load_weights_checked(checkpoint, ec.spec);
  std::optional<FaultMask> pinned;
  if (!mask.empty()) pinned = FaultMask::parse(ec.spec.platform, mask);
  EpisodeInfo info = replay_episode(ec.spec, w, pinned,
                                    seed >= 0 ? static_cast<std::uint64_t>(seed) : 0, out_csv);
  std::printf("fault=%s success=%s elapsed=%.2fs drift=%.2fm trace=%s\n",
              info.fault_name.c_str(), info.success ? "yes" : "no", info.elapsed,
              (info.final_xy - info.start_xy).norm(), out_csv.c_str());
  return 0;
}

int cmd_transfer(const std::string& source, const std::string& target_config,
                 const std::string& layers, long long seed, const std::string& out_path) {
  ExperimentConfig ec = load_experiment(target_config);
  if (seed >= 0) ec.train.seed = static_cast<std::uint64_t>(seed);
  PolicyWeights src = load_weights(source);
  if (src.cfg.hidden != ec.train.net.hidden)
    throw std::invalid_argument("source hidden size " + std::to_string(src.cfg.hidden) +
                                " does not match target " + std::to_string(ec.train.net.hidden));
  PolicyWeights target = PolicyWeights::initialized(ec.train.net, ec.train.seed);
  PolicyWeights merged = transfer_layers(src, target, parse_layer_list(layers));
  std::map<std::string, std::string> meta{
      {"platform", platform_name(ec.spec.platform)},
      {"config_hash", ec.config_hash},
      {"seed", std::to_string(ec.train.seed)},
      {"transferred_layers", layers},
      {"transfer_source", source}};
  save_weights(merged, out_path, meta);
  std::printf("wrote %s (layers %s from %s)\n", out_path.c_str(), layers.c_str(),
              source.c_str());
  return 0;
}

int cmd_enumerate(const std::string& platform_name_str) {
  const Platform p = parse_platform(platform_name_str);
  const std::vector<FaultMask> masks = enumerate_fault_set(p);
  for (const FaultMask& m : masks) std::printf("%s\n", m.name().c_str());
  std::printf("total: %zu\n", masks.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fault-tolerant surfacing: training and evaluation"};
  app.require_subcommand(1);

  std::string config, out_dir = "out", checkpoint, mask, csv, transfer_from, transfer_layers;
  std::string source, out_path = "transferred.ckpt", platform_str;
  long long seed = -1, max_episodes = -1;
  int threads = -1, episodes = 0, trials = 2;
  bool quiet = false;

  CLI::App* train = app.add_subcommand("train", "train a surfacing policy");
  train->add_option("--config", config, "experiment config file")->required();
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--seed", seed, "override the config seed");
  train->add_option("--max-episodes", max_episodes, "override the episode budget");
  train->add_option("--threads", threads, "worker threads for rollouts/updates");
  train->add_option("--transfer-from", transfer_from, "source checkpoint for layer transfer");
  train->add_option("--transfer-layers", transfer_layers, "comma list, e.g. 1 or 1,2");
  train->add_flag("--quiet", quiet, "suppress the run summary");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint across faults");
  eval->add_option("--config", config, "experiment config file")->required();
  eval->add_option("--checkpoint", checkpoint, "policy checkpoint")->required();
  eval->add_option("--mask", mask, "pin one fault combination, e.g. FL+RR");
  eval->add_option("--episodes", episodes, "sampled-fault episodes instead of enumeration");
  eval->add_option("--trials", trials, "trials per enumerated mask");
  eval->add_option("--seed", seed, "evaluation seed");
  eval->add_option("--csv", csv, "write the per-fault table to this file");

  CLI::App* compare = app.add_subcommand("compare", "learned policy vs scripted PID baseline");
  compare->add_option("--config", config, "experiment config file")->required();
  compare->add_option("--checkpoint", checkpoint, "policy checkpoint")->required();
  compare->add_option("--trials", trials, "trials per enumerated mask");
  compare->add_option("--seed", seed, "evaluation seed");
  compare->add_option("--csv-prefix", csv, "write *_learned.csv / *_scripted.csv");

  CLI::App* replay = app.add_subcommand("replay", "trace one episode to CSV");
  replay->add_option("--config", config, "experiment config file")->required();
  replay->add_option("--checkpoint", checkpoint, "policy checkpoint")->required();
  replay->add_option("--mask", mask, "pin a fault combination");
  replay->add_option("--seed", seed, "episode seed");
  replay->add_option("--out", out_path, "trace CSV path")->required();

  CLI::App* transfer = app.add_subcommand("transfer", "copy LSTM layers between checkpoints");
  transfer->add_option("--source", source, "source checkpoint")->required();
  transfer->add_option("--config", config, "target experiment config")->required();
  transfer->add_option("--layers", transfer_layers, "comma list, e.g. 1 or 1,2")->required();
  transfer->add_option("--seed", seed, "target initialization seed");
  transfer->add_option("--out", out_path, "output checkpoint path")->required();

  CLI::App* enumerate = app.add_subcommand("enumerate-faults", "list valid fault combinations");
  enumerate->add_option("--platform", platform_str, "hovering | torpedo | ucat")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed())
      return cmd_train(config, out_dir, seed, max_episodes, threads, transfer_from,
                       transfer_layers, quiet);
    if (eval->parsed()) return cmd_eval(config, checkpoint, mask, episodes, trials, seed, csv);
    if (compare->parsed()) return cmd_compare(config, checkpoint, trials, seed, csv);
    if (replay->parsed()) return cmd_replay(config, checkpoint, mask, seed, out_path);
    if (transfer->parsed()) return cmd_transfer(source, config, transfer_layers, seed, out_path);
    if (enumerate->parsed()) return cmd_enumerate(platform_str);
  } catch (const ftsurf::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ftsurf::DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
