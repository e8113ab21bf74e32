#ifndef FTSURF_PLATFORM_HPP
#define FTSURF_PLATFORM_HPP

#include "ftsurf/baseline.hpp"
#include "ftsurf/config.hpp"
#include "ftsurf/env.hpp"
#include "ftsurf/ppo.hpp"

// Built-in vehicle models and the experiment-file loader that overrides
// them. Inertia/damping numbers are literature-flavored values for a small
// inspection ROV, a light survey torpedo, and a flippered biomimetic robot;
// they are starting points, not identified models.

namespace ftsurf {

// Nominal physical model plus episode/sensor defaults for one platform.
PlatformSpec default_platform_spec(Platform p);

struct ExperimentConfig {
  PlatformSpec spec;
  TrainConfig train;
  PidGains pid;
  std::uint64_t seed = 0;
  std::string config_hash;  // 16 hex digits over the parsed key/value set
};

// Parses, applies overrides on top of the platform defaults, verifies every
// key was understood, and computes the content hash.
ExperimentConfig load_experiment(const std::string& path);
ExperimentConfig experiment_from_config(const ConfigFile& cfg);

}  // namespace ftsurf

#endif
