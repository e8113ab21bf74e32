#ifndef FTSURF_FAULTS_HPP
#define FTSURF_FAULTS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

// Per-episode actuator fault assignment. Faults are sampled once at episode
// start and stay fixed; the policy never observes them.
//
// Platform rules:
//   hovering: 8 thrusters, 1..7 faults, at least one heave thruster healthy
//   torpedo:  4 rudders + 1 surge thruster, 1..3 rudder faults, at least one
//             pitch rudder healthy, the thruster never fails
//   ucat:     4 fins, 1..3 faults, a faulty fin freezes at its current angle

namespace ftsurf {

enum class Platform { hovering, torpedo, ucat };

std::string platform_name(Platform p);
Platform parse_platform(const std::string& name);

// Actuator count covered by the fault mask (torpedo: 4 rudders + thruster).
int actuator_count(Platform p);

struct FaultMask {
  Platform platform = Platform::hovering;
  std::vector<bool> faulty;            // size = actuator_count(platform)
  std::vector<double> frozen_angles;   // rad, used by torpedo/ucat semantics

  int fault_count() const;
  bool valid() const;

  // Canonical short name, e.g. "FL+RR", "T0+T3", "R1", or "none".
  std::string name() const;

  static FaultMask none(Platform p);
  // Parses the canonical naming ("FL+RR", "T0,T3", "none"); throws
  // std::invalid_argument on unknown actuator names.
  static FaultMask parse(Platform p, const std::string& text);
};

// Canonical actuator label (hovering: T0..T7, torpedo: R0..R3 + P,
// ucat: FL, FR, RL, RR).
std::string actuator_label(Platform p, int index);

struct FaultSamplingConfig {
  int min_faults = 1;  // 0 admits the all-healthy episode
};

// Samples a valid mask: fault count uniform over its legal range, then a
// uniform subset, rejection-sampled against the platform constraint.
FaultMask sample_faults(Platform p, std::mt19937_64& rng,
                        const FaultSamplingConfig& cfg = {});

// Deterministic enumeration of every valid fault mask, ordered by fault
// count then lexicographically by actuator index (ucat: 14 masks over
// FL, FR, RL, RR; torpedo: 11; hovering: 239).
std::vector<FaultMask> enumerate_fault_set(Platform p);

// Applies fault semantics to a raw actuator command vector:
//   hovering: faulty thruster force -> 0 N
//   torpedo:  faulty rudder target angle -> frozen angle (0 rad)
//   ucat:     faulty fin profile -> frozen at mask.frozen_angles
//             (amplitude 0, zero-direction = frozen angle, rate 0, offset 0)
// Throws std::invalid_argument on a command dimension mismatch.
Eigen::VectorXd apply_faults(const Eigen::VectorXd& command, const FaultMask& mask);

}  // namespace ftsurf

#endif
