#include "ftsurf/faults.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ftsurf {

namespace {

constexpr int kHoveringThrusters = 8;
constexpr int kHeaveThrusters = 4;  // indices 0..3
constexpr int kTorpedoRudders = 4;  // + thruster at index 4
constexpr int kUcatFins = 4;

bool hovering_ok(const std::vector<bool>& faulty) {
  for (int i = 0; i < kHeaveThrusters; ++i)
    if (!faulty[i]) return true;
  return false;
}

bool torpedo_ok(const std::vector<bool>& faulty) {
  // Pitch rudders are mounted at 0 and 180 degrees: indices 0 and 2.
  return !faulty[0] || !faulty[2];
}

int max_faults(Platform p) {
  switch (p) {
    case Platform::hovering: return 7;
    case Platform::torpedo: return 3;
    case Platform::ucat: return 3;
  }
  return 0;
}

int faultable_count(Platform p) {
  switch (p) {
    case Platform::hovering: return kHoveringThrusters;
    case Platform::torpedo: return kTorpedoRudders;
    case Platform::ucat: return kUcatFins;
  }
  return 0;
}

}  // namespace

std::string platform_name(Platform p) {
  switch (p) {
    case Platform::hovering: return "hovering";
    case Platform::torpedo: return "torpedo";
    case Platform::ucat: return "ucat";
  }
  return "?";
}

Platform parse_platform(const std::string& name) {
  if (name == "hovering") return Platform::hovering;
  if (name == "torpedo") return Platform::torpedo;
  if (name == "ucat") return Platform::ucat;
  throw std::invalid_argument("unknown platform '" + name + "' (expected hovering, torpedo, or ucat)");
}

int actuator_count(Platform p) {
  switch (p) {
    case Platform::hovering: return 8;
    case Platform::torpedo: return 5;
    case Platform::ucat: return 4;
  }
  return 0;
}

std::string actuator_label(Platform p, int index) {
  switch (p) {
    case Platform::hovering: return "T" + std::to_string(index);
    case Platform::torpedo: return index < 4 ? "R" + std::to_string(index) : "P";
    case Platform::ucat: {
      static const char* names[] = {"FL", "FR", "RL", "RR"};
      return names[index];
    }
  }
  return "?";
}

int FaultMask::fault_count() const {
  return static_cast<int>(std::count(faulty.begin(), faulty.end(), true));
}

bool FaultMask::valid() const {
  if (static_cast<int>(faulty.size()) != actuator_count(platform)) return false;
  const int n = fault_count();
  switch (platform) {
    case Platform::hovering:
      return n <= 7 && hovering_ok(faulty);
    case Platform::torpedo:
      return n <= 3 && !faulty[4] && torpedo_ok(faulty);
    case Platform::ucat:
      return n <= 3;
  }
  return false;
}

std::string FaultMask::name() const {
  std::string out;
  for (int i = 0; i < static_cast<int>(faulty.size()); ++i) {
    if (!faulty[i]) continue;
    if (!out.empty()) out += "+";
    out += actuator_label(platform, i);
  }
  return out.empty() ? "none" : out;
}

FaultMask FaultMask::none(Platform p) {
  FaultMask m;
  m.platform = p;
  m.faulty.assign(actuator_count(p), false);
  m.frozen_angles.assign(actuator_count(p), 0.0);
  return m;
}

FaultMask FaultMask::parse(Platform p, const std::string& text) {
  FaultMask m = none(p);
  if (text.empty() || text == "none") return m;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find_first_of("+,", pos);
    if (end == std::string::npos) end = text.size();
    const std::string token = text.substr(pos, end - pos);
    bool found = false;
    for (int i = 0; i < actuator_count(p); ++i) {
      if (token == actuator_label(p, i)) {
        m.faulty[i] = true;
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("unknown actuator '" + token + "' for platform " + platform_name(p));
    pos = end + 1;
  }
  return m;
}

FaultMask sample_faults(Platform p, std::mt19937_64& rng, const FaultSamplingConfig& cfg) {
  const int n = faultable_count(p);
  const int lo = std::clamp(cfg.min_faults, 0, max_faults(p));
  std::uniform_int_distribution<int> count_dist(lo, max_faults(p));
  const int k = count_dist(rng);

  FaultMask m = FaultMask::none(p);
  if (k == 0) return m;

  std::vector<int> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  while (true) {
    // Uniform k-subset via partial Fisher-Yates.
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, n - 1);
      std::swap(indices[i], indices[pick(rng)]);
    }
    std::fill(m.faulty.begin(), m.faulty.end(), false);
    for (int i = 0; i < k; ++i) m.faulty[indices[i]] = true;
    if (m.valid()) return m;
  }
}

std::vector<FaultMask> enumerate_fault_set(Platform p) {
  // Ordered by fault count, then lexicographically by actuator index; masks
  // that violate the platform's controllability rule are skipped. For the
  // paddling platform this is exactly the 14 single/double/triple fin sets.
  std::vector<FaultMask> out;
  const int n = faultable_count(p);
  for (int size = 1; size <= max_faults(p); ++size) {
    std::vector<int> pick(size);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      FaultMask m = FaultMask::none(p);
      for (int i : pick) m.faulty[i] = true;
      if (m.valid()) out.push_back(m);
      int i = size - 1;
      while (i >= 0 && pick[i] == n - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

Eigen::VectorXd apply_faults(const Eigen::VectorXd& command, const FaultMask& mask) {
  Eigen::VectorXd out = command;
  switch (mask.platform) {
    case Platform::hovering:
      if (command.size() != 8) throw std::invalid_argument("hovering command must have 8 entries");
      for (int i = 0; i < 8; ++i)
        if (mask.faulty[i]) out[i] = 0.0;
      break;
    case Platform::torpedo:
      if (command.size() != 5) throw std::invalid_argument("torpedo command must have 5 entries");
      for (int i = 0; i < 4; ++i)
        if (mask.faulty[i]) out[i] = mask.frozen_angles[i];
      break;
    case Platform::ucat:
      // Command layout: per fin (amplitude, zero direction, rate, phase offset).
      if (command.size() != 16) throw std::invalid_argument("ucat command must have 16 entries");
      for (int i = 0; i < 4; ++i) {
        if (!mask.faulty[i]) continue;
        out[4 * i + 0] = 0.0;
        out[4 * i + 1] = mask.frozen_angles[i];
        out[4 * i + 2] = 0.0;
        out[4 * i + 3] = 0.0;
      }
      break;
  }
  return out;
}

}  // namespace ftsurf
