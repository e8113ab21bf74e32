#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "ftsurf/faults.hpp"

using namespace ftsurf;

TEST_CASE("platform names round trip") {
  for (Platform p : {Platform::hovering, Platform::torpedo, Platform::ucat})
    CHECK(parse_platform(platform_name(p)) == p);
  CHECK_THROWS_AS(parse_platform("glider"), std::invalid_argument);
}

TEST_CASE("mask validity rules") {
  SUBCASE("hovering requires a healthy heave thruster") {
    FaultMask m = FaultMask::none(Platform::hovering);
    CHECK(m.valid());
    for (int i = 0; i < 4; ++i) m.faulty[i] = true;
    CHECK_FALSE(m.valid());  // all four heave thrusters dead
    m.faulty[2] = false;
    CHECK(m.valid());
    // seven faults with one heave survivor is still legal
    m = FaultMask::parse(Platform::hovering, "T0+T1+T2+T4+T5+T6+T7");
    CHECK(m.fault_count() == 7);
    CHECK(m.valid());
  }

  SUBCASE("torpedo keeps a pitch rudder and its thruster") {
    CHECK(FaultMask::parse(Platform::torpedo, "R0+R1+R3").valid());
    CHECK_FALSE(FaultMask::parse(Platform::torpedo, "R0+R2").valid());
    FaultMask m = FaultMask::none(Platform::torpedo);
    m.faulty[4] = true;  // surge thruster
    CHECK_FALSE(m.valid());
    // four rudder faults exceed the cap even without R0+R2 together
    CHECK_FALSE(FaultMask::parse(Platform::torpedo, "R0+R1+R2+R3").valid());
  }

  SUBCASE("ucat allows any one to three fins") {
    CHECK(FaultMask::parse(Platform::ucat, "FL").valid());
    CHECK(FaultMask::parse(Platform::ucat, "FL+FR+RL").valid());
    FaultMask m = FaultMask::none(Platform::ucat);
    for (int i = 0; i < 4; ++i) m.faulty[i] = true;
    CHECK_FALSE(m.valid());
  }
}

TEST_CASE("mask names parse back to the same mask") {
  for (Platform p : {Platform::hovering, Platform::torpedo, Platform::ucat}) {
    for (const FaultMask& m : enumerate_fault_set(p)) {
      const FaultMask back = FaultMask::parse(p, m.name());
      CHECK(back.faulty == m.faulty);
    }
  }
  CHECK(FaultMask::none(Platform::ucat).name() == "none");
  CHECK(FaultMask::parse(Platform::ucat, "none").fault_count() == 0);
  CHECK(FaultMask::parse(Platform::ucat, "FL,RR").name() == "FL+RR");
  CHECK_THROWS_AS(FaultMask::parse(Platform::ucat, "XX"), std::invalid_argument);
}

TEST_CASE("fault enumeration covers exactly the valid masks") {
  const auto hov = enumerate_fault_set(Platform::hovering);
  const auto tor = enumerate_fault_set(Platform::torpedo);
  const auto cat = enumerate_fault_set(Platform::ucat);
  CHECK(hov.size() == 239);
  CHECK(tor.size() == 11);
  CHECK(cat.size() == 14);

  // every entry valid, all distinct, ordered by fault count
  for (const auto* set : {&hov, &tor, &cat}) {
    std::set<std::string> seen;
    int prev_count = 0;
    for (const FaultMask& m : *set) {
      CHECK(m.valid());
      CHECK(m.fault_count() >= prev_count);
      prev_count = m.fault_count();
      CHECK(seen.insert(m.name()).second);
    }
  }

  // the ucat set is the canonical 14 in size-then-lexicographic order
  const char* expected[] = {"FL", "FR", "RL", "RR", "FL+FR", "FL+RL", "FL+RR",
                            "FR+RL", "FR+RR", "RL+RR", "FL+FR+RL", "FL+FR+RR",
                            "FL+RL+RR", "FR+RL+RR"};
  REQUIRE(cat.size() == 14);
  for (int i = 0; i < 14; ++i) CHECK(cat[i].name() == expected[i]);
}

TEST_CASE("sampled masks are always valid and non-empty") {
  std::mt19937_64 rng(42);
  for (Platform p : {Platform::hovering, Platform::torpedo, Platform::ucat}) {
    for (int i = 0; i < 2000; ++i) {
      const FaultMask m = sample_faults(p, rng);
      REQUIRE(m.valid());
      REQUIRE(m.fault_count() >= 1);
    }
  }
}

namespace {

// Two-stage sampler distribution: the fault count k is uniform over its range
// and, given k, the mask is uniform over the *valid* masks with k faults
// (invalid subsets are redrawn at fixed k). Expected mask probability is
// therefore (1/#counts) / (#valid masks with that count).
double chi_square_against_two_stage(Platform p, int draws, uint64_t seed) {
  const auto all = enumerate_fault_set(p);
  std::map<std::string, int> index;
  std::map<int, int> valid_per_count;
  for (size_t i = 0; i < all.size(); ++i) {
    index[all[i].name()] = static_cast<int>(i);
    valid_per_count[all[i].fault_count()]++;
  }
  const int count_options = static_cast<int>(valid_per_count.size());

  std::vector<int> observed(all.size(), 0);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < draws; ++i) {
    const FaultMask m = sample_faults(p, rng);
    const auto it = index.find(m.name());
    REQUIRE(it != index.end());
    observed[it->second]++;
  }

  double chi2 = 0.0;
  for (size_t i = 0; i < all.size(); ++i) {
    const double expected =
        draws / static_cast<double>(count_options) / valid_per_count[all[i].fault_count()];
    REQUIRE(expected > 20.0);  // keep the chi-square approximation honest
    const double d = observed[i] - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

}  // namespace

TEST_CASE("fault sampling matches the two-stage distribution") {
  // 0.999 chi-square quantiles for df = cells - 1; a correct sampler fails
  // with probability 1e-3 per seed, and the seeds are fixed.
  CHECK(chi_square_against_two_stage(Platform::hovering, 70000, 1001) < 311.2);  // df 238
  CHECK(chi_square_against_two_stage(Platform::torpedo, 33000, 1002) < 29.59);   // df 10
  CHECK(chi_square_against_two_stage(Platform::ucat, 42000, 1003) < 34.53);      // df 13
}

TEST_CASE("min_faults 0 admits the all-healthy mask at the uniform rate") {
  std::mt19937_64 rng(77);
  FaultSamplingConfig cfg;
  cfg.min_faults = 0;
  int none_count = 0;
  const int draws = 8000;
  for (int i = 0; i < draws; ++i)
    if (sample_faults(Platform::hovering, rng, cfg).fault_count() == 0) ++none_count;
  // k uniform over 0..7 -> P(none) = 1/8; allow 4 sigma
  const double expect = draws / 8.0, sigma = std::sqrt(draws * (1.0 / 8.0) * (7.0 / 8.0));
  CHECK(std::abs(none_count - expect) < 4.0 * sigma);
}

TEST_CASE("apply_faults implements each platform's semantics") {
  SUBCASE("hovering zeroes faulty thruster forces") {
    FaultMask m = FaultMask::parse(Platform::hovering, "T1+T6");
    Eigen::VectorXd cmd = Eigen::VectorXd::Constant(8, 7.5);
    const Eigen::VectorXd out = apply_faults(cmd, m);
    CHECK(out(1) == 0.0);
    CHECK(out(6) == 0.0);
    CHECK(out(0) == 7.5);
    CHECK(out(7) == 7.5);
    CHECK_THROWS_AS(apply_faults(Eigen::VectorXd::Zero(5), m), std::invalid_argument);
  }

  SUBCASE("torpedo pins faulty rudders at their frozen angle") {
    FaultMask m = FaultMask::parse(Platform::torpedo, "R3");
    m.frozen_angles[3] = 0.25;
    Eigen::VectorXd cmd(5);
    cmd << 0.1, 0.2, 0.3, 0.4, 0.9;
    const Eigen::VectorXd out = apply_faults(cmd, m);
    CHECK(out(3) == 0.25);
    CHECK(out(0) == 0.1);
    CHECK(out(4) == 0.9);  // thruster untouched
  }

  SUBCASE("ucat pins the oscillation at the frozen blade angle") {
    FaultMask m = FaultMask::parse(Platform::ucat, "RL");
    m.frozen_angles[2] = -0.4;
    Eigen::VectorXd cmd = Eigen::VectorXd::Constant(16, 0.5);
    const Eigen::VectorXd out = apply_faults(cmd, m);
    CHECK(out(8) == 0.0);    // amplitude
    CHECK(out(9) == -0.4);   // zero direction = frozen angle
    CHECK(out(10) == 0.0);   // rate
    CHECK(out(11) == 0.0);   // phase
    for (int i = 0; i < 8; ++i) CHECK(out(i) == 0.5);
  }
}
