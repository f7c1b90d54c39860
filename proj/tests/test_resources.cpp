#include "qcvz/resources.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qcvz;

TEST(Power, PerQubitIsMeanOfStandbyAndPeak) {
  const auto p = power_estimate(1);
  EXPECT_NEAR(p.avg_pw_per_qubit, 110.96, 1e-9);
  EXPECT_NEAR(power_estimate(1000000).total_w, 110.96e-6, 1e-15);
  EXPECT_DOUBLE_EQ(power_estimate(10, 0.0, 0.0).total_w, 0.0);
  EXPECT_THROW(power_estimate(0), std::invalid_argument);
  EXPECT_THROW(power_estimate(1, 3.0, 2.0), std::invalid_argument);
  EXPECT_THROW(power_estimate(1, -1.0, 2.0), std::invalid_argument);
}

TEST(Power, LinearAndMonotoneInN) {
  double prev = 0.0;
  for (std::size_t n : {1ul, 2ul, 10ul, 1000ul, 123456ul, 10000000ul}) {
    const auto p = power_estimate(n);
    EXPECT_NEAR(p.total_w, n * 110.96e-12, 1e-12 * n * 110.96e-12);
    EXPECT_GT(p.total_w, prev);
    prev = p.total_w;
  }
}

TEST(MaxTones, Examples) {
  EXPECT_EQ(max_tones(1e4, 2e9, 5e9), 4000u);
  EXPECT_EQ(max_tones(1e4, 1e9, 5e9), 2000u);
  EXPECT_EQ(max_tones(1e4, 5e9 / 1e4, 5e9), 1u);
  EXPECT_EQ(max_tones(1e4, 0.99 * 5e9 / 1e4, 5e9), 0u);
}

TEST(CableCount, Examples) {
  EXPECT_EQ(cable_count(1, 4000), 1u);
  EXPECT_EQ(cable_count(4000, 4000), 1u);
  EXPECT_EQ(cable_count(4001, 4000), 2u);
  EXPECT_EQ(cable_count(1000000, 4000), 250u);
  EXPECT_THROW(cable_count(10, 0), std::invalid_argument);
}

TEST(ResourceReport, InvariantsOverScale) {
  std::size_t prev_cables = 0;
  for (std::size_t n = 1; n <= 10000000; n = n * 3 + 1) {
    const auto r = resource_report(n);
    EXPECT_EQ(r.n_qubits, n);
    EXPECT_EQ(r.if_cable_count, 1u);
    EXPECT_GE(r.cable_count * r.max_tones_per_cable, n);
    EXPECT_LT((r.cable_count - 1) * r.max_tones_per_cable, n);
    EXPECT_GE(r.cable_count, prev_cables);
    EXPECT_DOUBLE_EQ(r.parallelism_worst, n / 8.0);
    EXPECT_DOUBLE_EQ(r.parallelism_best, static_cast<double>(n));
    EXPECT_LE(r.avg_pw_per_qubit, r.peak_pw_per_qubit);
    EXPECT_GE(r.avg_pw_per_qubit, r.standby_pw_per_qubit);
    EXPECT_NEAR(r.total_avg_w, n * r.avg_pw_per_qubit * 1e-12, 1e-12 * r.total_avg_w);
    prev_cables = r.cable_count;
  }
}

TEST(ResourceReport, MillionQubits) {
  const auto r = resource_report(1000000);
  EXPECT_NEAR(r.total_avg_w * 1e6, 110.96, 1e-9);
  EXPECT_EQ(r.max_tones_per_cable, 4000u);
  EXPECT_EQ(r.cable_count, 250u);
  EXPECT_DOUBLE_EQ(r.max_output_pw, 4.11);
}

TEST(TonePlan, SpacingAndEnd) {
  const auto f = tone_plan(4, 200.0, 5e9);
  ASSERT_EQ(f.size(), 4u);
  EXPECT_DOUBLE_EQ(f.back(), 5e9);
  for (std::size_t i = 1; i < f.size(); ++i) EXPECT_NEAR(f[i] - f[i - 1], 5e9 / 200.0, 1e-3);
}
