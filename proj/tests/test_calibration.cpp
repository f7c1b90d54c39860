#include "qcvz/calibration.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qcvz/errors.hpp"

using namespace qcvz;

namespace {

constexpr double kLo = 8e9;
constexpr double kIf = 3.46798e9;

MixerConfig mixer(Nonlinearity nl, double ratio_db = INFINITY) {
  return {{kLo, kNominalLoFlux, 0.0}, 10e6, ratio_db, nl, 60.0};
}

QubitParams resonant_qubit() { return QubitParams::closed(kLo - kIf); }

double final_p1(const QubitParams& q, const PulseTrain& train) {
  const double dt = std::min(suggested_dt(train.peak_hz(), 0.0), 1e-10);
  return evolve(q, train.drive(), DensityMatrix::ground(), dt).final_p1();
}

}  // namespace

TEST(Calibrate, LinearHalfPiAtFiftyNanoseconds) {
  const auto cfg = mixer(Nonlinearity::linear);
  const auto p = calibrate_pulse(resonant_qubit(), cfg, M_PI / 2, FixedDuration{50e-9});
  EXPECT_NEAR(p.a_if, 0.5, 1e-6);
  EXPECT_DOUBLE_EQ(p.tau_if, 50e-9);
  EXPECT_DOUBLE_EQ(p.drive_freq_hz(), kLo - kIf);
}

TEST(Calibrate, SinePiAtHundredNanoseconds) {
  // 2 pi * 10 MHz * sin(pi A / 2) * 100 ns = pi  =>  A = 1/3.
  const auto p = calibrate_pulse(resonant_qubit(), mixer(Nonlinearity::sine_saturating), M_PI, FixedDuration{100e-9});
  EXPECT_NEAR(p.a_if, 1.0 / 3.0, 1e-6);
}

TEST(Calibrate, FixedAmplitudeSolvesDuration) {
  const auto p = calibrate_pulse(resonant_qubit(), mixer(Nonlinearity::linear), M_PI, FixedAmplitude{0.5});
  EXPECT_NEAR(p.tau_if, 100e-9, 1e-13);
  EXPECT_DOUBLE_EQ(p.a_if, 0.5);
}

TEST(Calibrate, ZeroTargetIsSilent) {
  const auto p = calibrate_pulse(resonant_qubit(), mixer(Nonlinearity::linear), 0.0, FixedDuration{50e-9});
  EXPECT_DOUBLE_EQ(p.a_if, 0.0);
  EXPECT_THROW(calibrate_pulse(resonant_qubit(), mixer(Nonlinearity::linear), 0.0, FixedAmplitude{0.5}),
               std::invalid_argument);
}

TEST(Calibrate, RejectsOutOfRangeAndUnreachable) {
  const auto cfg = mixer(Nonlinearity::linear);
  EXPECT_THROW(calibrate_pulse(resonant_qubit(), cfg, 4.0, FixedDuration{50e-9}), std::invalid_argument);
  EXPECT_THROW(calibrate_pulse(resonant_qubit(), cfg, -0.1, FixedDuration{50e-9}), std::invalid_argument);
  // Full scale reaches only pi/2 in 25 ns.
  EXPECT_THROW(calibrate_pulse(resonant_qubit(), cfg, M_PI, FixedDuration{25e-9}), NumericalError);
}

TEST(Calibrate, FourHalfPiPulsesReturnToGround) {
  const auto q = resonant_qubit();
  const auto cfg = mixer(Nonlinearity::sine_saturating);
  const auto p = calibrate_pulse(q, cfg, M_PI / 2, FixedDuration{40e-9});
  PulseTrain train(cfg, kIf);
  for (int i = 0; i < 4; ++i) train.pulse(p);
  EXPECT_LT(final_p1(q, train), 1e-6);
  PulseTrain two(cfg, kIf);
  two.pulse(p).pulse(p);
  EXPECT_NEAR(final_p1(q, two), 1.0, 1e-6);
}

TEST(Calibrate, StageErrorsDecrease) {
  CalibrationTrace trace;
  const auto q = resonant_qubit();
  const auto cfg = mixer(Nonlinearity::sine_saturating);
  const auto p = calibrate_pulse(q, cfg, M_PI / 2, FixedDuration{60e-9}, {}, &trace);
  double prev = trace.coarse_error;
  for (double e : trace.stage_errors) {
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_EQ(trace.sequence_lengths.size(), trace.stage_errors.size());
  EXPECT_NEAR(measure_rotation_angle(q, cfg, p), M_PI / 2, 1e-6);
}

TEST(Calibrate, IndependentOfThetaIf) {
  const auto q = resonant_qubit();
  const auto cfg = mixer(Nonlinearity::sine_saturating);
  CalibrationOptions rotated;
  rotated.theta_if_deg = 135.0;
  const auto a = calibrate_pulse(q, cfg, M_PI / 2, FixedDuration{50e-9});
  const auto b = calibrate_pulse(q, cfg, M_PI / 2, FixedDuration{50e-9}, rotated);
  EXPECT_NEAR(a.a_if, b.a_if, 1e-9);
}

TEST(Calibrate, UsesCoherentDynamicsForLossyQubit) {
  const auto lossy = QubitParams::from_t1_t2(kLo - kIf, 25.3e-6, 17e-6);
  const auto p = calibrate_pulse(lossy, mixer(Nonlinearity::sine_saturating), M_PI, FixedDuration{100e-9});
  EXPECT_NEAR(p.a_if, 1.0 / 3.0, 1e-6);
}

TEST(PulseTrain, RejectsMismatchedPulse) {
  PulseTrain train(mixer(Nonlinearity::linear), kIf);
  CalibratedPulse p{kLo, kIf + 1e6, 0.5, 50e-9, M_PI / 2, EnvelopeShape::flat};
  EXPECT_THROW(train.pulse(p), std::invalid_argument);
  train.delay(1e-6);
  EXPECT_DOUBLE_EQ(train.drive().t_end(), 1e-6);
}

TEST(ResidualRatio, MatchesOffResidual) {
  const auto q = resonant_qubit();
  auto cfg = mixer(Nonlinearity::sine_saturating, -20.0 * std::log10(0.05));
  const auto curve = residual_ratio(q, cfg, {0.2, 0.5, 0.8});
  ASSERT_EQ(curve.points.size(), 3u);
  for (const auto& pt : curve.points) EXPECT_NEAR(pt.ratio, 0.05, 0.005);
}

TEST(ResidualRatio, DefaultMixerRatio) {
  const auto curve = residual_ratio(resonant_qubit(), mixer(Nonlinearity::sine_saturating, 28.5), {0.5});
  ASSERT_EQ(curve.points.size(), 1u);
  EXPECT_NEAR(curve.points[0].ratio, std::pow(10.0, -28.5 / 20.0), 1e-3);
}

TEST(ResidualRatio, IdealSwitchAndDroppedPoints) {
  const auto curve = residual_ratio(resonant_qubit(), mixer(Nonlinearity::sine_saturating), {0.0, 0.5});
  ASSERT_EQ(curve.points.size(), 1u);
  EXPECT_DOUBLE_EQ(curve.points[0].rabi_off_hz, 0.0);
  EXPECT_DOUBLE_EQ(curve.points[0].ratio, 0.0);
  ASSERT_EQ(curve.dropped_a_if.size(), 1u);
  EXPECT_DOUBLE_EQ(curve.dropped_a_if[0], 0.0);
}

TEST(ResidualRatio, LossyQubitStillRecoversRatio) {
  const auto lossy = QubitParams::from_t1_t2(kLo - kIf, 25.3e-6, 17e-6);
  const auto curve = residual_ratio(lossy, mixer(Nonlinearity::sine_saturating, 26.0206), {0.6});
  ASSERT_EQ(curve.points.size(), 1u);
  EXPECT_NEAR(curve.points[0].ratio, 0.05, 0.005);
}
