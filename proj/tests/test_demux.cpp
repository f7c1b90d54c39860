#include "qcvz/demux.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "qcvz/resources.hpp"

using namespace qcvz;

namespace {

const double kThreeChannels[] = {7.74225e9, 7.98575e9, 8.23350e9};

double lorentz_abs(double fr, double q, double f) {
  const double x = 2.0 * q * (f - fr) / fr;
  return 1.0 / std::sqrt(1.0 + x * x);
}

}  // namespace

TEST(ResonatorGain, OnResonanceIsUnity) {
  const Resonator r(7.74225e9, 1e4);
  const auto g = resonator_gain(r, r.freq_hz);
  EXPECT_DOUBLE_EQ(g.real(), 1.0);
  EXPECT_DOUBLE_EQ(g.imag(), 0.0);
}

TEST(ResonatorGain, HalfPowerPoint) {
  const Resonator r(5e9, 1e4);
  EXPECT_NEAR(std::abs(resonator_gain(r, r.freq_hz * (1.0 + 0.5 / r.q))), 1.0 / std::sqrt(2.0), 1e-9);
}

TEST(ResonatorGain, NeighbourResonator) {
  const Resonator r(kThreeChannels[0], 1e4);
  const double g = std::abs(resonator_gain(r, kThreeChannels[1]));
  EXPECT_NEAR(g, lorentz_abs(kThreeChannels[0], 1e4, kThreeChannels[1]), 1e-15);
  EXPECT_NEAR(g, kThreeChannels[0] / (2e4 * (kThreeChannels[1] - kThreeChannels[0])), 1e-6);
}

TEST(ResonatorGain, MonotoneAndBounded) {
  const Resonator r(6e9, 5e3);
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double df = k * 0.1e6;
    const double up = std::abs(resonator_gain(r, r.freq_hz + df));
    const double down = std::abs(resonator_gain(r, r.freq_hz - df));
    EXPECT_LT(up, prev);
    EXPECT_LE(up, 1.0);
    EXPECT_NEAR(up, down, 1e-12);
    prev = up;
  }
  EXPECT_THROW(Resonator(0.0, 1e4), std::invalid_argument);
  EXPECT_THROW(Resonator(5e9, -1.0), std::invalid_argument);
}

TEST(Demux, MatchedTonesHaveZeroDbDiagonal) {
  std::vector<Resonator> rs;
  std::vector<Tone> tones;
  for (double f : kThreeChannels) {
    rs.emplace_back(f, 1e4);
    tones.emplace_back(f, 0.5);
  }
  const auto res = demux(rs, MultiToneLo(tones));
  ASSERT_EQ(res.channels.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(res.crosstalk_db[k][k], 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(res.channels[k].dominant().freq_hz, kThreeChannels[k]);
    EXPECT_NEAR(res.channels[k].dominant().amp, 0.5, 1e-12);
    for (std::size_t j = 0; j < 3; ++j) {
      if (j != k) {
        EXPECT_LT(res.crosstalk_db[k][j], -50.0);
      }
    }
  }
}

TEST(Demux, DetunedSingleTone) {
  const Resonator r(5e9, 1e4);
  const std::vector<Resonator> rs{r};
  const auto res = demux(rs, MultiToneLo({Tone(5e9 + 5e9 / 1e4, 0.4)}));
  EXPECT_NEAR(res.channels[0].tones[0].amp, 0.4 / std::sqrt(5.0), 1e-12);
  // Phase of 1/(1+2i) carried into the channel.
  EXPECT_NEAR(res.channels[0].tones[0].phase, wrap_two_pi(-std::atan(2.0)), 1e-12);
}

TEST(Demux, LinearInToneAmplitudes) {
  std::vector<Resonator> rs{{7.9e9, 2e3}, {8.0e9, 2e3}};
  const auto a = demux(rs, MultiToneLo({Tone(7.9e9, 0.2), Tone(8.0e9, 0.3)}));
  const auto b = demux(rs, MultiToneLo({Tone(7.9e9, 0.4), Tone(8.0e9, 0.6)}));
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(b.channels[k].tones[j].amp, 2.0 * a.channels[k].tones[j].amp, 1e-15);
      EXPECT_LE(a.channels[k].tones[j].amp, j == 0 ? 0.2 : 0.3);
    }
  }
}

TEST(Demux, RejectsEmptyAndUnsorted) {
  const std::vector<Resonator> none;
  EXPECT_THROW(demux(none, MultiToneLo({Tone(8e9, 0.5)})), std::invalid_argument);
  const std::vector<Resonator> unsorted{{8.1e9, 1e4}, {8.0e9, 1e4}};
  EXPECT_THROW(demux(unsorted, MultiToneLo({Tone(8e9, 0.5), Tone(8.1e9, 0.5)})), std::invalid_argument);
}

TEST(Demux, MaxTonesSpacingKeepsCrosstalkBelowSixDb) {
  // Tones one linewidth f_c/Q apart, filling bandwidth W below f_c.
  const double q = 200.0, fc = 5e9, w = 0.1e9;
  const std::size_t n = max_tones(q, w, fc);
  ASSERT_EQ(n, 4u);
  const auto freqs = tone_plan(n, q, fc);
  std::vector<Resonator> rs;
  std::vector<Tone> tones;
  for (double f : freqs) {
    rs.emplace_back(f, q);
    tones.emplace_back(f, 0.5);
  }
  const auto res = demux(rs, MultiToneLo(tones));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k) {
        EXPECT_LE(res.crosstalk_db[k][j], -6.0);
      }
    }
  }
}
