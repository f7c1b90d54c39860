#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qcvz/signals.hpp"

namespace qcvz {

/// Single-pole resonator of the LO demultiplexer.
struct Resonator {
  Resonator(double freq_hz, double q);

  double freq_hz;
  double q;
};

/// Lorentzian transfer 1 / (1 + 2iQ(f - f_r)/f_r).
std::complex<double> resonator_gain(const Resonator& r, double f_hz);

/// One LO tone as seen after a resonator. Amplitude in flux-quantum units.
struct ChannelTone {
  double freq_hz = 0.0;
  double amp = 0.0;
  double phase = 0.0;
};

/// Everything a resonator passes to its mixer: every LO tone, weighted by
/// the resonator response.
struct Channel {
  std::vector<ChannelTone> tones;

  /// The strongest tone, i.e. the intended LO drive of this channel.
  const ChannelTone& dominant() const;
};

struct DemuxResult {
  std::vector<Channel> channels;
  /// crosstalk_db[k][j]: |gain| of tone j through resonator k, in dB.
  std::vector<std::vector<double>> crosstalk_db;
};

/// Splits the LO line into one channel per resonator. Resonators must be
/// sorted by frequency.
DemuxResult demux(std::span<const Resonator> resonators, const MultiToneLo& lo);

}  // namespace qcvz
