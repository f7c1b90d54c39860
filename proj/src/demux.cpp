#include "qcvz/demux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcvz {

Resonator::Resonator(double freq_hz_, double q_) : freq_hz(freq_hz_), q(q_) {
  if (!(freq_hz > 0.0) || !std::isfinite(freq_hz)) throw std::invalid_argument("resonator frequency must be positive");
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("resonator Q must be positive");
}

std::complex<double> resonator_gain(const Resonator& r, double f_hz) {
  if (!(f_hz > 0.0)) throw std::invalid_argument("frequency must be positive");
  const double x = 2.0 * r.q * (f_hz - r.freq_hz) / r.freq_hz;
  return 1.0 / std::complex<double>(1.0, x);
}

const ChannelTone& Channel::dominant() const {
  if (tones.empty()) throw std::logic_error("channel carries no tones");
  return *std::max_element(tones.begin(), tones.end(),
                           [](const ChannelTone& a, const ChannelTone& b) { return a.amp < b.amp; });
}

DemuxResult demux(std::span<const Resonator> resonators, const MultiToneLo& lo) {
  if (resonators.empty()) throw std::invalid_argument("demux needs at least one resonator");
  for (std::size_t k = 1; k < resonators.size(); ++k) {
    if (resonators[k].freq_hz < resonators[k - 1].freq_hz) {
      throw std::invalid_argument("resonators must be sorted by frequency");
    }
  }

  DemuxResult out;
  out.channels.reserve(resonators.size());
  out.crosstalk_db.reserve(resonators.size());
  for (const auto& r : resonators) {
    Channel ch;
    std::vector<double> row;
    ch.tones.reserve(lo.size());
    row.reserve(lo.size());
    for (const auto& tone : lo.tones()) {
      const auto g = resonator_gain(r, tone.freq_hz());
      ch.tones.push_back({tone.freq_hz(), tone.amp() * std::abs(g), wrap_two_pi(tone.phase() + std::arg(g))});
      row.push_back(20.0 * std::log10(std::abs(g)));
    }
    out.channels.push_back(std::move(ch));
    out.crosstalk_db.push_back(std::move(row));
  }
  return out;
}

}  // namespace qcvz
