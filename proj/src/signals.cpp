#include "qcvz/signals.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

namespace qcvz {

double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

double wrap_two_pi(double rad) {
  double r = std::fmod(rad, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_pi(double rad) {
  double r = wrap_two_pi(rad);
  if (r > kPi) r -= kTwoPi;
  return r;
}

double wrap_360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;
  return r;
}

Tone::Tone(double freq_hz, double amp, double phase_rad)
    : freq_hz_(freq_hz), amp_(amp), phase_(wrap_two_pi(phase_rad)) {
  if (!(freq_hz > 0.0) || !std::isfinite(freq_hz)) {
    throw std::invalid_argument("tone frequency must be positive");
  }
  if (!(amp >= 0.0 && amp <= 1.0)) {
    throw std::invalid_argument("tone flux amplitude must lie in [0, 1]");
  }
  if (!std::isfinite(phase_rad)) throw std::invalid_argument("tone phase must be finite");
}

MultiToneLo::MultiToneLo(std::vector<Tone> tones) : tones_(std::move(tones)) {
  for (std::size_t i = 1; i < tones_.size(); ++i) {
    if (!(tones_[i].freq_hz() > tones_[i - 1].freq_hz())) {
      throw std::invalid_argument("LO tone frequencies must be strictly increasing");
    }
  }
}

double MultiToneLo::max_freq_hz() const { return tones_.empty() ? 0.0 : tones_.back().freq_hz(); }

const char* to_string(EnvelopeShape shape) {
  switch (shape) {
    case EnvelopeShape::flat: return "flat";
    case EnvelopeShape::triangular: return "triangular";
    case EnvelopeShape::gaussian: return "gaussian";
  }
  return "?";
}

EnvelopeShape envelope_shape_from_string(std::string_view name) {
  if (name == "flat") return EnvelopeShape::flat;
  if (name == "triangular") return EnvelopeShape::triangular;
  if (name == "gaussian") return EnvelopeShape::gaussian;
  throw std::invalid_argument("unknown envelope shape: " + std::string(name));
}

const char* to_string(PhaseMode mode) {
  return mode == PhaseMode::quantized45 ? "quantized45" : "free";
}

Envelope::Envelope(EnvelopeShape shape, double duration_s, double peak)
    : shape_(shape), duration_(duration_s), peak_(peak) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw std::invalid_argument("envelope duration must be positive");
  }
  if (!(peak >= 0.0 && peak <= 1.0)) throw std::invalid_argument("envelope peak must lie in [0, 1]");
}

double Envelope::value(double t) const {
  if (t < 0.0 || t >= duration_) return 0.0;
  switch (shape_) {
    case EnvelopeShape::flat:
      return peak_;
    case EnvelopeShape::triangular:
      return peak_ * (1.0 - std::abs(2.0 * t / duration_ - 1.0));
    case EnvelopeShape::gaussian: {
      const double sigma = duration_ / 6.0;
      const double x = (t - 0.5 * duration_) / sigma;
      return peak_ * std::exp(-0.5 * x * x);
    }
  }
  return 0.0;
}

IfProgram::IfProgram(double f_if_hz, double cycle_period_s, std::vector<CycleSpec> cycles,
                     PhaseMode mode)
    : f_if_hz_(f_if_hz), cycle_period_(cycle_period_s), cycles_(std::move(cycles)), mode_(mode) {
  if (!(f_if_hz > 0.0) || !std::isfinite(f_if_hz)) throw std::invalid_argument("f_if must be positive");
  if (!(cycle_period_s > 0.0) || !std::isfinite(cycle_period_s)) {
    throw std::invalid_argument("cycle period must be positive");
  }
  for (auto& c : cycles_) {
    if (!std::isfinite(c.theta_if_deg)) throw std::invalid_argument("theta_if must be finite");
    if (mode_ == PhaseMode::quantized45) {
      const double steps = c.theta_if_deg / 45.0;
      if (std::abs(steps - std::round(steps)) > 1e-9) {
        throw std::invalid_argument("quantized mode requires theta_if to be a multiple of 45 degrees");
      }
      c.theta_if_deg = wrap_360(45.0 * std::round(steps));
    }
    if (c.envelope && c.envelope->duration() > cycle_period_ * (1.0 + 1e-12)) {
      throw std::invalid_argument("envelope is longer than the cycle period");
    }
  }
}

std::optional<std::size_t> IfProgram::cycle_at(double t) const {
  if (t < 0.0 || cycles_.empty()) return std::nullopt;
  const auto i = static_cast<std::size_t>(std::floor(t / cycle_period_));
  if (i >= cycles_.size()) return std::nullopt;
  return i;
}

double IfProgram::theta_at(double t) const {
  const auto i = cycle_at(t);
  return i ? deg_to_rad(cycles_[*i].theta_if_deg) : 0.0;
}

double IfProgram::amplitude_at(double t) const {
  const auto i = cycle_at(t);
  if (!i || !cycles_[*i].envelope) return 0.0;
  return cycles_[*i].envelope->value(t - cycle_start(*i));
}

IfProgram make_if_program(double f_if_hz, double cycle_period_s, std::vector<CycleSpec> cycles,
                          PhaseMode mode) {
  return IfProgram(f_if_hz, cycle_period_s, std::move(cycles), mode);
}

SampledWaveform::SampledWaveform(double sample_rate_hz, double t0_s, std::vector<double> samples,
                                 double max_represented_freq_hz)
    : sample_rate_(sample_rate_hz), t0_(t0_s), samples_(std::move(samples)) {
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
  if (!(sample_rate_hz > 2.0 * max_represented_freq_hz)) {
    throw std::invalid_argument("sample rate violates the Nyquist criterion");
  }
}

std::pair<SampledWaveform, SampledWaveform> synthesize(const MultiToneLo& lo, const IfProgram& prog,
                                                       double rate_hz) {
  return synthesize(lo, prog, rate_hz, prog.total_duration());
}

std::pair<SampledWaveform, SampledWaveform> synthesize(const MultiToneLo& lo, const IfProgram& prog,
                                                       double rate_hz, double duration_s) {
  const double f_max = std::max(lo.max_freq_hz(), prog.f_if_hz());
  if (!(rate_hz > 2.0 * f_max)) throw std::invalid_argument("sample rate violates the Nyquist criterion");
  if (!(duration_s >= 0.0)) throw std::invalid_argument("duration must be non-negative");

  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  std::vector<double> lo_samples(n, 0.0);
  std::vector<double> if_samples(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    double acc = 0.0;
    for (const auto& tone : lo.tones()) {
      acc += tone.amp() * std::cos(kTwoPi * tone.freq_hz() * t + tone.phase());
    }
    lo_samples[i] = acc;
    const double a = prog.amplitude_at(t);
    if (a != 0.0) if_samples[i] = a * std::cos(kTwoPi * prog.f_if_hz() * t + prog.theta_at(t));
  }
  return {SampledWaveform(rate_hz, 0.0, std::move(lo_samples), lo.max_freq_hz()),
          SampledWaveform(rate_hz, 0.0, std::move(if_samples), prog.f_if_hz())};
}

std::vector<SpectrumLine> amplitude_spectrum(const SampledWaveform& wf) {
  const std::size_t n = wf.size();
  if (n < 2) throw std::invalid_argument("spectrum needs at least two samples");
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> bins;
  fft.fwd(bins, wf.samples());

  std::vector<SpectrumLine> out;
  out.reserve(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double a = std::abs(bins[k]) / static_cast<double>(n);
    if (k != 0 && !(n % 2 == 0 && k == n / 2)) a *= 2.0;
    out.push_back({static_cast<double>(k) * wf.sample_rate() / static_cast<double>(n), a});
  }
  return out;
}

std::vector<SpectrumLine> spectral_peaks(const std::vector<SpectrumLine>& spectrum, double floor_db) {
  double max_amp = 0.0;
  for (const auto& s : spectrum) max_amp = std::max(max_amp, s.amplitude);
  std::vector<SpectrumLine> peaks;
  if (max_amp <= 0.0) return peaks;
  const double threshold = max_amp * std::pow(10.0, floor_db / 20.0);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double a = spectrum[k].amplitude;
    if (a < threshold) continue;
    const double left = k > 0 ? spectrum[k - 1].amplitude : 0.0;
    const double right = k + 1 < spectrum.size() ? spectrum[k + 1].amplitude : 0.0;
    if (a >= left && a > right) peaks.push_back(spectrum[k]);
  }
  return peaks;
}

double tone_amplitude(const SampledWaveform& wf, double freq_hz) {
  const std::size_t n = wf.size();
  if (n < 2) throw std::invalid_argument("tone measurement needs at least two samples");
  std::complex<double> acc{0.0, 0.0};
  double gain = 0.0;
  const double w = kTwoPi * freq_hz / wf.sample_rate();
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
    gain += hann;
    acc += wf.samples()[i] * hann * std::polar(1.0, -w * static_cast<double>(i));
  }
  return 2.0 * std::abs(acc) / gain;
}

}  // namespace qcvz
