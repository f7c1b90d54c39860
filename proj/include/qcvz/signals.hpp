#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace qcvz {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double rad);
/// Wraps an angle into (-pi, pi].
double wrap_pi(double rad);
/// Wraps an angle in degrees into [0, 360).
double wrap_360(double deg);

/// One LO tone. Amplitude is a flux amplitude in units of the flux quantum.
class Tone {
 public:
  Tone(double freq_hz, double amp, double phase_rad = 0.0);

  double freq_hz() const { return freq_hz_; }
  double amp() const { return amp_; }
  double phase() const { return phase_; }

 private:
  double freq_hz_;
  double amp_;
  double phase_;
};

/// Tones sharing one LO line, ordered by strictly increasing frequency.
class MultiToneLo {
 public:
  explicit MultiToneLo(std::vector<Tone> tones);

  const std::vector<Tone>& tones() const { return tones_; }
  std::size_t size() const { return tones_.size(); }
  double max_freq_hz() const;

 private:
  std::vector<Tone> tones_;
};

enum class EnvelopeShape { flat, triangular, gaussian };

const char* to_string(EnvelopeShape shape);
EnvelopeShape envelope_shape_from_string(std::string_view name);

/// IF envelope within one control cycle. The peak is a fraction of the
/// maximum IF amplitude. Gaussian envelopes use sigma = duration / 6 and are
/// truncated to [0, duration).
class Envelope {
 public:
  Envelope(EnvelopeShape shape, double duration_s, double peak);

  EnvelopeShape shape() const { return shape_; }
  double duration() const { return duration_; }
  double peak() const { return peak_; }

  /// Envelope value at time t after the cycle start; zero outside
  /// [0, duration).
  double value(double t) const;

  Envelope with_peak(double peak) const { return {shape_, duration_, peak}; }

 private:
  EnvelopeShape shape_;
  double duration_;
  double peak_;
};

enum class PhaseMode { quantized45, free };

const char* to_string(PhaseMode mode);

struct CycleSpec {
  double theta_if_deg = 0.0;
  std::optional<Envelope> envelope;  ///< nullopt marks an idle cycle
};

/// IF frequency plus the per-cycle phase/envelope schedule. Cycle i starts at
/// i * cycle_period.
class IfProgram {
 public:
  IfProgram(double f_if_hz, double cycle_period_s, std::vector<CycleSpec> cycles,
            PhaseMode mode = PhaseMode::quantized45);

  double f_if_hz() const { return f_if_hz_; }
  double cycle_period() const { return cycle_period_; }
  const std::vector<CycleSpec>& cycles() const { return cycles_; }
  PhaseMode mode() const { return mode_; }
  std::size_t size() const { return cycles_.size(); }

  double total_duration() const { return cycle_period_ * static_cast<double>(cycles_.size()); }
  double cycle_start(std::size_t i) const { return cycle_period_ * static_cast<double>(i); }

  /// Index of the cycle active at t (right-continuous); nullopt outside the program.
  std::optional<std::size_t> cycle_at(double t) const;
  /// IF phase at t in radians; 0 outside the program.
  double theta_at(double t) const;
  /// IF envelope amplitude at t; 0 for idle cycles and outside the program.
  double amplitude_at(double t) const;

 private:
  double f_if_hz_;
  double cycle_period_;
  std::vector<CycleSpec> cycles_;
  PhaseMode mode_;
};

IfProgram make_if_program(double f_if_hz, double cycle_period_s, std::vector<CycleSpec> cycles,
                          PhaseMode mode = PhaseMode::quantized45);

/// Real-valued samples on a uniform grid. Construction enforces
/// sample_rate > 2 * max_represented_freq.
class SampledWaveform {
 public:
  SampledWaveform(double sample_rate_hz, double t0_s, std::vector<double> samples,
                  double max_represented_freq_hz);

  double sample_rate() const { return sample_rate_; }
  double t0() const { return t0_; }
  const std::vector<double>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double time(std::size_t i) const { return t0_ + static_cast<double>(i) / sample_rate_; }

 private:
  double sample_rate_;
  double t0_;
  std::vector<double> samples_;
};

/// Samples I_lo(t) and I_if(t) over the program duration.
std::pair<SampledWaveform, SampledWaveform> synthesize(const MultiToneLo& lo, const IfProgram& prog,
                                                       double rate_hz);
/// Same, over an explicit duration (the IF trace is zero past the program end).
std::pair<SampledWaveform, SampledWaveform> synthesize(const MultiToneLo& lo, const IfProgram& prog,
                                                       double rate_hz, double duration_s);

struct SpectrumLine {
  double freq_hz;
  double amplitude;
};

/// Single-sided amplitude spectrum (rectangular window). A cosine of
/// amplitude a that falls exactly on a bin reports amplitude a.
std::vector<SpectrumLine> amplitude_spectrum(const SampledWaveform& wf);

/// Local maxima of the spectrum whose level is above `floor_db` relative to
/// the strongest line.
std::vector<SpectrumLine> spectral_peaks(const std::vector<SpectrumLine>& spectrum, double floor_db);

/// Amplitude of the component at an arbitrary frequency, measured with a Hann
/// window and normalized by its coherent gain.
double tone_amplitude(const SampledWaveform& wf, double freq_hz);

}  // namespace qcvz
