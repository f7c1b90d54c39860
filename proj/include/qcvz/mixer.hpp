#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include "qcvz/demux.hpp"
#include "qcvz/signals.hpp"

namespace qcvz {

/// Simulated maximum output power of one mixer at 5 GHz. Metadata only.
inline constexpr double kMaxOutputPowerPw = 4.11;
inline constexpr double kMaxOutputPowerDbm = -83.9;
/// LO flux amplitude at which gain_hz_per_unit is specified.
inline constexpr double kNominalLoFlux = 0.5;

enum class Nonlinearity { linear, sine_saturating };

const char* to_string(Nonlinearity nl);
Nonlinearity nonlinearity_from_string(std::string_view name);

struct MixerConfig {
  ChannelTone channel;              ///< LO drive after the demultiplexer
  double gain_hz_per_unit = 10e6;   ///< peak Rabi rate at A_if = 1 and nominal LO flux
  double on_off_ratio_db = 28.5;    ///< may be +inf for an ideal switch
  Nonlinearity nonlinearity = Nonlinearity::sine_saturating;
  double bpf_stopband_db = 60.0;

  void validate() const;

  /// Off-state residual amplitude 10^(-ratio/20).
  double off_residual() const;
  /// Drive scale from the LO flux amplitude, 1 at the nominal 0.5 flux quanta
  /// and saturating above it.
  double lo_scale() const;
};

double residual_from_ratio_db(double ratio_db);
double ratio_db_from_residual(double residual);

/// IF amplitude to Rabi rate (Hz) at nominal LO drive.
double amplitude_map(const MixerConfig& cfg, double a_if);

/// Per-cycle digital inputs of one mixer. The fixed input is always logic 1,
/// so bit 1 switches the output on.
struct BitTimeline {
  std::vector<bool> bits;

  static BitTimeline all_on(std::size_t n) { return {std::vector<bool>(n, true)}; }
  static BitTimeline all_off(std::size_t n) { return {std::vector<bool>(n, false)}; }
};

/// One pulse of the drive: envelope starting at `start`, scaled by
/// `scale_hz` after the mixer nonlinearity, with a fixed phase.
struct DriveSegment {
  double start = 0.0;
  Envelope envelope;
  double scale_hz = 0.0;
  double phase = 0.0;
  Nonlinearity nonlinearity = Nonlinearity::linear;

  std::complex<double> value(double t) const;
};

/// Complex baseband drive at `carrier_hz`, seen in the frame rotating at the
/// carrier. Values are Rabi rates in Hz (magnitude) with the drive phase as
/// argument. Stored as analytic segments; `samples()` materializes it on the
/// envelope-rate grid.
class DriveEnvelope {
 public:
  explicit DriveEnvelope(double carrier_hz, double envelope_rate_hz = 10e9, double t0 = 0.0);

  double carrier_hz() const { return carrier_hz_; }
  double envelope_rate() const { return envelope_rate_; }
  double t0() const { return t0_; }
  double t_end() const { return t_end_; }
  double duration() const { return t_end_ - t0_; }
  const std::vector<DriveSegment>& segments() const { return segments_; }

  void add_segment(const DriveSegment& seg);
  /// Extends the drive with silence up to t (no-op if already longer).
  void extend_to(double t);
  /// Appends every segment of `other`, shifted to start at the current end.
  void append(const DriveEnvelope& other);

  /// Drive value at t. With `left_limit`, segments ending exactly at t still
  /// contribute (used at the end of an integration step).
  std::complex<double> value(double t, bool left_limit = false) const;

  /// Segment boundaries and envelope kinks, sorted and deduplicated, within [t0, t_end].
  std::vector<double> breakpoints() const;
  /// Upper bound of |value| over the drive.
  double peak_hz() const;

  std::vector<std::complex<double>> samples() const;

 private:
  double carrier_hz_;
  double envelope_rate_;
  double t0_;
  double t_end_;
  double max_segment_duration_ = 0.0;
  std::vector<DriveSegment> segments_;
};

/// Baseband output of one mixer gated by `bits`. Cycle i contributes
/// s(a_i) * amplitude_map(A_i(t)) * exp(i(-theta_if,i + phi_ch)).
DriveEnvelope baseband_output(const MixerConfig& cfg, const IfProgram& prog, const BitTimeline& bits);

struct SpectralComponent {
  const char* label;  ///< "difference", "sum", "lo", "if"
  double freq_hz;
  double power_db;    ///< relative to the on-state difference tone
};

/// CW spectrum of the mixer output at f_lo - f_if, f_lo + f_if, f_lo and f_if,
/// measured from a carrier-level synthesis over `window_s`. The program must
/// be flat and uniform (same theta, envelope and bit in every cycle).
std::vector<SpectralComponent> output_spectrum(const MixerConfig& cfg, const IfProgram& prog,
                                               const BitTimeline& bits, double rate_hz,
                                               double window_s = 1e-6);

}  // namespace qcvz
