#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "qcvz/mixer.hpp"
#include "qcvz/qubit.hpp"

namespace qcvz {

/// A pulse whose IF amplitude/duration realize a target rotation angle on a
/// resonant drive (f_lo - f_if = f_qubit).
struct CalibratedPulse {
  double f_lo_hz = 0.0;
  double f_if_hz = 0.0;
  double a_if = 0.0;
  double tau_if = 0.0;
  double target_angle = 0.0;
  EnvelopeShape shape = EnvelopeShape::flat;

  double drive_freq_hz() const { return f_lo_hz - f_if_hz; }
};

/// Builds a drive from pulses and delays. Each pulse is a single-cycle IF
/// program passed through the mixer, so its phase is -theta_if.
class PulseTrain {
 public:
  PulseTrain(MixerConfig cfg, double f_if_hz);

  PulseTrain& pulse(double a_if, double tau_if, EnvelopeShape shape, double theta_if_deg, bool on = true);
  PulseTrain& pulse(const CalibratedPulse& p, double theta_if_deg = 0.0);
  PulseTrain& delay(double seconds);

  const DriveEnvelope& drive() const { return drive_; }
  double peak_hz() const { return drive_.peak_hz(); }

 private:
  MixerConfig cfg_;
  double f_if_hz_;
  DriveEnvelope drive_;
};

struct FixedDuration {
  double tau_if;
};
struct FixedAmplitude {
  double a_if;
};

struct CalibrationOptions {
  EnvelopeShape shape = EnvelopeShape::flat;
  double theta_if_deg = 0.0;
  /// Coarse bisection stops once |p1 - sin^2(angle/2)| is below this.
  double coarse_p1_tolerance = 1e-3;
  /// Error-amplification sequences use 2k+1 pulses for these k.
  std::vector<int> amplification_k{1, 2, 4};
  /// Root tolerance on the amplified signal.
  double signal_tolerance = 1e-13;
  /// Fine stages are skipped once the angle error is below this (rad).
  double angle_tolerance = 1e-11;
  int max_iterations = 200;
};

/// Angle error of the pulse after the coarse stage and after each fine stage.
struct CalibrationTrace {
  double coarse_error = 0.0;
  std::vector<int> sequence_lengths;
  std::vector<double> stage_errors;
};

/// Rotation angle of a single pulse measured from the simulated Bloch vector,
/// atan2(|r_xy|, r_z), valid on [0, pi].
double measure_rotation_angle(const QubitParams& q, const MixerConfig& cfg, const CalibratedPulse& p,
                              double theta_if_deg = 0.0);

/// Two-stage calibration: bisection on single-pulse p1, then error
/// amplification with 2k+1 repetitions, both on the decoherence-free qubit.
/// Angles that a repetition leaves insensitive (e.g. pi) get a calibrated
/// pi/2 prefix. Throws
/// NumericalError when the target is unreachable or the search stalls.
CalibratedPulse calibrate_pulse(const QubitParams& q, const MixerConfig& cfg, double target_angle,
                                std::variant<FixedDuration, FixedAmplitude> fixed,
                                const CalibrationOptions& opts = {}, CalibrationTrace* trace = nullptr);

struct ResidualRatioPoint {
  double a_if;
  double rabi_on_hz;
  double rabi_off_hz;
  double ratio;
};

struct ResidualRatioCurve {
  std::vector<ResidualRatioPoint> points;
  std::vector<double> dropped_a_if;  ///< grid points where the on-state fit failed
};

/// Fits the Rabi frequency with the mixer on and off at each A_if and
/// reports Omega_off / Omega_on.
ResidualRatioCurve residual_ratio(const QubitParams& q, const MixerConfig& cfg, const std::vector<double>& a_if_grid);

}  // namespace qcvz
