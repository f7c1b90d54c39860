#pragma once

#include <variant>
#include <vector>

#include "qcvz/calibration.hpp"
#include "qcvz/compiler.hpp"
#include "qcvz/fit.hpp"
#include "qcvz/mixer.hpp"
#include "qcvz/qubit.hpp"

namespace qcvz {

struct PulsePair {
  CalibratedPulse half_pi;
  CalibratedPulse pi;

  /// Throws std::invalid_argument unless both pulses are calibrated for the
  /// same LO/IF pair with their nominal target angles.
  void validate() const;
};

struct ExperimentSetup {
  QubitParams qubit;
  MixerConfig mixer;
  PulsePair pulses;
  double dt = 0.0;  ///< 0 picks a step from the drive and qubit rates
};

/// p1 vs delay after an X_pi pulse.
Trajectory run_t1(const ExperimentSetup& s, const std::vector<double>& delays);
/// X_pi/2, delay, X_pi/2 with the drive detuned by +detuning_hz.
Trajectory run_ramsey(const ExperimentSetup& s, double detuning_hz, const std::vector<double>& delays);
/// X_pi/2, delay/2, X_pi, delay/2, X_pi/2.
Trajectory run_echo(const ExperimentSetup& s, const std::vector<double>& delays);

struct PhaseCurve {
  std::vector<double> dtheta_deg;
  std::vector<double> p1;
};

/// Two X_pi/2 pulses separated by `delay`; the second has theta_if = dtheta.
PhaseCurve run_vz_ramsey(const ExperimentSetup& s, const std::vector<double>& dtheta_deg, double delay);

struct T1Experiment {};
struct RamseyExperiment {
  double detuning_hz;
};
struct EchoExperiment {};
struct VzRamseyExperiment {
  std::vector<double> dtheta_deg;
  double delay_s;
};
using ExperimentKind = std::variant<T1Experiment, RamseyExperiment, EchoExperiment, VzRamseyExperiment>;
using ExperimentOutput = std::variant<Trajectory, PhaseCurve>;

/// `delays` is ignored by the virtual-Z Ramsey experiment.
ExperimentOutput run_experiment(const ExperimentKind& kind, const ExperimentSetup& s,
                                const std::vector<double>& delays);

/// p1 vs time during one long flat pulse of the given IF amplitude.
Trajectory run_rabi(const QubitParams& q, const MixerConfig& cfg, double f_if_hz, double a_if,
                    const std::vector<double>& times, bool mixer_on = true);

struct ChevronResult {
  std::vector<double> f_if_hz;
  std::vector<double> tau_s;
  std::vector<std::vector<double>> p1;  ///< p1[i][j] at f_if_hz[i], tau_s[j]
};

/// Final p1 of one flat single-cycle pulse for every (f_if, tau) pair.
ChevronResult chevron(const QubitParams& q, const MixerConfig& cfg, const std::vector<double>& f_if_grid,
                      const std::vector<double>& tau_grid, bool mixer_on = true, double a_if = 1.0);

/// Symmetry axis of the chevron along f_if, located on the half-step grid.
double chevron_center(const ChevronResult& c);

struct ExecutionTarget {
  QubitParams qubit;
  MixerConfig mixer;
  CalibratedPulse half_pi;
};

/// Plays a schedule through one mixer per qubit: every cycle lasts one pulse
/// duration, the IF phase is the cycle's theta_if and a qubit's bit is 1 in
/// the cycles where it fires. Returns the final density matrix per qubit.
std::vector<Matrix2c> execute_schedule(const Schedule& s, const std::vector<ExecutionTarget>& targets);

}  // namespace qcvz
