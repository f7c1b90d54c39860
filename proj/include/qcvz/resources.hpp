#pragma once

#include <cstddef>
#include <vector>

namespace qcvz {

inline constexpr double kStandbyPowerPw = 1.92;
inline constexpr double kPeakPowerPw = 220.0;
inline constexpr double kNbResonatorQ = 1e4;
inline constexpr double kLoBandwidthHz = 2e9;
inline constexpr double kReferenceFreqHz = 5e9;

struct PowerEstimate {
  double avg_pw_per_qubit;
  double total_w;
};

/// Per-qubit power is the mean of standby and peak dissipation.
PowerEstimate power_estimate(std::size_t n, double standby_pw = kStandbyPowerPw, double peak_pw = kPeakPowerPw);

/// Tones that fit in bandwidth W at a spacing of one linewidth f_c/Q.
std::size_t max_tones(double q, double bandwidth_hz, double f_c_hz);

/// LO cables needed for n qubits; one shared IF cable comes on top.
std::size_t cable_count(std::size_t n, std::size_t tones_per_cable);

struct ResourceReport {
  std::size_t n_qubits;
  double standby_pw_per_qubit;
  double peak_pw_per_qubit;
  double avg_pw_per_qubit;
  double total_avg_w;
  double max_output_pw;
  std::size_t max_tones_per_cable;
  std::size_t cable_count;
  std::size_t if_cable_count;
  double parallelism_worst;
  double parallelism_best;
};

struct ResourceOptions {
  double standby_pw = kStandbyPowerPw;
  double peak_pw = kPeakPowerPw;
  double q = kNbResonatorQ;
  double bandwidth_hz = kLoBandwidthHz;
  double f_c_hz = kReferenceFreqHz;
};

ResourceReport resource_report(std::size_t n, const ResourceOptions& opts = {});

/// Evenly spaced LO tone frequencies for `count` resonators, one linewidth
/// apart, ending at f_c.
std::vector<double> tone_plan(std::size_t count, double q, double f_c_hz);

}  // namespace qcvz
