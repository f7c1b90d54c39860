#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qcvz/qubit.hpp"
#include "qcvz/signals.hpp"

namespace qcvz {

enum class GateKind { X90, X180, Z, H, S, Sdg, T, Tdg };

struct Gate {
  GateKind kind;
  double angle = 0.0;  ///< Z only, normalized to (-pi, pi]

  static Gate x90() { return {GateKind::X90}; }
  static Gate x180() { return {GateKind::X180}; }
  static Gate z(double angle);
  static Gate h() { return {GateKind::H}; }
  static Gate s() { return {GateKind::S}; }
  static Gate sdg() { return {GateKind::Sdg}; }
  static Gate t() { return {GateKind::T}; }
  static Gate tdg() { return {GateKind::Tdg}; }
};

std::string to_string(const Gate& g);
/// Parses "X90", "X180", "H", "S", "Sdg", "T", "Tdg" and Z angles such as
/// "Z(0.3)", "Z(pi/4)", "Z(-3*pi/4)" (radians).
Gate parse_gate(std::string_view text);

/// X90 pulses with their IF phases, plus the frame left after the last one.
struct LoweredQubit {
  std::vector<double> theta_if_deg;
  double final_frame = 0.0;  ///< radians, in (-pi, pi]
};

/// Expands composite gates and tracks the virtual-Z frame F. Each X90 is
/// emitted at theta_if = F (mod 360 deg); the mixer drives it about the axis
/// at phase -theta_if. Quantized mode requires Z angles that are multiples
/// of pi/4 and tracks F exactly in eighths of a turn.
LoweredQubit lower(const std::vector<Gate>& gates, PhaseMode mode = PhaseMode::quantized45);

/// Gate-at-a-time form of lower().
class FrameTracker {
 public:
  explicit FrameTracker(PhaseMode mode = PhaseMode::quantized45);

  /// Appends the IF phases of the pulses `g` emits.
  void apply(const Gate& g, std::vector<double>& theta_if_deg);
  /// Current frame in radians, in (-pi, pi].
  double frame() const;

 private:
  void rotate(double angle);
  void pulse(std::vector<double>& theta_if_deg) const;

  PhaseMode mode_;
  int eighths_ = 0;
  double frame_ = 0.0;
};

/// Product of the standard gate matrices in time order, with
/// X90 = exp(-i pi/4 sx) and Z(phi) = exp(-i phi/2 sz).
Matrix2c ideal_unitary(const std::vector<Gate>& gates);
/// Z(final_frame) times the pulses R_{-theta}(pi/2) in time order.
Matrix2c lowered_unitary(const LoweredQubit& lq);
/// Rotation by `angle` about the equatorial axis at azimuth `phi`.
Matrix2c axis_rotation(double phi, double angle);

/// True iff min over alpha of ||U - e^{i alpha} V||_F < tol.
bool equivalent(const Matrix2c& u, const Matrix2c& v, double tol);
double phase_distance(const Matrix2c& u, const Matrix2c& v);

struct Program {
  std::vector<std::vector<Gate>> qubits;

  std::size_t size() const { return qubits.size(); }
};

/// n qubits, each with `pulses` X90 gates separated by Z(k pi/4) with k
/// drawn uniformly from 0..7.
Program random_program(std::size_t n, std::size_t pulses, std::uint64_t seed);

struct ScheduledCycle {
  std::size_t slot = 0;  ///< position in the unskipped timeline
  double theta_if_deg = 0.0;
  std::vector<std::size_t> fired;
};

struct Schedule {
  PhaseMode mode = PhaseMode::quantized45;
  std::vector<LoweredQubit> lowered;
  std::vector<ScheduledCycle> cycles;

  /// Index into `cycles` of every pulse of qubit q, in program order.
  std::vector<std::size_t> cycles_of(std::size_t q) const;
};

struct ScheduleOptions {
  /// Quantized mode: drop candidate cycles in which nothing fires.
  bool skip_idle = true;
  /// Pulse k of any qubit waits until every qubit has emitted pulse k-1.
  bool layered = false;
};

/// Quantized mode rolls the candidate phase 0, 45, ..., 315 deg and fires
/// every qubit whose next pulse matches. Free mode picks, per cycle, the
/// phase requested by the most ready pulses (ties go to the smaller phase).
Schedule schedule(const Program& p, PhaseMode mode, const ScheduleOptions& opts = {});
Schedule schedule_lowered(std::vector<LoweredQubit> lowered, PhaseMode mode, const ScheduleOptions& opts = {});

struct ParallelismStats {
  std::size_t cycles = 0;
  double mean_fired = 0.0;
  std::size_t max_fired = 0;
  std::size_t min_nonzero_fired = 0;
};

ParallelismStats parallelism_stats(const Schedule& s);

}  // namespace qcvz
