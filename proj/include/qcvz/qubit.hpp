#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcvz/mixer.hpp"

namespace qcvz {

/// Transmon truncated to two levels. T1 and Tphi may be +inf (closed system).
struct QubitParams {
  QubitParams(double freq_hz, double t1_s, double tphi_s);

  /// Pure dephasing derived from a target T2: 1/Tphi = 1/T2 - 1/(2 T1).
  static QubitParams from_t1_t2(double freq_hz, double t1_s, double t2_s);
  static QubitParams closed(double freq_hz);

  double t2() const;
  bool is_closed() const;
  QubitParams without_decoherence() const { return closed(freq_hz); }

  double freq_hz;
  double t1;
  double tphi;
};

using Matrix2c = Eigen::Matrix2cd;

/// 2x2 density matrix in the {|0>, |1>} basis.
class DensityMatrix {
 public:
  /// Validates trace, hermiticity and positivity (tolerance 1e-12).
  explicit DensityMatrix(const Matrix2c& rho);

  static DensityMatrix ground();
  static DensityMatrix excited();

  const Matrix2c& matrix() const { return rho_; }
  double p1() const { return rho_(1, 1).real(); }
  double trace_error() const;
  double min_eigenvalue() const;

 private:
  Matrix2c rho_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> p1;

  double final_p1() const { return p1.empty() ? 0.0 : p1.back(); }
};

struct EvolveOptions {
  /// When non-empty, p1 is recorded only at these times (each one becomes an
  /// integration breakpoint). Otherwise p1 is recorded after every step.
  std::vector<double> record_times;
};

struct EvolveResult {
  Trajectory trajectory;
  Matrix2c final_state;
  std::size_t steps = 0;
};

/// Integrates the rotating-frame Lindblad equation with fixed-step RK4:
///   H = (delta/2) sz + (Re(W) sx + Im(W) sy)/2,  W = 2 pi drive(t),
///   delta = 2 pi (carrier - f_qubit),
/// plus amplitude damping at 1/T1 and dephasing at 1/Tphi. Steps are split at
/// drive segment boundaries so pulse edges fall on step edges.
///
/// Throws NumericalError when dt > 1/(50 max(|drive|, |carrier - f_qubit|))
/// with both rates in Hz.
EvolveResult evolve_detailed(const QubitParams& q, const DriveEnvelope& drive, const DensityMatrix& rho0,
                             double dt, const EvolveOptions& opts = {});

Trajectory evolve(const QubitParams& q, const DriveEnvelope& drive, const DensityMatrix& rho0, double dt);

/// Largest dt accepted by evolve for this drive.
double max_stable_dt(const QubitParams& q, const DriveEnvelope& drive);
/// A dt with 200 steps per period of the fastest rate (Hz); `floor_hz`
/// bounds the result when both rates vanish.
double suggested_dt(double rabi_hz, double detuning_hz, double floor_hz = 1e6);

/// Closed-form excited population for a flat drive from the ground state.
/// omega and delta are angular rates.
double rabi_analytic(double omega, double delta, double t);

}  // namespace qcvz
