#include "qcvz/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qcvz/errors.hpp"

namespace qcvz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool positive_or_inf(double v) { return v > 0.0 && !std::isnan(v); }

double rate_of(double time_constant) { return std::isinf(time_constant) ? 0.0 : 1.0 / time_constant; }

}  // namespace

QubitParams::QubitParams(double freq_hz_, double t1_s, double tphi_s) : freq_hz(freq_hz_), t1(t1_s), tphi(tphi_s) {
  if (!(freq_hz > 0.0) || !std::isfinite(freq_hz)) throw std::invalid_argument("qubit frequency must be positive");
  if (!positive_or_inf(t1)) throw std::invalid_argument("T1 must be positive");
  if (!positive_or_inf(tphi)) throw std::invalid_argument("Tphi must be positive");
}

QubitParams QubitParams::from_t1_t2(double freq_hz, double t1_s, double t2_s) {
  if (!positive_or_inf(t1_s) || !positive_or_inf(t2_s)) throw std::invalid_argument("T1 and T2 must be positive");
  const double phi_rate = rate_of(t2_s) - 0.5 * rate_of(t1_s);
  if (phi_rate < -1e-15 * rate_of(t2_s)) throw std::invalid_argument("T2 cannot exceed 2 T1");
  return {freq_hz, t1_s, phi_rate <= 0.0 ? kInf : 1.0 / phi_rate};
}

QubitParams QubitParams::closed(double freq_hz) { return {freq_hz, kInf, kInf}; }

double QubitParams::t2() const {
  const double rate = 0.5 * rate_of(t1) + rate_of(tphi);
  return rate == 0.0 ? kInf : 1.0 / rate;
}

bool QubitParams::is_closed() const { return std::isinf(t1) && std::isinf(tphi); }

DensityMatrix::DensityMatrix(const Matrix2c& rho) : rho_(rho) {
  if (!rho.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
  if (trace_error() > 1e-12) throw std::invalid_argument("density matrix trace must be 1");
  if ((rho - rho.adjoint()).norm() > 1e-12) throw std::invalid_argument("density matrix must be Hermitian");
  if (min_eigenvalue() < -1e-12) throw std::invalid_argument("density matrix must be positive semidefinite");
}

DensityMatrix DensityMatrix::ground() {
  Matrix2c m = Matrix2c::Zero();
  m(0, 0) = 1.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::excited() {
  Matrix2c m = Matrix2c::Zero();
  m(1, 1) = 1.0;
  return DensityMatrix(m);
}

double DensityMatrix::trace_error() const { return std::abs(rho_.trace() - std::complex<double>(1.0, 0.0)); }

double DensityMatrix::min_eigenvalue() const {
  const Matrix2c herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_stable_dt(const QubitParams& q, const DriveEnvelope& drive) {
  const double fastest = std::max(drive.peak_hz(), std::abs(drive.carrier_hz() - q.freq_hz));
  return fastest == 0.0 ? kInf : 1.0 / (50.0 * fastest);
}

double suggested_dt(double rabi_hz, double detuning_hz, double floor_hz) {
  return 1.0 / (200.0 * std::max({std::abs(rabi_hz), std::abs(detuning_hz), floor_hz}));
}

namespace {

class Lindblad {
 public:
  Lindblad(const QubitParams& q, const DriveEnvelope& drive)
      : drive_(drive),
        delta_(kTwoPi * (drive.carrier_hz() - q.freq_hz)),
        gamma1_(rate_of(q.t1)),
        gamma_phi_(rate_of(q.tphi)) {}

  Matrix2c derivative(double t, bool left_limit, const Matrix2c& rho) const {
    const std::complex<double> w = kTwoPi * drive_.value(t, left_limit);
    Matrix2c h;
    h << 0.5 * delta_, 0.5 * std::conj(w), 0.5 * w, -0.5 * delta_;
    const std::complex<double> minus_i(0.0, -1.0);
    Matrix2c d = minus_i * (h * rho - rho * h);

    // Amplitude damping |1> -> |0>.
    const double p1 = rho(1, 1).real();
    d(0, 0) += gamma1_ * p1;
    d(1, 1) -= gamma1_ * p1;
    const double coherence_rate = 0.5 * gamma1_ + gamma_phi_;
    d(0, 1) -= coherence_rate * rho(0, 1);
    d(1, 0) -= coherence_rate * rho(1, 0);
    return d;
  }

 private:
  const DriveEnvelope& drive_;
  double delta_;
  double gamma1_;
  double gamma_phi_;
};

}  // namespace

EvolveResult evolve_detailed(const QubitParams& q, const DriveEnvelope& drive, const DensityMatrix& rho0, double dt,
                             const EvolveOptions& opts) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  const double limit = max_stable_dt(q, drive);
  if (dt > limit * (1.0 + 1e-9)) {
    throw NumericalError("dt too coarse: " + std::to_string(dt) + " s exceeds " + std::to_string(limit) + " s");
  }

  std::vector<double> marks = drive.breakpoints();
  std::vector<double> record = opts.record_times;
  std::sort(record.begin(), record.end());
  for (double r : record) {
    if (r < drive.t0() || r > drive.t_end()) throw std::invalid_argument("record time outside the drive");
    marks.push_back(r);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  const Lindblad model(q, drive);
  EvolveResult out;
  Matrix2c rho = rho0.matrix();
  auto& traj = out.trajectory;
  std::size_t next_record = 0;
  const bool record_all = record.empty();

  auto maybe_record = [&](double t) {
    if (record_all) {
      traj.times.push_back(t);
      traj.p1.push_back(rho(1, 1).real());
      return;
    }
    while (next_record < record.size() && record[next_record] == t) {
      traj.times.push_back(t);
      traj.p1.push_back(rho(1, 1).real());
      ++next_record;
    }
  };

  maybe_record(marks.front());
  for (std::size_t k = 0; k + 1 < marks.size(); ++k) {
    const double a = marks[k];
    const double b = marks[k + 1];
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / dt - 1e-9));
    const double h = (b - a) / static_cast<double>(std::max<std::size_t>(n, 1));
    for (std::size_t i = 0; i < n; ++i) {
      const double t = a + h * static_cast<double>(i);
      const double t_next = (i + 1 == n) ? b : a + h * static_cast<double>(i + 1);
      const Matrix2c k1 = model.derivative(t, false, rho);
      const Matrix2c k2 = model.derivative(t + 0.5 * h, false, rho + 0.5 * h * k1);
      const Matrix2c k3 = model.derivative(t + 0.5 * h, false, rho + 0.5 * h * k2);
      const Matrix2c k4 = model.derivative(t_next, true, rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ++out.steps;
      if (record_all) maybe_record(t_next);
    }
    if (!record_all) maybe_record(b);
  }
  if (!rho.allFinite()) throw NumericalError("integration produced non-finite state");
  out.final_state = rho;
  return out;
}

Trajectory evolve(const QubitParams& q, const DriveEnvelope& drive, const DensityMatrix& rho0, double dt) {
  return evolve_detailed(q, drive, rho0, dt).trajectory;
}

double rabi_analytic(double omega, double delta, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be non-negative");
  const double g2 = omega * omega + delta * delta;
  if (g2 == 0.0) return 0.0;
  const double s = std::sin(0.5 * std::sqrt(g2) * t);
  return omega * omega / g2 * s * s;
}

}  // namespace qcvz
