#include "qcvz/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>

namespace qcvz {

namespace {

void check_pulse(const CalibratedPulse& p, double angle, const char* name) {
  if (!(p.a_if > 0.0 && p.a_if <= 1.0) || !(p.tau_if > 0.0)) {
    throw std::invalid_argument(std::string(name) + " pulse is not calibrated");
  }
  if (std::abs(p.target_angle - angle) > 1e-12) {
    throw std::invalid_argument(std::string(name) + " pulse has the wrong target angle");
  }
}

double step_for(const ExperimentSetup& s, const DriveEnvelope& drive) {
  if (s.dt > 0.0) return s.dt;
  const double shortest = std::min(s.pulses.half_pi.tau_if, s.pulses.pi.tau_if);
  return std::min(suggested_dt(drive.peak_hz(), drive.carrier_hz() - s.qubit.freq_hz), shortest / 50.0);
}

double final_p1(const ExperimentSetup& s, const PulseTrain& train) {
  const auto& drive = train.drive();
  return evolve_detailed(s.qubit, drive, DensityMatrix::ground(), step_for(s, drive)).final_state(1, 1).real();
}

void check_delays(const std::vector<double>& delays) {
  if (delays.empty()) throw std::invalid_argument("delay list is empty");
  for (double d : delays) {
    if (!(d >= 0.0)) throw std::invalid_argument("delays must be non-negative");
  }
}

}  // namespace

void PulsePair::validate() const {
  check_pulse(half_pi, 0.5 * kPi, "pi/2");
  check_pulse(pi, kPi, "pi");
  if (half_pi.f_lo_hz != pi.f_lo_hz || half_pi.f_if_hz != pi.f_if_hz) {
    throw std::invalid_argument("pi/2 and pi pulses use different LO/IF frequencies");
  }
}

Trajectory run_t1(const ExperimentSetup& s, const std::vector<double>& delays) {
  s.pulses.validate();
  check_delays(delays);
  PulseTrain train(s.mixer, s.pulses.pi.f_if_hz);
  train.pulse(s.pulses.pi);
  const double t0 = train.drive().t_end();
  train.delay(*std::max_element(delays.begin(), delays.end()));

  EvolveOptions opts;
  for (double d : delays) opts.record_times.push_back(t0 + d);
  const auto& drive = train.drive();
  auto traj = evolve_detailed(s.qubit, drive, DensityMatrix::ground(), step_for(s, drive), opts).trajectory;
  // Recorded in sorted order; report against the delays in the same order.
  std::vector<double> sorted = delays;
  std::sort(sorted.begin(), sorted.end());
  traj.times = sorted;
  return traj;
}

Trajectory run_ramsey(const ExperimentSetup& s, double detuning_hz, const std::vector<double>& delays) {
  s.pulses.validate();
  check_delays(delays);
  const auto& p = s.pulses.half_pi;
  const double f_if = p.f_if_hz - detuning_hz;
  Trajectory out;
  for (double d : delays) {
    PulseTrain train(s.mixer, f_if);
    train.pulse(p.a_if, p.tau_if, p.shape, 0.0).delay(d).pulse(p.a_if, p.tau_if, p.shape, 0.0);
    out.times.push_back(d);
    out.p1.push_back(final_p1(s, train));
  }
  return out;
}

Trajectory run_echo(const ExperimentSetup& s, const std::vector<double>& delays) {
  s.pulses.validate();
  check_delays(delays);
  Trajectory out;
  for (double d : delays) {
    PulseTrain train(s.mixer, s.pulses.half_pi.f_if_hz);
    train.pulse(s.pulses.half_pi).delay(0.5 * d).pulse(s.pulses.pi).delay(0.5 * d).pulse(s.pulses.half_pi);
    out.times.push_back(d);
    out.p1.push_back(final_p1(s, train));
  }
  return out;
}

PhaseCurve run_vz_ramsey(const ExperimentSetup& s, const std::vector<double>& dtheta_deg, double delay) {
  s.pulses.validate();
  if (!(delay >= 0.0)) throw std::invalid_argument("delay must be non-negative");
  if (dtheta_deg.empty()) throw std::invalid_argument("phase list is empty");
  PhaseCurve out;
  for (double dtheta : dtheta_deg) {
    PulseTrain train(s.mixer, s.pulses.half_pi.f_if_hz);
    train.pulse(s.pulses.half_pi, 0.0).delay(delay).pulse(s.pulses.half_pi, dtheta);
    out.dtheta_deg.push_back(dtheta);
    out.p1.push_back(final_p1(s, train));
  }
  return out;
}

ExperimentOutput run_experiment(const ExperimentKind& kind, const ExperimentSetup& s,
                                const std::vector<double>& delays) {
  struct Visitor {
    const ExperimentSetup& s;
    const std::vector<double>& delays;
    ExperimentOutput operator()(const T1Experiment&) const { return run_t1(s, delays); }
    ExperimentOutput operator()(const RamseyExperiment& r) const { return run_ramsey(s, r.detuning_hz, delays); }
    ExperimentOutput operator()(const EchoExperiment&) const { return run_echo(s, delays); }
    ExperimentOutput operator()(const VzRamseyExperiment& v) const {
      return run_vz_ramsey(s, v.dtheta_deg, v.delay_s);
    }
  };
  return std::visit(Visitor{s, delays}, kind);
}

Trajectory run_rabi(const QubitParams& q, const MixerConfig& cfg, double f_if_hz, double a_if,
                    const std::vector<double>& times, bool mixer_on) {
  check_delays(times);
  const double duration = *std::max_element(times.begin(), times.end());
  if (!(duration > 0.0)) throw std::invalid_argument("Rabi window must be positive");
  PulseTrain train(cfg, f_if_hz);
  train.pulse(a_if, duration, EnvelopeShape::flat, 0.0, mixer_on);
  const auto& drive = train.drive();
  EvolveOptions opts;
  opts.record_times = times;
  const double dt = suggested_dt(drive.peak_hz(), drive.carrier_hz() - q.freq_hz);
  return evolve_detailed(q, drive, DensityMatrix::ground(), dt, opts).trajectory;
}

ChevronResult chevron(const QubitParams& q, const MixerConfig& cfg, const std::vector<double>& f_if_grid,
                      const std::vector<double>& tau_grid, bool mixer_on, double a_if) {
  if (f_if_grid.empty() || tau_grid.empty()) throw std::invalid_argument("chevron grids must be nonempty");
  ChevronResult out{f_if_grid, tau_grid, {}};
  out.p1.reserve(f_if_grid.size());
  for (double f_if : f_if_grid) {
    std::vector<double> row;
    row.reserve(tau_grid.size());
    for (double tau : tau_grid) {
      if (!(tau >= 0.0)) throw std::invalid_argument("pulse durations must be non-negative");
      if (tau == 0.0) {
        row.push_back(0.0);
        continue;
      }
      const IfProgram prog(f_if, tau, {CycleSpec{0.0, Envelope(EnvelopeShape::flat, tau, a_if)}});
      const DriveEnvelope drive = baseband_output(cfg, prog, BitTimeline{{mixer_on}});
      const double dt = std::min(suggested_dt(drive.peak_hz(), drive.carrier_hz() - q.freq_hz), tau / 20.0);
      row.push_back(evolve_detailed(q, drive, DensityMatrix::ground(), dt).final_state(1, 1).real());
    }
    out.p1.push_back(std::move(row));
  }
  return out;
}

double chevron_center(const ChevronResult& c) {
  const std::size_t n = c.f_if_hz.size();
  if (n < 3) throw std::invalid_argument("chevron center needs at least three f_if points");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(c.f_if_hz[i] > c.f_if_hz[i - 1])) throw std::invalid_argument("f_if grid must be increasing");
  }
  // Candidate axis at index m/2; compare rows mirrored about it, requiring
  // the mirror to cover at least a quarter of the grid.
  const std::size_t min_pairs = std::max<std::size_t>(1, n / 4);
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_m = n - 1;
  for (std::size_t m = 0; m <= 2 * (n - 1); ++m) {
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; 2 * i < m; ++i) {
      const std::size_t j = m - i;
      if (j >= n) continue;
      for (std::size_t k = 0; k < c.tau_s.size(); ++k) {
        const double d = c.p1[i][k] - c.p1[j][k];
        acc += d * d;
      }
      ++pairs;
    }
    if (pairs < min_pairs) continue;
    const double score = acc / static_cast<double>(pairs);
    if (score < best_score) {
      best_score = score;
      best_m = m;
    }
  }
  const std::size_t lo = best_m / 2;
  const std::size_t hi = best_m - lo;
  return 0.5 * (c.f_if_hz[lo] + c.f_if_hz[hi]);
}

std::vector<Matrix2c> execute_schedule(const Schedule& s, const std::vector<ExecutionTarget>& targets) {
  if (targets.size() != s.lowered.size()) throw std::invalid_argument("need one execution target per qubit");
  if (targets.empty()) throw std::invalid_argument("schedule has no qubits");
  const double f_if = targets.front().half_pi.f_if_hz;
  const double tau = targets.front().half_pi.tau_if;
  for (const auto& t : targets) {
    check_pulse(t.half_pi, 0.5 * kPi, "pi/2");
    if (t.half_pi.f_if_hz != f_if || t.half_pi.tau_if != tau) {
      throw std::invalid_argument("all qubits must share the IF frequency and pulse duration");
    }
  }

  std::vector<Matrix2c> out;
  out.reserve(targets.size());
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const auto& t = targets[q];
    std::vector<CycleSpec> cycles;
    BitTimeline bits;
    for (const auto& c : s.cycles) {
      cycles.push_back({c.theta_if_deg, Envelope(t.half_pi.shape, tau, t.half_pi.a_if)});
      bits.bits.push_back(std::find(c.fired.begin(), c.fired.end(), q) != c.fired.end());
    }
    if (cycles.empty()) {
      out.push_back(DensityMatrix::ground().matrix());
      continue;
    }
    const IfProgram prog(f_if, tau, std::move(cycles), s.mode);
    const DriveEnvelope drive = baseband_output(t.mixer, prog, bits);
    const double dt = std::min(suggested_dt(drive.peak_hz(), drive.carrier_hz() - t.qubit.freq_hz), tau / 50.0);
    out.push_back(evolve_detailed(t.qubit, drive, DensityMatrix::ground(), dt).final_state);
  }
  return out;
}

}  // namespace qcvz
