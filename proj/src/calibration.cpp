#include "qcvz/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "qcvz/errors.hpp"
#include "qcvz/fit.hpp"

namespace qcvz {

PulseTrain::PulseTrain(MixerConfig cfg, double f_if_hz)
    : cfg_(std::move(cfg)), f_if_hz_(f_if_hz), drive_(cfg_.channel.freq_hz - f_if_hz) {
  cfg_.validate();
}

PulseTrain& PulseTrain::pulse(double a_if, double tau_if, EnvelopeShape shape, double theta_if_deg, bool on) {
  const IfProgram prog(f_if_hz_, tau_if, {CycleSpec{theta_if_deg, Envelope(shape, tau_if, a_if)}}, PhaseMode::free);
  drive_.append(baseband_output(cfg_, prog, BitTimeline{{on}}));
  return *this;
}

PulseTrain& PulseTrain::pulse(const CalibratedPulse& p, double theta_if_deg) {
  if (p.f_lo_hz != cfg_.channel.freq_hz) throw std::invalid_argument("pulse was calibrated for a different LO tone");
  if (p.f_if_hz != f_if_hz_) throw std::invalid_argument("pulse was calibrated for a different IF frequency");
  if (p.a_if == 0.0) return delay(p.tau_if);
  return pulse(p.a_if, p.tau_if, p.shape, theta_if_deg, true);
}

PulseTrain& PulseTrain::delay(double seconds) {
  if (!(seconds >= 0.0)) throw std::invalid_argument("delay must be non-negative");
  drive_.extend_to(drive_.t_end() + seconds);
  return *this;
}

namespace {

double train_dt(const QubitParams& q, const PulseTrain& train, double shortest_feature) {
  const double det = train.drive().carrier_hz() - q.freq_hz;
  return std::min(suggested_dt(train.peak_hz(), det), shortest_feature / 50.0);
}

Matrix2c run_train(const QubitParams& q, const PulseTrain& train, double shortest_feature) {
  return evolve_detailed(q, train.drive(), DensityMatrix::ground(), train_dt(q, train, shortest_feature)).final_state;
}

double bloch_angle(const Matrix2c& rho) {
  const double z = (rho(0, 0) - rho(1, 1)).real();
  const double xy = 2.0 * std::abs(rho(0, 1));
  return std::atan2(xy, z);
}

// One-dimensional calibration variable: the IF amplitude at fixed duration,
// or the duration at fixed amplitude.
struct Knob {
  bool vary_amplitude;
  double fixed_value;
  double upper;

  double a_if(double x) const { return vary_amplitude ? x : fixed_value; }
  double tau(double x) const { return vary_amplitude ? fixed_value : x; }
};

class Calibrator {
 public:
  Calibrator(const QubitParams& q, const MixerConfig& cfg, const CalibrationOptions& opts, Knob knob)
      : q_(q), cfg_(cfg), opts_(opts), knob_(knob), f_if_(cfg.channel.freq_hz - q.freq_hz) {
    if (!(f_if_ > 0.0)) throw std::invalid_argument("resonant drive needs f_lo > f_qubit");
  }

  CalibratedPulse make(double x, double target) const {
    return {cfg_.channel.freq_hz, f_if_, knob_.a_if(x), knob_.tau(x), target, opts_.shape};
  }

  // State after `prefix` (optional) followed by n repetitions of the pulse.
  Matrix2c sequence(double x, int n, const CalibratedPulse* prefix) const {
    PulseTrain train(cfg_, f_if_);
    double shortest = knob_.tau(x);
    if (prefix) {
      train.pulse(*prefix, opts_.theta_if_deg);
      shortest = std::min(shortest, prefix->tau_if);
    }
    for (int i = 0; i < n; ++i) {
      if (x > 0.0) train.pulse(knob_.a_if(x), knob_.tau(x), opts_.shape, opts_.theta_if_deg);
    }
    if (train.drive().duration() == 0.0) return DensityMatrix::ground().matrix();
    return run_train(q_, train, shortest);
  }

  double p1(double x) const { return x == 0.0 ? 0.0 : sequence(x, 1, nullptr)(1, 1).real(); }
  double angle(double x) const { return x == 0.0 ? 0.0 : bloch_angle(sequence(x, 1, nullptr)); }

  double coarse(double target) const {
    const double goal = std::pow(std::sin(0.5 * target), 2);
    constexpr int kGrid = 64;
    double prev_x = 0.0, prev_p = 0.0;
    for (int j = 1; j <= kGrid; ++j) {
      const double x = knob_.upper * j / kGrid;
      const double p = p1(x);
      if (p >= goal) return bisect(prev_x, x, goal);
      if (p < prev_p) {
        // Passed the first maximum without reaching the goal; the goal is
        // reachable only if the maximum is within tolerance of it.
        const double x_max = golden_max(std::max(0.0, prev_x - knob_.upper / kGrid), x);
        if (goal - p1(x_max) <= opts_.coarse_p1_tolerance) return x_max;
        break;
      }
      prev_x = x;
      prev_p = p;
    }
    if (goal - prev_p <= opts_.coarse_p1_tolerance && prev_x > 0.0) return prev_x;
    throw NumericalError("target rotation is unreachable within the allowed amplitude/duration");
  }

  // Drives the amplified signal to zero. Returns the refined knob value.
  double amplify(double x, int n, double target, const CalibratedPulse* prefix) const {
    const double offset = prefix ? 0.25 * kPi : 0.0;
    const double ideal = std::pow(std::sin(0.5 * n * target + offset), 2);
    auto signal = [&](double v) { return sequence(v, n, prefix)(1, 1).real() - ideal; };

    double x0 = x;
    double x1 = x * (x * (1.0 + 1e-4) <= knob_.upper ? 1.0 + 1e-4 : 1.0 - 1e-4);
    double s0 = signal(x0);
    double s1 = signal(x1);
    for (int it = 0; it < opts_.max_iterations; ++it) {
      if (std::abs(s1) < opts_.signal_tolerance) return x1;
      if (s1 == s0) break;
      double x2 = x1 - s1 * (x1 - x0) / (s1 - s0);
      // Stay within one branch of the amplified oscillation.
      const double max_step = 0.25 * std::abs(x) / n;
      x2 = std::clamp(x2, x1 - max_step, x1 + max_step);
      x2 = std::clamp(x2, 0.0, knob_.upper);
      if (std::abs(x2 - x1) <= 1e-15 * std::max(1.0, std::abs(x1))) return x2;
      x0 = x1;
      s0 = s1;
      x1 = x2;
      s1 = signal(x1);
    }
    if (std::abs(s1) < 1e3 * opts_.signal_tolerance) return x1;
    throw NumericalError("error amplification did not converge for a " + std::to_string(n) + "-pulse sequence");
  }

 private:
  double bisect(double lo, double hi, double goal) const {
    for (int it = 0; it < opts_.max_iterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double p = p1(mid);
      if (std::abs(p - goal) < opts_.coarse_p1_tolerance) return mid;
      (p < goal ? lo : hi) = mid;
    }
    throw NumericalError("coarse calibration did not converge");
  }

  double golden_max(double lo, double hi) const {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = p1(c), fd = p1(d);
    for (int it = 0; it < 80; ++it) {
      if (fc > fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - g * (hi - lo);
        fc = p1(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + g * (hi - lo);
        fd = p1(d);
      }
    }
    return 0.5 * (lo + hi);
  }

  const QubitParams& q_;
  const MixerConfig& cfg_;
  const CalibrationOptions& opts_;
  Knob knob_;
  double f_if_;
};

// Mean of the normalized drive over one envelope (1 for flat at A = 1).
double fill_factor(const MixerConfig& cfg, EnvelopeShape shape, double a_if) {
  const Envelope env(shape, 1.0, a_if);
  constexpr int kSamples = 2000;
  double acc = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double a = env.value((i + 0.5) / kSamples);
    acc += amplitude_map(cfg, a);
  }
  return acc / kSamples;
}

}  // namespace

double measure_rotation_angle(const QubitParams& q, const MixerConfig& cfg, const CalibratedPulse& p,
                              double theta_if_deg) {
  if (p.a_if == 0.0) return 0.0;
  PulseTrain train(cfg, p.f_if_hz);
  train.pulse(p, theta_if_deg);
  return bloch_angle(run_train(q, train, p.tau_if));
}

CalibratedPulse calibrate_pulse(const QubitParams& q, const MixerConfig& cfg, double target_angle,
                                std::variant<FixedDuration, FixedAmplitude> fixed, const CalibrationOptions& opts,
                                CalibrationTrace* trace) {
  cfg.validate();
  if (!(target_angle >= 0.0 && target_angle <= kPi + 1e-12)) {
    throw std::invalid_argument("target angle must lie in [0, pi]");
  }

  Knob knob{};
  if (const auto* fd = std::get_if<FixedDuration>(&fixed)) {
    if (!(fd->tau_if > 0.0)) throw std::invalid_argument("fixed duration must be positive");
    knob = {true, fd->tau_if, 1.0};
  } else {
    const double a = std::get<FixedAmplitude>(fixed).a_if;
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("fixed amplitude must lie in (0, 1]");
    const double rate = cfg.lo_scale() * fill_factor(cfg, opts.shape, a);
    if (!(rate > 0.0)) throw NumericalError("drive is zero at the fixed amplitude");
    // Duration reaching 1.5x the largest target (pi) at the mean drive rate.
    knob = {false, a, 1.5 * kPi / (kTwoPi * rate)};
  }

  // Decoherence shortens the Bloch vector but does not set the rotation, so
  // the search runs on the coherent dynamics.
  const QubitParams coherent = q.without_decoherence();
  const Calibrator cal(coherent, cfg, opts, knob);
  if (target_angle == 0.0) {
    if (!knob.vary_amplitude) throw std::invalid_argument("a zero rotation needs a fixed duration");
    if (trace) *trace = {};
    return cal.make(0.0, 0.0);
  }

  double x = cal.coarse(target_angle);
  double error = std::abs(cal.angle(x) - target_angle);
  if (trace) {
    *trace = {};
    trace->coarse_error = error;
  }

  std::optional<CalibratedPulse> half_pi;
  for (int k : opts.amplification_k) {
    if (error < opts.angle_tolerance) break;
    const int n = 2 * k + 1;
    const CalibratedPulse* prefix = nullptr;
    if (std::abs(std::sin(n * target_angle)) < 0.5) {
      if (!half_pi) {
        half_pi = calibrate_pulse(coherent, cfg, 0.5 * kPi, fixed, opts, nullptr);
      }
      prefix = &*half_pi;
    }
    const double candidate = cal.amplify(x, n, target_angle, prefix);
    const double candidate_error = std::abs(cal.angle(candidate) - target_angle);
    if (!(candidate_error < error)) break;
    x = candidate;
    error = candidate_error;
    if (trace) {
      trace->sequence_lengths.push_back(n);
      trace->stage_errors.push_back(error);
    }
  }
  return cal.make(x, target_angle);
}

ResidualRatioCurve residual_ratio(const QubitParams& q, const MixerConfig& cfg, const std::vector<double>& a_if_grid) {
  cfg.validate();
  const double f_if = cfg.channel.freq_hz - q.freq_hz;
  if (!(f_if > 0.0)) throw std::invalid_argument("resonant drive needs f_lo > f_qubit");
  const FitModel model = q.is_closed() ? FitModel::rabi_sinusoid : FitModel::damped_cosine;
  constexpr int kPoints = 161;
  constexpr double kPeriods = 3.0;

  // Rabi frequency of a long flat pulse, sampled along one trajectory.
  auto rabi_frequency = [&](double a_if, bool on, double expected_hz) {
    const double window = kPeriods / expected_hz;
    PulseTrain train(cfg, f_if);
    train.pulse(a_if, window, EnvelopeShape::flat, 0.0, on);
    EvolveOptions opts;
    for (int i = 0; i < kPoints; ++i) opts.record_times.push_back(window * i / (kPoints - 1));
    const double dt = std::min(suggested_dt(train.peak_hz(), 0.0, expected_hz), window / 600.0);
    const auto traj = evolve_detailed(q, train.drive(), DensityMatrix::ground(), dt, opts).trajectory;
    if (*std::max_element(traj.p1.begin(), traj.p1.end()) < 1e-12) return 0.0;
    return fit_curve(model, traj.times, traj.p1).value("frequency");
  };

  ResidualRatioCurve out;
  for (double a : a_if_grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("A_if grid must lie within [0, 1]");
    const double expected_on = cfg.lo_scale() * amplitude_map(cfg, a);
    if (expected_on <= 0.0) {
      out.dropped_a_if.push_back(a);
      continue;
    }
    try {
      const double on = rabi_frequency(a, true, expected_on);
      const double eps = cfg.off_residual();
      const double off = eps == 0.0 ? 0.0 : rabi_frequency(a, false, on * eps);
      out.points.push_back({a, on, off, off / on});
    } catch (const NumericalError&) {
      out.dropped_a_if.push_back(a);
    }
  }
  return out;
}

}  // namespace qcvz
