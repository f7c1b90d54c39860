#include "qcvz/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qcvz {

const char* to_string(Nonlinearity nl) {
  return nl == Nonlinearity::linear ? "linear" : "sine_saturating";
}

Nonlinearity nonlinearity_from_string(std::string_view name) {
  if (name == "linear") return Nonlinearity::linear;
  if (name == "sine_saturating") return Nonlinearity::sine_saturating;
  throw std::invalid_argument("unknown mixer nonlinearity: " + std::string(name));
}

void MixerConfig::validate() const {
  if (!(channel.freq_hz > 0.0)) throw std::invalid_argument("mixer LO frequency must be positive");
  if (!(channel.amp >= 0.0 && channel.amp <= 1.0)) {
    throw std::invalid_argument("mixer LO flux amplitude must lie in [0, 1]");
  }
  if (!(gain_hz_per_unit > 0.0) || !std::isfinite(gain_hz_per_unit)) {
    throw std::invalid_argument("mixer gain must be positive");
  }
  if (!(on_off_ratio_db > 0.0)) throw std::invalid_argument("on/off ratio must be positive");
  if (!(bpf_stopband_db >= 0.0)) throw std::invalid_argument("BPF stopband must be non-negative");
}

double MixerConfig::off_residual() const { return residual_from_ratio_db(on_off_ratio_db); }

double MixerConfig::lo_scale() const { return std::min(1.0, channel.amp / kNominalLoFlux); }

double residual_from_ratio_db(double ratio_db) {
  if (std::isinf(ratio_db) && ratio_db > 0.0) return 0.0;
  return std::pow(10.0, -ratio_db / 20.0);
}

double ratio_db_from_residual(double residual) {
  if (!(residual >= 0.0 && residual < 1.0)) throw std::invalid_argument("residual must lie in [0, 1)");
  if (residual == 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(residual);
}

namespace {

double unit_map(Nonlinearity nl, double a) {
  return nl == Nonlinearity::linear ? a : std::sin(0.5 * kPi * a);
}

}  // namespace

double amplitude_map(const MixerConfig& cfg, double a_if) {
  if (!(a_if >= 0.0 && a_if <= 1.0)) throw std::invalid_argument("A_if must lie in [0, 1]");
  return cfg.gain_hz_per_unit * unit_map(cfg.nonlinearity, a_if);
}

std::complex<double> DriveSegment::value(double t) const {
  const double a = envelope.value(t - start);
  if (a == 0.0) return {0.0, 0.0};
  return std::polar(scale_hz * unit_map(nonlinearity, a), phase);
}

DriveEnvelope::DriveEnvelope(double carrier_hz, double envelope_rate_hz, double t0)
    : carrier_hz_(carrier_hz), envelope_rate_(envelope_rate_hz), t0_(t0), t_end_(t0) {
  if (!(carrier_hz > 0.0)) throw std::invalid_argument("drive carrier must be positive");
  if (!(envelope_rate_hz > 0.0)) throw std::invalid_argument("envelope rate must be positive");
}

void DriveEnvelope::add_segment(const DriveSegment& seg) {
  if (seg.start < t0_) throw std::invalid_argument("segment starts before the drive");
  auto pos = std::upper_bound(segments_.begin(), segments_.end(), seg.start,
                              [](double t, const DriveSegment& s) { return t < s.start; });
  segments_.insert(pos, seg);
  max_segment_duration_ = std::max(max_segment_duration_, seg.envelope.duration());
  t_end_ = std::max(t_end_, seg.start + seg.envelope.duration());
}

void DriveEnvelope::extend_to(double t) { t_end_ = std::max(t_end_, t); }

void DriveEnvelope::append(const DriveEnvelope& other) {
  if (other.carrier_hz_ != carrier_hz_) throw std::invalid_argument("cannot append drives with different carriers");
  const double shift = t_end_ - other.t0_;
  const double new_end = t_end_ + other.duration();
  for (auto seg : other.segments_) {
    seg.start += shift;
    add_segment(seg);
  }
  t_end_ = std::max(t_end_, new_end);
}

std::complex<double> DriveEnvelope::value(double t, bool left_limit) const {
  const double te = left_limit ? std::nextafter(t, -std::numeric_limits<double>::infinity()) : t;
  std::complex<double> acc{0.0, 0.0};
  // Segments are sorted by start; only those starting in
  // (te - max_duration, te] can be active.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), te,
                             [](double x, const DriveSegment& s) { return x < s.start; });
  while (it != segments_.begin()) {
    --it;
    if (it->start + max_segment_duration_ <= te) break;
    acc += it->value(te);
  }
  return acc;
}

std::vector<double> DriveEnvelope::breakpoints() const {
  std::vector<double> pts{t0_, t_end_};
  for (const auto& seg : segments_) {
    pts.push_back(seg.start);
    pts.push_back(seg.start + seg.envelope.duration());
    if (seg.envelope.shape() == EnvelopeShape::triangular) pts.push_back(seg.start + 0.5 * seg.envelope.duration());
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double p) { return p < t0_ || p > t_end_; }), pts.end());
  return pts;
}

double DriveEnvelope::peak_hz() const {
  // Overlapping segments add, so sum the bounds of everything that overlaps.
  double peak = 0.0;
  for (const auto& a : segments_) {
    double acc = 0.0;
    for (const auto& b : segments_) {
      const bool overlap = b.start < a.start + a.envelope.duration() && a.start < b.start + b.envelope.duration();
      if (overlap) acc += std::abs(b.scale_hz) * unit_map(b.nonlinearity, b.envelope.peak());
    }
    peak = std::max(peak, acc);
  }
  return peak;
}

std::vector<std::complex<double>> DriveEnvelope::samples() const {
  const auto n = static_cast<std::size_t>(std::ceil(duration() * envelope_rate_));
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = value(t0_ + static_cast<double>(i) / envelope_rate_);
  return out;
}

DriveEnvelope baseband_output(const MixerConfig& cfg, const IfProgram& prog, const BitTimeline& bits) {
  cfg.validate();
  if (bits.bits.size() != prog.size()) {
    throw std::invalid_argument("bit timeline length does not match the IF program");
  }
  const double carrier = cfg.channel.freq_hz - prog.f_if_hz();
  if (!(carrier > 0.0)) throw std::invalid_argument("difference frequency f_lo - f_if must be positive");

  DriveEnvelope drive(carrier);
  const double on_scale = cfg.gain_hz_per_unit * cfg.lo_scale();
  const double off_scale = on_scale * cfg.off_residual();
  for (std::size_t i = 0; i < prog.size(); ++i) {
    const auto& cycle = prog.cycles()[i];
    if (!cycle.envelope) continue;
    const double scale = bits.bits[i] ? on_scale : off_scale;
    if (scale == 0.0) continue;
    drive.add_segment({prog.cycle_start(i), *cycle.envelope, scale,
                       wrap_two_pi(-deg_to_rad(cycle.theta_if_deg) + cfg.channel.phase), cfg.nonlinearity});
  }
  drive.extend_to(prog.total_duration());
  return drive;
}

std::vector<SpectralComponent> output_spectrum(const MixerConfig& cfg, const IfProgram& prog,
                                               const BitTimeline& bits, double rate_hz, double window_s) {
  cfg.validate();
  if (prog.size() == 0) throw std::invalid_argument("spectrum needs at least one cycle");
  if (bits.bits.size() != prog.size()) {
    throw std::invalid_argument("bit timeline length does not match the IF program");
  }
  const auto& first = prog.cycles().front();
  for (std::size_t i = 0; i < prog.size(); ++i) {
    const auto& c = prog.cycles()[i];
    if (!c.envelope || c.envelope->shape() != EnvelopeShape::flat) {
      throw std::invalid_argument("output spectrum requires a flat envelope");
    }
    if (c.envelope->peak() != first.envelope->peak() || c.theta_if_deg != first.theta_if_deg ||
        bits.bits[i] != bits.bits[0]) {
      throw std::invalid_argument("output spectrum requires a continuous-wave program");
    }
  }
  const double f_lo = cfg.channel.freq_hz;
  const double f_if = prog.f_if_hz();
  const double f_diff = f_lo - f_if;
  if (!(f_diff > 0.0)) throw std::invalid_argument("difference frequency f_lo - f_if must be positive");
  const double f_sum = f_lo + f_if;
  if (!(rate_hz > 2.0 * f_sum)) throw std::invalid_argument("sample rate violates the Nyquist criterion");

  const double a_on = cfg.lo_scale() * amplitude_map(cfg, first.envelope->peak());
  if (!(a_on > 0.0)) throw std::invalid_argument("on-state output is zero; no reference level");
  const double a_diff = bits.bits[0] ? a_on : a_on * cfg.off_residual();
  const double a_leak = a_on * residual_from_ratio_db(cfg.bpf_stopband_db);
  const double phase = -deg_to_rad(first.theta_if_deg) + cfg.channel.phase;

  const auto n = static_cast<std::size_t>(std::llround(window_s * rate_hz));
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    v[i] = a_diff * std::cos(kTwoPi * f_diff * t + phase) +
           a_leak * (std::cos(kTwoPi * f_sum * t) + std::cos(kTwoPi * f_lo * t) + std::cos(kTwoPi * f_if * t));
  }
  const SampledWaveform wf(rate_hz, 0.0, std::move(v), f_sum);

  auto level = [&](double f) { return 20.0 * std::log10(tone_amplitude(wf, f) / a_on); };
  return {{"difference", f_diff, level(f_diff)},
          {"sum", f_sum, level(f_sum)},
          {"lo", f_lo, level(f_lo)},
          {"if", f_if, level(f_if)}};
}

}  // namespace qcvz
