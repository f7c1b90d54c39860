#include "qcvz/compiler.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>

namespace qcvz {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

Matrix2c z_matrix(double phi) {
  Matrix2c m = Matrix2c::Zero();
  m(0, 0) = std::polar(1.0, -0.5 * phi);
  m(1, 1) = std::polar(1.0, 0.5 * phi);
  return m;
}

Matrix2c diag(cd a, cd b) {
  Matrix2c m = Matrix2c::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Matrix2c gate_matrix(const Gate& g) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::X90:
      return axis_rotation(0.0, 0.5 * kPi);
    case GateKind::X180:
      return axis_rotation(0.0, kPi);
    case GateKind::Z:
      return z_matrix(g.angle);
    case GateKind::H: {
      Matrix2c m;
      m << r, r, r, -r;
      return m;
    }
    case GateKind::S:
      return diag(1.0, kI);
    case GateKind::Sdg:
      return diag(1.0, -kI);
    case GateKind::T:
      return diag(1.0, std::polar(1.0, 0.25 * kPi));
    case GateKind::Tdg:
      return diag(1.0, std::polar(1.0, -0.25 * kPi));
  }
  throw std::logic_error("unhandled gate kind");
}

// Z angle contributed by a frame-only gate, or nullopt for a pulse gate.
std::optional<double> frame_angle(const Gate& g) {
  switch (g.kind) {
    case GateKind::Z:
      return g.angle;
    case GateKind::S:
      return 0.5 * kPi;
    case GateKind::Sdg:
      return -0.5 * kPi;
    case GateKind::T:
      return 0.25 * kPi;
    case GateKind::Tdg:
      return -0.25 * kPi;
    default:
      return std::nullopt;
  }
}

int eighths(double angle) {
  const double k = angle / (0.25 * kPi);
  const double kr = std::round(k);
  if (std::abs(k - kr) > 1e-9) {
    throw std::invalid_argument("quantized mode needs Z angles that are multiples of pi/4");
  }
  return static_cast<int>(kr);
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  double parse() {
    double v = term();
    if (pos_ != s_.size()) fail();
    return v;
  }

 private:
  double term() {
    double v = factor();
    while (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '/')) {
      const char op = s_[pos_++];
      const double rhs = factor();
      if (op == '*') {
        v *= rhs;
      } else {
        if (rhs == 0.0) fail();
        v /= rhs;
      }
    }
    return v;
  }

  double factor() {
    double sign = 1.0;
    while (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      if (s_[pos_++] == '-') sign = -sign;
    }
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return sign * kPi;
    }
    double v = 0.0;
    const auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (res.ec != std::errc()) fail();
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    return sign * v;
  }

  [[noreturn]] void fail() const { throw std::invalid_argument("bad Z angle expression: " + std::string(s_)); }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Gate Gate::z(double angle) {
  if (!std::isfinite(angle)) throw std::invalid_argument("Z angle must be finite");
  return {GateKind::Z, wrap_pi(angle)};
}

std::string to_string(const Gate& g) {
  switch (g.kind) {
    case GateKind::X90:
      return "X90";
    case GateKind::X180:
      return "X180";
    case GateKind::Z: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "Z(%.17g)", g.angle);
      return buf;
    }
    case GateKind::H:
      return "H";
    case GateKind::S:
      return "S";
    case GateKind::Sdg:
      return "Sdg";
    case GateKind::T:
      return "T";
    case GateKind::Tdg:
      return "Tdg";
  }
  throw std::logic_error("unhandled gate kind");
}

Gate parse_gate(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  static const std::map<std::string, Gate, std::less<>> fixed{
      {"X90", Gate::x90()}, {"X180", Gate::x180()}, {"H", Gate::h()},    {"S", Gate::s()},
      {"Sdg", Gate::sdg()}, {"T", Gate::t()},       {"Tdg", Gate::tdg()}};
  if (auto it = fixed.find(s); it != fixed.end()) return it->second;
  if (s.size() > 3 && s.front() == 'Z' && s[1] == '(' && s.back() == ')') {
    return Gate::z(ExprParser(std::string_view(s).substr(2, s.size() - 3)).parse());
  }
  throw std::invalid_argument("unknown gate: " + std::string(text));
}

FrameTracker::FrameTracker(PhaseMode mode) : mode_(mode) {}

void FrameTracker::rotate(double angle) {
  if (mode_ == PhaseMode::quantized45) {
    eighths_ = (eighths_ + eighths(angle)) % 8;
    if (eighths_ < 0) eighths_ += 8;
  } else {
    frame_ = wrap_two_pi(frame_ + angle);
  }
}

void FrameTracker::pulse(std::vector<double>& theta_if_deg) const {
  theta_if_deg.push_back(mode_ == PhaseMode::quantized45 ? 45.0 * eighths_ : wrap_360(rad_to_deg(frame_)));
}

void FrameTracker::apply(const Gate& g, std::vector<double>& theta_if_deg) {
  switch (g.kind) {
    case GateKind::X90:
      pulse(theta_if_deg);
      break;
    case GateKind::X180:
      pulse(theta_if_deg);
      pulse(theta_if_deg);
      break;
    case GateKind::H:
      rotate(0.5 * kPi);
      pulse(theta_if_deg);
      rotate(0.5 * kPi);
      break;
    default:
      rotate(*frame_angle(g));
  }
}

double FrameTracker::frame() const {
  return wrap_pi(mode_ == PhaseMode::quantized45 ? eighths_ * 0.25 * kPi : frame_);
}

LoweredQubit lower(const std::vector<Gate>& gates, PhaseMode mode) {
  LoweredQubit out;
  FrameTracker tracker(mode);
  for (const auto& g : gates) tracker.apply(g, out.theta_if_deg);
  out.final_frame = tracker.frame();
  return out;
}

Matrix2c axis_rotation(double phi, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  Matrix2c m;
  m << c, -kI * s * std::polar(1.0, -phi), -kI * s * std::polar(1.0, phi), c;
  return m;
}

Matrix2c ideal_unitary(const std::vector<Gate>& gates) {
  Matrix2c u = Matrix2c::Identity();
  for (const auto& g : gates) u = gate_matrix(g) * u;
  return u;
}

Matrix2c lowered_unitary(const LoweredQubit& lq) {
  Matrix2c u = Matrix2c::Identity();
  for (double theta : lq.theta_if_deg) u = axis_rotation(-deg_to_rad(theta), 0.5 * kPi) * u;
  return z_matrix(lq.final_frame) * u;
}

double phase_distance(const Matrix2c& u, const Matrix2c& v) {
  // Norm at the optimal phase arg tr(V^H U), evaluated directly.
  const std::complex<double> tr = (v.adjoint() * u).trace();
  const std::complex<double> phase = std::abs(tr) > 0.0 ? tr / std::abs(tr) : 1.0;
  return (u - phase * v).norm();
}

bool equivalent(const Matrix2c& u, const Matrix2c& v, double tol) { return phase_distance(u, v) < tol; }

Program random_program(std::size_t n, std::size_t pulses, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> k(0, 7);
  Program p;
  p.qubits.resize(n);
  for (auto& gates : p.qubits) {
    for (std::size_t i = 0; i < pulses; ++i) {
      if (i > 0) gates.push_back(Gate::z(k(rng) * 0.25 * kPi));
      gates.push_back(Gate::x90());
    }
  }
  return p;
}

std::vector<std::size_t> Schedule::cycles_of(std::size_t q) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    if (std::find(cycles[c].fired.begin(), cycles[c].fired.end(), q) != cycles[c].fired.end()) out.push_back(c);
  }
  return out;
}

Schedule schedule(const Program& p, PhaseMode mode, const ScheduleOptions& opts) {
  if (p.size() == 0) throw std::invalid_argument("program needs at least one qubit");
  std::vector<LoweredQubit> lowered;
  lowered.reserve(p.size());
  for (const auto& gates : p.qubits) lowered.push_back(lower(gates, mode));
  return schedule_lowered(std::move(lowered), mode, opts);
}

Schedule schedule_lowered(std::vector<LoweredQubit> lowered, PhaseMode mode, const ScheduleOptions& opts) {
  if (lowered.empty()) throw std::invalid_argument("program needs at least one qubit");
  const std::size_t n = lowered.size();
  std::size_t remaining = 0;
  for (const auto& lq : lowered) {
    remaining += lq.theta_if_deg.size();
    if (mode == PhaseMode::quantized45) {
      for (double th : lq.theta_if_deg) {
        if (std::fmod(th, 45.0) != 0.0 || th < 0.0 || th >= 360.0) {
          throw std::invalid_argument("quantized schedule needs theta_if in {0, 45, ..., 315}");
        }
      }
    }
  }

  Schedule s;
  s.mode = mode;
  std::vector<std::size_t> next(n, 0);
  std::size_t layer = 0;

  // Ready = has pulses left and, in layered mode, is at the current layer.
  auto ready = [&](std::size_t q) {
    const auto& th = lowered[q].theta_if_deg;
    return next[q] < th.size() && (!opts.layered || next[q] == layer);
  };
  auto advance_layer = [&] {
    if (!opts.layered) return;
    for (std::size_t q = 0; q < n; ++q) {
      if (next[q] == layer && next[q] < lowered[q].theta_if_deg.size()) return;
    }
    ++layer;
  };

  std::size_t slot = 0;
  while (remaining > 0) {
    advance_layer();
    double theta = 0.0;
    if (mode == PhaseMode::quantized45) {
      theta = 45.0 * static_cast<double>(slot % 8);
    } else {
      std::map<double, std::size_t> demand;
      for (std::size_t q = 0; q < n; ++q) {
        if (ready(q)) ++demand[lowered[q].theta_if_deg[next[q]]];
      }
      std::size_t best = 0;
      for (const auto& [th, count] : demand) {
        if (count > best) {
          best = count;
          theta = th;
        }
      }
    }
    ScheduledCycle cycle{slot, theta, {}};
    for (std::size_t q = 0; q < n; ++q) {
      if (ready(q) && lowered[q].theta_if_deg[next[q]] == theta) cycle.fired.push_back(q);
    }
    for (std::size_t q : cycle.fired) ++next[q];
    remaining -= cycle.fired.size();
    if (!cycle.fired.empty() || !opts.skip_idle) s.cycles.push_back(std::move(cycle));
    ++slot;
  }
  s.lowered = std::move(lowered);
  return s;
}

ParallelismStats parallelism_stats(const Schedule& s) {
  ParallelismStats st;
  st.cycles = s.cycles.size();
  if (st.cycles == 0) return st;
  std::size_t total = 0;
  for (const auto& c : s.cycles) {
    const std::size_t k = c.fired.size();
    total += k;
    st.max_fired = std::max(st.max_fired, k);
    if (k > 0 && (st.min_nonzero_fired == 0 || k < st.min_nonzero_fired)) st.min_nonzero_fired = k;
  }
  st.mean_fired = static_cast<double>(total) / static_cast<double>(st.cycles);
  return st;
}

}  // namespace qcvz
