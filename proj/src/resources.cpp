#include "qcvz/resources.hpp"

#include <cmath>
#include <stdexcept>

#include "qcvz/mixer.hpp"

namespace qcvz {

PowerEstimate power_estimate(std::size_t n, double standby_pw, double peak_pw) {
  if (n == 0) throw std::invalid_argument("qubit count must be at least 1");
  if (!(standby_pw >= 0.0 && peak_pw >= standby_pw)) {
    throw std::invalid_argument("power levels need 0 <= standby <= peak");
  }
  const double avg = 0.5 * (standby_pw + peak_pw);
  return {avg, static_cast<double>(n) * avg * 1e-12};
}

std::size_t max_tones(double q, double bandwidth_hz, double f_c_hz) {
  if (!(q > 0.0 && bandwidth_hz > 0.0 && f_c_hz > 0.0)) {
    throw std::invalid_argument("Q, bandwidth and reference frequency must be positive");
  }
  const double count = bandwidth_hz * q / f_c_hz;
  // Floor, tolerating rounding just below an integer.
  return static_cast<std::size_t>(std::floor(count * (1.0 + 1e-12)));
}

std::size_t cable_count(std::size_t n, std::size_t tones_per_cable) {
  if (tones_per_cable == 0) throw std::invalid_argument("tones per cable must be at least 1");
  return (n + tones_per_cable - 1) / tones_per_cable;
}

ResourceReport resource_report(std::size_t n, const ResourceOptions& opts) {
  const auto power = power_estimate(n, opts.standby_pw, opts.peak_pw);
  const std::size_t tones = max_tones(opts.q, opts.bandwidth_hz, opts.f_c_hz);
  if (tones == 0) throw std::invalid_argument("bandwidth is narrower than one resonator linewidth");
  const double nd = static_cast<double>(n);
  return {n,
          opts.standby_pw,
          opts.peak_pw,
          power.avg_pw_per_qubit,
          power.total_w,
          kMaxOutputPowerPw,
          tones,
          cable_count(n, tones),
          1,
          nd / 8.0,
          nd};
}

std::vector<double> tone_plan(std::size_t count, double q, double f_c_hz) {
  if (!(q > 0.0 && f_c_hz > 0.0)) throw std::invalid_argument("Q and reference frequency must be positive");
  const double spacing = f_c_hz / q;
  if (static_cast<double>(count) * spacing >= f_c_hz) throw std::invalid_argument("tone plan reaches zero frequency");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = f_c_hz - static_cast<double>(count - 1 - i) * spacing;
  return out;
}

}  // namespace qcvz
