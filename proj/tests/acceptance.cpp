// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gate_oracle.hpp"
#include "json.hpp"
#include "qcvz/calibration.hpp"
#include "qcvz/cli.hpp"
#include "qcvz/compiler.hpp"
#include "qcvz/config.hpp"
#include "qcvz/experiments.hpp"
#include "qcvz/fit.hpp"
#include "qcvz/mixer.hpp"
#include "qcvz/qubit.hpp"
#include "qcvz/resources.hpp"

using namespace qcvz;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kSource = QCVZ_SOURCE_DIR;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const DeviceConfig& single_qubit() {
  static const DeviceConfig cfg = load_device_config(kSource / "configs/single_qubit.json");
  return cfg;
}

Outcome chevron_center_criterion() {
  const auto& cfg = single_qubit();
  const double f_expected = 3.46798e9;
  const double step = 0.2e6;
  // Grid offset from the expected axis so the center is not a grid point.
  std::vector<double> f_if;
  for (int k = -100; k <= 100; ++k) f_if.push_back(f_expected + 0.07e6 + k * step);
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = chevron(cfg.qubits[0], cfg.mixer(0), f_if, linspace(0.0, 1e-6, 51));
  const double center = chevron_center(c);
  const double elapsed = seconds_since(t0);
  const double err = std::abs(center - f_expected);
  return {err <= step && elapsed < 60.0,
          fmt("center %.6f GHz, |error| %.3f MHz (step 0.2 MHz), %.1f s", center * 1e-9, err * 1e-6, elapsed)};
}

json run_cli_json(const std::vector<std::string>& args, const fs::path& out_dir) {
  std::vector<std::string> full = args;
  full.push_back("--out");
  full.push_back(out_dir.string());
  std::ostringstream out, err;
  if (run_cli(full, out, err) != kExitOk) throw std::runtime_error("qcvz " + args[0] + " failed: " + err.str());
  std::istringstream lines(out.str());
  std::string line;
  while (std::getline(lines, line)) {
    if (line.size() > 5 && line.compare(line.size() - 5, 5, ".json") == 0) {
      std::ifstream in(line);
      return json::parse(in);
    }
  }
  throw std::runtime_error("qcvz " + args[0] + " wrote no JSON");
}

Outcome coherence_criterion() {
  const fs::path out = fs::temp_directory_path() / "qcvz-acceptance";
  fs::remove_all(out);
  const std::string cfg = (kSource / "configs/single_qubit.json").string();
  auto fit_value = [&](const std::vector<std::string>& args, const char* name) {
    return run_cli_json(args, out)["fit"]["params"][name]["value"].get<double>();
  };
  const double t1 = fit_value({"t1", "--config", cfg}, "tau");
  const double t2e = fit_value({"echo", "--config", cfg}, "tau");
  bool ok = std::abs(t1 / 25.3e-6 - 1.0) < 0.02 && std::abs(t2e / 17.0e-6 - 1.0) < 0.02;
  std::string detail = fmt("T1 %.3f us, T2e %.3f us; Ramsey", t1 * 1e6, t2e * 1e6);
  for (double df : {0.05e6, 0.34e6, 1.01e6}) {
    const double f = fit_value({"ramsey", "--config", cfg, "--detuning-hz", fmt("%.17g", df)}, "frequency");
    ok = ok && std::abs(f / df - 1.0) < 0.01;
    detail += fmt(" %.5f/%.2f MHz", f * 1e-6, df * 1e-6);
  }
  fs::remove_all(out);
  return {ok, detail};
}

Outcome vz_ramsey_criterion() {
  const auto& cfg = single_qubit();
  const auto q = cfg.qubits[0].without_decoherence();
  const auto m = cfg.mixer(0);
  const ExperimentSetup s{q, m,
                          {calibrate_pulse(q, m, 0.5 * kPi, FixedDuration{100e-9}),
                           calibrate_pulse(q, m, kPi, FixedDuration{100e-9})}};
  std::vector<double> dtheta;
  for (int k = 0; k < 72; ++k) dtheta.push_back(5.0 * k);
  const auto c = run_vz_ramsey(s, dtheta, 20e-9);
  double worst = 0.0;
  for (std::size_t i = 0; i < dtheta.size(); ++i) {
    worst = std::max(worst, std::abs(c.p1[i] - 0.5 * (1.0 + std::cos(deg_to_rad(dtheta[i])))));
  }
  return {worst < 1e-3, fmt("max |p1 - (1 + cos)/2| = %.2e over 72 steps", worst)};
}

Outcome gate_oracle_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = oracle::ExhaustiveChecker(8).run();
  const double elapsed = seconds_since(t0);
  std::uint64_t expected = 0, pow = 1;
  for (int L = 1; L <= 8; ++L) expected += (pow *= 15);
  bool ok = r.programs == expected && r.worst < 1e-9;

  const Program demo = load_program(kSource / "programs/three_qubit_demo.json");
  const double f_if = 3.5e9, tau = 40e-9;
  std::vector<ExecutionTarget> targets;
  for (double f_lo : {8.259e9, 8.514e9, 8.758e9}) {
    const MixerConfig mc{{f_lo, kNominalLoFlux, 0.0}, 10e6, INFINITY, Nonlinearity::sine_saturating, 60.0};
    const auto q = QubitParams::closed(f_lo - f_if);
    targets.push_back({q, mc, calibrate_pulse(q, mc, 0.5 * kPi, FixedDuration{tau})});
  }
  const auto finals = execute_schedule(schedule(demo, PhaseMode::quantized45), targets);
  double worst_pop = 0.0;
  for (std::size_t q = 0; q < demo.size(); ++q) {
    const Matrix2c u = ideal_unitary(demo.qubits[q]);
    worst_pop = std::max(worst_pop, std::abs(finals[q](1, 1).real() - std::norm(u(1, 0))));
  }
  ok = ok && worst_pop < 1e-3;
  return {ok, fmt("%.0f programs, worst phase distance %.2e (%.0f s); end-to-end population error %.2e",
                  static_cast<double>(r.programs), r.worst, elapsed, worst_pop)};
}

Outcome scheduling_criterion() {
  const std::size_t n = 800;
  Program uniform;
  for (std::size_t q = 0; q < n; ++q) uniform.qubits.push_back({Gate::x90(), Gate::t(), Gate::x90(), Gate::s(), Gate::x90()});
  const auto u = parallelism_stats(schedule(uniform, PhaseMode::quantized45));

  const auto prog = random_program(n, 200, 20240901);
  const auto layered = parallelism_stats(schedule(prog, PhaseMode::quantized45, {true, true}));
  const auto async = parallelism_stats(schedule(prog, PhaseMode::quantized45));
  const double target = n / 8.0;
  const bool ok = u.mean_fired == static_cast<double>(n) && std::abs(layered.mean_fired / target - 1.0) < 0.05;
  return {ok, fmt("uniform mean %.0f; random layered mean %.2f vs N/8 = %.0f; unsynchronized mean %.2f",
                  u.mean_fired, layered.mean_fired, target, async.mean_fired)};
}

Outcome switching_criterion() {
  const auto cfg = load_device_config(kSource / "configs/three_channel.json");
  const double expected[] = {28.5, 45.1, 39.0};
  bool ok = true;
  std::string detail = "on/off";
  for (std::size_t k = 0; k < 3; ++k) {
    const auto m = cfg.mixer(k);
    const auto prog = make_if_program(cfg.if_defaults.freq_hz, 1e-6,
                                      {{0.0, Envelope(EnvelopeShape::flat, 1e-6, 1.0)}}, PhaseMode::free);
    const auto on = output_spectrum(m, prog, BitTimeline::all_on(1), 32.768e9);
    const auto off = output_spectrum(m, prog, BitTimeline::all_off(1), 32.768e9);
    const double ratio = on[0].power_db - off[0].power_db;
    ok = ok && std::abs(ratio - expected[k]) <= 0.1;
    detail += fmt(" %.3f", ratio);
  }
  detail += " dB; residual ratio";
  const auto& f3 = single_qubit();
  auto m = f3.mixer(0);
  m.on_off_ratio_db = -20.0 * std::log10(0.05);
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i);
  const auto curve = residual_ratio(f3.qubits[0], m, grid);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : curve.points) {
    lo = std::min(lo, p.ratio);
    hi = std::max(hi, p.ratio);
    ok = ok && std::abs(p.ratio - 0.05) <= 0.005;
  }
  ok = ok && curve.points.size() == grid.size();
  detail += fmt(" in [%.5f, %.5f] over %.0f A_if points", lo, hi, static_cast<double>(curve.points.size()));
  return {ok, detail};
}

Outcome phase_criterion() {
  auto m = single_qubit().mixer(0);
  m.channel.phase = 0.37;
  std::vector<double> x, y;
  double unwrap = 0.0, prev = 0.0;
  for (int k = 0; k < 8; ++k) {
    const auto prog = make_if_program(3.46798e9, 10e-9, {{45.0 * k, Envelope(EnvelopeShape::flat, 10e-9, 1.0)}});
    const double ph = std::arg(baseband_output(m, prog, BitTimeline::all_on(1)).value(5e-9));
    if (k > 0) unwrap += wrap_pi(ph - prev);
    prev = ph;
    x.push_back(deg_to_rad(45.0 * k));
    y.push_back(unwrap);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double n = static_cast<double>(x.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {std::abs(slope + 1.0) <= 1e-9, fmt("slope %.12f", slope)};
}

Outcome resources_criterion() {
  const double p = power_estimate(1).avg_pw_per_qubit;
  const auto tones = max_tones(1e4, 2e9, 5e9);
  const auto cables = cable_count(1000000, 4000);
  const bool ok = std::abs(p - 110.96) < 1e-9 && tones == 4000 && cables == 250;
  return {ok, fmt("%.2f pW/qubit, %.0f tones, %.0f cables", p, static_cast<double>(tones), static_cast<double>(cables))};
}

Outcome numerics_criterion() {
  double worst = 0.0;
  const double f_q = 5e9;
  const auto q = QubitParams::closed(f_q);
  for (double rabi : {0.5e6, 1e6, 2e6, 5e6, 10e6}) {
    for (double det : {-5e6, -1e6, 0.0, 1e6, 5e6}) {
      DriveEnvelope d(f_q + det);
      d.add_segment({0.0, Envelope(EnvelopeShape::flat, 2e-6, 1.0), rabi, 0.0, Nonlinearity::linear});
      const auto traj = evolve(q, d, DensityMatrix::ground(), suggested_dt(rabi, det));
      for (std::size_t i = 0; i < traj.times.size(); ++i) {
        worst = std::max(worst, std::abs(traj.p1[i] - rabi_analytic(kTwoPi * rabi, kTwoPi * det, traj.times[i])));
      }
    }
  }
  // 1e5 steps of a randomly driven open qubit.
  const QubitParams open(f_q, 5e-6, 8e-6);
  DriveEnvelope d(f_q + 0.5e6);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amp(0.0, 3e6), ph(0.0, kTwoPi);
  for (int k = 0; k < 100; ++k) {
    d.add_segment({k * 100e-9, Envelope(EnvelopeShape::triangular, 100e-9, 1.0), amp(rng), ph(rng),
                   Nonlinearity::linear});
  }
  const auto r = evolve_detailed(open, d, DensityMatrix::ground(), 1e-10);
  const double trace_err = std::abs(r.final_state.trace() - 1.0);
  const bool ok = worst < 1e-5 && trace_err < 1e-9 && r.steps >= 100000;
  return {ok, fmt("max |dp1| %.2e over 5x5 grid; trace error %.2e after %.0f steps", worst, trace_err,
                  static_cast<double>(r.steps))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"chevron center", chevron_center_criterion},
      {"coherence recovery", coherence_criterion},
      {"virtual-Z Ramsey", vz_ramsey_criterion},
      {"gate-sequence oracle", gate_oracle_criterion},
      {"scheduling bounds", scheduling_criterion},
      {"switching", switching_criterion},
      {"phase control", phase_criterion},
      {"resources", resources_criterion},
      {"numerics", numerics_criterion},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
