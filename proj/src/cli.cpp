#include "qcvz/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "qcvz/artifacts.hpp"
#include "qcvz/calibration.hpp"
#include "qcvz/compiler.hpp"
#include "qcvz/config.hpp"
#include "qcvz/errors.hpp"
#include "qcvz/experiments.hpp"
#include "qcvz/fit.hpp"
#include "qcvz/plot.hpp"
#include "qcvz/resources.hpp"

namespace qcvz {

using nlohmann::json;

namespace {

constexpr double kDefaultPulseDuration = 100e-9;

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t qubit = 0;
  bool plot = false;
};

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

json fit_json(const FitResult& f) {
  json j;
  j["model"] = to_string(f.model);
  for (const auto& p : f.params) {
    j["params"][p.name] = {{"value", std::isinf(p.value) ? json("inf") : json(p.value)}, {"sigma", p.sigma}};
  }
  j["residual_norm"] = f.residual_norm;
  j["max_abs_residual"] = f.max_abs_residual;
  return j;
}

CsvTable trajectory_table(const Trajectory& t, const char* xname = "t_s") {
  CsvTable tab{{xname, "p1"}, {}};
  for (std::size_t i = 0; i < t.times.size(); ++i) tab.rows.push_back({t.times[i], t.p1[i]});
  return tab;
}

class Runner {
 public:
  Runner(const Common& c, std::ostream& out, std::ostream& err) : c_(c), out_(out), err_(err) {}

  DeviceConfig config() const {
    if (c_.config.empty()) throw ConfigError("--config is required for this command");
    DeviceConfig cfg = load_device_config(c_.config);
    if (c_.qubit >= cfg.size()) throw ConfigError("--qubit is out of range for this config");
    return cfg;
  }

  json base_params(const std::string& command) const {
    json p{{"command", command}, {"seed", c_.seed}};
    if (!c_.config.empty()) {
      p["config_path"] = c_.config;
      p["config"] = to_json(load_device_config(c_.config));
      p["qubit"] = c_.qubit;
    }
    return p;
  }

  ArtifactSet artifacts(const std::string& command, json params) const {
    return ArtifactSet(resolve_out_dir(c_.out), command, std::move(params));
  }

  void finish(const ArtifactSet& set, const std::vector<std::pair<std::string, PlotKind>>& plots = {}) const {
    for (const auto& path : set.commit()) out_ << path.string() << "\n";
    if (!c_.plot) return;
    for (const auto& [suffix, kind] : plots) out_ << emit_plot(set.path_for(suffix), kind).string() << "\n";
  }

  PulsePair pulses(const DeviceConfig& cfg, double tau) const {
    if (const auto& p = cfg.pulses.at(c_.qubit)) return *p;
    const auto q = cfg.qubits[c_.qubit];
    const auto m = cfg.mixer(c_.qubit);
    CalibrationOptions opts;
    opts.shape = cfg.if_defaults.shape;
    return {calibrate_pulse(q, m, 0.5 * kPi, FixedDuration{tau}, opts),
            calibrate_pulse(q, m, kPi, FixedDuration{tau}, opts)};
  }

  static double pulse_duration(const DeviceConfig& cfg, double flag) {
    if (flag > 0.0) return flag;
    return cfg.if_defaults.cycle_period_s > 0.0 ? cfg.if_defaults.cycle_period_s : kDefaultPulseDuration;
  }

  std::ostream& out() const { return out_; }
  std::ostream& err() const { return err_; }
  const Common& common() const { return c_; }

 private:
  const Common& c_;
  std::ostream& out_;
  std::ostream& err_;
};

struct ChevronArgs {
  double span_hz = 20e6;
  double step_hz = 0.2e6;
  double tau_max_s = 1e-6;
  std::size_t tau_points = 51;
  double a_if = 1.0;
  bool off = false;
};

int cmd_chevron(const Runner& r, const ChevronArgs& a) {
  const auto cfg = r.config();
  const auto q = cfg.qubits[r.common().qubit];
  const auto mixer = cfg.mixer(r.common().qubit);
  const double center = mixer.channel.freq_hz - q.freq_hz;
  if (!(a.step_hz > 0.0 && a.span_hz > 0.0)) throw std::invalid_argument("span and step must be positive");
  const auto n_half = static_cast<std::size_t>(std::llround(a.span_hz / a.step_hz));
  std::vector<double> f_if;
  for (std::size_t i = 0; i <= 2 * n_half; ++i) {
    f_if.push_back(center + (static_cast<double>(i) - static_cast<double>(n_half)) * a.step_hz);
  }
  const auto taus = linspace(0.0, a.tau_max_s, a.tau_points);
  const auto res = chevron(q, mixer, f_if, taus, !a.off, a.a_if);

  json params = r.base_params("chevron");
  params["args"] = {{"span_hz", a.span_hz}, {"step_hz", a.step_hz},    {"tau_max_s", a.tau_max_s},
                    {"tau_points", a.tau_points}, {"a_if", a.a_if}, {"mixer_on", !a.off}};
  auto set = r.artifacts("chevron", params);
  CsvTable tab{{"f_if_hz", "tau_s", "p1"}, {}};
  for (std::size_t i = 0; i < f_if.size(); ++i) {
    for (std::size_t j = 0; j < taus.size(); ++j) tab.rows.push_back({f_if[i], taus[j], res.p1[i][j]});
  }
  set.add_csv(".csv", tab);
  set.add_json(".json", {{"expected_center_hz", center}, {"symmetry_center_hz", chevron_center(res)}});
  r.finish(set, {{".csv", PlotKind::heatmap}});
  return kExitOk;
}

struct SweepArgs {
  double max_delay_s = 0.0;
  std::size_t points = 101;
  double tau_s = 0.0;
  double detuning_hz = 0.0;
};

int cmd_rabi(const Runner& r, double a_if, double duration, std::size_t points, bool off) {
  const auto cfg = r.config();
  const auto q = cfg.qubits[r.common().qubit];
  const auto mixer = cfg.mixer(r.common().qubit);
  const double f_if = mixer.channel.freq_hz - q.freq_hz;
  const auto traj = run_rabi(q, mixer, f_if, a_if, linspace(0.0, duration, points), !off);

  json params = r.base_params("rabi");
  params["args"] = {{"a_if", a_if}, {"duration_s", duration}, {"points", points}, {"mixer_on", !off}};
  auto set = r.artifacts("rabi", params);
  set.add_csv(".csv", trajectory_table(traj));
  json summary{{"f_if_hz", f_if}};
  try {
    const auto model = q.is_closed() ? FitModel::rabi_sinusoid : FitModel::damped_cosine;
    summary["fit"] = fit_json(fit_curve(model, traj.times, traj.p1));
  } catch (const NumericalError& e) {
    r.err() << "warning: Rabi fit failed: " << e.what() << "\n";
    summary["fit"] = nullptr;
  }
  set.add_json(".json", summary);
  r.finish(set, {{".csv", PlotKind::line}});
  return kExitOk;
}

int cmd_coherence(const Runner& r, const std::string& command, const SweepArgs& a) {
  const auto cfg = r.config();
  const auto q = cfg.qubits[r.common().qubit];
  const double tau = Runner::pulse_duration(cfg, a.tau_s);
  const ExperimentSetup setup{q, cfg.mixer(r.common().qubit), r.pulses(cfg, tau)};
  double max_delay = a.max_delay_s;
  if (!(max_delay > 0.0)) {
    max_delay = command == "t1" ? 4.0 * q.t1 : 3.0 * q.t2();
    // At most ten fringe periods by default.
    if (command == "ramsey" && a.detuning_hz != 0.0) max_delay = std::min(max_delay, 10.0 / std::abs(a.detuning_hz));
    if (!std::isfinite(max_delay)) max_delay = 10e-6;
  }
  const auto delays = linspace(0.0, max_delay, a.points);

  Trajectory traj;
  FitModel model = FitModel::exp_decay;
  if (command == "t1") {
    traj = run_t1(setup, delays);
  } else if (command == "echo") {
    traj = run_echo(setup, delays);
  } else {
    traj = run_ramsey(setup, a.detuning_hz, delays);
    model = a.detuning_hz == 0.0 ? FitModel::exp_decay : FitModel::damped_cosine;
  }

  json params = r.base_params(command);
  params["args"] = {{"max_delay_s", max_delay}, {"points", a.points}, {"pulse_duration_s", tau}};
  if (command == "ramsey") params["args"]["detuning_hz"] = a.detuning_hz;
  params["pulses"] = {{"half_pi", to_json(setup.pulses.half_pi)}, {"pi", to_json(setup.pulses.pi)}};
  auto set = r.artifacts(command, params);
  set.add_csv(".csv", trajectory_table(traj, "delay_s"));
  json summary;
  try {
    summary["fit"] = fit_json(fit_curve(model, traj.times, traj.p1));
  } catch (const NumericalError& e) {
    r.err() << "warning: " << command << " fit failed: " << e.what() << "\n";
    summary["fit"] = nullptr;
  }
  set.add_json(".json", summary);
  r.finish(set, {{".csv", PlotKind::line}});
  return kExitOk;
}

int cmd_vz_ramsey(const Runner& r, std::size_t points, double delay, double tau_flag) {
  const auto cfg = r.config();
  const double tau = Runner::pulse_duration(cfg, tau_flag);
  const ExperimentSetup setup{cfg.qubits[r.common().qubit], cfg.mixer(r.common().qubit), r.pulses(cfg, tau)};
  if (points < 2) throw std::invalid_argument("--points must be at least 2");
  std::vector<double> dtheta;
  for (std::size_t i = 0; i < points; ++i) dtheta.push_back(360.0 * static_cast<double>(i) / static_cast<double>(points));
  const auto curve = run_vz_ramsey(setup, dtheta, delay);

  double max_res = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    max_res = std::max(max_res, std::abs(curve.p1[i] - 0.5 * (1.0 + std::cos(deg_to_rad(dtheta[i])))));
  }
  json params = r.base_params("vz-ramsey");
  params["args"] = {{"points", points}, {"delay_s", delay}, {"pulse_duration_s", tau}};
  auto set = r.artifacts("vz-ramsey", params);
  CsvTable tab{{"dtheta_deg", "p1"}, {}};
  for (std::size_t i = 0; i < points; ++i) tab.rows.push_back({dtheta[i], curve.p1[i]});
  set.add_csv(".csv", tab);
  set.add_json(".json", {{"max_residual_vs_ideal", max_res}});
  r.finish(set, {{".csv", PlotKind::line}});
  return kExitOk;
}

int cmd_calibrate(const Runner& r, double tau_flag, bool residual, std::size_t residual_points) {
  auto cfg = r.config();
  const std::size_t k = r.common().qubit;
  const auto q = cfg.qubits[k];
  const auto mixer = cfg.mixer(k);
  const double tau = Runner::pulse_duration(cfg, tau_flag);
  CalibrationOptions opts;
  opts.shape = cfg.if_defaults.shape;
  CalibrationTrace t_half, t_pi;
  const PulsePair pair{calibrate_pulse(q, mixer, 0.5 * kPi, FixedDuration{tau}, opts, &t_half),
                       calibrate_pulse(q, mixer, kPi, FixedDuration{tau}, opts, &t_pi)};
  auto trace_json = [](const CalibrationTrace& t) {
    return json{{"coarse_error_rad", t.coarse_error},
                {"sequence_lengths", t.sequence_lengths},
                {"stage_errors_rad", t.stage_errors}};
  };

  json params = r.base_params("calibrate");
  params["args"] = {{"pulse_duration_s", tau}, {"residual_ratio", residual}, {"residual_points", residual_points}};
  auto set = r.artifacts("calibrate", params);
  set.add_json(".json", {{"qubit", k},
                         {"half_pi", to_json(pair.half_pi)},
                         {"pi", to_json(pair.pi)},
                         {"trace", {{"half_pi", trace_json(t_half)}, {"pi", trace_json(t_pi)}}}});
  cfg.pulses[k] = pair;
  set.add_json(".config.json", to_json(cfg));
  std::vector<std::pair<std::string, PlotKind>> plots;
  if (residual) {
    const auto curve = residual_ratio(q, mixer, linspace(0.0, 1.0, residual_points));
    for (double a : curve.dropped_a_if) r.err() << "warning: residual ratio point A_if = " << a << " dropped\n";
    CsvTable tab{{"a_if", "rabi_on_hz", "rabi_off_hz", "ratio"}, {}};
    for (const auto& p : curve.points) tab.rows.push_back({p.a_if, p.rabi_on_hz, p.rabi_off_hz, p.ratio});
    set.add_csv(".residual.csv", tab);
  }
  r.finish(set, plots);
  return kExitOk;
}

int cmd_spectrum(const Runner& r, double a_if, double window, double rate_flag) {
  const auto cfg = r.config();
  json params = r.base_params("spectrum");
  json summary = json::array();
  CsvTable tab{{"mixer", "freq_hz", "on_db", "off_db"}, {}};
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    const auto mixer = cfg.mixer(k);
    const double f_if = cfg.if_defaults.freq_hz;
    const double rate = rate_flag > 0.0 ? rate_flag : 32.768e9;
    const IfProgram prog(f_if, window, {CycleSpec{0.0, Envelope(EnvelopeShape::flat, window, a_if)}});
    const auto on = output_spectrum(mixer, prog, BitTimeline::all_on(1), rate, window);
    const auto off = output_spectrum(mixer, prog, BitTimeline::all_off(1), rate, window);
    json comps = json::array();
    for (std::size_t i = 0; i < on.size(); ++i) {
      tab.rows.push_back({static_cast<double>(k), on[i].freq_hz, on[i].power_db, off[i].power_db});
      comps.push_back({{"label", on[i].label}, {"freq_hz", on[i].freq_hz}, {"on_db", on[i].power_db},
                       {"off_db", off[i].power_db}});
    }
    summary.push_back({{"mixer", k}, {"on_off_ratio_db", on[0].power_db - off[0].power_db}, {"components", comps}});
  }
  params["args"] = {{"a_if", a_if}, {"window_s", window}, {"rate_hz", rate_flag}};
  auto set = r.artifacts("spectrum", params);
  set.add_csv(".csv", tab);
  set.add_json(".json", summary);
  r.finish(set);
  return kExitOk;
}

struct CompileArgs {
  std::string program;
  std::string mode = "quantized45";
  bool rolling = false;
  bool layered = false;
  std::size_t random_qubits = 0;
  std::size_t random_pulses = 200;
};

int cmd_compile(const Runner& r, const CompileArgs& a) {
  PhaseMode mode;
  if (a.mode == "quantized45") {
    mode = PhaseMode::quantized45;
  } else if (a.mode == "free") {
    mode = PhaseMode::free;
  } else {
    throw ConfigError("--mode must be quantized45 or free");
  }
  Program prog;
  json params = r.base_params("compile");
  if (a.random_qubits > 0) {
    if (!a.program.empty()) throw ConfigError("give either --program or --random-qubits");
    prog = random_program(a.random_qubits, a.random_pulses, r.common().seed);
  } else {
    if (a.program.empty()) throw ConfigError("--program is required");
    const json pj = read_json_file(a.program);
    prog = parse_program(pj);
    params["program"] = pj;
  }
  const auto sched = schedule(prog, mode, {!a.rolling, a.layered});
  const auto stats = parallelism_stats(sched);

  params["args"] = {{"mode", a.mode},
                    {"rolling", a.rolling},
                    {"layered", a.layered},
                    {"random_qubits", a.random_qubits},
                    {"random_pulses", a.random_pulses}};
  auto set = r.artifacts("compile", params);
  json sj = to_json(sched);
  sj["stats"] = {{"cycles", stats.cycles},
                 {"mean_fired", stats.mean_fired},
                 {"max_fired", stats.max_fired},
                 {"min_nonzero_fired", stats.min_nonzero_fired}};
  set.add_json(".json", sj);
  CsvTable tab{{"slot", "theta_if_deg", "fired"}, {}};
  for (const auto& c : sched.cycles) {
    tab.rows.push_back({static_cast<double>(c.slot), c.theta_if_deg, static_cast<double>(c.fired.size())});
  }
  set.add_csv(".csv", tab);
  r.finish(set);
  return kExitOk;
}

struct ResourceArgs {
  std::size_t n = 0;
  ResourceOptions opts;
};

int cmd_resources(const Runner& r, const ResourceArgs& a) {
  if (a.n == 0) throw ConfigError("-n must be at least 1");
  const auto rep = resource_report(a.n, a.opts);
  const json j{{"n_qubits", rep.n_qubits},
               {"standby_pw_per_qubit", rep.standby_pw_per_qubit},
               {"peak_pw_per_qubit", rep.peak_pw_per_qubit},
               {"avg_pw_per_qubit", rep.avg_pw_per_qubit},
               {"total_avg_w", rep.total_avg_w},
               {"max_output_pw", rep.max_output_pw},
               {"max_output_dbm", kMaxOutputPowerDbm},
               {"max_tones_per_cable", rep.max_tones_per_cable},
               {"cable_count", rep.cable_count},
               {"if_cable_count", rep.if_cable_count},
               {"parallelism_worst", rep.parallelism_worst},
               {"parallelism_best", rep.parallelism_best}};
  json params = r.base_params("resources");
  params["args"] = {{"n", a.n},
                    {"standby_pw", a.opts.standby_pw},
                    {"peak_pw", a.opts.peak_pw},
                    {"q", a.opts.q},
                    {"bandwidth_hz", a.opts.bandwidth_hz},
                    {"f_c_hz", a.opts.f_c_hz}};
  auto set = r.artifacts("resources", params);
  set.add_json(".json", j);

  char buf[128];
  std::string table = "quantity                       AQFP QC-VZ\n";
  auto row = [&](const char* name, const char* f, double v) {
    std::snprintf(buf, sizeof buf, "%-30s ", name);
    table += buf;
    std::snprintf(buf, sizeof buf, f, v);
    table += buf;
    table += "\n";
  };
  row("qubits", "%.0f", static_cast<double>(rep.n_qubits));
  row("power per qubit (pW)", "%.2f", rep.avg_pw_per_qubit);
  row("total power (W)", "%.6g", rep.total_avg_w);
  row("max output power (pW)", "%.2f", rep.max_output_pw);
  row("tones per LO cable", "%.0f", static_cast<double>(rep.max_tones_per_cable));
  row("LO cables", "%.0f", static_cast<double>(rep.cable_count));
  row("IF cables", "%.0f", static_cast<double>(rep.if_cable_count));
  row("parallelism (worst)", "%.6g", rep.parallelism_worst);
  row("parallelism (best)", "%.6g", rep.parallelism_best);
  set.add_text(".txt", table);
  r.out() << table;
  r.finish(set);
  return kExitOk;
}

const std::set<std::string> kCommands{"chevron", "rabi", "t1",    "ramsey",   "echo",      "vz-ramsey",
                                      "calibrate", "spectrum", "compile", "resources", "plot"};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << "usage: qcvz <command> [options]; commands:";
    for (const auto& c : kCommands) err << " " << c;
    err << "\n";
    return kExitUnknownCommand;
  }
  if (args[0] != "-h" && args[0] != "--help" && !kCommands.count(args[0])) {
    err << "unknown command: " << args[0] << "\n";
    return kExitUnknownCommand;
  }

  CLI::App app{"AQFP QC-VZ simulator and compiler", "qcvz"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", common.config, "device config JSON");
    if (needs_config) opt->required();
    sub->add_option("--out", common.out, "output directory (default $QCVZ_OUT_DIR or ./out)");
    sub->add_option("--seed", common.seed, "random seed")->default_val(0);
  };
  auto add_qubit = [&](CLI::App* sub) {
    sub->add_option("--qubit", common.qubit, "qubit index in the config")->default_val(0);
    sub->add_flag("--plot", common.plot, "also emit an SVG plot");
  };

  std::function<int(const Runner&)> action;

  ChevronArgs ch;
  auto* s_ch = app.add_subcommand("chevron", "P1 vs IF frequency and pulse duration");
  add_common(s_ch, true);
  add_qubit(s_ch);
  s_ch->add_option("--span-hz", ch.span_hz, "half width of the f_if sweep")->default_val(ch.span_hz);
  s_ch->add_option("--step-hz", ch.step_hz, "f_if step")->default_val(ch.step_hz);
  s_ch->add_option("--tau-max", ch.tau_max_s, "longest pulse (s)")->default_val(ch.tau_max_s);
  s_ch->add_option("--tau-points", ch.tau_points, "pulse durations")->default_val(ch.tau_points);
  s_ch->add_option("--a-if", ch.a_if, "IF amplitude")->default_val(ch.a_if);
  s_ch->add_flag("--off", ch.off, "mixer off (bit 0)");
  s_ch->callback([&] { action = [&](const Runner& r) { return cmd_chevron(r, ch); }; });

  double rabi_a = 1.0, rabi_duration = 1e-6;
  std::size_t rabi_points = 201;
  bool rabi_off = false;
  auto* s_rabi = app.add_subcommand("rabi", "Rabi oscillation at resonance");
  add_common(s_rabi, true);
  add_qubit(s_rabi);
  s_rabi->add_option("--a-if", rabi_a, "IF amplitude")->default_val(rabi_a);
  s_rabi->add_option("--duration", rabi_duration, "window (s)")->default_val(rabi_duration);
  s_rabi->add_option("--points", rabi_points, "samples")->default_val(rabi_points);
  s_rabi->add_flag("--off", rabi_off, "mixer off (bit 0)");
  s_rabi->callback([&] {
    action = [&](const Runner& r) { return cmd_rabi(r, rabi_a, rabi_duration, rabi_points, rabi_off); };
  });

  std::map<std::string, SweepArgs> sweeps;
  for (const char* name : {"t1", "ramsey", "echo"}) {
    auto& a = sweeps[name];
    const std::string cmd = name;
    auto* sub = app.add_subcommand(cmd, cmd == "t1" ? "energy relaxation" : cmd == "echo" ? "Hahn echo" : "Ramsey fringes");
    add_common(sub, true);
    add_qubit(sub);
    sub->add_option("--max-delay", a.max_delay_s, "longest delay (s); default from T1/T2");
    sub->add_option("--points", a.points, "delays")->default_val(a.points);
    sub->add_option("--tau", a.tau_s, "pulse duration for on-the-fly calibration (s)");
    if (cmd == "ramsey") sub->add_option("--detuning-hz", a.detuning_hz, "drive detuning")->required();
    sub->callback([&, cmd] { action = [&, cmd](const Runner& r) { return cmd_coherence(r, cmd, sweeps[cmd]); }; });
  }

  std::size_t vz_points = 72;
  double vz_delay = 20e-9, vz_tau = 0.0;
  auto* s_vz = app.add_subcommand("vz-ramsey", "p1 vs IF phase step between two pi/2 pulses");
  add_common(s_vz, true);
  add_qubit(s_vz);
  s_vz->add_option("--points", vz_points, "phase steps over 360 deg")->default_val(vz_points);
  s_vz->add_option("--delay", vz_delay, "delay between pulses (s)")->default_val(vz_delay);
  s_vz->add_option("--tau", vz_tau, "pulse duration (s)");
  s_vz->callback([&] { action = [&](const Runner& r) { return cmd_vz_ramsey(r, vz_points, vz_delay, vz_tau); }; });

  double cal_tau = 0.0;
  bool cal_residual = false;
  std::size_t cal_points = 11;
  auto* s_cal = app.add_subcommand("calibrate", "calibrate pi/2 and pi pulses");
  add_common(s_cal, true);
  add_qubit(s_cal);
  s_cal->add_option("--tau", cal_tau, "pulse duration (s)");
  s_cal->add_flag("--residual-ratio", cal_residual, "also fit Omega_off/Omega_on vs A_if");
  s_cal->add_option("--residual-points", cal_points, "A_if grid points")->default_val(cal_points);
  s_cal->callback([&] {
    action = [&](const Runner& r) { return cmd_calibrate(r, cal_tau, cal_residual, cal_points); };
  });

  double sp_a = 1.0, sp_window = 1e-6, sp_rate = 0.0;
  auto* s_sp = app.add_subcommand("spectrum", "mixer output spectrum, on and off");
  add_common(s_sp, true);
  s_sp->add_option("--a-if", sp_a, "IF amplitude")->default_val(sp_a);
  s_sp->add_option("--window", sp_window, "synthesis window (s)")->default_val(sp_window);
  s_sp->add_option("--rate", sp_rate, "sample rate (Hz)");
  s_sp->callback([&] { action = [&](const Runner& r) { return cmd_spectrum(r, sp_a, sp_window, sp_rate); }; });

  CompileArgs ca;
  auto* s_co = app.add_subcommand("compile", "lower and schedule a gate program");
  add_common(s_co, false);
  s_co->add_option("--program", ca.program, "program JSON");
  s_co->add_option("--mode", ca.mode, "quantized45 or free")->default_val(ca.mode);
  s_co->add_flag("--rolling", ca.rolling, "keep idle cycles of the rolling phase");
  s_co->add_flag("--layered", ca.layered, "synchronize qubits after every pulse");
  s_co->add_option("--random-qubits", ca.random_qubits, "random 8-phase workload instead of --program");
  s_co->add_option("--random-pulses", ca.random_pulses, "pulses per qubit of the random workload")
      ->default_val(ca.random_pulses);
  s_co->callback([&] { action = [&](const Runner& r) { return cmd_compile(r, ca); }; });

  ResourceArgs ra;
  auto* s_re = app.add_subcommand("resources", "power, multiplexing and cabling estimate");
  add_common(s_re, false);
  s_re->add_option("-n", ra.n, "qubit count")->required();
  s_re->add_option("--standby-pw", ra.opts.standby_pw, "standby power per mixer")->default_val(ra.opts.standby_pw);
  s_re->add_option("--peak-pw", ra.opts.peak_pw, "peak power per mixer")->default_val(ra.opts.peak_pw);
  s_re->add_option("--q", ra.opts.q, "resonator Q")->default_val(ra.opts.q);
  s_re->add_option("--bandwidth-hz", ra.opts.bandwidth_hz, "LO line bandwidth")->default_val(ra.opts.bandwidth_hz);
  s_re->add_option("--fc-hz", ra.opts.f_c_hz, "reference frequency")->default_val(ra.opts.f_c_hz);
  s_re->callback([&] { action = [&](const Runner& r) { return cmd_resources(r, ra); }; });

  std::string plot_csv, plot_kind = "line";
  auto* s_pl = app.add_subcommand("plot", "render a CSV artifact as SVG");
  s_pl->add_option("--csv", plot_csv, "input CSV")->required();
  s_pl->add_option("--kind", plot_kind, "heatmap or line")->default_val(plot_kind);
  s_pl->callback([&] {
    action = [&](const Runner& r) {
      r.out() << emit_plot(plot_csv, plot_kind_from_string(plot_kind)).string() << "\n";
      return kExitOk;
    };
  });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  const Runner runner(common, out, err);
  try {
    return action(runner);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace qcvz
