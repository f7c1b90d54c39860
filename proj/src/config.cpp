#include "qcvz/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qcvz {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  return j.get<double>();
}

// Number, or "inf"/null for an unbounded value.
double number_or_inf(const json& j, const std::string& where) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "inf")) return kInf;
  return number(j, where);
}

json inf_to_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

double get(const json& j, const char* key, const std::string& where) {
  return number(require(j, key, where), where + "." + key);
}

double get_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

template <class F>
auto wrap(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where + ": " + e.what());
  }
}

MixerSettings parse_mixer(const json& j, const std::string& where) {
  MixerSettings m;
  m.gain_hz_per_unit = get_or(j, "gain_hz_per_unit", m.gain_hz_per_unit, where);
  if (j.contains("on_off_ratio_db")) m.on_off_ratio_db = number_or_inf(j.at("on_off_ratio_db"), where);
  if (j.contains("nonlinearity")) {
    m.nonlinearity = wrap(where, [&] { return nonlinearity_from_string(j.at("nonlinearity").get<std::string>()); });
  }
  m.bpf_stopband_db = get_or(j, "bpf_stopband_db", m.bpf_stopband_db, where);
  return m;
}

QubitParams parse_qubit(const json& j, const std::string& where) {
  const double f = get(j, "freq_hz", where);
  const double t1 = j.contains("t1_s") ? number_or_inf(j.at("t1_s"), where + ".t1_s") : kInf;
  return wrap(where, [&] {
    if (j.contains("t2_s") && j.contains("tphi_s")) fail(where + ": give either t2_s or tphi_s, not both");
    if (j.contains("t2_s")) return QubitParams::from_t1_t2(f, t1, number_or_inf(j.at("t2_s"), where + ".t2_s"));
    const double tphi = j.contains("tphi_s") ? number_or_inf(j.at("tphi_s"), where + ".tphi_s") : kInf;
    return QubitParams(f, t1, tphi);
  });
}

}  // namespace

ChannelTone DeviceConfig::channel(std::size_t k) const {
  if (k >= size()) throw std::out_of_range("mixer index out of range");
  if (resonators.empty()) {
    const auto& t = lo_tones.at(k);
    return {t.freq_hz(), t.amp(), t.phase()};
  }
  return demux(resonators, MultiToneLo(lo_tones)).channels.at(k).dominant();
}

MixerConfig DeviceConfig::mixer(std::size_t k) const {
  const auto& m = mixers.at(k);
  MixerConfig cfg{channel(k), m.gain_hz_per_unit, m.on_off_ratio_db, m.nonlinearity, m.bpf_stopband_db};
  cfg.validate();
  return cfg;
}

json to_json(const CalibratedPulse& p) {
  return {{"f_lo_hz", p.f_lo_hz},   {"f_if_hz", p.f_if_hz},           {"a_if", p.a_if},
          {"tau_if_s", p.tau_if},   {"target_angle_rad", p.target_angle}, {"shape", to_string(p.shape)}};
}

CalibratedPulse calibrated_pulse_from_json(const json& j) {
  const std::string w = "pulse";
  CalibratedPulse p;
  p.f_lo_hz = get(j, "f_lo_hz", w);
  p.f_if_hz = get(j, "f_if_hz", w);
  p.a_if = get(j, "a_if", w);
  p.tau_if = get(j, "tau_if_s", w);
  p.target_angle = get(j, "target_angle_rad", w);
  if (j.contains("shape")) {
    p.shape = wrap(w, [&] { return envelope_shape_from_string(j.at("shape").get<std::string>()); });
  }
  if (!(p.a_if >= 0.0 && p.a_if <= 1.0) || !(p.tau_if > 0.0)) fail("pulse: a_if must lie in [0, 1], tau_if_s > 0");
  return p;
}

DeviceConfig parse_device_config(const json& j) {
  if (!j.is_object()) fail("config must be a JSON object");
  DeviceConfig cfg;

  const json& lo = require(j, "lo", "config");
  const json& tones = require(lo, "tones", "lo");
  if (!tones.is_array() || tones.empty()) fail("lo.tones must be a nonempty array");
  for (std::size_t i = 0; i < tones.size(); ++i) {
    const std::string w = "lo.tones[" + std::to_string(i) + "]";
    const auto& t = tones[i];
    cfg.lo_tones.push_back(wrap(w, [&] {
      return Tone(get(t, "freq_hz", w), get_or(t, "amp", kNominalLoFlux, w), get_or(t, "phase_rad", 0.0, w));
    }));
  }
  wrap("lo.tones", [&] { return MultiToneLo(cfg.lo_tones); });

  if (j.contains("resonators")) {
    const auto& rs = j.at("resonators");
    if (!rs.is_array()) fail("resonators must be an array");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string w = "resonators[" + std::to_string(i) + "]";
      cfg.resonators.push_back(wrap(w, [&] { return Resonator(get(rs[i], "freq_hz", w), get(rs[i], "q", w)); }));
    }
  }

  const json& mixers = require(j, "mixers", "config");
  const json& qubits = require(j, "qubits", "config");
  if (!mixers.is_array() || !qubits.is_array() || mixers.empty()) fail("mixers and qubits must be nonempty arrays");
  for (std::size_t i = 0; i < mixers.size(); ++i) cfg.mixers.push_back(parse_mixer(mixers[i], "mixers[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < qubits.size(); ++i) cfg.qubits.push_back(parse_qubit(qubits[i], "qubits[" + std::to_string(i) + "]"));

  const std::size_t n = cfg.mixers.size();
  if (cfg.qubits.size() != n) fail("config needs one qubit per mixer");
  if (!cfg.resonators.empty() && cfg.resonators.size() != n) fail("config needs one resonator per mixer");
  if (cfg.resonators.empty() && cfg.lo_tones.size() != n) fail("without resonators, config needs one LO tone per mixer");

  const json& ifd = require(j, "if", "config");
  cfg.if_defaults.freq_hz = get(ifd, "freq_hz", "if");
  cfg.if_defaults.cycle_period_s = get_or(ifd, "cycle_period_s", 0.0, "if");
  if (ifd.contains("shape")) {
    cfg.if_defaults.shape = wrap("if", [&] { return envelope_shape_from_string(ifd.at("shape").get<std::string>()); });
  }
  if (!(cfg.if_defaults.freq_hz > 0.0)) fail("if.freq_hz must be positive");
  if (!(cfg.if_defaults.cycle_period_s >= 0.0)) fail("if.cycle_period_s must be non-negative");

  cfg.pulses.assign(n, std::nullopt);
  if (j.contains("pulses")) {
    const auto& ps = j.at("pulses");
    if (!ps.is_array() || ps.size() != n) fail("pulses must list one entry per qubit");
    for (std::size_t i = 0; i < n; ++i) {
      if (ps[i].is_null()) continue;
      PulsePair pair{calibrated_pulse_from_json(require(ps[i], "half_pi", "pulses")),
                     calibrated_pulse_from_json(require(ps[i], "pi", "pulses"))};
      wrap("pulses[" + std::to_string(i) + "]", [&] {
        pair.validate();
        return 0;
      });
      cfg.pulses[i] = pair;
    }
  }

  for (std::size_t k = 0; k < n; ++k) wrap("mixers[" + std::to_string(k) + "]", [&] { return cfg.mixer(k); });
  return cfg;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
}

DeviceConfig load_device_config(const std::filesystem::path& path) {
  return parse_device_config(read_json_file(path));
}

json to_json(const DeviceConfig& cfg) {
  json j;
  for (const auto& t : cfg.lo_tones) {
    j["lo"]["tones"].push_back({{"freq_hz", t.freq_hz()}, {"amp", t.amp()}, {"phase_rad", t.phase()}});
  }
  j["resonators"] = json::array();
  for (const auto& r : cfg.resonators) j["resonators"].push_back({{"freq_hz", r.freq_hz}, {"q", r.q}});
  for (const auto& m : cfg.mixers) {
    j["mixers"].push_back({{"gain_hz_per_unit", m.gain_hz_per_unit},
                           {"on_off_ratio_db", inf_to_json(m.on_off_ratio_db)},
                           {"nonlinearity", to_string(m.nonlinearity)},
                           {"bpf_stopband_db", m.bpf_stopband_db}});
  }
  for (const auto& q : cfg.qubits) {
    j["qubits"].push_back({{"freq_hz", q.freq_hz}, {"t1_s", inf_to_json(q.t1)}, {"tphi_s", inf_to_json(q.tphi)}});
  }
  j["if"] = {{"freq_hz", cfg.if_defaults.freq_hz},
             {"cycle_period_s", cfg.if_defaults.cycle_period_s},
             {"shape", to_string(cfg.if_defaults.shape)}};
  bool any = false;
  json ps = json::array();
  for (const auto& p : cfg.pulses) {
    if (p) {
      any = true;
      ps.push_back({{"half_pi", to_json(p->half_pi)}, {"pi", to_json(p->pi)}});
    } else {
      ps.push_back(nullptr);
    }
  }
  if (any) j["pulses"] = ps;
  return j;
}

Program parse_program(const json& j) {
  const json& qs = require(j, "qubits", "program");
  if (!qs.is_array() || qs.empty()) fail("program.qubits must be a nonempty array");
  Program p;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const std::string w = "program.qubits[" + std::to_string(i) + "]";
    if (!qs[i].is_array()) fail(w + " must be an array of gate names");
    std::vector<Gate> gates;
    for (const auto& g : qs[i]) {
      if (!g.is_string()) fail(w + ": gate names must be strings");
      gates.push_back(wrap(w, [&] { return parse_gate(g.get<std::string>()); }));
    }
    p.qubits.push_back(std::move(gates));
  }
  return p;
}

Program load_program(const std::filesystem::path& path) { return parse_program(read_json_file(path)); }

json to_json(const Schedule& s) {
  json j;
  j["mode"] = to_string(s.mode);
  j["cycles"] = json::array();
  for (const auto& c : s.cycles) {
    j["cycles"].push_back({{"slot", c.slot}, {"theta_if", c.theta_if_deg}, {"fired", c.fired}});
  }
  j["qubits"] = json::array();
  for (std::size_t q = 0; q < s.lowered.size(); ++q) {
    const auto& lq = s.lowered[q];
    j["qubits"].push_back({{"theta_if", lq.theta_if_deg}, {"final_frame", lq.final_frame}, {"cycles", s.cycles_of(q)}});
  }
  return j;
}

}  // namespace qcvz
