#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qcvz/calibration.hpp"
#include "qcvz/compiler.hpp"
#include "qcvz/demux.hpp"
#include "qcvz/experiments.hpp"
#include "qcvz/mixer.hpp"
#include "qcvz/qubit.hpp"
#include "qcvz/signals.hpp"

namespace qcvz {

/// Unreadable or invalid configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IfDefaults {
  double freq_hz = 0.0;
  double cycle_period_s = 0.0;
  EnvelopeShape shape = EnvelopeShape::flat;
};

struct MixerSettings {
  double gain_hz_per_unit = 10e6;
  double on_off_ratio_db = 28.5;
  Nonlinearity nonlinearity = Nonlinearity::sine_saturating;
  double bpf_stopband_db = 60.0;
};

struct DeviceConfig {
  std::vector<Tone> lo_tones;
  std::vector<Resonator> resonators;  ///< empty: each LO tone feeds its mixer directly
  std::vector<MixerSettings> mixers;
  std::vector<QubitParams> qubits;
  IfDefaults if_defaults;
  std::vector<std::optional<PulsePair>> pulses;  ///< per qubit, when calibrated

  std::size_t size() const { return mixers.size(); }
  /// LO drive reaching mixer k after the demultiplexer.
  ChannelTone channel(std::size_t k) const;
  MixerConfig mixer(std::size_t k) const;
};

DeviceConfig parse_device_config(const nlohmann::json& j);
DeviceConfig load_device_config(const std::filesystem::path& path);
nlohmann::json to_json(const DeviceConfig& cfg);

nlohmann::json to_json(const CalibratedPulse& p);
CalibratedPulse calibrated_pulse_from_json(const nlohmann::json& j);

/// {"qubits": [["X90", "T", ...], ...]}
Program parse_program(const nlohmann::json& j);
Program load_program(const std::filesystem::path& path);

nlohmann::json to_json(const Schedule& s);

/// Reads and parses a JSON file, raising ConfigError on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace qcvz
