#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qcvz {

/// Output directory: the explicit flag if given, else $QCVZ_OUT_DIR, else "out".
std::filesystem::path resolve_out_dir(const std::string& flag_value);

/// Stable 64-bit FNV-1a hash, hex encoded.
std::string hash_hex(std::string_view data);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Numbers are printed with %.17g so files round-trip exactly.
std::string format_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);

/// Collects the outputs of one command and writes them together, each with a
/// `<file>.meta.json` sidecar holding the full run parameters.
class ArtifactSet {
 public:
  ArtifactSet(std::filesystem::path out_dir, std::string command, nlohmann::json params);

  const std::string& run_id() const { return run_id_; }
  /// File name `<command>-<run id><suffix>` inside the output directory.
  std::filesystem::path path_for(const std::string& suffix) const;

  void add_csv(const std::string& suffix, const CsvTable& t);
  void add_json(const std::string& suffix, const nlohmann::json& j);
  void add_text(const std::string& suffix, std::string text);

  /// Writes every file; returns their paths in insertion order.
  std::vector<std::filesystem::path> commit() const;

 private:
  std::filesystem::path out_dir_;
  std::string command_;
  nlohmann::json params_;
  std::string run_id_;
  std::vector<std::pair<std::string, std::string>> files_;
};

void write_file(const std::filesystem::path& path, const std::string& text);
void write_sidecar(const std::filesystem::path& path, const nlohmann::json& meta);

}  // namespace qcvz
