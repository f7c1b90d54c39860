#include "qcvz/artifacts.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcvz {

std::filesystem::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("QCVZ_OUT_DIR"); env && *env) return env;
  return "out";
}

std::string hash_hex(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_csv(const CsvTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  char buf[32];
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw std::invalid_argument("CSV row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) throw std::invalid_argument("CSV row width does not match the header");
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size() || c.empty()) throw std::invalid_argument("non-numeric CSV cell: " + c);
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_sidecar(const std::filesystem::path& path, const nlohmann::json& meta) {
  write_file(path.string() + ".meta.json", meta.dump(2) + "\n");
}

ArtifactSet::ArtifactSet(std::filesystem::path out_dir, std::string command, nlohmann::json params)
    : out_dir_(std::move(out_dir)), command_(std::move(command)), params_(std::move(params)) {
  run_id_ = hash_hex(command_ + "\n" + params_.dump()).substr(0, 12);
}

std::filesystem::path ArtifactSet::path_for(const std::string& suffix) const {
  return out_dir_ / (command_ + "-" + run_id_ + suffix);
}

void ArtifactSet::add_csv(const std::string& suffix, const CsvTable& t) { add_text(suffix, format_csv(t)); }

void ArtifactSet::add_json(const std::string& suffix, const nlohmann::json& j) { add_text(suffix, j.dump(2) + "\n"); }

void ArtifactSet::add_text(const std::string& suffix, std::string text) {
  files_.emplace_back(suffix, std::move(text));
}

std::vector<std::filesystem::path> ArtifactSet::commit() const {
  std::vector<std::filesystem::path> written;
  for (const auto& [suffix, text] : files_) {
    const auto path = path_for(suffix);
    write_file(path, text);
    write_sidecar(path, {{"command", command_}, {"run_id", run_id_}, {"file", path.filename().string()},
                         {"params", params_}});
    written.push_back(path);
  }
  return written;
}

}  // namespace qcvz
