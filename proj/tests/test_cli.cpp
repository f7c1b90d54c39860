#include "qcvz/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

using namespace qcvz;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kSource = QCVZ_SOURCE_DIR;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qcvz-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args, const fs::path& out_dir) {
    args.push_back("--out");
    args.push_back(out_dir.string());
    return run_raw(args);
  }

  int run_raw(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  std::vector<fs::path> files(const fs::path& d) const {
    std::vector<fs::path> v;
    if (!fs::exists(d)) return v;
    for (const auto& e : fs::directory_iterator(d)) v.push_back(e.path());
    std::sort(v.begin(), v.end());
    return v;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path find(const fs::path& d, const std::string& ending) const {
    for (const auto& f : files(d)) {
      const auto s = f.filename().string();
      if (s.size() >= ending.size() && s.compare(s.size() - ending.size(), ending.size(), ending) == 0 &&
          s.find(".meta.") == std::string::npos) {
        return f;
      }
    }
    return {};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, ResourcesMillionQubits) {
  ASSERT_EQ(run({"resources", "-n", "1000000"}, dir_), kExitOk);
  EXPECT_NE(out_.str().find("110.96"), std::string::npos);
  const json j = json::parse(slurp(find(dir_, ".json")));
  EXPECT_NEAR(j["avg_pw_per_qubit"].get<double>(), 110.96, 1e-9);
  EXPECT_EQ(j["max_tones_per_cable"].get<int>(), 4000);
  EXPECT_EQ(j["cable_count"].get<int>(), 250);
}

TEST_F(CliTest, CompileDemoProgram) {
  ASSERT_EQ(run({"compile", "--program", (kSource / "programs/three_qubit_demo.json").string(), "--rolling"}, dir_), kExitOk);
  const json j = json::parse(slurp(find(dir_, ".json")));
  const auto& cycles = j["cycles"];
  const auto& q0 = j["qubits"][0]["cycles"];
  ASSERT_EQ(q0.size(), 2u);
  EXPECT_EQ(cycles[q0[0].get<std::size_t>()]["slot"].get<int>(), 0);
  EXPECT_EQ(cycles[q0[1].get<std::size_t>()]["slot"].get<int>(), 8);
  EXPECT_EQ(j["qubits"][1]["theta_if"], json({0.0, 45.0, 135.0}));
}

TEST_F(CliTest, MissingConfigWritesNothing) {
  EXPECT_EQ(run({"calibrate", "--config", (dir_ / "absent.json").string()}, dir_ / "out"), kExitConfig);
  EXPECT_TRUE(files(dir_ / "out").empty());
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(CliTest, MalformedConfigIsAConfigError) {
  fs::create_directories(dir_);
  std::ofstream(dir_ / "bad.json") << R"({"lo": {"tones": []}, "mixers": [], "qubits": [], "if": {"freq_hz": 1e9}})";
  EXPECT_EQ(run({"t1", "--config", (dir_ / "bad.json").string()}, dir_ / "out"), kExitConfig);
  std::ofstream(dir_ / "garbage.json") << "{ not json";
  EXPECT_EQ(run({"t1", "--config", (dir_ / "garbage.json").string()}, dir_ / "out"), kExitConfig);
  EXPECT_TRUE(files(dir_ / "out").empty());
}

TEST_F(CliTest, UnknownCommandAndBadFlags) {
  EXPECT_EQ(run_raw({"frobnicate"}), kExitUnknownCommand);
  EXPECT_EQ(run_raw({}), kExitUnknownCommand);
  EXPECT_EQ(run_raw({"resources"}), kExitConfig);
  EXPECT_EQ(run_raw({"resources", "-n", "10", "--bogus"}), kExitConfig);
  EXPECT_EQ(run_raw({"ramsey", "--config", (kSource / "configs/single_qubit.json").string()}), kExitConfig);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const std::vector<std::string> args{"compile", "--random-qubits", "16", "--random-pulses", "20", "--seed", "3"};
  ASSERT_EQ(run(args, dir_ / "a"), kExitOk);
  ASSERT_EQ(run(args, dir_ / "b"), kExitOk);
  const auto a = files(dir_ / "a");
  const auto b = files(dir_ / "b");
  ASSERT_EQ(a.size(), b.size());
  ASSERT_FALSE(a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].filename(), b[i].filename());
    if (a[i].filename().string().find(".meta.") == std::string::npos) {
      EXPECT_EQ(slurp(a[i]), slurp(b[i])) << a[i];
    }
  }
  ASSERT_EQ(run({"compile", "--random-qubits", "16", "--random-pulses", "20", "--seed", "4"}, dir_ / "a"), kExitOk);
  EXPECT_EQ(files(dir_ / "a").size(), 2 * a.size());
}

TEST_F(CliTest, EveryArtifactHasSidecar) {
  ASSERT_EQ(run({"spectrum", "--config", (kSource / "configs/three_channel.json").string(), "--seed", "9"}, dir_),
            kExitOk);
  std::size_t data = 0;
  for (const auto& f : files(dir_)) {
    const auto name = f.filename().string();
    if (name.find(".meta.json") != std::string::npos) continue;
    ++data;
    ASSERT_TRUE(fs::exists(f.string() + ".meta.json")) << name;
    const json meta = json::parse(slurp(f.string() + ".meta.json"));
    EXPECT_EQ(meta["command"], "spectrum");
    EXPECT_EQ(meta["params"]["seed"], 9);
    EXPECT_EQ(meta["params"]["config"]["mixers"].size(), 3u);
  }
  EXPECT_EQ(data, 2u);
  const json j = json::parse(slurp(find(dir_, ".json")));
  EXPECT_NEAR(j[0]["on_off_ratio_db"].get<double>(), 28.5, 0.1);
  EXPECT_NEAR(j[1]["on_off_ratio_db"].get<double>(), 45.1, 0.1);
  EXPECT_NEAR(j[2]["on_off_ratio_db"].get<double>(), 39.0, 0.1);
}

TEST_F(CliTest, OutDirFromEnvironment) {
  const auto env_dir = dir_ / "env";
  ::setenv("QCVZ_OUT_DIR", env_dir.c_str(), 1);
  const int rc = run_raw({"resources", "-n", "8"});
  ::unsetenv("QCVZ_OUT_DIR");
  ASSERT_EQ(rc, kExitOk);
  EXPECT_EQ(files(env_dir).size(), 4u);
}

TEST_F(CliTest, CalibrateWritesReusableConfig) {
  const auto cfg = (kSource / "configs/single_qubit.json").string();
  ASSERT_EQ(run({"calibrate", "--config", cfg}, dir_), kExitOk);
  const auto derived = find(dir_, ".config.json");
  ASSERT_FALSE(derived.empty());
  auto pulses_path = derived.string();
  pulses_path.replace(pulses_path.size() - std::string(".config.json").size(), std::string::npos, ".json");
  const json pulses = json::parse(slurp(pulses_path));
  EXPECT_NEAR(pulses["pi"]["a_if"].get<double>(), 1.0 / 3.0, 1e-6);
  ASSERT_EQ(run({"vz-ramsey", "--config", derived.string(), "--points", "8"}, dir_ / "vz"), kExitOk);
  const auto csv = slurp(find(dir_ / "vz", ".csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dtheta_deg,p1");
}

TEST_F(CliTest, PlotRendersAndRejectsEmptyCsv) {
  const auto cfg = (kSource / "configs/single_qubit.json").string();
  ASSERT_EQ(run({"vz-ramsey", "--config", cfg, "--points", "8", "--plot"}, dir_), kExitOk);
  EXPECT_FALSE(find(dir_, ".svg").empty());
  fs::create_directories(dir_ / "empty");
  std::ofstream(dir_ / "empty" / "e.csv") << "a,b\n";
  EXPECT_EQ(run_raw({"plot", "--csv", (dir_ / "empty" / "e.csv").string()}), kExitConfig);
  EXPECT_FALSE(fs::exists(dir_ / "empty" / "e.svg"));
}
