#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "keyflow/cli.hpp"

namespace keyflow {
namespace {

namespace fs = std::filesystem;

const char* kSmallConfig = R"({
  "seed": 3,
  "tracker": {"k": 3, "t": 10},
  "sequence": {"width": 96, "height": 64, "frames": 24, "box": [8, 20, 16, 16],
               "trajectory": {"kind": "linear", "velocity": [1.5, 0.5]},
               "flow_noise_sigma": 0.2,
               "windows": [{"start": 8, "end": 12, "penalty": 25, "flow_gain": 0}]},
  "sweep": {"t_values": ["-inf", 10, "inf"], "sequences": 2, "randomize": false}
})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("keyflow_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = write("config.json", kSmallConfig);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "keyflow");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
  std::string config_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, SynthTrackSweep) {
  const std::string seq = (dir_ / "seq").string();
  ASSERT_EQ(run({"synth", "--config", config_, "--out", seq}), 0) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "seq" / "meta.json"));
  EXPECT_TRUE(fs::exists(dir_ / "seq" / "flow_0002.flo"));
  EXPECT_TRUE(fs::exists(dir_ / "seq" / "flow_0024.flo"));
  EXPECT_FALSE(fs::exists(dir_ / "seq" / "flow_0001.flo"));
  EXPECT_NE(out_.str().find("23 flow files"), std::string::npos) << out_.str();

  const std::string trace = (dir_ / "trace.json").string();
  const std::string report = (dir_ / "report").string();
  ASSERT_EQ(run({"track", "--config", config_, "--sequence", seq, "--out", trace, "--report", report}), 0)
      << err_.str();
  const json t = json::parse(slurp(trace));
  EXPECT_EQ(t.at("records").size(), 24u);
  EXPECT_TRUE(t.at("records")[0].at("keyframe").get<bool>());
  EXPECT_TRUE(t.at("records")[1].at("score").is_null());
  EXPECT_TRUE(fs::exists(dir_ / "report" / "metrics.json"));
  EXPECT_TRUE(fs::exists(dir_ / "report" / "success.svg"));
  EXPECT_NE(out_.str().find("keyframe ratio"), std::string::npos);

  const std::string sweep = (dir_ / "sweep").string();
  ASSERT_EQ(run({"sweep", "--config", config_, "--out", sweep}), 0) << err_.str();
  for (const char* f : {"sweep.csv", "sweep.json", "keyframe_ratio.svg", "auc.svg", "summary.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / "sweep" / f)) << f;
  }
  EXPECT_NE(out_.str().find("monotone in t: yes"), std::string::npos) << out_.str();
}

TEST_F(CliTest, InfiniteThresholdReportsFullKeyframeRatio) {
  const std::string cfg = write("inf.json", R"({"tracker": {"t": "inf"},
    "sequence": {"width": 64, "height": 64, "frames": 10, "box": [10, 10, 16, 16],
                 "trajectory": {"velocity": [1, 1]}}})");
  const std::string seq = (dir_ / "seq").string();
  ASSERT_EQ(run({"synth", "--config", cfg, "--out", seq}), 0) << err_.str();
  ASSERT_EQ(run({"track", "--config", cfg, "--sequence", seq, "--out", (dir_ / "t.json").string()}), 0);
  EXPECT_NE(out_.str().find("keyframe ratio 100.0% (10/10)"), std::string::npos) << out_.str();
}

TEST_F(CliTest, OutputsAreByteIdenticalAcrossRuns) {
  const std::string seq = (dir_ / "seq").string();
  ASSERT_EQ(run({"synth", "--config", config_, "--out", seq}), 0);
  const std::string a = (dir_ / "a.json").string(), b = (dir_ / "b.json").string();
  ASSERT_EQ(run({"track", "--config", config_, "--sequence", seq, "--out", a}), 0);
  ASSERT_EQ(run({"track", "--config", config_, "--sequence", seq, "--out", b}), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  ASSERT_EQ(run({"sweep", "--config", config_, "--out", (dir_ / "s1").string()}), 0);
  ASSERT_EQ(run({"sweep", "--config", config_, "--out", (dir_ / "s2").string(), "--jobs", "2"}), 0);
  EXPECT_EQ(slurp(dir_ / "s1" / "sweep.csv"), slurp(dir_ / "s2" / "sweep.csv"));
  EXPECT_EQ(slurp(dir_ / "s1" / "auc.svg"), slurp(dir_ / "s2" / "auc.svg"));
}

TEST_F(CliTest, SeedOverrideChangesTrace) {
  const std::string seq = (dir_ / "seq").string();
  ASSERT_EQ(run({"synth", "--config", config_, "--out", seq}), 0);
  const std::string a = (dir_ / "a.json").string(), b = (dir_ / "b.json").string();
  ASSERT_EQ(run({"track", "--config", config_, "--sequence", seq, "--out", a}), 0);
  ASSERT_EQ(run({"track", "--config", config_, "--sequence", seq, "--out", b, "--seed", "99"}), 0);
  EXPECT_NE(slurp(a), slurp(b));
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"frobnicate"}), 1);
  EXPECT_EQ(run({"synth"}), 1);
  EXPECT_EQ(run({"track", "--config", config_, "--sequence", "x"}), 1);  // --out missing
  EXPECT_EQ(run({"synth", "--config", (dir_ / "missing.json").string()}), 1);
  EXPECT_EQ(run({"sweep", "--config", config_, "--jobs", "0"}), 1);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  const std::string bad = write("bad.json", "{\n  \"tracker\": {\"k\": 0}\n}");
  EXPECT_EQ(run({"synth", "--config", bad, "--out", (dir_ / "x").string()}), 2);
  EXPECT_NE(err_.str().find("line 2"), std::string::npos) << err_.str();

  const std::string exits = write("exits.json", R"({"sequence": {"width": 50, "height": 50, "frames": 40,
    "box": [5, 5, 10, 10], "trajectory": {"velocity": [3, 0]}}})");
  EXPECT_EQ(run({"synth", "--config", exits, "--out", (dir_ / "y").string()}), 2);

  const std::string seq = (dir_ / "seq").string();
  ASSERT_EQ(run({"synth", "--config", config_, "--out", seq}), 0);
  fs::remove(dir_ / "seq" / "flow_0010.flo");
  EXPECT_EQ(run({"track", "--config", config_, "--sequence", seq, "--out", (dir_ / "t.json").string()}), 2);
  EXPECT_NE(err_.str().find("flow_0010.flo"), std::string::npos) << err_.str();

  EXPECT_EQ(run({"track", "--config", config_, "--sequence", (dir_ / "nowhere").string(), "--out",
                 (dir_ / "t.json").string()}),
            2);
}

}  // namespace
}  // namespace keyflow
