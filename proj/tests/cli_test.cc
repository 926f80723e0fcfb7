// Copyright 2026 The TrustSR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "../tools/cli.h"
#include "oracles.h"
#include "test_util.h"
#include "trustsr/harness.h"
#include "trustsr/image_io.h"
#include "trustsr/prompts.h"
#include "trustsr/sample_set.h"
#include "trustsr/selection.h"
#include "trustsr/vlm_provider.h"

namespace trustsr {
namespace {

using nlohmann::json;
using testing::TempDir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

json ReadJson(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string Ladder(const TempDir& dir, const std::string& kind,
                   const std::string& strengths) {
  const std::string manifest = (dir / "in" / (kind + ".json")).string();
  const CliRun r = Cli({"degrade", "--synthetic", "64", "--seed", "3", "--kind", kind,
                     "--ladder", "--strengths", strengths, "--output", manifest});
  EXPECT_EQ(r.code, 0) << r.err;
  return manifest;
}

// Answers label questions with "7", confidence with 90 for the first
// `keep` candidates, and ranks by preferring the candidate `favourite`.
ScriptedVlmProvider::Script Judge(const SampleSet& set, int keep, int favourite) {
  return [&set, keep, favourite](const VlmRequest& req) -> std::string {
    auto index_of = [&](const Image& img) {
      for (std::size_t i = 0; i < set.candidates.size(); ++i) {
        if (set.candidates[i].image == img) return static_cast<int>(i);
      }
      return -1;
    };
    if (req.prompt.find("Rank the images") != std::string::npos) {
      std::size_t pos = 0;
      for (std::size_t i = 0; i < req.images.size(); ++i) {
        if (index_of(req.images[i]) == favourite) pos = i;
      }
      return "Image " + std::to_string(pos + 1);
    }
    if (req.prompt.find("how certain") != std::string::npos) {
      return index_of(req.images[0]) < keep ? "90" : "30";
    }
    return "It looks like a 7";
  };
}

std::string Record(const TempDir& dir, const std::string& manifest, int keep,
                   int favourite, const std::string& id = "judge") {
  const SampleSet set = LoadSampleSet(manifest);
  auto live = std::make_shared<ScriptedVlmProvider>(id, Judge(set, keep, favourite));
  auto log = std::make_shared<ReplayLog>();
  RecordingVlmProvider rec(live, log);
  TwoStagePipeline(set, DefaultInformationPool(), DefaultArtifactPool(), rec, rec);
  const std::string path = (dir / (id + ".jsonl")).string();
  log->Save(path);
  return path;
}

TEST(CliTest, ScoreWritesRankedReports) {
  TempDir dir;
  const std::string m = Ladder(dir, "blur", "0.5,1,1.5,2.5");
  const CliRun r = Cli({"score", "-m", m, "--out", (dir / "o").string(),
                     "--format", "json,csv", "--no-cache"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = ReadJson(dir / "o" / "scores.json");
  ASSERT_EQ(j.at("scores").size(), 4u);
  EXPECT_EQ(j["scores"][0].at("rank"), 1);
  EXPECT_EQ(j["scores"][0].at("candidate_id"), "blur-00");
  EXPECT_EQ(j.at("config").at("weights").at("wavelet"), 0.5);
  EXPECT_TRUE(std::filesystem::exists(dir / "o" / "scores.csv"));

  const CliRun again = Cli({"score", "-m", m, "--out", (dir / "o2").string(),
                         "--weights", "0.2,0.3,0.5", "--format", "json",
                         "--no-cache"});
  ASSERT_EQ(again.code, 0) << again.err;
  // Same scores; only the recorded formats differ.
  EXPECT_EQ(ReadJson(dir / "o" / "scores.json").at("scores").dump(),
            ReadJson(dir / "o2" / "scores.json").at("scores").dump());
  EXPECT_FALSE(std::filesystem::exists(dir / "o2" / "scores.csv"));
}

TEST(CliTest, ConfigFileAndFlagPrecedence) {
  TempDir dir;
  const std::string m = Ladder(dir, "noise", "0.01,0.05");
  std::ofstream(dir / "cfg.json") << R"({"weights": [1, 0, 0], "formats": "csv"})";
  const CliRun r = Cli({"score", "-m", m, "--out", (dir / "o").string(), "--config",
                     (dir / "cfg.json").string(), "--weights", "0,1,0",
                     "--no-cache"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "o" / "scores.json"));
  std::ifstream csv(dir / "o" / "scores.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_NE(header.find("tws"), std::string::npos);
}

TEST(CliTest, MissingReferenceExitsThree) {
  TempDir dir;
  SampleSet set;
  set.scene_id = "noref";
  set.candidates.push_back({"a", oracle::RandomImage(64, 64, 1), {}});
  SaveSampleSet(set, dir / "in" / "m.json");
  const CliRun r = Cli({"score", "-m", (dir / "in" / "m.json").string(), "--out",
                     (dir / "o").string(), "--no-cache"});
  EXPECT_EQ(r.code, 3);
  const json e = json::parse(r.err);
  EXPECT_EQ(e.at("error"), "MissingReference");
  EXPECT_EQ(e.at("exit_code"), 3);
  EXPECT_FALSE(e.at("message").get<std::string>().empty());
}

TEST(CliTest, OutputMustDifferFromInput) {
  TempDir dir;
  const std::string m = Ladder(dir, "blur", "1,2");
  const CliRun r = Cli({"score", "-m", m, "--out", (dir / "in").string(), "--no-cache"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err).at("error"), "ConfigError");
  EXPECT_EQ(Cli({"score", "-m", m, "--no-cache"}).code, 2);
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  const CliRun r = Cli({"score", "--weights", "1,2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err).at("error"), "UsageError");
  EXPECT_EQ(Cli({"--help"}).code, 0);
}

TEST(CliTest, SelectNeedsAProvider) {
  TempDir dir;
  const std::string m = Ladder(dir, "blur", "1,2");
  const CliRun r = Cli({"select", "-m", m, "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err).at("error"), "ConfigError");
}

TEST(CliTest, SelectReplayWithKOneGivesTopOne) {
  TempDir dir;
  const std::string m = Ladder(dir, "noise", "0.01,0.02,0.04,0.08,0.1");
  const std::string log = Record(dir, m, 4, 2);
  const CliRun r = Cli({"select", "-m", m, "--replay", log, "--k", "1", "--out",
                     (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = ReadJson(dir / "o" / "selection.json");
  EXPECT_EQ(j.at("selection").at("top_1"), "noise-02");
  EXPECT_EQ(j["selection"].at("top_k").size(), 1u);
  EXPECT_EQ(j.at("stage1").at("majority_label"), "7");
  EXPECT_EQ(j["stage1"].at("survivors").size(), 4u);
  EXPECT_EQ(j.at("config").at("mode"), "replay");
  const SampleSet set = LoadSampleSet(m);
  EXPECT_EQ(LoadImage(dir / "o" / "ensemble.png"), set.Find("noise-02").image);
}

TEST(CliTest, SelectEverythingFilteredExitsFive) {
  TempDir dir;
  const std::string m = Ladder(dir, "blur", "1,2,3");
  const std::string log = Record(dir, m, 3, 0);
  const CliRun r = Cli({"select", "-m", m, "--replay", log, "--threshold", "95",
                     "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 5);
  EXPECT_EQ(json::parse(r.err).at("error"), "EmptyAfterFilter");
}

TEST(CliTest, ReplayMissIsProviderError) {
  TempDir dir;
  const std::string m = Ladder(dir, "blur", "1,2,3");
  const std::string other = Ladder(dir, "noise", "0.01,0.02,0.03");
  const std::string log = Record(dir, other, 3, 0);
  const CliRun r = Cli({"select", "-m", m, "--replay", log, "--out",
                     (dir / "o").string()});
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(json::parse(r.err).at("error"), "ProviderError");
}

TEST(CliTest, RobustnessWithoutHumansHasNullAgreement) {
  TempDir dir;
  const std::string m = Ladder(dir, "pixelate", "2,3,4");
  const std::string log = Record(dir, m, 3, 1);
  const CliRun r = Cli({"robustness", "-m", m, "--replay", log, "--format",
                     "json,csv", "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = ReadJson(dir / "o" / "robustness.json");
  ASSERT_EQ(j.at("rows").size(), 1u);
  const json& row = j["rows"][0];
  EXPECT_EQ(row.at("provider_id"), "judge");
  EXPECT_TRUE(row.at("agreement_info").is_null());
  EXPECT_TRUE(row.at("agreement_artifact").is_null());
  EXPECT_EQ(row.at("consistency_artifact"), 100.0);
  EXPECT_EQ(row.at("consistency_info"), 100.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "o" / "robustness.csv"));

  std::ofstream(dir / "human.csv")
      << "scene_id,participant_id,rank,candidate_id\nladder,p1,1,pixelate-01\n";
  const CliRun h = Cli({"robustness", "-m", m, "--replay", log, "--human",
                     (dir / "human.csv").string(), "--out", (dir / "h").string()});
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_EQ(ReadJson(dir / "h" / "robustness.json")["rows"][0].at(
                "agreement_artifact"),
            100.0);
}

TEST(CliTest, AblationGrid) {
  TempDir dir;
  const std::string m = Ladder(dir, "noise", "0.01,0.03,0.06");
  const CliRun d = Cli({"ablation", "-m", m, "--out", (dir / "d").string(), "--no-cache"});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(ReadJson(dir / "d" / "ablation.json").at("rows").size(), 5u);

  std::ofstream(dir / "grid.json")
      << R"([{"name": "off", "weights": [0, 0, 0]}])";
  const CliRun r = Cli({"ablation", "-m", m, "--grid", (dir / "grid.json").string(),
                     "--out", (dir / "o").string(), "--no-cache"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = ReadJson(dir / "o" / "ablation.json");
  ASSERT_EQ(j.at("rows").size(), 1u);
  EXPECT_EQ(j["rows"][0].at("name"), "off");
  EXPECT_EQ(j["rows"][0].at("mean_tws"), 0.0);

  std::ofstream(dir / "bad.json") << R"([{"weights": [1, 0, 0]}])";
  EXPECT_EQ(Cli({"ablation", "-m", m, "--grid", (dir / "bad.json").string(),
                 "--out", (dir / "b").string(), "--no-cache"})
                .code,
            2);
}

TEST(CliTest, Ensemble) {
  TempDir dir;
  const Image a = oracle::RandomImage(16, 16, 1);
  const Image b = oracle::RandomImage(16, 16, 2);
  SaveImage(dir / "a.png", a, 16);
  SaveImage(dir / "b.png", b, 16);
  const CliRun r = Cli({"ensemble", (dir / "a.png").string(), (dir / "b.png").string(),
                     "--output", (dir / "e.png").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Image e = LoadImage(dir / "e.png");
  const Image la = LoadImage(dir / "a.png");
  const Image lb = LoadImage(dir / "b.png");
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_NEAR(e.data()[i], (la.data()[i] + lb.data()[i]) / 2, 0.5 / 65535 + 1e-12);
  }
  EXPECT_EQ(Cli({"ensemble", "--output", (dir / "x.png").string()}).code, 2);
}

TEST(CliTest, StatsCommands) {
  TempDir dir;
  const auto& f = oracle::TTestFixtures()[1];
  auto write = [&](const std::string& name, const std::vector<double>& v) {
    std::ofstream out(dir / name);
    out << "value\n";
    for (double x : v) out << std::setprecision(17) << x << "\n";
    return (dir / name).string();
  };
  const std::string a = write("a.txt", f.a);
  const std::string b = write("b.txt", f.b);
  const CliRun t = Cli({"stats", "ttest", "--a", a, "--b", b});
  ASSERT_EQ(t.code, 0) << t.err;
  const json tj = json::parse(t.out);
  EXPECT_NEAR(tj.at("t_statistic").get<double>(), f.t, 1e-6);
  EXPECT_NEAR(tj.at("p_value").get<double>(), f.p, 1e-8);
  EXPECT_EQ(tj.at("degrees_of_freedom"), f.dof);

  EXPECT_EQ(Cli({"stats", "ttest", "--a", a}).code, 2);
  const CliRun one = Cli({"stats", "ttest", "--a", a, "--mu0", "0.5"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(json::parse(one.out).at("mu0"), 0.5);
  EXPECT_EQ(Cli({"stats", "ttest", "--a", a, "--b", b, "--tails", "up"}).code, 2);

  const std::string x = write("x.txt", {1, 2, 3});
  const std::string y = write("y.txt", {1, 3, 2});
  const CliRun p = Cli({"stats", "pearson", "--x", x, "--y", y});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_NEAR(json::parse(p.out).at("pearson").get<double>(), 0.5, 1e-15);
  const std::string z = write("z.txt", {1, 2});
  EXPECT_EQ(Cli({"stats", "pearson", "--x", x, "--y", z}).code, 3);

  std::ofstream(dir / "mos.csv") << "image_id,mos\na,1\nb,2\nc,3\n";
  std::ofstream(dir / "s.csv") << "a,0.1,g\nb,0.3,g\nc,0.2,h\n";
  const CliRun m = Cli({"stats", "mos", "--scores", (dir / "s.csv").string(), "--mos",
                     (dir / "mos.csv").string()});
  ASSERT_EQ(m.code, 0) << m.err;
  const json mj = json::parse(m.out);
  EXPECT_NEAR(mj.at("overall").get<double>(), 0.5, 1e-15);
  EXPECT_EQ(mj.at("n"), 3);
}

TEST(CliTest, DegradeSingleImageAndLadder) {
  TempDir dir;
  const CliRun r = Cli({"degrade", "--synthetic", "32", "--kind", "quantize",
                     "--strength", "2", "--output", (dir / "q.png").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Image q = LoadImage(dir / "q.png");
  for (double v : q.data()) {
    EXPECT_TRUE(std::abs(v - 0.25) < 1e-4 || std::abs(v - 0.75) < 1e-4) << v;
  }
  const std::string m = Ladder(dir, "quantize", "4,8,16,32");
  const SampleSet set = LoadSampleSet(m);
  EXPECT_EQ(set.candidates.size(), 4u);
  EXPECT_EQ(set.truth_order.front(), "quantize-03");
  ASSERT_TRUE(set.reference.has_value());
  EXPECT_EQ(Cli({"degrade", "--synthetic", "32", "--kind", "jpeg", "--output",
                 (dir / "j.png").string()})
                .code,
            2);
  EXPECT_EQ(Cli({"degrade", "--kind", "blur", "--output", (dir / "n.png").string()})
                .code,
            2);
  EXPECT_EQ(Cli({"degrade", "--input", (dir / "missing.png").string(), "--kind",
                 "blur", "--output", (dir / "n.png").string()})
                .code,
            3);
}

}  // namespace
}  // namespace trustsr
