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

#include <algorithm>
#include <cmath>

#include "oracles.h"
#include "test_util.h"
#include "trustsr/embedding.h"
#include "trustsr/harness.h"
#include "trustsr/tws.h"

namespace trustsr {
namespace {

TwsBreakdown Row(std::string id, double clip, double edge, double wav) {
  TwsBreakdown r;
  r.candidate_id = std::move(id);
  r.s_clip_raw = clip;
  r.s_edge_raw = edge;
  r.s_wavelet_raw = wav;
  return r;
}

SampleSet SetOf(const Image& ref, std::vector<std::pair<std::string, Image>> c) {
  SampleSet s;
  s.scene_id = "t";
  s.reference = ref;
  for (auto& [id, img] : c) s.candidates.push_back({id, img, {}});
  return s;
}

TEST(WeightsTest, DefaultsAndParsing) {
  const TwsWeights w;
  EXPECT_EQ(w.clip, 0.2);
  EXPECT_EQ(w.edge, 0.3);
  EXPECT_EQ(w.wavelet, 0.5);
  EXPECT_EQ(ParseWeights("0.2,0.3,0.5"), w);
  EXPECT_TRUSTSR_ERROR(ParseWeights("0.2,0.3"), ErrorCode::kConfigError);
  EXPECT_TRUSTSR_ERROR(ParseWeights("0.2,x,0.5"), ErrorCode::kConfigError);
  EXPECT_TRUSTSR_ERROR(ParseWeights("0.2,-0.3,0.5"), ErrorCode::kConfigError);
}

TEST(NormalizeTest, MinMax) {
  std::vector<TwsBreakdown> rows = {Row("a", 0.5, 0.5, 0.1),
                                    Row("b", 0.5, 0.5, 0.2),
                                    Row("c", 0.5, 0.5, 0.3)};
  NormalizeComponents(rows, {WaveletNormalization::kMinMax, 1.0});
  EXPECT_NEAR(rows[0].s_wavelet, 0.0, 1e-15);
  EXPECT_NEAR(rows[1].s_wavelet, 0.5, 1e-12);
  EXPECT_NEAR(rows[2].s_wavelet, 1.0, 1e-15);
}

TEST(NormalizeTest, SingleCandidateMinMaxIsZero) {
  std::vector<TwsBreakdown> rows = {Row("a", 0.5, 0.5, 0.7)};
  NormalizeComponents(rows, {WaveletNormalization::kMinMax, 1.0});
  EXPECT_EQ(rows[0].s_wavelet, 0.0);
}

TEST(NormalizeTest, ClampsAndFixedScale) {
  std::vector<TwsBreakdown> rows = {Row("a", 1.0, -0.2, 0.05),
                                    Row("b", -0.5, 1.0, 3.0)};
  NormalizeComponents(rows);
  EXPECT_EQ(rows[0].s_clip, 1.0);
  EXPECT_EQ(rows[0].s_edge, 0.0);
  EXPECT_EQ(rows[0].s_wavelet, 0.05);
  EXPECT_EQ(rows[1].s_clip, 0.0);
  EXPECT_EQ(rows[1].s_wavelet, 1.0);
  NormalizeComponents(rows, {WaveletNormalization::kFixedScale, 0.1});
  EXPECT_NEAR(rows[0].s_wavelet, 0.5, 1e-15);
  std::vector<TwsBreakdown> none;
  EXPECT_TRUSTSR_ERROR(NormalizeComponents(none), ErrorCode::kEmptyInput);
  EXPECT_TRUSTSR_ERROR(
      NormalizeComponents(rows, {WaveletNormalization::kFixedScale, 0.0}),
      ErrorCode::kConfigError);
}

TEST(NormalizeTest, MinMaxRankingIgnoresConstantShift) {
  std::vector<TwsBreakdown> rows = {Row("a", 0.9, 0.8, 0.11),
                                    Row("b", 0.7, 0.9, 0.05),
                                    Row("c", 0.8, 0.6, 0.2)};
  std::vector<TwsBreakdown> shifted = rows;
  for (auto& r : shifted) r.s_wavelet_raw += 0.37;
  const Normalization mm{WaveletNormalization::kMinMax, 1.0};
  NormalizeComponents(rows, mm);
  NormalizeComponents(shifted, mm);
  ApplyWeights(rows, {});
  ApplyWeights(shifted, {});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].candidate_id, shifted[i].candidate_id);
  }
}

TEST(CombineTest, FormulaAndMonotonicity) {
  TwsBreakdown r;
  r.s_clip = 0.9;
  r.s_edge = 0.7;
  r.s_wavelet = 0.2;
  const TwsWeights w;
  EXPECT_DOUBLE_EQ(CombineTws(r, w), 0.2 * 0.9 + 0.3 * 0.7 - 0.5 * 0.2);
  for (double step : {0.01, 0.1}) {
    TwsBreakdown up = r;
    up.s_clip += step;
    EXPECT_GE(CombineTws(up, w), CombineTws(r, w));
    up = r;
    up.s_edge += step;
    EXPECT_GE(CombineTws(up, w), CombineTws(r, w));
    up = r;
    up.s_wavelet += step;
    EXPECT_LE(CombineTws(up, w), CombineTws(r, w));
  }
  EXPECT_EQ(CombineTws(r, {0, 0, 0}), 0.0);
}

TEST(CombineTest, EqualWeightsDiffer) {
  TwsBreakdown r;
  r.s_clip = 0.95;
  r.s_edge = 0.6;
  r.s_wavelet = 0.1;
  const auto grid = DefaultAblationGrid();
  EXPECT_NE(CombineTws(r, grid[0].weights), CombineTws(r, grid[1].weights));
}

TEST(ApplyWeightsTest, SortsWithIdTieBreak) {
  std::vector<TwsBreakdown> rows = {Row("b", 0.5, 0.5, 0.1),
                                    Row("a", 0.5, 0.5, 0.1),
                                    Row("c", 0.9, 0.9, 0.0)};
  NormalizeComponents(rows);
  ApplyWeights(rows, {});
  EXPECT_EQ(rows[0].candidate_id, "c");
  EXPECT_EQ(rows[1].candidate_id, "a");
  EXPECT_EQ(rows[2].candidate_id, "b");
}

TEST(ScoreTest, ConstantIdentityIsHalf) {
  const Image ref(64, 64, 1, 0.4);
  const MockEmbeddingProvider mock(64, 0);
  const auto rows = ScoreSampleSet(SetOf(ref, {{"same", ref}}), {}, mock);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].s_clip, 1.0, 1e-12);
  EXPECT_NEAR(rows[0].s_edge, 1.0, 1e-12);
  EXPECT_NEAR(rows[0].s_wavelet, 0.0, 1e-12);
  EXPECT_NEAR(rows[0].tws, 0.5, 1e-9);
}

TEST(ScoreTest, NoiseRanking) {
  const MockEmbeddingProvider mock(64, 0);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Image ref = MakeTexturedReference(96, seed);
    const Image mild =
        Degrade(ref, {DegradationKind::kAdditiveGaussianNoise, 0.02, seed});
    const Image heavy =
        Degrade(ref, {DegradationKind::kAdditiveGaussianNoise, 0.15, seed});
    const auto rows = ScoreSampleSet(
        SetOf(ref, {{"heavy", heavy}, {"mild", mild}, {"copy", ref}}), {}, mock);
    EXPECT_EQ(rows[0].candidate_id, "copy");
    EXPECT_EQ(rows[1].candidate_id, "mild");
    EXPECT_EQ(rows[2].candidate_id, "heavy");
    for (const auto& r : rows) {
      EXPECT_NEAR(r.tws, CombineTws(r, {}), 1e-15);
      for (double v : {r.s_clip, r.s_edge, r.s_wavelet}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(ScoreTest, ParallelMatchesSerial) {
  const MockEmbeddingProvider mock(32, 1);
  const Image ref = MakeTexturedReference(64, 4);
  const std::vector<double> strengths = {0.5, 1.0, 1.5, 2.0, 3.0};
  const SampleSet ladder =
      BuildLadder(ref, DegradationKind::kGaussianBlur, strengths);
  TwsOptions serial, parallel;
  parallel.jobs = 4;
  const auto a = ScoreSampleSet(ref, ladder, {}, mock, serial);
  const auto b = ScoreSampleSet(ref, ladder, {}, mock, parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].candidate_id, b[i].candidate_id);
    EXPECT_EQ(a[i].tws, b[i].tws);
  }
}

TEST(ScoreTest, Errors) {
  const MockEmbeddingProvider mock(16, 0);
  SampleSet s = SetOf(Image(64, 64, 1), {{"x", Image(64, 64, 1)}});
  s.reference.reset();
  EXPECT_TRUSTSR_ERROR(ScoreSampleSet(s, {}, mock), ErrorCode::kMissingReference);
  EXPECT_TRUSTSR_ERROR(
      ScoreSampleSet(SetOf(Image(64, 64, 1), {{"x", Image(64, 65, 1)}}), {}, mock),
      ErrorCode::kShapeMismatch);
  EXPECT_TRUSTSR_ERROR(ScoreSampleSet(SetOf(Image(64, 64, 1), {}), {}, mock),
                       ErrorCode::kEmptyInput);
}

TEST(AblationTest, GridShapeAndZeroWeights) {
  const auto grid = DefaultAblationGrid();
  ASSERT_EQ(grid.size(), 5u);
  EXPECT_EQ(grid[0].weights, TwsWeights{});
  EXPECT_EQ(grid[4].weights.wavelet, 0.0);
  std::vector<TwsBreakdown> rows = {Row("a", 0.9, 0.8, 0.1),
                                    Row("b", 0.7, 0.6, 0.3)};
  NormalizeComponents(rows);
  const auto table = AblationSweep(rows, grid);
  ASSERT_EQ(table.size(), 5u);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(table[i].name, grid[i].name);
    double mean = 0.0;
    for (const auto& r : rows) mean += CombineTws(r, grid[i].weights);
    EXPECT_NEAR(table[i].mean_tws, mean / 2, 1e-15);
  }
  const auto zero = AblationSweep(rows, {{"zero", {0, 0, 0}}});
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0].mean_tws, 0.0);
  EXPECT_TRUSTSR_ERROR(AblationSweep(rows, {}), ErrorCode::kConfigError);
}

TEST(AblationTest, DroppingWaveletLiftsNoisyCandidates) {
  // Noisy candidates keep strong edges and embeddings, mildly flattened clean
  // copies lose a little of both; only the wavelet term separates them.
  const MockEmbeddingProvider mock(64, 7);
  const Image ref = MakeTexturedReference(96, 2);
  SampleSet set = SetOf(ref, {});
  for (int i = 0; i < 3; ++i) {
    const double c = 0.92 - 0.02 * i;
    std::vector<double> d(ref.data().begin(), ref.data().end());
    for (double& v : d) v = 0.5 + c * (v - 0.5);
    set.candidates.push_back({"clean-" + std::to_string(i), Image(96, 96, 1, d), {}});
    set.candidates.push_back(
        {"noisy-" + std::to_string(i),
         Degrade(ref, {DegradationKind::kAdditiveGaussianNoise,
                       0.006 * (1 + 0.25 * i), 100u + i}),
         {}});
  }
  auto rows = ComputeRawComponents(ref, set, mock);
  NormalizeComponents(rows);
  const auto table = AblationSweep(rows, DefaultAblationGrid());
  auto noisy_rank = [](const AblationRow& row) {
    int best = 99;
    for (std::size_t i = 0; i < row.ranking.size(); ++i) {
      if (row.ranking[i].rfind("noisy", 0) == 0) best = std::min<int>(best, i);
    }
    return best;
  };
  EXPECT_EQ(noisy_rank(table[0]), 3);  // all clean first
  EXPECT_LT(noisy_rank(table[4]), noisy_rank(table[0]));
}

}  // namespace
}  // namespace trustsr
