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

#ifndef TRUSTSR_SELECTION_H_
#define TRUSTSR_SELECTION_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trustsr/image.h"
#include "trustsr/prompts.h"
#include "trustsr/sample_set.h"
#include "trustsr/vlm_provider.h"

namespace trustsr {

struct VlmVerdict {
  std::string candidate_id;
  int prompt_index = 0;  // -1 for the confidence question
  std::string raw_text;
  std::optional<std::string> parsed_label;
  std::optional<double> confidence;  // only for confidence prompts
  std::string provider_id;
  std::int64_t timestamp_ms = 0;
};

// First standalone integer in `text`; failing that, the first standalone
// single letter other than the articles/pronoun "a", "A" and "I".
std::optional<std::string> ParseLabel(const std::string& text);

// First number in `text` lying in [1, 100].
std::optional<double> ParseConfidence(const std::string& text);

// One verdict per (candidate, prompt), candidate-major.
std::vector<VlmVerdict> IdentifyLabels(const SampleSet& set,
                                       const PromptPool& pool,
                                       const VlmProvider& provider);

// One confidence verdict per listed candidate for `label`.
std::vector<VlmVerdict> QueryConfidence(
    const SampleSet& set, const std::vector<std::string>& candidate_ids,
    const std::string& label, const VlmProvider& provider,
    const std::string& tmpl = kConfidenceTemplate);

std::map<std::string, int> LabelHistogram(
    const std::vector<VlmVerdict>& verdicts);

// Most frequent parsed label; ties go to the smaller label. Throws
// kEmptyAfterFilter when no verdict carries a label.
std::string MajorityLabel(const std::vector<VlmVerdict>& verdicts);

inline constexpr double kDefaultConfidenceThreshold = 80.0;

struct FilterResult {
  std::vector<std::string> survivors;  // first-seen order
  std::vector<std::string> warnings;
};

// Keeps candidates whose mean confidence over verdicts labelled
// `target_label` is >= threshold. Throws kNoConfidenceData when no such
// verdict carries a confidence.
FilterResult ConfidenceFilter(const std::vector<VlmVerdict>& verdicts,
                              const std::string& target_label,
                              double threshold = kDefaultConfidenceThreshold);

struct SelectionResult {
  std::string provider_id;
  std::vector<std::string> ranked;
  std::vector<std::string> top_k;
  std::string top_1;
  std::map<int, std::string> per_prompt_choices;
  std::map<std::string, int> label_histogram;
  std::vector<std::string> warnings;
  int batch_requests = 0;
  int final_requests = 0;
};

struct ArtifactRankOptions {
  int batch_size = 10;
  int k = 5;
};

// Request text for one batch. `batch` and `batches` are 1-based counts.
std::string BatchPrompt(const std::string& prompt, int batch, int batches,
                        int images_in_batch, int total_images);
std::string FinalRoundPrompt(const std::string& prompt, int images);

// 1-based image numbers named in a ranking response, in order of mention,
// deduplicated and restricted to [1, count]. "Image 3", "#3", "candidate 3"
// and bare integers are all accepted; an explicit "image N" reference wins
// over bare integers when both occur.
std::vector<int> ParseRanking(const std::string& text, int count);

// Per prompt: one request per fixed-order batch, then a run-off over the
// batch winners when there is more than one batch. Candidates are ranked
// by how many prompts chose them, ties by id.
SelectionResult ArtifactRank(const SampleSet& set, const PromptPool& pool,
                             const VlmProvider& provider,
                             const ArtifactRankOptions& opts = {});

// Same ranking rule applied to an arbitrary choice map.
std::vector<std::string> RankByFrequency(
    const std::map<int, std::string>& choices,
    const std::vector<std::string>& candidate_ids);

// Per-image choices under each prompt: prompt index -> chosen value.
using PromptChoices = std::map<int, std::string>;

// Percentage of images whose choices coincide across every prompt.
double PromptConsistency(const std::vector<PromptChoices>& per_image);
// Mean share of prompts agreeing with each image's modal choice, as a
// percentage. Reported next to the all-agree figure.
double PromptModeShare(const std::vector<PromptChoices>& per_image);

// Per-candidate label choices from identification verdicts.
std::vector<PromptChoices> LabelChoicesByCandidate(
    const std::vector<VlmVerdict>& verdicts);

// Ranks candidates by how many prompts produced the majority label.
SelectionResult InformationSelection(const std::vector<VlmVerdict>& verdicts,
                                     const std::vector<std::string>& ids,
                                     int k = 5);

struct HumanSelection {
  std::string scene_id;
  std::string participant_id;
  int rank = 1;
  std::string candidate_id;
};

// CSV: scene_id,participant_id,rank,candidate_id (header optional).
std::vector<HumanSelection> LoadHumanSelections(
    const std::filesystem::path& path);

struct HumanConsensus {
  std::string top_1;               // modal rank-1 pick, ties by id
  std::vector<std::string> top_k;  // by count of top-k placements, ties id
};

HumanConsensus ComputeHumanConsensus(
    const std::vector<HumanSelection>& rows, const std::string& scene_id,
    int k);

struct AgreementResult {
  double top_1 = 0.0;        // % of scenes where top-1 picks match
  double top_k_overlap = 0.0;  // mean |VLM top-k ∩ human top-k| / k, in %
  int scenes = 0;
};

// `vlm` maps scene_id to that scene's selection. Throws kMissingHumanData
// when a scene has no human rows.
AgreementResult HumanAgreement(
    const std::map<std::string, SelectionResult>& vlm,
    const std::vector<HumanSelection>& human, int k = 5);

// One provider's row of the prompt-robustness table. Information
// consistency treats each candidate as an image (its label under every
// prompt); artifact consistency treats each scene as an image (its chosen
// candidate under every prompt). Agreement columns are empty when no human
// data covers the scenes.
struct RobustnessRow {
  std::string provider_id;
  double consistency_info = 0.0;
  double consistency_artifact = 0.0;
  double mode_share_info = 0.0;
  double mode_share_artifact = 0.0;
  std::optional<double> agreement_info;
  std::optional<double> agreement_artifact;
  std::optional<double> agreement_info_top_k;
  std::optional<double> agreement_artifact_top_k;
  int scenes = 0;
  std::vector<std::string> warnings;
};

// `human` may be null.
RobustnessRow ComputeRobustness(const std::vector<SampleSet>& scenes,
                                const PromptPool& info_pool,
                                const PromptPool& artifact_pool,
                                const VlmProvider& provider,
                                const std::vector<HumanSelection>* human,
                                const ArtifactRankOptions& opts = {});

struct PipelineOptions {
  double confidence_threshold = kDefaultConfidenceThreshold;
  std::string confidence_template = kConfidenceTemplate;
  ArtifactRankOptions rank;
};

struct PipelineResult {
  SelectionResult selection;
  Image ensemble;
  std::string majority_label;
  std::map<std::string, int> prefilter_histogram;
  std::vector<std::string> survivors;
  std::vector<VlmVerdict> identify_verdicts;
  std::vector<VlmVerdict> confidence_verdicts;
};

// Identify labels, keep candidates confident in the majority label, rank
// the survivors for artifacts and average the top k. Throws
// kEmptyAfterFilter (message carries the histogram) when nothing survives.
PipelineResult TwoStagePipeline(const SampleSet& set,
                                const PromptPool& info_pool,
                                const PromptPool& artifact_pool,
                                const VlmProvider& info_provider,
                                const VlmProvider& artifact_provider,
                                const PipelineOptions& opts = {});

}  // namespace trustsr

#endif  // TRUSTSR_SELECTION_H_
