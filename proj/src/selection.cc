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

#include "trustsr/selection.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "trustsr/error.h"
#include "trustsr/parallel.h"

namespace trustsr {

namespace {

bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }
bool IsAlpha(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool IsDigit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

// A letter glued to a word by an apostrophe ("don't", "it's") is not a
// standalone token, but a quoted letter ("`B'") is.
bool LetterBoundary(const std::string& s, std::ptrdiff_t i, int dir) {
  const std::ptrdiff_t j = i + dir;
  if (j < 0 || j >= static_cast<std::ptrdiff_t>(s.size())) return true;
  if (IsAlnum(s[j])) return false;
  if (s[j] == '\'') {
    const std::ptrdiff_t k = j + dir;
    if (k >= 0 && k < static_cast<std::ptrdiff_t>(s.size()) && IsAlpha(s[k])) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) {
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
    while (!f.empty() && f.front() == ' ') f.erase(f.begin());
    out.push_back(f);
  }
  return out;
}

std::string HistogramText(const std::map<std::string, int>& hist) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [label, n] : hist) j[label] = n;
  return j.dump();
}

void CheckK(int k) {
  if (k < 1) throw Error(ErrorCode::kConfigError, "k must be >= 1");
}

std::vector<std::string> Prefix(const std::vector<std::string>& v, int k) {
  return {v.begin(), v.begin() + std::min<std::size_t>(v.size(), k)};
}

}  // namespace

std::optional<std::string> ParseLabel(const std::string& text) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(text.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!IsDigit(text[i]) || (i > 0 && IsAlnum(text[i - 1]))) continue;
    std::ptrdiff_t j = i;
    while (j < n && IsDigit(text[j])) ++j;
    if (j == n || !IsAlnum(text[j])) return text.substr(i, j - i);
    i = j;
  }
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (!IsAlpha(c) || c == 'a' || c == 'A' || c == 'I') continue;
    if (LetterBoundary(text, i, -1) && LetterBoundary(text, i, +1)) {
      return std::string(1, c);
    }
  }
  return std::nullopt;
}

std::optional<double> ParseConfidence(const std::string& text) {
  // Echoes of the scale itself ("1 to 100", "1-100") are not answers.
  static const std::regex kScale(R"(\b1\s*(?:to|-)\s*100\b)",
                                 std::regex::icase);
  const std::string s = std::regex_replace(text, kScale, " ");
  static const std::regex kNumber(R"((?:^|[^A-Za-z0-9.])(\d+(?:\.\d+)?))");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kNumber);
       it != std::sregex_iterator(); ++it) {
    const double v = std::stod((*it)[1]);
    if (v >= 1.0 && v <= 100.0) return v;
  }
  return std::nullopt;
}

std::vector<VlmVerdict> IdentifyLabels(const SampleSet& set,
                                       const PromptPool& pool,
                                       const VlmProvider& provider) {
  if (pool.axis != PromptAxis::kInformation) {
    throw Error(ErrorCode::kConfigError,
                "label identification needs an information prompt pool");
  }
  pool.Validate();
  const std::size_t prompts = pool.prompts.size();
  std::vector<VlmVerdict> out(set.candidates.size() * prompts);
  const std::string pid = provider.provider_id();
  ParallelFor(out.size(), provider.max_in_flight(), [&](std::size_t i) {
    const Candidate& c = set.candidates[i / prompts];
    const int p = static_cast<int>(i % prompts);
    VlmResponse r =
        provider.Ask(std::span<const Image>(&c.image, 1), pool.prompts[p]);
    VlmVerdict& v = out[i];
    v.candidate_id = c.id;
    v.prompt_index = p;
    v.parsed_label = ParseLabel(r.text);
    v.raw_text = std::move(r.text);
    v.provider_id = pid;
    v.timestamp_ms = r.timestamp_ms;
  });
  return out;
}

std::vector<VlmVerdict> QueryConfidence(
    const SampleSet& set, const std::vector<std::string>& candidate_ids,
    const std::string& label, const VlmProvider& provider,
    const std::string& tmpl) {
  const std::string prompt = FormatConfidencePrompt(tmpl, label);
  std::vector<VlmVerdict> out(candidate_ids.size());
  const std::string pid = provider.provider_id();
  ParallelFor(out.size(), provider.max_in_flight(), [&](std::size_t i) {
    const Candidate& c = set.Find(candidate_ids[i]);
    VlmResponse r = provider.Ask(std::span<const Image>(&c.image, 1), prompt);
    VlmVerdict& v = out[i];
    v.candidate_id = c.id;
    v.prompt_index = -1;
    v.parsed_label = label;
    v.confidence = ParseConfidence(r.text);
    v.raw_text = std::move(r.text);
    v.provider_id = pid;
    v.timestamp_ms = r.timestamp_ms;
  });
  return out;
}

std::map<std::string, int> LabelHistogram(
    const std::vector<VlmVerdict>& verdicts) {
  std::map<std::string, int> hist;
  for (const VlmVerdict& v : verdicts) {
    if (v.prompt_index >= 0 && v.parsed_label) ++hist[*v.parsed_label];
  }
  return hist;
}

std::string MajorityLabel(const std::vector<VlmVerdict>& verdicts) {
  const auto hist = LabelHistogram(verdicts);
  if (hist.empty()) {
    throw Error(ErrorCode::kEmptyAfterFilter,
                "no response yielded a parseable label");
  }
  // std::map iterates labels ascending, so the first maximum wins ties.
  auto best = hist.begin();
  for (auto it = hist.begin(); it != hist.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

FilterResult ConfidenceFilter(const std::vector<VlmVerdict>& verdicts,
                              const std::string& target_label,
                              double threshold) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, int>> sums;
  bool any = false;
  for (const VlmVerdict& v : verdicts) {
    if (v.parsed_label != target_label) continue;
    if (!sums.count(v.candidate_id)) {
      order.push_back(v.candidate_id);
      sums[v.candidate_id] = {0.0, 0};
    }
    if (v.confidence) {
      any = true;
      sums[v.candidate_id].first += *v.confidence;
      sums[v.candidate_id].second += 1;
    }
  }
  if (!any) {
    throw Error(ErrorCode::kNoConfidenceData,
                "no confidence values recorded for label " + target_label);
  }
  FilterResult out;
  for (const std::string& id : order) {
    const auto [sum, n] = sums[id];
    if (n == 0) {
      out.warnings.push_back("no parseable confidence for " + id);
      continue;
    }
    if (sum / n >= threshold) out.survivors.push_back(id);
  }
  return out;
}

std::string BatchPrompt(const std::string& prompt, int batch, int batches,
                        int images_in_batch, int total_images) {
  std::ostringstream s;
  s << "There are " << total_images << " images split into " << batches
    << " batches. This is batch " << batch << " of " << batches
    << "; its images are numbered 1 to " << images_in_batch << ". " << prompt
    << " Rank the images from best to worst, answering in the form "
       "\"Image 2, Image 1, ...\".";
  return s.str();
}

std::string FinalRoundPrompt(const std::string& prompt, int images) {
  std::ostringstream s;
  s << "These " << images
    << " images were the best of their batches; they are numbered 1 to "
    << images << ". " << prompt
    << " Rank the images from best to worst, answering in the form "
       "\"Image 2, Image 1, ...\".";
  return s.str();
}

std::vector<int> ParseRanking(const std::string& text, int count) {
  static const std::regex kTagged(
      R"((?:image|img|candidate|sample|#)\s*#?\s*(\d+))", std::regex::icase);
  static const std::regex kBare(R"((?:^|[^A-Za-z0-9.])(\d+)(?![A-Za-z0-9]))");
  auto collect = [&](const std::regex& re) {
    std::vector<int> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it) {
      const std::string digits = (*it)[1];
      if (digits.size() > 6) continue;
      const int n = std::stoi(digits);
      if (n >= 1 && n <= count &&
          std::find(out.begin(), out.end(), n) == out.end()) {
        out.push_back(n);
      }
    }
    return out;
  };
  std::vector<int> tagged = collect(kTagged);
  return tagged.empty() ? collect(kBare) : tagged;
}

std::vector<std::string> RankByFrequency(
    const std::map<int, std::string>& choices,
    const std::vector<std::string>& candidate_ids) {
  std::map<std::string, int> freq;
  for (const auto& [p, id] : choices) ++freq[id];
  std::vector<std::string> ranked = candidate_ids;
  std::sort(ranked.begin(), ranked.end(),
            [&](const std::string& a, const std::string& b) {
              const int fa = freq.count(a) ? freq.at(a) : 0;
              const int fb = freq.count(b) ? freq.at(b) : 0;
              return fa != fb ? fa > fb : a < b;
            });
  return ranked;
}

SelectionResult ArtifactRank(const SampleSet& set, const PromptPool& pool,
                             const VlmProvider& provider,
                             const ArtifactRankOptions& opts) {
  if (pool.axis != PromptAxis::kArtifact) {
    throw Error(ErrorCode::kConfigError,
                "artifact ranking needs an artifact prompt pool");
  }
  pool.Validate();
  CheckK(opts.k);
  if (opts.batch_size < 1) {
    throw Error(ErrorCode::kConfigError, "batch_size must be >= 1");
  }
  const int n = static_cast<int>(set.candidates.size());
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "no candidates to rank");
  const int prompts = static_cast<int>(pool.prompts.size());
  const int batches = (n + opts.batch_size - 1) / opts.batch_size;

  std::vector<std::vector<Image>> batch_images(batches);
  for (int i = 0; i < n; ++i) {
    batch_images[i / opts.batch_size].push_back(set.candidates[i].image);
  }

  auto pick = [&](const std::string& text, int count, const std::string& where,
                  std::vector<std::string>* warnings) {
    const std::vector<int> order = ParseRanking(text, count);
    if (order.empty()) {
      throw Error(ErrorCode::kParseError,
                  where + ": response names no image: \"" +
                      text.substr(0, 80) + "\"");
    }
    if (order.size() > 1 && static_cast<int>(order.size()) < count) {
      warnings->push_back(where + ": partial ranking (" +
                          std::to_string(order.size()) + " of " +
                          std::to_string(count) +
                          "), unnamed images treated as last");
    }
    return order.front() - 1;
  };

  // winners[p * batches + b] is a global candidate index.
  std::vector<int> winners(static_cast<std::size_t>(prompts) * batches);
  std::vector<std::vector<std::string>> batch_warnings(winners.size());
  ParallelFor(winners.size(), provider.max_in_flight(), [&](std::size_t t) {
    const int p = static_cast<int>(t / batches);
    const int b = static_cast<int>(t % batches);
    const auto& imgs = batch_images[b];
    const int m = static_cast<int>(imgs.size());
    const VlmResponse r = provider.Ask(
        imgs, BatchPrompt(pool.prompts[p], b + 1, batches, m, n));
    const std::string where = "prompt " + std::to_string(p) + " batch " +
                              std::to_string(b + 1);
    winners[t] = b * opts.batch_size + pick(r.text, m, where, &batch_warnings[t]);
  });

  std::vector<int> choice(prompts);
  std::vector<std::vector<std::string>> final_warnings(prompts);
  if (batches == 1) {
    for (int p = 0; p < prompts; ++p) choice[p] = winners[p];
  } else {
    ParallelFor(prompts, provider.max_in_flight(), [&](std::size_t p) {
      std::vector<Image> imgs;
      for (int b = 0; b < batches; ++b) {
        imgs.push_back(set.candidates[winners[p * batches + b]].image);
      }
      const VlmResponse r =
          provider.Ask(imgs, FinalRoundPrompt(pool.prompts[p], batches));
      const int w = pick(r.text, batches,
                         "prompt " + std::to_string(p) + " final round",
                         &final_warnings[p]);
      choice[p] = winners[p * batches + w];
    });
  }

  SelectionResult out;
  out.provider_id = provider.provider_id();
  std::vector<std::string> ids;
  for (const Candidate& c : set.candidates) ids.push_back(c.id);
  for (int p = 0; p < prompts; ++p) {
    out.per_prompt_choices[p] = set.candidates[choice[p]].id;
  }
  out.ranked = RankByFrequency(out.per_prompt_choices, ids);
  out.top_k = Prefix(out.ranked, opts.k);
  out.top_1 = out.ranked.front();
  for (const auto& w : batch_warnings) {
    out.warnings.insert(out.warnings.end(), w.begin(), w.end());
  }
  for (const auto& w : final_warnings) {
    out.warnings.insert(out.warnings.end(), w.begin(), w.end());
  }
  out.batch_requests = prompts * batches;
  out.final_requests = batches > 1 ? prompts : 0;
  return out;
}

double PromptConsistency(const std::vector<PromptChoices>& per_image) {
  if (per_image.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no images to assess consistency");
  }
  int consistent = 0;
  for (const PromptChoices& c : per_image) {
    if (c.size() < 2) {
      throw Error(ErrorCode::kTooFewSamples,
                  "consistency needs at least two prompts per image");
    }
    const std::string& first = c.begin()->second;
    consistent += std::all_of(c.begin(), c.end(),
                              [&](const auto& kv) { return kv.second == first; });
  }
  return 100.0 * consistent / static_cast<double>(per_image.size());
}

double PromptModeShare(const std::vector<PromptChoices>& per_image) {
  if (per_image.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no images to assess consistency");
  }
  double total = 0.0;
  for (const PromptChoices& c : per_image) {
    if (c.size() < 2) {
      throw Error(ErrorCode::kTooFewSamples,
                  "consistency needs at least two prompts per image");
    }
    std::map<std::string, int> freq;
    int mode = 0;
    for (const auto& kv : c) mode = std::max(mode, ++freq[kv.second]);
    total += static_cast<double>(mode) / static_cast<double>(c.size());
  }
  return 100.0 * total / static_cast<double>(per_image.size());
}

std::vector<PromptChoices> LabelChoicesByCandidate(
    const std::vector<VlmVerdict>& verdicts) {
  std::vector<std::string> order;
  std::map<std::string, PromptChoices> by_id;
  for (const VlmVerdict& v : verdicts) {
    if (v.prompt_index < 0) continue;
    if (!by_id.count(v.candidate_id)) order.push_back(v.candidate_id);
    by_id[v.candidate_id][v.prompt_index] = v.parsed_label.value_or("");
  }
  std::vector<PromptChoices> out;
  for (const std::string& id : order) out.push_back(by_id[id]);
  return out;
}

SelectionResult InformationSelection(const std::vector<VlmVerdict>& verdicts,
                                     const std::vector<std::string>& ids,
                                     int k) {
  CheckK(k);
  if (ids.empty()) throw Error(ErrorCode::kEmptyInput, "no candidates");
  SelectionResult out;
  out.label_histogram = LabelHistogram(verdicts);
  const std::string majority = MajorityLabel(verdicts);
  std::map<std::string, int> hits;
  for (const VlmVerdict& v : verdicts) {
    if (v.prompt_index >= 0 && v.parsed_label == majority) {
      ++hits[v.candidate_id];
    }
    if (out.provider_id.empty()) out.provider_id = v.provider_id;
  }
  out.ranked = ids;
  std::sort(out.ranked.begin(), out.ranked.end(),
            [&](const std::string& a, const std::string& b) {
              const int ha = hits.count(a) ? hits.at(a) : 0;
              const int hb = hits.count(b) ? hits.at(b) : 0;
              return ha != hb ? ha > hb : a < b;
            });
  out.top_k = Prefix(out.ranked, k);
  out.top_1 = out.ranked.front();
  return out;
}

std::vector<HumanSelection> LoadHumanSelections(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<HumanSelection> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto f = SplitCsv(line);
    if (f.empty() || (f.size() == 1 && f[0].empty())) continue;
    int rank = 0;
    bool ok = f.size() == 4;
    if (ok) {
      try {
        std::size_t used = 0;
        rank = std::stoi(f[2], &used);
        ok = used == f[2].size() && rank >= 1;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw Error(ErrorCode::kFormatError,
                  path.string() + ": bad selection row '" + line + "'");
    }
    first = false;
    rows.push_back({f[0], f[1], rank, f[3]});
  }
  return rows;
}

HumanConsensus ComputeHumanConsensus(const std::vector<HumanSelection>& rows,
                                     const std::string& scene_id, int k) {
  CheckK(k);
  std::map<std::string, int> firsts;
  std::map<std::string, int> placements;
  bool seen = false;
  for (const HumanSelection& r : rows) {
    if (r.scene_id != scene_id) continue;
    seen = true;
    if (r.rank == 1) ++firsts[r.candidate_id];
    if (r.rank <= k) ++placements[r.candidate_id];
  }
  if (!seen || firsts.empty()) {
    throw Error(ErrorCode::kMissingHumanData,
                "no human rank-1 selections for scene " + scene_id);
  }
  HumanConsensus out;
  int best = 0;
  for (const auto& [id, n] : firsts) {
    if (n > best) {
      best = n;
      out.top_1 = id;
    }
  }
  std::vector<std::pair<std::string, int>> order(placements.begin(),
                                                 placements.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  for (std::size_t i = 0; i < order.size() && static_cast<int>(i) < k; ++i) {
    out.top_k.push_back(order[i].first);
  }
  return out;
}

AgreementResult HumanAgreement(
    const std::map<std::string, SelectionResult>& vlm,
    const std::vector<HumanSelection>& human, int k) {
  CheckK(k);
  if (vlm.empty()) throw Error(ErrorCode::kEmptyInput, "no VLM selections");
  AgreementResult out;
  int matches = 0;
  double overlap = 0.0;
  for (const auto& [scene, sel] : vlm) {
    const std::vector<std::string> mine = Prefix(sel.ranked, k);
    const HumanConsensus h =
        ComputeHumanConsensus(human, scene, static_cast<int>(mine.size()));
    matches += sel.top_1 == h.top_1;
    const std::set<std::string> theirs(h.top_k.begin(), h.top_k.end());
    int common = 0;
    for (const std::string& id : mine) common += theirs.count(id);
    overlap += static_cast<double>(common) / static_cast<double>(mine.size());
    ++out.scenes;
  }
  out.top_1 = 100.0 * matches / out.scenes;
  out.top_k_overlap = 100.0 * overlap / out.scenes;
  return out;
}

RobustnessRow ComputeRobustness(const std::vector<SampleSet>& scenes,
                                const PromptPool& info_pool,
                                const PromptPool& artifact_pool,
                                const VlmProvider& provider,
                                const std::vector<HumanSelection>* human,
                                const ArtifactRankOptions& opts) {
  if (scenes.empty()) throw Error(ErrorCode::kEmptyInput, "no scenes");
  RobustnessRow row;
  row.provider_id = provider.provider_id();
  std::vector<PromptChoices> info_choices;
  std::vector<PromptChoices> artifact_choices;
  std::map<std::string, SelectionResult> info_sel;
  std::map<std::string, SelectionResult> artifact_sel;
  for (const SampleSet& set : scenes) {
    if (info_sel.count(set.scene_id)) {
      throw Error(ErrorCode::kConfigError,
                  "duplicate scene id " + set.scene_id);
    }
    const auto verdicts = IdentifyLabels(set, info_pool, provider);
    for (auto& c : LabelChoicesByCandidate(verdicts)) {
      info_choices.push_back(std::move(c));
    }
    std::vector<std::string> ids;
    for (const Candidate& c : set.candidates) ids.push_back(c.id);
    try {
      info_sel[set.scene_id] = InformationSelection(verdicts, ids, opts.k);
    } catch (const Error& e) {
      row.warnings.push_back(set.scene_id + ": " + e.what());
    }
    SelectionResult sel = ArtifactRank(set, artifact_pool, provider, opts);
    artifact_choices.push_back(sel.per_prompt_choices);
    for (const std::string& w : sel.warnings) {
      row.warnings.push_back(set.scene_id + ": " + w);
    }
    artifact_sel[set.scene_id] = std::move(sel);
  }
  row.scenes = static_cast<int>(scenes.size());
  row.consistency_info = PromptConsistency(info_choices);
  row.mode_share_info = PromptModeShare(info_choices);
  row.consistency_artifact = PromptConsistency(artifact_choices);
  row.mode_share_artifact = PromptModeShare(artifact_choices);
  if (human != nullptr) {
    try {
      if (info_sel.size() != scenes.size()) {
        throw Error(ErrorCode::kMissingHumanData,
                    "information selection unavailable for some scenes");
      }
      const AgreementResult a = HumanAgreement(info_sel, *human, opts.k);
      row.agreement_info = a.top_1;
      row.agreement_info_top_k = a.top_k_overlap;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingHumanData) throw;
      row.warnings.push_back(std::string("information agreement: ") +
                             e.what());
    }
    try {
      const AgreementResult a = HumanAgreement(artifact_sel, *human, opts.k);
      row.agreement_artifact = a.top_1;
      row.agreement_artifact_top_k = a.top_k_overlap;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingHumanData) throw;
      row.warnings.push_back(std::string("artifact agreement: ") + e.what());
    }
  }
  return row;
}

PipelineResult TwoStagePipeline(const SampleSet& set,
                                const PromptPool& info_pool,
                                const PromptPool& artifact_pool,
                                const VlmProvider& info_provider,
                                const VlmProvider& artifact_provider,
                                const PipelineOptions& opts) {
  set.Validate();
  if (set.candidates.empty()) {
    throw Error(ErrorCode::kEmptyInput, "sample set has no candidates");
  }
  PipelineResult out;
  out.identify_verdicts = IdentifyLabels(set, info_pool, info_provider);
  out.prefilter_histogram = LabelHistogram(out.identify_verdicts);
  if (out.prefilter_histogram.empty()) {
    throw Error(ErrorCode::kEmptyAfterFilter,
                "no candidate survived filtering: no parseable labels; "
                "histogram {}");
  }
  out.majority_label = MajorityLabel(out.identify_verdicts);

  std::vector<std::string> ids;
  for (const Candidate& c : set.candidates) ids.push_back(c.id);
  out.confidence_verdicts =
      QueryConfidence(set, ids, out.majority_label, info_provider,
                      opts.confidence_template);
  FilterResult filtered = ConfidenceFilter(
      out.confidence_verdicts, out.majority_label, opts.confidence_threshold);
  if (filtered.survivors.empty()) {
    throw Error(ErrorCode::kEmptyAfterFilter,
                "no candidate survived filtering for label " +
                    out.majority_label + "; histogram " +
                    HistogramText(out.prefilter_histogram));
  }
  out.survivors = filtered.survivors;

  SampleSet stage2;
  stage2.scene_id = set.scene_id;
  stage2.reference = set.reference;
  for (const std::string& id : out.survivors) {
    stage2.candidates.push_back(set.Find(id));
  }
  out.selection =
      ArtifactRank(stage2, artifact_pool, artifact_provider, opts.rank);
  out.selection.label_histogram = out.prefilter_histogram;
  out.selection.warnings.insert(out.selection.warnings.begin(),
                                filtered.warnings.begin(),
                                filtered.warnings.end());

  std::vector<Image> chosen;
  for (const std::string& id : out.selection.top_k) {
    chosen.push_back(set.Find(id).image);
  }
  out.ensemble = EnsembleAverage(chosen);
  return out;
}

}  // namespace trustsr
