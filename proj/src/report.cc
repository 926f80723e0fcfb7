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

#include "trustsr/report.h"

#include <cstdio>
#include <fstream>

#include "trustsr/error.h"

namespace trustsr {

using nlohmann::json;

namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string OptNum(const std::optional<double>& v) {
  return v ? Num(*v) : "";
}

json OptJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json WeightsJson(const TwsWeights& w) {
  return {{"clip", w.clip}, {"edge", w.edge}, {"wavelet", w.wavelet}};
}

json ScoresJson(const std::vector<TwsBreakdown>& rows, const json& config) {
  json out{{"config", config}, {"scores", json::array()}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TwsBreakdown& r = rows[i];
    out["scores"].push_back({{"rank", i + 1},
                             {"candidate_id", r.candidate_id},
                             {"s_clip_raw", r.s_clip_raw},
                             {"s_edge_raw", r.s_edge_raw},
                             {"s_wavelet_raw", r.s_wavelet_raw},
                             {"s_clip", r.s_clip},
                             {"s_edge", r.s_edge},
                             {"s_wavelet", r.s_wavelet},
                             {"tws", r.tws}});
  }
  return out;
}

std::string ScoresCsv(const std::vector<TwsBreakdown>& rows) {
  std::string out =
      "rank,candidate_id,s_clip_raw,s_edge_raw,s_wavelet_raw,s_clip,s_edge,"
      "s_wavelet,tws\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TwsBreakdown& r = rows[i];
    out += std::to_string(i + 1) + "," + r.candidate_id + "," +
           Num(r.s_clip_raw) + "," + Num(r.s_edge_raw) + "," +
           Num(r.s_wavelet_raw) + "," + Num(r.s_clip) + "," + Num(r.s_edge) +
           "," + Num(r.s_wavelet) + "," + Num(r.tws) + "\n";
  }
  return out;
}

json SelectionJson(const SelectionResult& sel) {
  json choices = json::object();
  for (const auto& [p, id] : sel.per_prompt_choices) {
    choices[std::to_string(p)] = id;
  }
  json hist = json::object();
  for (const auto& [label, n] : sel.label_histogram) hist[label] = n;
  return {{"provider_id", sel.provider_id},
          {"ranked", sel.ranked},
          {"top_k", sel.top_k},
          {"top_1", sel.top_1},
          {"per_prompt_choices", choices},
          {"label_histogram", hist},
          {"warnings", sel.warnings},
          {"batch_requests", sel.batch_requests},
          {"final_requests", sel.final_requests}};
}

json PipelineJson(const PipelineResult& result, const json& config) {
  json hist = json::object();
  for (const auto& [label, n] : result.prefilter_histogram) hist[label] = n;
  json confidences = json::object();
  for (const VlmVerdict& v : result.confidence_verdicts) {
    confidences[v.candidate_id] = OptJson(v.confidence);
  }
  return {{"config", config},
          {"selection", SelectionJson(result.selection)},
          {"stage1",
           {{"majority_label", result.majority_label},
            {"label_histogram", hist},
            {"confidence", confidences},
            {"survivors", result.survivors}}}};
}

json RobustnessJson(const std::vector<RobustnessRow>& rows,
                    const json& config) {
  json out{{"config", config}, {"rows", json::array()}};
  for (const RobustnessRow& r : rows) {
    out["rows"].push_back(
        {{"provider_id", r.provider_id},
         {"scenes", r.scenes},
         {"consistency_info", r.consistency_info},
         {"consistency_artifact", r.consistency_artifact},
         {"mode_share_info", r.mode_share_info},
         {"mode_share_artifact", r.mode_share_artifact},
         {"agreement_info", OptJson(r.agreement_info)},
         {"agreement_artifact", OptJson(r.agreement_artifact)},
         {"agreement_info_top_k", OptJson(r.agreement_info_top_k)},
         {"agreement_artifact_top_k", OptJson(r.agreement_artifact_top_k)},
         {"warnings", r.warnings}});
  }
  return out;
}

std::string RobustnessCsv(const std::vector<RobustnessRow>& rows) {
  std::string out =
      "provider_id,scenes,consistency_info,consistency_artifact,"
      "mode_share_info,mode_share_artifact,agreement_info,agreement_artifact,"
      "agreement_info_top_k,agreement_artifact_top_k\n";
  for (const RobustnessRow& r : rows) {
    out += r.provider_id + "," + std::to_string(r.scenes) + "," +
           Num(r.consistency_info) + "," + Num(r.consistency_artifact) + "," +
           Num(r.mode_share_info) + "," + Num(r.mode_share_artifact) + "," +
           OptNum(r.agreement_info) + "," + OptNum(r.agreement_artifact) +
           "," + OptNum(r.agreement_info_top_k) + "," +
           OptNum(r.agreement_artifact_top_k) + "\n";
  }
  return out;
}

json AblationJson(const std::vector<AblationRow>& rows, const json& config) {
  json out{{"config", config}, {"rows", json::array()}};
  for (const AblationRow& r : rows) {
    out["rows"].push_back({{"name", r.name},
                           {"weights", WeightsJson(r.weights)},
                           {"mean_tws", r.mean_tws},
                           {"ranking", r.ranking}});
  }
  return out;
}

std::string AblationCsv(const std::vector<AblationRow>& rows) {
  std::string out = "name,clip,edge,wavelet,mean_tws,ranking\n";
  for (const AblationRow& r : rows) {
    std::string ranking;
    for (const std::string& id : r.ranking) {
      if (!ranking.empty()) ranking += ' ';
      ranking += id;
    }
    out += "\"" + r.name + "\"," + Num(r.weights.clip) + "," +
           Num(r.weights.edge) + "," + Num(r.weights.wavelet) + "," +
           Num(r.mean_tws) + "," + ranking + "\n";
  }
  return out;
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::kIoError, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot rename into " + path.string() + ": " + ec.message());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const json& j) {
  WriteTextFile(path, j.dump(2) + "\n");
}

}  // namespace trustsr
