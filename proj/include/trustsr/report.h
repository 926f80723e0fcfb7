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

#ifndef TRUSTSR_REPORT_H_
#define TRUSTSR_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "trustsr/selection.h"
#include "trustsr/tws.h"

namespace trustsr {

// Every report is {"config": <effective config>, ...payload}. Key order is
// sorted, numbers round-trip, so equal inputs give equal bytes.

nlohmann::json ScoresJson(const std::vector<TwsBreakdown>& rows,
                          const nlohmann::json& config);
std::string ScoresCsv(const std::vector<TwsBreakdown>& rows);

nlohmann::json SelectionJson(const SelectionResult& sel);
nlohmann::json PipelineJson(const PipelineResult& result,
                            const nlohmann::json& config);

nlohmann::json RobustnessJson(const std::vector<RobustnessRow>& rows,
                              const nlohmann::json& config);
std::string RobustnessCsv(const std::vector<RobustnessRow>& rows);

nlohmann::json AblationJson(const std::vector<AblationRow>& rows,
                            const nlohmann::json& config);
std::string AblationCsv(const std::vector<AblationRow>& rows);

nlohmann::json WeightsJson(const TwsWeights& w);

// Writes via a temporary file and rename.
void WriteTextFile(const std::filesystem::path& path, const std::string& text);
// Pretty-printed with a trailing newline.
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace trustsr

#endif  // TRUSTSR_REPORT_H_
