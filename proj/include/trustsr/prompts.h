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

#ifndef TRUSTSR_PROMPTS_H_
#define TRUSTSR_PROMPTS_H_

#include <filesystem>
#include <string>
#include <vector>

namespace trustsr {

enum class PromptAxis { kInformation, kArtifact };

std::string PromptAxisName(PromptAxis axis);

struct PromptPool {
  PromptAxis axis = PromptAxis::kInformation;
  std::vector<std::string> prompts;

  // Non-empty, no duplicates. Throws kConfigError.
  void Validate() const;
};

// The two built-in 20-prompt pools.
const PromptPool& DefaultInformationPool();
const PromptPool& DefaultArtifactPool();

// One prompt per line; blank lines ignored.
PromptPool LoadPromptPool(const std::filesystem::path& path, PromptAxis axis);

// Chain-of-thought certainty question; "{label}" is substituted.
inline constexpr char kConfidenceTemplate[] =
    "On a scale of 1 to 100, how certain are you that this number is a "
    "{label}?";

std::string FormatConfidencePrompt(const std::string& tmpl,
                                   const std::string& label);

}  // namespace trustsr

#endif  // TRUSTSR_PROMPTS_H_
