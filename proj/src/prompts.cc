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

#include "trustsr/prompts.h"

#include <fstream>
#include <set>

#include "trustsr/error.h"

namespace trustsr {

std::string PromptAxisName(PromptAxis axis) {
  return axis == PromptAxis::kInformation ? "information" : "artifact";
}

void PromptPool::Validate() const {
  if (prompts.empty()) {
    throw Error(ErrorCode::kConfigError,
                PromptAxisName(axis) + " prompt pool is empty");
  }
  std::set<std::string> seen;
  for (const std::string& p : prompts) {
    if (!seen.insert(p).second) {
      throw Error(ErrorCode::kConfigError, "duplicate prompt: " + p);
    }
  }
}

const PromptPool& DefaultInformationPool() {
  static const PromptPool pool{
      PromptAxis::kInformation,
      {
          "What is the digit in this image?",
          "Can you identify the number?",
          "Which number is shown here?",
          "Please read the digit.",
          "What number is visible?",
          "Can you tell which number appears?",
          "Read the digit from the image.",
          "Identify the number in this picture.",
          "What does the digit look like?",
          "What is written in the image?",
          "Is there a digit shown here?",
          "Recognize the number in this image.",
          "What number can you see?",
          "What digit does the image contain?",
          "Tell me the number you observe.",
          "What's the printed number?",
          "Do you recognize a digit?",
          "Read the numeral in this image.",
          "What digit do you detect?",
          "State the digit shown in the image.",
      }};
  return pool;
}

const PromptPool& DefaultArtifactPool() {
  static const PromptPool pool{
      PromptAxis::kArtifact,
      {
          "Does this image contain visual artifacts?",
          "Is the image clean and artifact-free?",
          "Can you spot any distortions?",
          "Are there imperfections in this image?",
          "How clean is the image?",
          "Does this image look realistic?",
          "Rate the visual clarity of the image.",
          "Is the output free of compression artifacts?",
          "Do you notice any artifacts?",
          "Are there visible distortions or glitches?",
          "Comment on the image’s realism.",
          "Does the image appear sharp and clear?",
          "Is this image blurry or distorted?",
          "Does the output seem natural and artifact-free?",
          "Are there distracting visual flaws?",
          "Is the image degraded in any way?",
          "How visually appealing is this image?",
          "Are there any unwanted textures or glitches?",
          "Would you consider this image clean?",
          "Is this result free of visual anomalies?",
      }};
  return pool;
}

PromptPool LoadPromptPool(const std::filesystem::path& path, PromptAxis axis) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  PromptPool pool{axis, {}};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty()) pool.prompts.push_back(line);
  }
  pool.Validate();
  return pool;
}

std::string FormatConfidencePrompt(const std::string& tmpl,
                                   const std::string& label) {
  std::string out = tmpl;
  const std::string key = "{label}";
  for (auto pos = out.find(key); pos != std::string::npos;
       pos = out.find(key, pos + label.size())) {
    out.replace(pos, key.size(), label);
  }
  return out;
}

}  // namespace trustsr
