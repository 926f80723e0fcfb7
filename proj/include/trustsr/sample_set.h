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

#ifndef TRUSTSR_SAMPLE_SET_H_
#define TRUSTSR_SAMPLE_SET_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trustsr/image.h"

namespace trustsr {

struct Candidate {
  std::string id;
  Image image;
  std::filesystem::path path;  // empty for in-memory candidates
};

// Candidate images for one scene. All candidates share a shape and ids are
// unique; Validate() enforces both.
struct SampleSet {
  std::string scene_id;
  std::vector<Candidate> candidates;
  std::optional<Image> reference;
  std::filesystem::path reference_path;
  std::filesystem::path source_manifest;
  // Ground-truth quality order (best first) when the set is synthetic.
  std::vector<std::string> truth_order;

  void Validate() const;
  const Candidate& Find(const std::string& id) const;
};

// Manifest JSON:
//   {"scene_id": str, "reference": path|null,
//    "candidates": [{"id": str, "path": str}, ...],
//    "truth_order": [id, ...]}            (truth_order optional)
// Relative paths resolve against the manifest's directory.
SampleSet LoadSampleSet(const std::filesystem::path& manifest);

// Writes every image next to the manifest (as <id>.png) and the manifest
// itself. Paths in the manifest are relative.
void SaveSampleSet(const SampleSet& set,
                   const std::filesystem::path& manifest);

}  // namespace trustsr

#endif  // TRUSTSR_SAMPLE_SET_H_
