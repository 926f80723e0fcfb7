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

#ifndef TRUSTSR_HARNESS_H_
#define TRUSTSR_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "trustsr/image.h"
#include "trustsr/sample_set.h"

namespace trustsr {

enum class DegradationKind {
  kGaussianBlur,           // strength: sigma in pixels
  kAdditiveGaussianNoise,  // strength: sigma in intensity units
  kPixelate,               // strength: block size in pixels
  kIntensityQuantize,      // strength: number of levels (>= 2)
};

std::string DegradationName(DegradationKind kind);
// Accepts "blur", "noise", "pixelate", "quantize".
DegradationKind ParseDegradationKind(const std::string& name);

struct DegradationSpec {
  DegradationKind kind = DegradationKind::kGaussianBlur;
  double strength = 1.0;
  std::uint64_t seed = 0;

  // Throws kBadSpec.
  void Validate() const;
};

// Deterministic given (img, spec).
Image Degrade(const Image& img, const DegradationSpec& spec);

// One candidate per strength (ids "<kind>-NN" in strength order). At least
// two strictly ascending strengths are required. truth_order lists the
// least-degraded candidate first: ascending strength for blur, noise and
// pixelation, descending level count for quantization.
SampleSet BuildLadder(const Image& reference, DegradationKind kind,
                      std::span<const double> strengths,
                      std::uint64_t seed = 0,
                      const std::string& scene_id = "ladder");

// Procedural grayscale texture (oriented gratings, blobs and hard-edged
// shapes) used as ladder references.
Image MakeTexturedReference(int side, std::uint64_t seed);

struct MosCorrelation {
  double overall = 0.0;
  std::size_t count = 0;
  std::map<std::string, double> per_group;  // groups with >= 2 varying rows
};

struct ScoreRecord {
  std::string image_id;
  std::string group;
  double score = 0.0;
};

// MOS CSV "image_id,mos" (header optional).
std::map<std::string, double> LoadMosCsv(const std::filesystem::path& path);
// Score CSV "image_id,score[,group]" (header optional).
std::vector<ScoreRecord> LoadScoreCsv(const std::filesystem::path& path);

// Pearson correlation of scores against MOS, overall and per group. Throws
// kJoinError if any scored image lacks a MOS entry.
MosCorrelation CorrelateWithMos(const std::vector<ScoreRecord>& scores,
                                const std::map<std::string, double>& mos);

}  // namespace trustsr

#endif  // TRUSTSR_HARNESS_H_
