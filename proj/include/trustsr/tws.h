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

#ifndef TRUSTSR_TWS_H_
#define TRUSTSR_TWS_H_

#include <string>
#include <vector>

#include "trustsr/embedding.h"
#include "trustsr/image.h"
#include "trustsr/sample_set.h"
#include "trustsr/wavelet.h"

namespace trustsr {

struct TwsWeights {
  double clip = 0.2;
  double edge = 0.3;
  double wavelet = 0.5;

  // Throws kConfigError if any weight is negative or non-finite.
  void Validate() const;
  friend bool operator==(const TwsWeights&, const TwsWeights&) = default;
};

// Parses "clip,edge,wavelet".
TwsWeights ParseWeights(const std::string& text);

struct TwsBreakdown {
  std::string candidate_id;
  double s_clip_raw = 0.0;     // cosine in [-1,1]
  double s_edge_raw = 0.0;     // SSIM of edge maps in [-1,1]
  double s_wavelet_raw = 0.0;  // mean |detail coefficient| per pixel
  double s_clip = 0.0;
  double s_edge = 0.0;
  double s_wavelet = 0.0;
  double tws = 0.0;
};

enum class WaveletNormalization {
  // s_wavelet = clamp(raw / scale, 0, 1). With scale 1 this is the per-pixel
  // detail energy itself, comparable across scenes and blur-aware.
  kFixedScale,
  // (raw - min) / (max - min) over the scored set; all-equal sets map to 0.
  kMinMax,
};

struct Normalization {
  WaveletNormalization wavelet = WaveletNormalization::kFixedScale;
  double wavelet_scale = 1.0;
};

struct TwsOptions {
  WaveletConfig wavelet;
  Normalization normalization;
  int jobs = 1;
};

// Fills the normalized fields: s_clip and s_edge are clamped to [0,1];
// s_wavelet follows `norm`. Throws kEmptyInput.
void NormalizeComponents(std::vector<TwsBreakdown>& rows,
                         const Normalization& norm = {});

// clip*s_clip + edge*s_edge - wavelet*s_wavelet from the normalized fields.
double CombineTws(const TwsBreakdown& row, const TwsWeights& weights);

// Sets tws on every row and sorts descending, ties by candidate_id.
void ApplyWeights(std::vector<TwsBreakdown>& rows, const TwsWeights& weights);

// Raw components for every candidate against `reference`.
std::vector<TwsBreakdown> ComputeRawComponents(
    const Image& reference, const SampleSet& set,
    const EmbeddingProvider& embed, const TwsOptions& options = {});

// Full scoring: raw components, normalization, weighting, ranking.
std::vector<TwsBreakdown> ScoreSampleSet(const Image& reference,
                                         const SampleSet& set,
                                         const TwsWeights& weights,
                                         const EmbeddingProvider& embed,
                                         const TwsOptions& options = {});

// Uses set.reference; throws kMissingReference when absent.
std::vector<TwsBreakdown> ScoreSampleSet(const SampleSet& set,
                                         const TwsWeights& weights,
                                         const EmbeddingProvider& embed,
                                         const TwsOptions& options = {});

struct NamedWeights {
  std::string name;
  TwsWeights weights;
};

// The five weight configurations of the ablation table, proposed first.
std::vector<NamedWeights> DefaultAblationGrid();

struct AblationRow {
  std::string name;
  TwsWeights weights;
  double mean_tws = 0.0;
  std::vector<std::string> ranking;  // candidate ids, best first
};

// Re-weights pre-normalized rows under each configuration.
std::vector<AblationRow> AblationSweep(
    const std::vector<TwsBreakdown>& normalized,
    const std::vector<NamedWeights>& configs);

}  // namespace trustsr

#endif  // TRUSTSR_TWS_H_
