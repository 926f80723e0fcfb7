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

#include "trustsr/tws.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trustsr/edge.h"
#include "trustsr/error.h"
#include "trustsr/image_io.h"
#include "trustsr/parallel.h"

namespace trustsr {

void TwsWeights::Validate() const {
  for (double w : {clip, edge, wavelet}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kConfigError,
                  "TWS weights must be finite and non-negative");
    }
  }
}

TwsWeights ParseWeights(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, "bad weight value '" + item + "'");
    }
  }
  if (parts.size() != 3) {
    throw Error(ErrorCode::kConfigError,
                "weights need three comma-separated values, got '" + text +
                    "'");
  }
  TwsWeights w{parts[0], parts[1], parts[2]};
  w.Validate();
  return w;
}

void NormalizeComponents(std::vector<TwsBreakdown>& rows,
                         const Normalization& norm) {
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyInput, "normalize: no candidates");
  }
  const bool fixed = norm.wavelet == WaveletNormalization::kFixedScale;
  if (fixed && !(norm.wavelet_scale > 0.0)) {
    throw Error(ErrorCode::kConfigError, "wavelet scale must be positive");
  }
  auto [lo_it, hi_it] = std::minmax_element(
      rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.s_wavelet_raw < b.s_wavelet_raw;
      });
  const double lo = lo_it->s_wavelet_raw;
  const double span = hi_it->s_wavelet_raw - lo;
  for (TwsBreakdown& r : rows) {
    r.s_clip = std::clamp(r.s_clip_raw, 0.0, 1.0);
    r.s_edge = std::clamp(r.s_edge_raw, 0.0, 1.0);
    if (fixed) {
      r.s_wavelet = std::clamp(r.s_wavelet_raw / norm.wavelet_scale, 0.0, 1.0);
    } else {
      r.s_wavelet = span > 0.0 ? (r.s_wavelet_raw - lo) / span : 0.0;
    }
  }
}

double CombineTws(const TwsBreakdown& row, const TwsWeights& weights) {
  return weights.clip * row.s_clip + weights.edge * row.s_edge -
         weights.wavelet * row.s_wavelet;
}

void ApplyWeights(std::vector<TwsBreakdown>& rows, const TwsWeights& weights) {
  weights.Validate();
  for (TwsBreakdown& r : rows) r.tws = CombineTws(r, weights);
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.tws != b.tws) return a.tws > b.tws;
    return a.candidate_id < b.candidate_id;
  });
}

std::vector<TwsBreakdown> ComputeRawComponents(const Image& reference,
                                               const SampleSet& set,
                                               const EmbeddingProvider& embed,
                                               const TwsOptions& options) {
  if (set.candidates.empty()) {
    throw Error(ErrorCode::kEmptyInput, "scene " + set.scene_id +
                                            " has no candidates");
  }
  for (const Candidate& c : set.candidates) {
    if (!c.image.SameShape(reference)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "candidate '" + c.id + "' differs in shape from reference");
    }
  }
  std::vector<std::uint8_t> ref_bytes;
  if (!set.reference_path.empty() && set.reference &&
      &*set.reference == &reference) {
    ref_bytes = ReadFileBytes(set.reference_path);
  }
  const Embedding ref_embedding = embed.Embed(reference, ref_bytes);
  const Image ref_edges = SobelEdgeMap(ToGrayscale(reference));

  std::vector<TwsBreakdown> rows(set.candidates.size());
  ParallelFor(rows.size(), options.jobs, [&](std::size_t i) {
    const Candidate& c = set.candidates[i];
    std::vector<std::uint8_t> bytes;
    if (!c.path.empty()) bytes = ReadFileBytes(c.path);
    TwsBreakdown& r = rows[i];
    r.candidate_id = c.id;
    r.s_clip_raw = CosineSimilarity(ref_embedding, embed.Embed(c.image, bytes));
    r.s_edge_raw = Ssim(ref_edges, SobelEdgeMap(ToGrayscale(c.image)));
    r.s_wavelet_raw = WaveletArtifactEnergy(c.image, options.wavelet);
  });
  return rows;
}

std::vector<TwsBreakdown> ScoreSampleSet(const Image& reference,
                                         const SampleSet& set,
                                         const TwsWeights& weights,
                                         const EmbeddingProvider& embed,
                                         const TwsOptions& options) {
  weights.Validate();
  auto rows = ComputeRawComponents(reference, set, embed, options);
  NormalizeComponents(rows, options.normalization);
  ApplyWeights(rows, weights);
  return rows;
}

std::vector<TwsBreakdown> ScoreSampleSet(const SampleSet& set,
                                         const TwsWeights& weights,
                                         const EmbeddingProvider& embed,
                                         const TwsOptions& options) {
  if (!set.reference) {
    throw Error(ErrorCode::kMissingReference,
                "scene " + set.scene_id + " has no reference image");
  }
  return ScoreSampleSet(*set.reference, set, weights, embed, options);
}

std::vector<NamedWeights> DefaultAblationGrid() {
  const double third = 1.0 / 3.0;
  return {
      {"proposed (clip=0.2, edge=0.3, wavelet=0.5)", {0.2, 0.3, 0.5}},
      {"equal weights (1/3 each)", {third, third, third}},
      {"no clip (clip=0, edge=0.4, wavelet=0.6)", {0.0, 0.4, 0.6}},
      {"no edge (clip=0.3, edge=0, wavelet=0.7)", {0.3, 0.0, 0.7}},
      {"no wavelet (clip=0.5, edge=0.5, wavelet=0)", {0.5, 0.5, 0.0}},
  };
}

std::vector<AblationRow> AblationSweep(
    const std::vector<TwsBreakdown>& normalized,
    const std::vector<NamedWeights>& configs) {
  if (configs.empty()) {
    throw Error(ErrorCode::kConfigError, "ablation needs at least one config");
  }
  if (normalized.empty()) {
    throw Error(ErrorCode::kEmptyInput, "ablation: no candidates");
  }
  std::vector<AblationRow> out;
  for (const NamedWeights& cfg : configs) {
    std::vector<TwsBreakdown> rows = normalized;
    ApplyWeights(rows, cfg.weights);
    AblationRow row{cfg.name, cfg.weights, 0.0, {}};
    for (const TwsBreakdown& r : rows) {
      row.mean_tws += r.tws;
      row.ranking.push_back(r.candidate_id);
    }
    row.mean_tws /= static_cast<double>(rows.size());
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace trustsr
