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

#include "trustsr/harness.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "trustsr/error.h"
#include "trustsr/stats.h"

namespace trustsr {
namespace {

Image Blur(const Image& img, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  const int w = img.width(), h = img.height(), ch = img.channels();
  std::vector<double> tmp(img.size()), out(img.size());
  auto src = img.data();
  auto idx = [&](int x, int y, int c) {
    return (static_cast<std::size_t>(y) * w + x) * ch + c;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          acc += kernel[k + radius] * src[idx(std::clamp(x + k, 0, w - 1), y, c)];
        }
        tmp[idx(x, y, c)] = acc;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          acc += kernel[k + radius] * tmp[idx(x, std::clamp(y + k, 0, h - 1), c)];
        }
        out[idx(x, y, c)] = acc;
      }
    }
  }
  return Image(w, h, ch, std::move(out));
}

Image AddNoise(const Image& img, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<double> out(img.data().begin(), img.data().end());
  for (double& v : out) v += noise(rng);
  return Image(img.width(), img.height(), img.channels(), std::move(out));
}

Image Pixelate(const Image& img, int block) {
  const int w = img.width(), h = img.height(), ch = img.channels();
  Image out(w, h, ch);
  for (int by = 0; by < h; by += block) {
    for (int bx = 0; bx < w; bx += block) {
      const int ey = std::min(by + block, h);
      const int ex = std::min(bx + block, w);
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int y = by; y < ey; ++y) {
          for (int x = bx; x < ex; ++x) acc += img.at(x, y, c);
        }
        const double mean = acc / ((ey - by) * (ex - bx));
        for (int y = by; y < ey; ++y) {
          for (int x = bx; x < ex; ++x) out.set(x, y, c, mean);
        }
      }
    }
  }
  return out;
}

// Uniform mid-rise quantizer: bin i covers [i/L, (i+1)/L) and maps to its
// midpoint.
Image Quantize(const Image& img, int levels) {
  std::vector<double> out(img.data().begin(), img.data().end());
  for (double& v : out) {
    const int bin = std::min(static_cast<int>(std::floor(v * levels)),
                             levels - 1);
    v = (bin + 0.5) / levels;
  }
  return Image(img.width(), img.height(), img.channels(), std::move(out));
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) {
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
    while (!f.empty() && f.front() == ' ') f.erase(f.begin());
    fields.push_back(f);
  }
  return fields;
}

bool ParseDouble(const std::string& s, double* out) {
  try {
    std::size_t used = 0;
    *out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::string DegradationName(DegradationKind kind) {
  switch (kind) {
    case DegradationKind::kGaussianBlur: return "blur";
    case DegradationKind::kAdditiveGaussianNoise: return "noise";
    case DegradationKind::kPixelate: return "pixelate";
    case DegradationKind::kIntensityQuantize: return "quantize";
  }
  return "unknown";
}

DegradationKind ParseDegradationKind(const std::string& name) {
  if (name == "blur") return DegradationKind::kGaussianBlur;
  if (name == "noise") return DegradationKind::kAdditiveGaussianNoise;
  if (name == "pixelate") return DegradationKind::kPixelate;
  if (name == "quantize") return DegradationKind::kIntensityQuantize;
  throw Error(ErrorCode::kBadSpec, "unknown degradation kind '" + name + "'");
}

void DegradationSpec::Validate() const {
  if (!std::isfinite(strength) || strength <= 0.0) {
    throw Error(ErrorCode::kBadSpec, "degradation strength must be > 0");
  }
  if (kind == DegradationKind::kIntensityQuantize &&
      (strength < 2.0 || strength != std::floor(strength))) {
    throw Error(ErrorCode::kBadSpec,
                "quantization needs an integer level count >= 2");
  }
  if (kind == DegradationKind::kPixelate && strength != std::floor(strength)) {
    throw Error(ErrorCode::kBadSpec, "pixelation block size must be integral");
  }
}

Image Degrade(const Image& img, const DegradationSpec& spec) {
  spec.Validate();
  switch (spec.kind) {
    case DegradationKind::kGaussianBlur:
      return Blur(img, spec.strength);
    case DegradationKind::kAdditiveGaussianNoise:
      return AddNoise(img, spec.strength, spec.seed);
    case DegradationKind::kPixelate:
      return Pixelate(img, static_cast<int>(spec.strength));
    case DegradationKind::kIntensityQuantize:
      return Quantize(img, static_cast<int>(spec.strength));
  }
  throw Error(ErrorCode::kBadSpec, "unknown degradation kind");
}

SampleSet BuildLadder(const Image& reference, DegradationKind kind,
                      std::span<const double> strengths, std::uint64_t seed,
                      const std::string& scene_id) {
  if (strengths.size() < 2) {
    throw Error(ErrorCode::kBadSpec, "a ladder needs at least two strengths");
  }
  for (std::size_t i = 1; i < strengths.size(); ++i) {
    if (!(strengths[i] > strengths[i - 1])) {
      throw Error(ErrorCode::kBadSpec,
                  "ladder strengths must be strictly ascending");
    }
  }
  SampleSet set;
  set.scene_id = scene_id;
  set.reference = reference;
  for (std::size_t i = 0; i < strengths.size(); ++i) {
    char id[64];
    std::snprintf(id, sizeof(id), "%s-%02zu", DegradationName(kind).c_str(),
                  i);
    set.candidates.push_back(
        {id, Degrade(reference, {kind, strengths[i], seed}), {}});
    set.truth_order.push_back(id);
  }
  if (kind == DegradationKind::kIntensityQuantize) {
    std::reverse(set.truth_order.begin(), set.truth_order.end());
  }
  return set;
}

Image MakeTexturedReference(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  struct Grating {
    double fx, fy, phase, amp;
  };
  std::vector<Grating> gratings;
  for (int i = 0; i < 4; ++i) {
    const double period = 3.0 + 14.0 * uni(rng);
    const double angle = std::numbers::pi * uni(rng);
    gratings.push_back({std::cos(angle) / period, std::sin(angle) / period,
                        kTwoPi * uni(rng), 0.06 + 0.06 * uni(rng)});
  }
  struct Shape {
    double cx, cy, r, level;
    bool square;
  };
  std::vector<Shape> shapes;
  for (int i = 0; i < 6; ++i) {
    shapes.push_back({side * uni(rng), side * uni(rng),
                      side * (0.06 + 0.14 * uni(rng)), uni(rng) - 0.5,
                      uni(rng) < 0.5});
  }

  Image out(side, side, 1);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      double v = 0.5;
      for (const Grating& g : gratings) {
        v += g.amp * std::sin(kTwoPi * (g.fx * x + g.fy * y) + g.phase);
      }
      for (const Shape& s : shapes) {
        const double dx = x - s.cx, dy = y - s.cy;
        const bool inside = s.square
                                ? std::max(std::abs(dx), std::abs(dy)) < s.r
                                : dx * dx + dy * dy < s.r * s.r;
        if (inside) v += 0.35 * s.level;
      }
      out.set(x, y, 0, std::clamp(v, 0.02, 0.98));
    }
  }
  return out;
}

std::map<std::string, double> LoadMosCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::map<std::string, double> mos;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto f = SplitCsvLine(line);
    if (f.empty() || (f.size() == 1 && f[0].empty())) continue;
    double v = 0.0;
    if (f.size() < 2 || !ParseDouble(f[1], &v)) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw Error(ErrorCode::kFormatError,
                  path.string() + ": bad MOS row '" + line + "'");
    }
    first = false;
    mos[f[0]] = v;
  }
  return mos;
}

std::vector<ScoreRecord> LoadScoreCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<ScoreRecord> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto f = SplitCsvLine(line);
    if (f.empty() || (f.size() == 1 && f[0].empty())) continue;
    double v = 0.0;
    if (f.size() < 2 || !ParseDouble(f[1], &v)) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(ErrorCode::kFormatError,
                  path.string() + ": bad score row '" + line + "'");
    }
    first = false;
    rows.push_back({f[0], f.size() > 2 ? f[2] : "", v});
  }
  return rows;
}

MosCorrelation CorrelateWithMos(const std::vector<ScoreRecord>& scores,
                                const std::map<std::string, double>& mos) {
  std::vector<double> xs, ys;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const ScoreRecord& s : scores) {
    auto it = mos.find(s.image_id);
    if (it == mos.end()) {
      throw Error(ErrorCode::kJoinError,
                  "no MOS entry for image '" + s.image_id + "'");
    }
    xs.push_back(s.score);
    ys.push_back(it->second);
    if (!s.group.empty()) {
      groups[s.group].first.push_back(s.score);
      groups[s.group].second.push_back(it->second);
    }
  }
  MosCorrelation out;
  out.count = xs.size();
  out.overall = Pearson(xs, ys);
  for (const auto& [name, xy] : groups) {
    try {
      out.per_group[name] = Pearson(xy.first, xy.second);
    } catch (const Error&) {
      // Groups too small or constant have no defined correlation.
    }
  }
  return out;
}

}  // namespace trustsr
