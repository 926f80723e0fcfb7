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

#ifndef TRUSTSR_WAVELET_H_
#define TRUSTSR_WAVELET_H_

#include <span>
#include <vector>

#include "trustsr/image.h"

namespace trustsr {

inline constexpr int kDb19Taps = 38;

// Orthonormal Daubechies-19 decomposition low-pass filter (sums to sqrt(2)).
std::span<const double, kDb19Taps> Db19LowPass();
// Quadrature mirror of the low-pass: q[i] = (-1)^i * h[taps - 1 - i].
std::span<const double, kDb19Taps> Db19HighPass();

// Unclamped real-valued plane for coefficients.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(int w, int h) : width(w), height(h), data(std::size_t(w) * h, 0.0) {}
  explicit Plane(const Image& gray);

  double& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  double at(int x, int y) const { return data[std::size_t(y) * width + x]; }
};

enum class Boundary {
  kSymmetric,  // half-point: ... s1 s0 | s0 s1 ... s(n-1) | s(n-1) s(n-2) ...
  kZero,
};

// Number of coefficients per sub-band for an input of length n:
// ceil((n + taps - 1) / 2).
int DwtOutputLength(int n);

struct DetailBands {
  Plane lh;  // low-pass along x, high-pass along y
  Plane hl;  // high-pass along x, low-pass along y
  Plane hh;
};

struct WaveletPyramid {
  Plane approx;                      // LL at the coarsest level
  std::vector<DetailBands> details;  // details[0] is level 1 (finest)
  // Input width/height consumed by each level, needed to crop on inversion.
  std::vector<std::pair<int, int>> input_sizes;
  Boundary boundary = Boundary::kSymmetric;
};

// Separable multi-level 2-D db19 analysis with dyadic downsampling.
WaveletPyramid Dwt2Db19(const Plane& input, int levels,
                        Boundary boundary = Boundary::kSymmetric);
Plane Idwt2Db19(const WaveletPyramid& pyramid);

struct WaveletConfig {
  int levels = 2;
  // Smallest accepted image side for the artifact score.
  static constexpr int kMinSide = 64;
};

// Sum of |coefficient| over every detail sub-band of levels 1..L of the
// grayscale image, divided by the image's pixel count.
double WaveletArtifactEnergy(const Image& sr, const WaveletConfig& cfg = {});

}  // namespace trustsr

#endif  // TRUSTSR_WAVELET_H_
