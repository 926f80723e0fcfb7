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

#include "trustsr/wavelet.h"

#include <array>
#include <cmath>
#include <string>

#include "trustsr/error.h"

namespace trustsr {
namespace {

// Daubechies-19 decomposition low-pass, standard published coefficients.
constexpr std::array<double, kDb19Taps> kDb19Lo = {
    8.666848838997619e-10,   -1.1164020670358259e-08,
    4.6369377757826045e-08,  1.4470882987978445e-08,
    -6.862755657769143e-07,  1.531931476691193e-06,
    3.0109643162965265e-06,  -1.6640176297154945e-05,
    5.105950487073886e-06,   8.711270467219923e-05,
    -0.00012460079173415878, -0.000260676135678628,
    0.0007358025205054352,   0.00034180865345859575,
    -0.002687551800701582,   0.0007689543592575484,
    0.007040747367105243,    -0.005866922281012175,
    -0.013988388678535142,   0.019375549889176127,
    0.02162376740958505,     -0.04567422627723091,
    -0.02650123625012304,    0.08690675555581223,
    0.027584350625628667,    -0.1427856950387366,
    -0.03351854190230288,    0.21234974330627848,
    0.07465226970810326,     -0.28583863175582624,
    -0.22809139421548263,    0.26089495265103885,
    0.6017045491275379,      0.5244363774646549,
    0.26438843174089677,     0.08127811326545956,
    0.014281098450764397,    0.0011086697631817106,
};

constexpr std::array<double, kDb19Taps> MakeHighPass() {
  std::array<double, kDb19Taps> hi{};
  for (int i = 0; i < kDb19Taps; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    hi[i] = sign * kDb19Lo[kDb19Taps - 1 - i];
  }
  return hi;
}

constexpr std::array<double, kDb19Taps> kDb19Hi = MakeHighPass();

// Maps an out-of-range index onto [0, n) by half-point reflection.
int Reflect(int i, int n) {
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

// Strided 1-D analysis: reads n samples at src[0], src[stride], ... and
// writes K = DwtOutputLength(n) low/high coefficients with the same stride.
//   out[k] = sum_i filter[i] * ext(2k - i)
void Analyze1d(const double* src, int n, std::size_t stride, Boundary b,
               double* lo, double* hi, std::size_t out_stride) {
  const int count = DwtOutputLength(n);
  for (int k = 0; k < count; ++k) {
    double acc_lo = 0.0;
    double acc_hi = 0.0;
    for (int i = 0; i < kDb19Taps; ++i) {
      int j = 2 * k - i;
      double v;
      if (j >= 0 && j < n) {
        v = src[j * stride];
      } else if (b == Boundary::kZero) {
        continue;
      } else {
        v = src[Reflect(j, n) * stride];
      }
      acc_lo += kDb19Lo[i] * v;
      acc_hi += kDb19Hi[i] * v;
    }
    lo[k * out_stride] = acc_lo;
    hi[k * out_stride] = acc_hi;
  }
}

// Inverse of Analyze1d for output positions 0..n-1:
//   s[m] = sum_k lo[k] * h[2k - m] + hi[k] * q[2k - m]
void Synthesize1d(const double* lo, const double* hi, int count,
                  std::size_t in_stride, int n, double* dst,
                  std::size_t stride) {
  for (int m = 0; m < n; ++m) {
    const int k_first = (m + 1) / 2;
    const int k_last = std::min((m + kDb19Taps - 1) / 2, count - 1);
    double acc = 0.0;
    for (int k = k_first; k <= k_last; ++k) {
      const int i = 2 * k - m;
      acc += kDb19Lo[i] * lo[k * in_stride] + kDb19Hi[i] * hi[k * in_stride];
    }
    dst[m * stride] = acc;
  }
}

struct Split {
  Plane ll, lh, hl, hh;
};

Split AnalyzeLevel(const Plane& in, Boundary b) {
  const int kw = DwtOutputLength(in.width);
  const int kh = DwtOutputLength(in.height);
  // Along x.
  Plane row_lo(kw, in.height), row_hi(kw, in.height);
  for (int y = 0; y < in.height; ++y) {
    Analyze1d(&in.data[std::size_t(y) * in.width], in.width, 1, b,
              &row_lo.at(0, y), &row_hi.at(0, y), 1);
  }
  // Along y.
  Split out{Plane(kw, kh), Plane(kw, kh), Plane(kw, kh), Plane(kw, kh)};
  for (int x = 0; x < kw; ++x) {
    Analyze1d(&row_lo.data[x], in.height, kw, b, &out.ll.data[x],
              &out.lh.data[x], kw);
    Analyze1d(&row_hi.data[x], in.height, kw, b, &out.hl.data[x],
              &out.hh.data[x], kw);
  }
  return out;
}

Plane SynthesizeLevel(const Plane& ll, const DetailBands& d, int width,
                      int height) {
  const int kw = ll.width;
  const int kh = ll.height;
  Plane row_lo(kw, height), row_hi(kw, height);
  for (int x = 0; x < kw; ++x) {
    Synthesize1d(&ll.data[x], &d.lh.data[x], kh, kw, height,
                 &row_lo.data[x], kw);
    Synthesize1d(&d.hl.data[x], &d.hh.data[x], kh, kw, height,
                 &row_hi.data[x], kw);
  }
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    Synthesize1d(&row_lo.at(0, y), &row_hi.at(0, y), kw, 1, width,
                 &out.at(0, y), 1);
  }
  return out;
}

double SumAbs(const Plane& p) {
  double s = 0.0;
  for (double v : p.data) s += std::abs(v);
  return s;
}

}  // namespace

std::span<const double, kDb19Taps> Db19LowPass() { return kDb19Lo; }
std::span<const double, kDb19Taps> Db19HighPass() { return kDb19Hi; }

Plane::Plane(const Image& gray) : Plane(gray.width(), gray.height()) {
  if (gray.channels() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "Plane expects a grayscale image");
  }
  data.assign(gray.data().begin(), gray.data().end());
}

int DwtOutputLength(int n) { return (n + kDb19Taps - 1 + 1) / 2; }

WaveletPyramid Dwt2Db19(const Plane& input, int levels, Boundary boundary) {
  if (levels < 1) {
    throw Error(ErrorCode::kBadSpec, "wavelet levels must be >= 1");
  }
  if (input.width < 1 || input.height < 1) {
    throw Error(ErrorCode::kTooSmall, "wavelet input is empty");
  }
  WaveletPyramid pyramid;
  pyramid.boundary = boundary;
  Plane current = input;
  for (int level = 0; level < levels; ++level) {
    pyramid.input_sizes.emplace_back(current.width, current.height);
    Split s = AnalyzeLevel(current, boundary);
    pyramid.details.push_back(
        {std::move(s.lh), std::move(s.hl), std::move(s.hh)});
    current = std::move(s.ll);
  }
  pyramid.approx = std::move(current);
  return pyramid;
}

Plane Idwt2Db19(const WaveletPyramid& pyramid) {
  Plane current = pyramid.approx;
  for (int level = static_cast<int>(pyramid.details.size()) - 1; level >= 0;
       --level) {
    const auto [w, h] = pyramid.input_sizes[level];
    current = SynthesizeLevel(current, pyramid.details[level], w, h);
  }
  return current;
}

double WaveletArtifactEnergy(const Image& sr, const WaveletConfig& cfg) {
  const Image gray = ToGrayscale(sr);
  if (gray.width() < WaveletConfig::kMinSide ||
      gray.height() < WaveletConfig::kMinSide) {
    throw Error(ErrorCode::kTooSmall,
                "wavelet score needs at least " +
                    std::to_string(WaveletConfig::kMinSide) +
                    " pixels per side, got " + std::to_string(gray.width()) +
                    "x" + std::to_string(gray.height()));
  }
  const WaveletPyramid pyramid = Dwt2Db19(Plane(gray), cfg.levels);
  double total = 0.0;
  for (const DetailBands& d : pyramid.details) {
    total += SumAbs(d.lh) + SumAbs(d.hl) + SumAbs(d.hh);
  }
  return total / (static_cast<double>(gray.width()) * gray.height());
}

}  // namespace trustsr
