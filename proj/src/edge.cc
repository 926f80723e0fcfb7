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

#include "trustsr/edge.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "trustsr/error.h"

namespace trustsr {
namespace {

std::array<double, kSsimWindow> GaussianTaps() {
  std::array<double, kSsimWindow> taps{};
  const int half = kSsimWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - half;
    taps[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable "valid" filtering of a w x h plane.
std::vector<double> FilterValid(const std::vector<double>& plane, int w,
                                int h) {
  static const auto taps = GaussianTaps();
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        acc += taps[k] * plane[static_cast<std::size_t>(y) * w + x + k];
      }
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        acc += taps[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      }
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

Image SobelEdgeMap(const Image& gray) {
  if (gray.channels() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "sobel_edge_map expects a single-channel image");
  }
  const int w = gray.width();
  const int h = gray.height();
  const double norm = 4.0 * std::sqrt(2.0);
  auto px = [&](int x, int y) {
    return gray.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) +
                         px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2 * px(x - 1, y) +
                         px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) +
                         px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2 * px(x, y - 1) +
                         px(x + 1, y - 1));
      out[static_cast<std::size_t>(y) * w + x] =
          std::sqrt(gx * gx + gy * gy) / norm;
    }
  }
  return Image(w, h, 1, std::move(out));
}

double Ssim(const Image& a, const Image& b) {
  if (!a.SameShape(b) || a.channels() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "ssim expects two single-channel images of equal shape");
  }
  const int w = a.width();
  const int h = a.height();
  if (w < kSsimWindow || h < kSsimWindow) {
    throw Error(ErrorCode::kTooSmall,
                "ssim needs at least " + std::to_string(kSsimWindow) +
                    " pixels per side");
  }
  const std::size_t n = a.size();
  std::vector<double> x(a.data().begin(), a.data().end());
  std::vector<double> y(b.data().begin(), b.data().end());
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = FilterValid(x, w, h);
  const auto mu_y = FilterValid(y, w, h);
  const auto e_xx = FilterValid(xx, w, h);
  const auto e_yy = FilterValid(yy, w, h);
  const auto e_xy = FilterValid(xy, w, h);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double var_x = e_xx[i] - mx * mx;
    const double var_y = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    total += ((2 * mx * my + kSsimC1) * (2 * cov + kSsimC2)) /
             ((mx * mx + my * my + kSsimC1) * (var_x + var_y + kSsimC2));
  }
  return total / static_cast<double>(mu_x.size());
}

double EdgeSimilarity(const Image& hr, const Image& sr) {
  if (!hr.SameShape(sr)) {
    throw Error(ErrorCode::kShapeMismatch, "s_edge: shape mismatch");
  }
  return Ssim(SobelEdgeMap(ToGrayscale(hr)), SobelEdgeMap(ToGrayscale(sr)));
}

}  // namespace trustsr
