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

#include "trustsr/image.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "trustsr/error.h"

namespace trustsr {
namespace {

double Clamp01(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

std::string ShapeString(const Image& img) {
  return std::to_string(img.width()) + "x" + std::to_string(img.height()) +
         "x" + std::to_string(img.channels());
}

}  // namespace

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || (channels != 1 && channels != 3)) {
    throw Error(ErrorCode::kShapeMismatch,
                "invalid image shape " + std::to_string(width) + "x" +
                    std::to_string(height) + "x" + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels,
               Clamp01(fill));
}

Image::Image(int width, int height, int channels, std::vector<double> data)
    : Image(width, height, channels) {
  if (data.size() != data_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "pixel buffer has " + std::to_string(data.size()) +
                    " samples, expected " + std::to_string(data_.size()));
  }
  for (double& v : data) v = Clamp01(v);
  data_ = std::move(data);
}

void Image::set(int x, int y, int c, double v) {
  data_[Index(x, y, c)] = Clamp01(v);
}

Image ToGrayscale(const Image& img) {
  if (img.channels() == 1) return img;
  std::vector<double> out(static_cast<std::size_t>(img.width()) *
                          img.height());
  auto src = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] +
             0.114 * src[3 * i + 2];
  }
  return Image(img.width(), img.height(), 1, std::move(out));
}

PsnrResult Psnr(const Image& a, const Image& b) {
  if (!a.SameShape(b)) {
    throw Error(ErrorCode::kShapeMismatch,
                "psnr: " + ShapeString(a) + " vs " + ShapeString(b));
  }
  if (a.empty()) throw Error(ErrorCode::kEmptyInput, "psnr: empty image");
  auto da = a.data();
  auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(da.size());
  if (mse == 0.0) return PsnrResult::PerfectMatch();
  return {false, 10.0 * std::log10(1.0 / mse)};
}

Image EnsembleAverage(std::span<const Image> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyInput, "ensemble: no candidates");
  }
  const Image& first = candidates.front();
  std::vector<double> acc(first.size(), 0.0);
  for (const Image& img : candidates) {
    if (!img.SameShape(first)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "ensemble: " + ShapeString(img) + " vs " +
                      ShapeString(first));
    }
    auto d = img.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i];
  }
  const double n = static_cast<double>(candidates.size());
  for (double& v : acc) v /= n;
  return Image(first.width(), first.height(), first.channels(),
               std::move(acc));
}

Image TileMnist(const Image& digit, int repeats, int target) {
  constexpr int kSide = 7;
  if (digit.width() != kSide || digit.height() != kSide ||
      digit.channels() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "tile_mnist expects a 7x7 single-channel digit, got " +
                    ShapeString(digit));
  }
  const int grid = kSide * repeats;
  const int pad = target - grid;
  if (repeats < 1 || pad < 0 || pad > grid) {
    throw Error(ErrorCode::kShapeMismatch,
                "tile_mnist: cannot reach side " + std::to_string(target) +
                    " from " + std::to_string(repeats) + " repeats");
  }
  // Output coordinate -> grid coordinate; the final `pad` positions repeat
  // the last `pad` grid rows/columns.
  auto to_grid = [&](int v) { return v < grid ? v : v - pad; };
  Image out(target, target, 1);
  for (int y = 0; y < target; ++y) {
    const int gy = to_grid(y) % kSide;
    for (int x = 0; x < target; ++x) {
      out.set(x, y, 0, digit.at(to_grid(x) % kSide, gy));
    }
  }
  return out;
}

}  // namespace trustsr
