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

#ifndef TRUSTSR_IMAGE_H_
#define TRUSTSR_IMAGE_H_

#include <cstddef>
#include <span>
#include <vector>

namespace trustsr {

// Row-major, channel-interleaved pixel buffer with samples in [0,1].
// Construction clamps every sample into range, so an Image never holds
// out-of-range values regardless of where the data came from.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0);
  Image(int width, int height, int channels, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double at(int x, int y, int c = 0) const {
    return data_[Index(x, y, c)];
  }
  // Writes are clamped to [0,1].
  void set(int x, int y, int c, double v);

  std::span<const double> data() const { return data_; }

  bool SameShape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t Index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// BT.601 luma. Single-channel input is returned unchanged.
Image ToGrayscale(const Image& img);

struct PsnrResult {
  bool perfect_match = false;
  double decibels = 0.0;  // meaningful only when !perfect_match

  static PsnrResult PerfectMatch() { return {true, 0.0}; }
};

// Peak value 1.0. Identical inputs yield the PerfectMatch sentinel.
PsnrResult Psnr(const Image& a, const Image& b);

// Per-pixel arithmetic mean of same-shape images.
Image EnsembleAverage(std::span<const Image> candidates);

// Tiles a 7x7 single-channel digit `repeats` times in each direction and
// pads to `target` by replicating the trailing rows/columns of the grid.
Image TileMnist(const Image& digit, int repeats = 18, int target = 128);

}  // namespace trustsr

#endif  // TRUSTSR_IMAGE_H_
