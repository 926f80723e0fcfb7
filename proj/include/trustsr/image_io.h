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

#ifndef TRUSTSR_IMAGE_IO_H_
#define TRUSTSR_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "trustsr/image.h"

namespace trustsr {

// Decodes 8- or 16-bit PNG (gray, gray+alpha, RGB, RGBA, palette) and
// binary PGM/PPM. Alpha is dropped. Values are scaled by the format maximum,
// so an 8-bit value v becomes v/255.
Image LoadImage(const std::filesystem::path& path);
Image DecodeImage(const std::vector<std::uint8_t>& bytes);

// Format is chosen by extension: .pgm/.ppm write binary PNM, anything else
// writes PNG. `bit_depth` is 8 or 16.
void SaveImage(const std::filesystem::path& path, const Image& img,
               int bit_depth = 8);
std::vector<std::uint8_t> EncodePng(const Image& img, int bit_depth = 8);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    const std::vector<std::uint8_t>& bytes);

}  // namespace trustsr

#endif  // TRUSTSR_IMAGE_IO_H_
