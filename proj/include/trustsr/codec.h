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

#ifndef TRUSTSR_CODEC_H_
#define TRUSTSR_CODEC_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trustsr {

std::string Sha256Hex(std::span<const std::uint8_t> bytes);
std::string Sha256Hex(std::string_view text);

std::string Base64Encode(std::span<const std::uint8_t> bytes);
// Throws Error(kFormatError) on malformed input.
std::vector<std::uint8_t> Base64Decode(std::string_view text);

// Stderr warning sink; tests may redirect it.
void Warn(const std::string& message);
using WarningSink = void (*)(const std::string&);
WarningSink SetWarningSink(WarningSink sink);

}  // namespace trustsr

#endif  // TRUSTSR_CODEC_H_
