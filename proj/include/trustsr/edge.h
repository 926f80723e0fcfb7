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

#ifndef TRUSTSR_EDGE_H_
#define TRUSTSR_EDGE_H_

#include "trustsr/image.h"

namespace trustsr {

// Sobel gradient magnitude with edge-replicate borders, divided by 4*sqrt(2)
// so that [0,1] inputs give [0,1] outputs. Input must be single-channel.
Image SobelEdgeMap(const Image& gray);

// Mean SSIM over the valid region of an 11x11 Gaussian window (sigma 1.5),
// with C1 = 0.01^2 and C2 = 0.03^2. Inputs are single-channel, same shape,
// and at least 11 pixels on each side.
double Ssim(const Image& a, const Image& b);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

// SSIM between the Sobel edge maps of the grayscale images.
double EdgeSimilarity(const Image& hr, const Image& sr);

}  // namespace trustsr

#endif  // TRUSTSR_EDGE_H_
