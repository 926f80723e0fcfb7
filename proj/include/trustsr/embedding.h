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

#ifndef TRUSTSR_EMBEDDING_H_
#define TRUSTSR_EMBEDDING_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trustsr/image.h"

namespace trustsr {

struct Embedding {
  std::vector<float> vector;
  std::string provider_id;

  std::size_t dim() const { return vector.size(); }
};

// dot(a,b) / (|a| |b|), clamped to [-1,1]. Throws kDimensionMismatch or
// kZeroVector.
double CosineSimilarity(const Embedding& a, const Embedding& b);

// Image encoder contract. Implementations are deterministic (same bytes give
// the same vector) and safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string provider_id() const = 0;

  // `encoded` holds the image's source file bytes when known; providers that
  // key or transmit on bytes fall back to a canonical encoding otherwise.
  virtual Embedding Embed(const Image& image,
                          std::span<const std::uint8_t> encoded) const = 0;

  Embedding Embed(const Image& image) const { return Embed(image, {}); }
};

// Test double: a 16x16 luminance fingerprint (plus a bias feature) projected
// through a seeded pseudo-random matrix. Linear in pixel values, hence
// locally smooth.
class MockEmbeddingProvider : public EmbeddingProvider {
 public:
  MockEmbeddingProvider(int dim, std::uint64_t seed);

  std::string provider_id() const override;
  Embedding Embed(const Image& image,
                  std::span<const std::uint8_t> encoded) const override;
  using EmbeddingProvider::Embed;

  static constexpr int kFingerprintSide = 16;

 private:
  int dim_;
  std::uint64_t seed_;
  std::vector<float> projection_;  // dim x (side*side + 1)
};

struct RemoteOptions {
  std::chrono::milliseconds timeout{10000};
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{250};
};

// Client for the embedding sidecar:
//   POST <endpoint>/embed  {"image_b64": str, "format": "png"}
//   200 -> {"provider_id": str, "dim": int, "vector": [float, ...]}
// Transient failures (connection errors, timeouts, 5xx) are retried with
// exponential backoff.
class RemoteEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(std::string endpoint,
                                   RemoteOptions options = {});

  std::string provider_id() const override;
  Embedding Embed(const Image& image,
                  std::span<const std::uint8_t> encoded) const override;
  using EmbeddingProvider::Embed;

 private:
  std::string host_;         // scheme://host[:port]
  std::string path_prefix_;  // without trailing slash
  RemoteOptions options_;
  mutable std::mutex mu_;
  mutable std::optional<std::size_t> dim_;
  mutable std::string provider_id_;
};

// Content-addressed on-disk cache. Keys are sha256(provider_id, bytes); one
// file per key holding "TSREMB01", a little-endian u32 dim and dim float32s.
class CachedEmbeddingProvider : public EmbeddingProvider {
 public:
  CachedEmbeddingProvider(std::shared_ptr<const EmbeddingProvider> inner,
                          std::filesystem::path cache_dir);

  std::string provider_id() const override { return inner_->provider_id(); }
  Embedding Embed(const Image& image,
                  std::span<const std::uint8_t> encoded) const override;
  using EmbeddingProvider::Embed;

  std::filesystem::path EntryPath(const Image& image,
                                  std::span<const std::uint8_t> encoded) const;

 private:
  std::shared_ptr<const EmbeddingProvider> inner_;
  std::filesystem::path cache_dir_;
};

// Canonical bytes for an in-memory image: the 16-bit PNG encoding.
std::vector<std::uint8_t> CanonicalBytes(const Image& image);

std::vector<std::uint8_t> SerializeEmbedding(const Embedding& e);
// Throws kFormatError on a bad header or truncated payload.
Embedding DeserializeEmbedding(std::span<const std::uint8_t> bytes,
                               std::string provider_id);

}  // namespace trustsr

#endif  // TRUSTSR_EMBEDDING_H_
