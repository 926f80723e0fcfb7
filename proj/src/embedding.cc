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

#include "trustsr/embedding.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <regex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "trustsr/codec.h"
#include "trustsr/error.h"
#include "trustsr/image_io.h"

namespace trustsr {
namespace {

constexpr char kCacheMagic[8] = {'T', 'S', 'R', 'E', 'M', 'B', '0', '1'};

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Box-averaged side x side luminance fingerprint.
std::vector<double> Fingerprint(const Image& image, int side) {
  const Image gray = ToGrayscale(image);
  const int w = gray.width();
  const int h = gray.height();
  std::vector<double> out(static_cast<std::size_t>(side) * side, 0.0);
  for (int cy = 0; cy < side; ++cy) {
    int y0 = cy * h / side;
    int y1 = std::max((cy + 1) * h / side, y0 + 1);
    y0 = std::min(y0, h - 1);
    y1 = std::min(y1, h);
    for (int cx = 0; cx < side; ++cx) {
      int x0 = cx * w / side;
      int x1 = std::max((cx + 1) * w / side, x0 + 1);
      x0 = std::min(x0, w - 1);
      x1 = std::min(x1, w);
      double acc = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) acc += gray.at(x, y);
      }
      out[static_cast<std::size_t>(cy) * side + cx] =
          acc / static_cast<double>((y1 - y0) * (x1 - x0));
    }
  }
  return out;
}

void CheckFinite(const Embedding& e) {
  for (float v : e.vector) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kEmbeddingError,
                  "provider " + e.provider_id + " returned a non-finite value");
    }
  }
}

}  // namespace

double CosineSimilarity(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cosine: dims " + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += double(a.vector[i]) * b.vector[i];
    na += double(a.vector[i]) * a.vector[i];
    nb += double(b.vector[i]) * b.vector[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<std::uint8_t> CanonicalBytes(const Image& image) {
  return EncodePng(image, 16);
}

// ---------------------------------------------------------------------------
// Mock

MockEmbeddingProvider::MockEmbeddingProvider(int dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim < 2) {
    throw Error(ErrorCode::kConfigError, "mock embedding dim must be >= 2");
  }
  const std::size_t features = kFingerprintSide * kFingerprintSide + 1;
  projection_.resize(static_cast<std::size_t>(dim) * features);
  for (std::size_t i = 0; i < projection_.size(); ++i) {
    const std::uint64_t r = SplitMix64(seed ^ SplitMix64(i));
    projection_[i] =
        static_cast<float>(static_cast<double>(r >> 11) * 0x1.0p-53 * 2 - 1);
  }
}

std::string MockEmbeddingProvider::provider_id() const {
  return "mock-d" + std::to_string(dim_) + "-s" + std::to_string(seed_);
}

Embedding MockEmbeddingProvider::Embed(const Image& image,
                                       std::span<const std::uint8_t>) const {
  if (image.empty()) throw Error(ErrorCode::kEmbeddingError, "empty image");
  std::vector<double> f = Fingerprint(image, kFingerprintSide);
  f.push_back(1.0);
  Embedding e;
  e.provider_id = provider_id();
  e.vector.resize(dim_);
  for (int d = 0; d < dim_; ++d) {
    const float* row = &projection_[static_cast<std::size_t>(d) * f.size()];
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += row[i] * f[i];
    e.vector[d] = static_cast<float>(acc);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Remote

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string endpoint,
                                                 RemoteOptions options)
    : options_(options) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, kUrl)) {
    throw Error(ErrorCode::kConfigError, "bad embedding endpoint: " + endpoint);
  }
  host_ = m[1];
  path_prefix_ = m[2];
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
}

// Stable before and after the first response so cache keys do not shift;
// returned embeddings carry the sidecar's own provider_id.
std::string RemoteEmbeddingProvider::provider_id() const {
  return "remote:" + host_ + path_prefix_;
}

Embedding RemoteEmbeddingProvider::Embed(
    const Image& image, std::span<const std::uint8_t> encoded) const {
  std::vector<std::uint8_t> png;
  static constexpr std::uint8_t kPngMagic[4] = {0x89, 'P', 'N', 'G'};
  if (encoded.size() >= 4 && std::memcmp(encoded.data(), kPngMagic, 4) == 0) {
    png.assign(encoded.begin(), encoded.end());
  } else {
    png = EncodePng(image, 8);
  }
  const std::string body =
      nlohmann::json{{"image_b64", Base64Encode(png)}, {"format", "png"}}
          .dump();

  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(
      options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);
  ErrorCode last_code = ErrorCode::kNetworkError;
  std::string last_message;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(options_.backoff_base * (1 << (attempt - 1)));
    }
    httplib::Client client(host_);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(path_prefix_ + "/embed", body, "application/json");
    if (!res) {
      const bool timed_out =
          res.error() == httplib::Error::ConnectionTimeout ||
          std::chrono::steady_clock::now() - started >= options_.timeout;
      last_code = timed_out ? ErrorCode::kTimeoutError
                            : ErrorCode::kNetworkError;
      last_message = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_code = ErrorCode::kNetworkError;
      last_message = "HTTP " + std::to_string(res->status) + ": " + res->body;
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kProtocolError,
                  "sidecar answered HTTP " + std::to_string(res->status) +
                      ": " + res->body);
    }
    Embedding e;
    try {
      const auto doc = nlohmann::json::parse(res->body);
      e.provider_id = doc.at("provider_id").get<std::string>();
      const auto dim = doc.at("dim").get<std::size_t>();
      e.vector = doc.at("vector").get<std::vector<float>>();
      if (e.vector.size() != dim) {
        throw Error(ErrorCode::kProtocolError,
                    "sidecar vector length " + std::to_string(e.vector.size()) +
                        " disagrees with dim " + std::to_string(dim));
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kProtocolError,
                  std::string("malformed sidecar response: ") + ex.what());
    }
    CheckFinite(e);
    std::lock_guard<std::mutex> lock(mu_);
    if (dim_ && *dim_ != e.dim()) {
      throw Error(ErrorCode::kProtocolError,
                  "sidecar changed dimension from " + std::to_string(*dim_) +
                      " to " + std::to_string(e.dim()));
    }
    if (!provider_id_.empty() && provider_id_ != e.provider_id) {
      throw Error(ErrorCode::kProtocolError,
                  "sidecar changed provider_id from " + provider_id_ +
                      " to " + e.provider_id);
    }
    dim_ = e.dim();
    provider_id_ = e.provider_id;
    return e;
  }
  throw Error(last_code, "embedding request to " + host_ + " failed after " +
                             std::to_string(options_.max_retries) +
                             " retries: " + last_message);
}

// ---------------------------------------------------------------------------
// Cache

std::vector<std::uint8_t> SerializeEmbedding(const Embedding& e) {
  std::vector<std::uint8_t> out(std::begin(kCacheMagic), std::end(kCacheMagic));
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
  };
  put_u32(static_cast<std::uint32_t>(e.dim()));
  for (float f : e.vector) put_u32(std::bit_cast<std::uint32_t>(f));
  return out;
}

Embedding DeserializeEmbedding(std::span<const std::uint8_t> bytes,
                               std::string provider_id) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kCacheMagic, 8) != 0) {
    throw Error(ErrorCode::kFormatError, "bad embedding cache header");
  }
  auto get_u32 = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes[off + i]) << (8 * i);
    return v;
  };
  const std::uint32_t dim = get_u32(8);
  if (bytes.size() != 12 + 4 * std::size_t(dim)) {
    throw Error(ErrorCode::kFormatError, "truncated embedding cache entry");
  }
  Embedding e;
  e.provider_id = std::move(provider_id);
  e.vector.resize(dim);
  for (std::uint32_t i = 0; i < dim; ++i) {
    e.vector[i] = std::bit_cast<float>(get_u32(12 + 4 * std::size_t(i)));
  }
  return e;
}

CachedEmbeddingProvider::CachedEmbeddingProvider(
    std::shared_ptr<const EmbeddingProvider> inner,
    std::filesystem::path cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {}

std::filesystem::path CachedEmbeddingProvider::EntryPath(
    const Image& image, std::span<const std::uint8_t> encoded) const {
  std::vector<std::uint8_t> key_bytes;
  const std::string id = inner_->provider_id();
  key_bytes.assign(id.begin(), id.end());
  key_bytes.push_back(0);
  if (encoded.empty()) {
    const auto canonical = CanonicalBytes(image);
    key_bytes.insert(key_bytes.end(), canonical.begin(), canonical.end());
  } else {
    key_bytes.insert(key_bytes.end(), encoded.begin(), encoded.end());
  }
  return cache_dir_ / (Sha256Hex(key_bytes) + ".emb");
}

Embedding CachedEmbeddingProvider::Embed(
    const Image& image, std::span<const std::uint8_t> encoded) const {
  const auto entry = EntryPath(image, encoded);
  std::error_code ec;
  if (std::filesystem::exists(entry, ec)) {
    try {
      return DeserializeEmbedding(ReadFileBytes(entry), inner_->provider_id());
    } catch (const Error& e) {
      Warn("ignoring unreadable cache entry " + entry.string() + ": " +
           e.what());
    }
  }
  Embedding e = inner_->Embed(image, encoded);
  try {
    std::filesystem::create_directories(cache_dir_);
    const auto tmp = entry.string() + ".tmp." +
                     std::to_string(std::hash<std::thread::id>{}(
                         std::this_thread::get_id()));
    WriteFileBytes(tmp, SerializeEmbedding(e));
    std::filesystem::rename(tmp, entry);
  } catch (const std::exception& ex) {
    Warn(std::string("embedding cache write failed, continuing uncached: ") +
         ex.what());
  }
  return e;
}

}  // namespace trustsr
