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

#ifndef TRUSTSR_VLM_PROVIDER_H_
#define TRUSTSR_VLM_PROVIDER_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "trustsr/image.h"

namespace trustsr {

struct VlmResponse {
  std::string text;
  std::int64_t timestamp_ms = 0;
};

// A vision-language endpoint: one prompt about one or more images, free-form
// text back. Implementations must be safe under concurrent Ask calls; callers
// keep at most max_in_flight() requests outstanding.
class VlmProvider {
 public:
  virtual ~VlmProvider() = default;
  virtual std::string provider_id() const = 0;
  virtual int max_in_flight() const { return 4; }
  virtual VlmResponse Ask(std::span<const Image> images,
                          const std::string& prompt) const = 0;
};

// sha256 over shape and sample bytes.
std::string ImageDigest(const Image& image);

// Content-hashed request key used by the replay log.
std::string RequestKey(const std::string& provider_id,
                       const std::string& prompt,
                       std::span<const Image> images);

struct VlmRequest {
  std::span<const Image> images;
  std::string prompt;
};

// Test double answering from a callback. Counts calls.
class ScriptedVlmProvider : public VlmProvider {
 public:
  using Script = std::function<std::string(const VlmRequest&)>;

  ScriptedVlmProvider(std::string provider_id, Script script,
                      int max_in_flight = 4);

  std::string provider_id() const override { return provider_id_; }
  int max_in_flight() const override { return max_in_flight_; }
  VlmResponse Ask(std::span<const Image> images,
                  const std::string& prompt) const override;

  int calls() const { return calls_.load(); }

 private:
  std::string provider_id_;
  Script script_;
  int max_in_flight_;
  mutable std::atomic<int> calls_{0};
};

// Provider config JSON:
//   {"provider_id": str, "endpoint": URL, "model": str, "auth_env": str,
//    "max_in_flight": int (optional)}
struct VlmProviderConfig {
  std::string provider_id;
  std::string endpoint;
  std::string model;
  std::string auth_env;  // defaults to TRUSTSR_API_KEY_<PROVIDER_ID>
  int max_in_flight = 4;
};

VlmProviderConfig LoadVlmProviderConfig(const std::filesystem::path& path);

// Generic HTTP bridge:
//   POST <endpoint>  {"model": str, "prompt": str,
//                     "images": [{"image_b64": str, "format": "png"}, ...]}
//   200 -> {"text": str}
// The API key, when the named variable is set, goes in a Bearer header.
class HttpVlmProvider : public VlmProvider {
 public:
  explicit HttpVlmProvider(VlmProviderConfig config,
                           std::chrono::milliseconds timeout =
                               std::chrono::seconds(60),
                           std::chrono::milliseconds backoff_base =
                               std::chrono::milliseconds(250));

  std::string provider_id() const override { return config_.provider_id; }
  int max_in_flight() const override { return config_.max_in_flight; }
  VlmResponse Ask(std::span<const Image> images,
                  const std::string& prompt) const override;

 private:
  VlmProviderConfig config_;
  std::string host_;
  std::string path_;
  std::chrono::milliseconds timeout_;
  std::chrono::milliseconds backoff_base_;
};

struct ReplayEntry {
  std::string key;
  std::string provider_id;
  std::string prompt;
  std::vector<std::string> image_digests;
  std::string response;
  std::int64_t timestamp_ms = 0;
};

// JSON-lines request/response log. Thread-safe. Saved sorted by key so a
// recording is byte-stable regardless of request completion order.
class ReplayLog {
 public:
  ReplayLog() = default;
  ReplayLog(ReplayLog&& other) noexcept;
  static ReplayLog Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  void Add(ReplayEntry entry);
  // Returns nullptr on a miss.
  const ReplayEntry* Find(const std::string& key) const;
  std::vector<std::string> ProviderIds() const;  // in first-seen order
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, ReplayEntry> entries_;
  std::vector<std::string> provider_order_;
};

// Forwards to `inner` and records every exchange.
class RecordingVlmProvider : public VlmProvider {
 public:
  RecordingVlmProvider(std::shared_ptr<const VlmProvider> inner,
                       std::shared_ptr<ReplayLog> log);

  std::string provider_id() const override { return inner_->provider_id(); }
  int max_in_flight() const override { return inner_->max_in_flight(); }
  VlmResponse Ask(std::span<const Image> images,
                  const std::string& prompt) const override;

 private:
  std::shared_ptr<const VlmProvider> inner_;
  std::shared_ptr<ReplayLog> log_;
};

// Serves recorded responses; a miss is a kProviderError. Never touches the
// network.
class ReplayVlmProvider : public VlmProvider {
 public:
  ReplayVlmProvider(std::shared_ptr<const ReplayLog> log,
                    std::string provider_id);

  std::string provider_id() const override { return provider_id_; }
  VlmResponse Ask(std::span<const Image> images,
                  const std::string& prompt) const override;

 private:
  std::shared_ptr<const ReplayLog> log_;
  std::string provider_id_;
};

}  // namespace trustsr

#endif  // TRUSTSR_VLM_PROVIDER_H_
