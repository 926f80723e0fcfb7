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

#include "trustsr/vlm_provider.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
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

using nlohmann::json;

namespace {

std::int64_t NowMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string ImageDigest(const Image& image) {
  std::vector<std::uint8_t> bytes(12 + image.size() * sizeof(double));
  const std::int32_t dims[3] = {image.width(), image.height(),
                                image.channels()};
  std::memcpy(bytes.data(), dims, sizeof(dims));
  std::memcpy(bytes.data() + 12, image.data().data(),
              image.size() * sizeof(double));
  return Sha256Hex(bytes);
}

std::string RequestKey(const std::string& provider_id,
                       const std::string& prompt,
                       std::span<const Image> images) {
  std::string material = provider_id + "\n" + prompt + "\n";
  for (const Image& img : images) material += ImageDigest(img) + "\n";
  return Sha256Hex(material);
}

// ---------------------------------------------------------------------------

ScriptedVlmProvider::ScriptedVlmProvider(std::string provider_id,
                                         Script script, int max_in_flight)
    : provider_id_(std::move(provider_id)),
      script_(std::move(script)),
      max_in_flight_(max_in_flight) {}

VlmResponse ScriptedVlmProvider::Ask(std::span<const Image> images,
                                     const std::string& prompt) const {
  ++calls_;
  return {script_(VlmRequest{images, prompt}), 0};
}

// ---------------------------------------------------------------------------

VlmProviderConfig LoadVlmProviderConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open " + path.string());
  VlmProviderConfig cfg;
  try {
    const json doc = json::parse(in);
    cfg.provider_id = doc.at("provider_id").get<std::string>();
    cfg.endpoint = doc.at("endpoint").get<std::string>();
    cfg.model = doc.value("model", "");
    cfg.auth_env = doc.value("auth_env", "");
    cfg.max_in_flight = doc.value("max_in_flight", 4);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
  if (cfg.max_in_flight < 1) {
    throw Error(ErrorCode::kConfigError, "max_in_flight must be >= 1");
  }
  if (cfg.auth_env.empty()) {
    std::string suffix = cfg.provider_id;
    for (char& c : suffix) {
      c = std::isalnum(static_cast<unsigned char>(c))
              ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
              : '_';
    }
    cfg.auth_env = "TRUSTSR_API_KEY_" + suffix;
  }
  return cfg;
}

HttpVlmProvider::HttpVlmProvider(VlmProviderConfig config,
                                 std::chrono::milliseconds timeout,
                                 std::chrono::milliseconds backoff_base)
    : config_(std::move(config)),
      timeout_(timeout),
      backoff_base_(backoff_base) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, kUrl)) {
    throw Error(ErrorCode::kConfigError,
                "bad provider endpoint: " + config_.endpoint);
  }
  host_ = m[1];
  path_ = m[2].length() ? std::string(m[2]) : "/";
}

VlmResponse HttpVlmProvider::Ask(std::span<const Image> images,
                                 const std::string& prompt) const {
  json body{{"model", config_.model}, {"prompt", prompt}, {"images", json::array()}};
  for (const Image& img : images) {
    body["images"].push_back(
        {{"image_b64", Base64Encode(EncodePng(img, 8))}, {"format", "png"}});
  }
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.auth_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string payload = body.dump();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);

  constexpr int kMaxRetries = 3;
  std::string last;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff_base_ * (1 << (attempt - 1)));
    }
    httplib::Client client(host_);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kProviderError,
                  config_.provider_id + " answered HTTP " +
                      std::to_string(res->status) + ": " + res->body);
    }
    try {
      return {json::parse(res->body).at("text").get<std::string>(), NowMs()};
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kProviderError,
                  config_.provider_id + " returned malformed JSON: " +
                      e.what());
    }
  }
  throw Error(ErrorCode::kProviderError,
              config_.provider_id + " failed after " +
                  std::to_string(kMaxRetries) + " retries: " + last);
}

// ---------------------------------------------------------------------------

ReplayLog::ReplayLog(ReplayLog&& other) noexcept {
  std::lock_guard<std::mutex> lock(other.mu_);
  entries_ = std::move(other.entries_);
  provider_order_ = std::move(other.provider_order_);
}

ReplayLog ReplayLog::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open replay log " + path.string());
  ReplayLog log;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json doc = json::parse(line);
      ReplayEntry e;
      e.key = doc.at("key").get<std::string>();
      e.provider_id = doc.at("provider_id").get<std::string>();
      e.prompt = doc.at("prompt").get<std::string>();
      e.image_digests = doc.at("image_digests").get<std::vector<std::string>>();
      e.response = doc.at("response").get<std::string>();
      e.timestamp_ms = doc.value("timestamp_ms", std::int64_t{0});
      log.Add(std::move(e));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::kFormatError, path.string() + ":" +
                                               std::to_string(line_no) + ": " +
                                               ex.what());
    }
  }
  return log;
}

void ReplayLog::Save(const std::filesystem::path& path) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (const auto& [key, e] : entries_) {
    out << json{{"key", e.key},
                {"provider_id", e.provider_id},
                {"prompt", e.prompt},
                {"image_digests", e.image_digests},
                {"response", e.response},
                {"timestamp_ms", e.timestamp_ms}}
               .dump()
        << "\n";
  }
}

void ReplayLog::Add(ReplayEntry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  if (std::find(provider_order_.begin(), provider_order_.end(),
                entry.provider_id) == provider_order_.end()) {
    provider_order_.push_back(entry.provider_id);
  }
  const std::string key = entry.key;
  entries_.insert_or_assign(key, std::move(entry));
}

const ReplayEntry* ReplayLog::Find(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> ReplayLog::ProviderIds() const {
  std::lock_guard<std::mutex> lock(mu_);
  return provider_order_;
}

std::size_t ReplayLog::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

RecordingVlmProvider::RecordingVlmProvider(
    std::shared_ptr<const VlmProvider> inner, std::shared_ptr<ReplayLog> log)
    : inner_(std::move(inner)), log_(std::move(log)) {}

VlmResponse RecordingVlmProvider::Ask(std::span<const Image> images,
                                      const std::string& prompt) const {
  VlmResponse r = inner_->Ask(images, prompt);
  ReplayEntry e;
  e.provider_id = inner_->provider_id();
  e.key = RequestKey(e.provider_id, prompt, images);
  e.prompt = prompt;
  for (const Image& img : images) e.image_digests.push_back(ImageDigest(img));
  e.response = r.text;
  e.timestamp_ms = r.timestamp_ms;
  log_->Add(std::move(e));
  return r;
}

ReplayVlmProvider::ReplayVlmProvider(std::shared_ptr<const ReplayLog> log,
                                     std::string provider_id)
    : log_(std::move(log)), provider_id_(std::move(provider_id)) {}

VlmResponse ReplayVlmProvider::Ask(std::span<const Image> images,
                                   const std::string& prompt) const {
  const std::string key = RequestKey(provider_id_, prompt, images);
  const ReplayEntry* e = log_->Find(key);
  if (e == nullptr) {
    throw Error(ErrorCode::kProviderError,
                "replay log has no response for provider " + provider_id_ +
                    " prompt \"" + prompt.substr(0, 60) + "\"");
  }
  return {e->response, e->timestamp_ms};
}

}  // namespace trustsr
