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

#include "trustsr/sample_set.h"

#include <fstream>
#include <set>

#include "json.hpp"
#include "trustsr/error.h"
#include "trustsr/image_io.h"

namespace trustsr {

using nlohmann::json;

void SampleSet::Validate() const {
  std::set<std::string> seen;
  for (const Candidate& c : candidates) {
    if (!seen.insert(c.id).second) {
      throw Error(ErrorCode::kFormatError,
                  "duplicate candidate id '" + c.id + "' in scene " + scene_id);
    }
    if (!c.image.SameShape(candidates.front().image)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "candidate '" + c.id + "' differs in shape from '" +
                      candidates.front().id + "'");
    }
  }
  for (const std::string& id : truth_order) {
    if (!seen.count(id)) {
      throw Error(ErrorCode::kFormatError,
                  "truth_order names unknown candidate '" + id + "'");
    }
  }
}

const Candidate& SampleSet::Find(const std::string& id) const {
  for (const Candidate& c : candidates) {
    if (c.id == id) return c;
  }
  throw Error(ErrorCode::kFormatError,
              "no candidate '" + id + "' in scene " + scene_id);
}

SampleSet LoadSampleSet(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + manifest.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError,
                manifest.string() + ": " + e.what());
  }
  const auto base = manifest.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  };

  SampleSet set;
  set.source_manifest = manifest;
  try {
    set.scene_id = doc.at("scene_id").get<std::string>();
    if (doc.contains("reference") && !doc["reference"].is_null()) {
      set.reference_path = resolve(doc["reference"].get<std::string>());
      set.reference = LoadImage(set.reference_path);
    }
    for (const auto& entry : doc.at("candidates")) {
      Candidate c;
      c.id = entry.at("id").get<std::string>();
      c.path = resolve(entry.at("path").get<std::string>());
      c.image = LoadImage(c.path);
      set.candidates.push_back(std::move(c));
    }
    if (doc.contains("truth_order")) {
      set.truth_order = doc["truth_order"].get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError,
                manifest.string() + ": " + e.what());
  }
  set.Validate();
  if (set.reference && !set.candidates.empty() &&
      !set.reference->SameShape(set.candidates.front().image)) {
    throw Error(ErrorCode::kShapeMismatch,
                "reference shape differs from candidates in " +
                    manifest.string());
  }
  return set;
}

void SaveSampleSet(const SampleSet& set,
                   const std::filesystem::path& manifest) {
  const auto dir = manifest.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  json doc;
  doc["scene_id"] = set.scene_id;
  if (set.reference) {
    const std::string name = set.scene_id + "_reference.png";
    SaveImage(dir / name, *set.reference, 16);
    doc["reference"] = name;
  } else {
    doc["reference"] = nullptr;
  }
  doc["candidates"] = json::array();
  for (const Candidate& c : set.candidates) {
    const std::string name = c.id + ".png";
    SaveImage(dir / name, c.image, 16);
    doc["candidates"].push_back({{"id", c.id}, {"path", name}});
  }
  if (!set.truth_order.empty()) doc["truth_order"] = set.truth_order;
  std::ofstream out(manifest);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + manifest.string());
  out << doc.dump(2) << "\n";
}

}  // namespace trustsr
