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

#include "cli.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "trustsr/codec.h"
#include "trustsr/embedding.h"
#include "trustsr/error.h"
#include "trustsr/harness.h"
#include "trustsr/image_io.h"
#include "trustsr/prompts.h"
#include "trustsr/report.h"
#include "trustsr/sample_set.h"
#include "trustsr/selection.h"
#include "trustsr/stats.h"
#include "trustsr/tws.h"
#include "trustsr/vlm_provider.h"

namespace trustsr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Every flag any subcommand may bind. Only one subcommand runs per process,
// so sharing storage is safe.
struct Flags {
  std::string config;
  std::string out;
  std::string formats = "json,csv";
  int jobs = 1;

  std::string manifest;
  std::vector<std::string> manifests;
  std::string weights = "0.2,0.3,0.5";
  int wavelet_levels = 2;
  std::string wavelet_norm = "fixed";
  double wavelet_scale = 1.0;
  int mock_dim = 64;
  std::uint64_t mock_seed = 0;
  std::string embed_endpoint;
  std::string cache_dir;
  bool no_cache = false;
  std::string grid;

  std::string replay;
  std::string record;
  std::string info_provider;
  std::string artifact_provider;
  std::string info_id;
  std::string artifact_id;
  std::string info_prompts;
  std::string artifact_prompts;
  int k = 5;
  int batch_size = 10;
  double threshold = kDefaultConfidenceThreshold;
  std::vector<std::string> providers;
  std::vector<std::string> provider_ids;
  std::string human;

  std::vector<std::string> images;
  std::string output;
  std::string ids;

  std::string a;
  std::string b;
  std::string x;
  std::string y;
  std::string scores;
  std::string mos;
  std::string tails = "two-sided";
  double mu0 = 0.0;

  std::string input;
  std::string kind;
  double strength = 1.0;
  std::string strengths;
  std::uint64_t seed = 0;
  int synthetic = 0;
  bool ladder = false;
  std::string scene_id = "ladder";
};

// A subcommand plus its options by config key, so resolution can tell a
// flag the user typed from a default.
class Command {
 public:
  explicit Command(CLI::App* app) : app_(app) {}

  CLI::App* app() const { return app_; }

  template <typename T>
  CLI::Option* Add(const std::string& key, const std::string& flag, T& var,
                   const std::string& help) {
    CLI::Option* o = app_->add_option(flag, var, help);
    opts_[key] = o;
    return o;
  }

  CLI::Option* AddFlag(const std::string& key, const std::string& flag,
                       bool& var, const std::string& help) {
    CLI::Option* o = app_->add_flag(flag, var, help);
    opts_[key] = o;
    return o;
  }

  bool Given(const std::string& key) const {
    auto it = opts_.find(key);
    return it != opts_.end() && it->second->count() > 0;
  }

 private:
  CLI::App* app_;
  std::map<std::string, CLI::Option*> opts_;
};

// Flags > config file > built-in defaults.
class Resolver {
 public:
  Resolver(const Command& cmd, const std::string& config_path) : cmd_(cmd) {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) {
      throw Error(ErrorCode::kConfigError, "cannot open config " + config_path);
    }
    try {
      file_ = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfigError, config_path + ": " + e.what());
    }
    if (!file_.is_object()) {
      throw Error(ErrorCode::kConfigError, config_path + ": not an object");
    }
  }

  template <typename T>
  T Get(const std::string& key, const T& flag_value) const {
    if (cmd_.Given(key) || !file_.contains(key)) return flag_value;
    try {
      return file_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfigError,
                  "config key '" + key + "': " + e.what());
    }
  }

  // Weights may be "a,b,c", [a,b,c] or {"clip":..,"edge":..,"wavelet":..}.
  TwsWeights Weights(const std::string& flag_value) const {
    if (cmd_.Given("weights") || !file_.contains("weights")) {
      return ParseWeights(flag_value);
    }
    return WeightsFromJson(file_.at("weights"));
  }

  static TwsWeights WeightsFromJson(const json& j) {
    TwsWeights w;
    try {
      if (j.is_string()) return ParseWeights(j.get<std::string>());
      if (j.is_array()) {
        if (j.size() != 3) throw Error(ErrorCode::kConfigError, "need 3 weights");
        w = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
      } else {
        w = {j.at("clip").get<double>(), j.at("edge").get<double>(),
             j.at("wavelet").get<double>()};
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfigError, std::string("weights: ") + e.what());
    }
    w.Validate();
    return w;
  }

 private:
  const Command& cmd_;
  json file_ = json::object();
};

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> ParseNumberList(const std::string& text,
                                    const std::string& what) {
  std::vector<double> out;
  for (const std::string& s : SplitList(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, what + ": not a number: " + s);
    }
  }
  return out;
}

// Whitespace, comma or newline separated numbers; a leading non-numeric
// token is taken as a header.
std::vector<double> LoadSamples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  std::replace(text.begin(), text.end(), ',', ' ');
  std::stringstream tokens(text);
  std::vector<double> out;
  std::string tok;
  bool first = true;
  while (tokens >> tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      if (!first) {
        throw Error(ErrorCode::kFormatError, path + ": bad number " + tok);
      }
    }
    first = false;
  }
  return out;
}

struct Formats {
  bool json = false;
  bool csv = false;
};

Formats ParseFormats(const std::string& text) {
  Formats f;
  for (const std::string& s : SplitList(text)) {
    if (s == "json") {
      f.json = true;
    } else if (s == "csv") {
      f.csv = true;
    } else {
      throw Error(ErrorCode::kConfigError, "unknown report format " + s);
    }
  }
  if (!f.json && !f.csv) {
    throw Error(ErrorCode::kConfigError, "no report format selected");
  }
  return f;
}

json FormatsJson(const Formats& f) {
  json j = json::array();
  if (f.json) j.push_back("json");
  if (f.csv) j.push_back("csv");
  return j;
}

fs::path PrepareOutDir(const std::string& out,
                       const std::vector<fs::path>& inputs) {
  if (out.empty()) throw Error(ErrorCode::kConfigError, "--out is required");
  const fs::path dir = fs::weakly_canonical(fs::absolute(out));
  for (const fs::path& in : inputs) {
    const fs::path src = fs::weakly_canonical(fs::absolute(in).parent_path());
    if (dir == src) {
      throw Error(ErrorCode::kConfigError,
                  "output directory must differ from input directory " +
                      src.string());
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + dir.string() + ": " + ec.message());
  }
  return dir;
}

struct ScoringSetup {
  TwsWeights weights;
  TwsOptions options;
  std::shared_ptr<const EmbeddingProvider> embed;
  json embedding_json;
};

ScoringSetup ResolveScoring(const Flags& f, const Resolver& r) {
  ScoringSetup s;
  s.weights = r.Weights(f.weights);
  s.options.wavelet.levels = r.Get("wavelet_levels", f.wavelet_levels);
  if (s.options.wavelet.levels < 1) {
    throw Error(ErrorCode::kConfigError, "wavelet_levels must be >= 1");
  }
  const std::string norm = r.Get("wavelet_norm", f.wavelet_norm);
  if (norm == "fixed") {
    s.options.normalization.wavelet = WaveletNormalization::kFixedScale;
  } else if (norm == "minmax") {
    s.options.normalization.wavelet = WaveletNormalization::kMinMax;
  } else {
    throw Error(ErrorCode::kConfigError,
                "wavelet_norm must be 'fixed' or 'minmax'");
  }
  s.options.normalization.wavelet_scale = r.Get("wavelet_scale", f.wavelet_scale);
  if (!(s.options.normalization.wavelet_scale > 0.0)) {
    throw Error(ErrorCode::kConfigError, "wavelet_scale must be positive");
  }
  s.options.jobs = r.Get("jobs", f.jobs);
  if (s.options.jobs < 1) throw Error(ErrorCode::kConfigError, "jobs must be >= 1");

  const std::string endpoint = r.Get("embed_endpoint", f.embed_endpoint);
  std::shared_ptr<const EmbeddingProvider> base;
  if (endpoint.empty()) {
    const int dim = r.Get("mock_dim", f.mock_dim);
    const std::uint64_t seed = r.Get("mock_seed", f.mock_seed);
    base = std::make_shared<MockEmbeddingProvider>(dim, seed);
    s.embedding_json = {{"kind", "mock"}, {"mock_dim", dim}, {"mock_seed", seed}};
  } else {
    base = std::make_shared<RemoteEmbeddingProvider>(endpoint);
    s.embedding_json = {{"kind", "remote"}, {"endpoint", endpoint}};
  }
  std::string cache = r.Get("cache_dir", f.cache_dir);
  if (cache.empty()) {
    if (const char* env = std::getenv("TRUSTSR_CACHE_DIR")) cache = env;
  }
  if (f.no_cache) cache.clear();
  if (!cache.empty()) {
    s.embed = std::make_shared<CachedEmbeddingProvider>(base, cache);
    s.embedding_json["cache_dir"] = cache;
  } else {
    s.embed = base;
    s.embedding_json["cache_dir"] = nullptr;
  }
  return s;
}

json ScoringConfigJson(const ScoringSetup& s) {
  json emb = s.embedding_json;
  emb["provider_id"] = s.embed->provider_id();
  return {{"weights", WeightsJson(s.weights)},
          {"wavelet",
           {{"levels", s.options.wavelet.levels},
            {"normalization",
             s.options.normalization.wavelet == WaveletNormalization::kMinMax
                 ? "minmax"
                 : "fixed"},
            {"scale", s.options.normalization.wavelet_scale}}},
          {"embedding", emb},
          {"jobs", s.options.jobs}};
}

void AddScoringOptions(Command& c, Flags& f) {
  c.Add("manifest", "--manifest,-m", f.manifest, "Sample-set manifest JSON")
      ->required();
  c.Add("weights", "--weights", f.weights, "TWS weights clip,edge,wavelet");
  c.Add("wavelet_levels", "--wavelet-levels", f.wavelet_levels,
        "db19 decomposition levels");
  c.Add("wavelet_norm", "--wavelet-norm", f.wavelet_norm,
        "S_wavelet normalization: fixed or minmax");
  c.Add("wavelet_scale", "--wavelet-scale", f.wavelet_scale,
        "Divisor for fixed-scale normalization");
  c.Add("mock_dim", "--mock-dim", f.mock_dim, "Mock embedding dimension");
  c.Add("mock_seed", "--mock-seed", f.mock_seed, "Mock embedding seed");
  c.Add("embed_endpoint", "--embed-endpoint", f.embed_endpoint,
        "Embedding sidecar base URL (mock provider when unset)");
  c.Add("cache_dir", "--cache-dir", f.cache_dir,
        "Embedding cache directory (default $TRUSTSR_CACHE_DIR)");
  c.AddFlag("no_cache", "--no-cache", f.no_cache, "Disable the embedding cache");
}

void AddOutputOptions(Command& c, Flags& f) {
  c.Add("config", "--config", f.config, "JSON config file");
  c.Add("out", "--out,-o", f.out, "Output directory");
  c.Add("formats", "--format", f.formats, "Report formats: json,csv");
  c.Add("jobs", "--jobs,-j", f.jobs, "Worker threads");
}

void AddSelectionOptions(Command& c, Flags& f) {
  c.Add("k", "--k", f.k, "Top-k size");
  c.Add("batch_size", "--batch-size", f.batch_size, "Images per ranking batch");
  c.Add("info_prompts", "--info-prompts", f.info_prompts,
        "Information prompt pool file (one per line)");
  c.Add("artifact_prompts", "--artifact-prompts", f.artifact_prompts,
        "Artifact prompt pool file (one per line)");
  c.Add("replay", "--replay", f.replay, "Serve provider traffic from this log");
}

PromptPool ResolvePool(const std::string& path, PromptAxis axis) {
  if (path.empty()) {
    return axis == PromptAxis::kInformation ? DefaultInformationPool()
                                            : DefaultArtifactPool();
  }
  return LoadPromptPool(path, axis);
}

void WriteReports(const fs::path& dir, const std::string& stem,
                  const Formats& formats, const json& j,
                  const std::string& csv) {
  if (formats.json) WriteJsonFile(dir / (stem + ".json"), j);
  if (formats.csv) WriteTextFile(dir / (stem + ".csv"), csv);
}

// --- commands ---------------------------------------------------------------

int CmdScore(const Command& c, const Flags& f) {
  const Resolver r(c, f.config);
  const ScoringSetup s = ResolveScoring(f, r);
  const Formats formats = ParseFormats(r.Get("formats", f.formats));
  const fs::path out = PrepareOutDir(r.Get("out", f.out), {f.manifest});
  const SampleSet set = LoadSampleSet(f.manifest);
  const auto rows = ScoreSampleSet(set, s.weights, *s.embed, s.options);
  json config = ScoringConfigJson(s);
  config["command"] = "score";
  config["manifest"] = f.manifest;
  config["scene_id"] = set.scene_id;
  config["formats"] = FormatsJson(formats);
  WriteReports(out, "scores", formats, ScoresJson(rows, config),
               ScoresCsv(rows));
  return 0;
}

std::vector<NamedWeights> LoadGrid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open grid " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, path + ": " + e.what());
  }
  if (!doc.is_array() || doc.empty()) {
    throw Error(ErrorCode::kConfigError,
                path + ": grid must be a non-empty array");
  }
  std::vector<NamedWeights> grid;
  for (const json& row : doc) {
    if (!row.is_object() || !row.contains("name")) {
      throw Error(ErrorCode::kConfigError, path + ": grid rows need a name");
    }
    NamedWeights nw;
    nw.name = row.at("name").get<std::string>();
    nw.weights = Resolver::WeightsFromJson(
        row.contains("weights") ? row.at("weights") : row);
    grid.push_back(nw);
  }
  return grid;
}

int CmdAblation(const Command& c, const Flags& f) {
  const Resolver r(c, f.config);
  const ScoringSetup s = ResolveScoring(f, r);
  const Formats formats = ParseFormats(r.Get("formats", f.formats));
  const fs::path out = PrepareOutDir(r.Get("out", f.out), {f.manifest});
  const std::string grid_path = r.Get("grid", f.grid);
  const std::vector<NamedWeights> grid =
      grid_path.empty() ? DefaultAblationGrid() : LoadGrid(grid_path);
  const SampleSet set = LoadSampleSet(f.manifest);
  if (!set.reference) {
    throw Error(ErrorCode::kMissingReference,
                "manifest " + f.manifest + " has no reference image");
  }
  auto rows = ComputeRawComponents(*set.reference, set, *s.embed, s.options);
  NormalizeComponents(rows, s.options.normalization);
  const auto table = AblationSweep(rows, grid);
  json config = ScoringConfigJson(s);
  config.erase("weights");
  config["command"] = "ablation";
  config["manifest"] = f.manifest;
  config["scene_id"] = set.scene_id;
  config["grid"] = grid_path.empty() ? json("default") : json(grid_path);
  config["formats"] = FormatsJson(formats);
  WriteReports(out, "ablation", formats, AblationJson(table, config),
               AblationCsv(table));
  return 0;
}

std::shared_ptr<const VlmProvider> HttpProvider(const std::string& cfg) {
  return std::make_shared<HttpVlmProvider>(LoadVlmProviderConfig(cfg));
}

int CmdSelect(const Command& c, const Flags& f) {
  const Resolver r(c, f.config);
  const fs::path out = PrepareOutDir(r.Get("out", f.out), {f.manifest});
  PipelineOptions opts;
  opts.rank.k = r.Get("k", f.k);
  opts.rank.batch_size = r.Get("batch_size", f.batch_size);
  opts.confidence_threshold = r.Get("threshold", f.threshold);
  if (opts.rank.k < 1) throw Error(ErrorCode::kConfigError, "k must be >= 1");
  if (!(opts.confidence_threshold >= 1.0 && opts.confidence_threshold <= 100.0)) {
    throw Error(ErrorCode::kConfigError, "threshold must lie in [1, 100]");
  }
  const std::string info_prompts = r.Get("info_prompts", f.info_prompts);
  const std::string artifact_prompts =
      r.Get("artifact_prompts", f.artifact_prompts);
  const PromptPool info_pool =
      ResolvePool(info_prompts, PromptAxis::kInformation);
  const PromptPool artifact_pool =
      ResolvePool(artifact_prompts, PromptAxis::kArtifact);

  const std::string replay = r.Get("replay", f.replay);
  const std::string record = r.Get("record", f.record);
  std::string info_id = r.Get("info_id", f.info_id);
  std::string artifact_id = r.Get("artifact_id", f.artifact_id);
  const std::string info_cfg = r.Get("info_provider", f.info_provider);
  const std::string artifact_cfg =
      r.Get("artifact_provider", f.artifact_provider);

  std::shared_ptr<const VlmProvider> info;
  std::shared_ptr<const VlmProvider> artifact;
  std::shared_ptr<ReplayLog> recording;
  if (!replay.empty()) {
    auto log = std::make_shared<const ReplayLog>(ReplayLog::Load(replay));
    const auto ids = log->ProviderIds();
    if (info_id.empty() && ids.size() == 1) info_id = ids.front();
    if (info_id.empty()) {
      throw Error(ErrorCode::kConfigError,
                  "replay log holds several providers; pass --info-id");
    }
    if (artifact_id.empty()) artifact_id = info_id;
    info = std::make_shared<ReplayVlmProvider>(log, info_id);
    artifact = std::make_shared<ReplayVlmProvider>(log, artifact_id);
  } else if (!info_cfg.empty()) {
    info = HttpProvider(info_cfg);
    artifact = artifact_cfg.empty() ? info : HttpProvider(artifact_cfg);
    if (!record.empty()) {
      recording = std::make_shared<ReplayLog>();
      info = std::make_shared<RecordingVlmProvider>(info, recording);
      artifact = std::make_shared<RecordingVlmProvider>(artifact, recording);
    }
  } else {
    throw Error(ErrorCode::kConfigError,
                "no VLM provider configured and no replay log given");
  }

  const SampleSet set = LoadSampleSet(f.manifest);
  PipelineResult result;
  try {
    result = TwoStagePipeline(set, info_pool, artifact_pool, *info, *artifact,
                              opts);
  } catch (...) {
    if (recording) recording->Save(record);
    throw;
  }
  if (recording) recording->Save(record);
  for (const std::string& w : result.selection.warnings) Warn(w);

  json config{{"command", "select"},
              {"manifest", f.manifest},
              {"scene_id", set.scene_id},
              {"k", opts.rank.k},
              {"batch_size", opts.rank.batch_size},
              {"confidence_threshold", opts.confidence_threshold},
              {"info_provider", info->provider_id()},
              {"artifact_provider", artifact->provider_id()},
              {"info_prompts", info_prompts.empty() ? json("default")
                                                    : json(info_prompts)},
              {"artifact_prompts", artifact_prompts.empty()
                                       ? json("default")
                                       : json(artifact_prompts)},
              {"mode", replay.empty() ? "live" : "replay"}};
  WriteJsonFile(out / "selection.json", PipelineJson(result, config));
  SaveImage(out / "ensemble.png", result.ensemble, 16);
  return 0;
}

int CmdRobustness(const Command& c, const Flags& f) {
  const Resolver r(c, f.config);
  const Formats formats = ParseFormats(r.Get("formats", f.formats));
  std::vector<fs::path> inputs(f.manifests.begin(), f.manifests.end());
  const fs::path out = PrepareOutDir(r.Get("out", f.out), inputs);
  ArtifactRankOptions opts;
  opts.k = r.Get("k", f.k);
  opts.batch_size = r.Get("batch_size", f.batch_size);
  const std::string info_prompts = r.Get("info_prompts", f.info_prompts);
  const std::string artifact_prompts =
      r.Get("artifact_prompts", f.artifact_prompts);
  const PromptPool info_pool =
      ResolvePool(info_prompts, PromptAxis::kInformation);
  const PromptPool artifact_pool =
      ResolvePool(artifact_prompts, PromptAxis::kArtifact);

  std::vector<std::shared_ptr<const VlmProvider>> providers;
  const std::string replay = r.Get("replay", f.replay);
  const auto provider_cfgs = r.Get("providers", f.providers);
  if (!replay.empty()) {
    auto log = std::make_shared<const ReplayLog>(ReplayLog::Load(replay));
    std::vector<std::string> ids = r.Get("provider_ids", f.provider_ids);
    if (ids.empty()) ids = log->ProviderIds();
    for (const std::string& id : ids) {
      providers.push_back(std::make_shared<ReplayVlmProvider>(log, id));
    }
  } else {
    for (const std::string& cfg : provider_cfgs) {
      providers.push_back(HttpProvider(cfg));
    }
  }
  if (providers.empty()) {
    throw Error(ErrorCode::kConfigError,
                "no VLM provider configured and no replay log given");
  }

  std::vector<SampleSet> scenes;
  for (const std::string& m : f.manifests) scenes.push_back(LoadSampleSet(m));

  const std::string human_path = r.Get("human", f.human);
  std::optional<std::vector<HumanSelection>> human;
  if (!human_path.empty()) {
    human = LoadHumanSelections(human_path);
  } else {
    Warn("no human selections given; agreement columns are null");
  }
  std::vector<RobustnessRow> rows;
  for (const auto& p : providers) {
    rows.push_back(ComputeRobustness(scenes, info_pool, artifact_pool, *p,
                                     human ? &*human : nullptr, opts));
    for (const std::string& w : rows.back().warnings) {
      Warn(p->provider_id() + ": " + w);
    }
  }
  json config{{"command", "robustness"},
              {"manifests", f.manifests},
              {"k", opts.k},
              {"batch_size", opts.batch_size},
              {"human", human_path.empty() ? json(nullptr) : json(human_path)},
              {"info_prompts", info_prompts.empty() ? json("default")
                                                    : json(info_prompts)},
              {"artifact_prompts", artifact_prompts.empty()
                                       ? json("default")
                                       : json(artifact_prompts)},
              {"mode", replay.empty() ? "live" : "replay"},
              {"formats", FormatsJson(formats)}};
  WriteReports(out, "robustness", formats, RobustnessJson(rows, config),
               RobustnessCsv(rows));
  return 0;
}

int CmdEnsemble(const Flags& f) {
  if (f.output.empty()) {
    throw Error(ErrorCode::kConfigError, "--output is required");
  }
  std::vector<Image> images;
  if (!f.manifest.empty()) {
    const SampleSet set = LoadSampleSet(f.manifest);
    const auto ids = SplitList(f.ids);
    if (ids.empty()) {
      for (const Candidate& cand : set.candidates) images.push_back(cand.image);
    } else {
      for (const std::string& id : ids) images.push_back(set.Find(id).image);
    }
  }
  for (const std::string& p : f.images) images.push_back(LoadImage(p));
  if (images.empty()) {
    throw Error(ErrorCode::kConfigError, "no images to ensemble");
  }
  SaveImage(f.output, EnsembleAverage(images), 16);
  return 0;
}

Tails ParseTails(const std::string& s) {
  if (s == "two-sided") return Tails::kTwoSided;
  if (s == "greater") return Tails::kGreater;
  if (s == "less") return Tails::kLess;
  throw Error(ErrorCode::kConfigError,
              "--tails must be two-sided, greater or less");
}

json TTestJson(const TTestResult& t, const std::string& tails) {
  return {{"test", TTestKindName(t.kind)},
          {"t_statistic", t.t_statistic},
          {"degrees_of_freedom", t.degrees_of_freedom},
          {"p_value", t.p_value},
          {"tails", tails}};
}

int CmdTTest(const Command& c, const Flags& f, std::ostream& out) {
  const Tails tails = ParseTails(f.tails);
  const auto a = LoadSamples(f.a);
  TTestResult t;
  if (!f.b.empty()) {
    if (c.Given("mu0")) {
      throw Error(ErrorCode::kConfigError, "give either --b or --mu0");
    }
    t = TTestTwoSample(a, LoadSamples(f.b), tails);
  } else if (c.Given("mu0")) {
    t = TTestOneSample(a, f.mu0, tails);
  } else {
    // A one-sample test needs an explicit chance level.
    throw Error(ErrorCode::kConfigError, "give --b or --mu0");
  }
  json j = TTestJson(t, f.tails);
  if (c.Given("mu0")) j["mu0"] = f.mu0;
  out << j.dump(2) << "\n";
  return 0;
}

int CmdPearson(const Flags& f, std::ostream& out) {
  const auto x = LoadSamples(f.x);
  const auto y = LoadSamples(f.y);
  out << json{{"pearson", Pearson(x, y)}, {"n", x.size()}}.dump(2) << "\n";
  return 0;
}

int CmdMos(const Flags& f, std::ostream& out) {
  const MosCorrelation m =
      CorrelateWithMos(LoadScoreCsv(f.scores), LoadMosCsv(f.mos));
  json groups = json::object();
  for (const auto& [g, v] : m.per_group) groups[g] = v;
  out << json{{"overall", m.overall}, {"n", m.count}, {"per_group", groups}}
             .dump(2)
      << "\n";
  return 0;
}

int CmdDegrade(const Flags& f, std::ostream& out) {
  if (f.output.empty()) {
    throw Error(ErrorCode::kConfigError, "--output is required");
  }
  if (f.input.empty() == (f.synthetic == 0)) {
    throw Error(ErrorCode::kConfigError,
                "give exactly one of --input or --synthetic");
  }
  const Image ref = f.input.empty() ? MakeTexturedReference(f.synthetic, f.seed)
                                    : LoadImage(f.input);
  const DegradationKind kind = ParseDegradationKind(f.kind);
  if (f.ladder) {
    const auto strengths = ParseNumberList(f.strengths, "--strengths");
    const SampleSet set = BuildLadder(ref, kind, strengths, f.seed, f.scene_id);
    SaveSampleSet(set, f.output);
    out << json{{"manifest", f.output},
                {"kind", DegradationName(kind)},
                {"strengths", strengths},
                {"seed", f.seed},
                {"truth_order", set.truth_order}}
               .dump(2)
        << "\n";
    return 0;
  }
  DegradationSpec spec{kind, f.strength, f.seed};
  spec.Validate();
  SaveImage(f.output, Degrade(ref, spec), 16);
  return 0;
}

void ReportError(std::ostream& err, std::string_view code,
                 const std::string& message, int exit_code) {
  err << json{{"error", code}, {"message", message}, {"exit_code", exit_code}}
             .dump()
      << "\n";
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Flags f;
  CLI::App app{"Trustworthiness scoring and VLM-guided selection for "
               "super-resolution candidates"};
  app.require_subcommand(1);

  Command score(app.add_subcommand("score", "Score candidates with TWS"));
  AddOutputOptions(score, f);
  AddScoringOptions(score, f);

  Command ablation(
      app.add_subcommand("ablation", "Mean TWS under each weight config"));
  AddOutputOptions(ablation, f);
  AddScoringOptions(ablation, f);
  ablation.Add("grid", "--grid", f.grid,
               "Weight grid JSON [{name, weights:[c,e,w]}]");

  Command select(app.add_subcommand(
      "select", "Two-stage VLM selection and top-k ensemble"));
  AddOutputOptions(select, f);
  select.Add("manifest", "--manifest,-m", f.manifest, "Sample-set manifest")
      ->required();
  AddSelectionOptions(select, f);
  select.Add("threshold", "--threshold", f.threshold,
             "Minimum mean confidence for the majority label");
  select.Add("record", "--record", f.record, "Record live traffic here");
  select.Add("info_provider", "--info-provider", f.info_provider,
             "Provider config for identification");
  select.Add("artifact_provider", "--artifact-provider", f.artifact_provider,
             "Provider config for artifact ranking");
  select.Add("info_id", "--info-id", f.info_id,
             "Replay provider id for identification");
  select.Add("artifact_id", "--artifact-id", f.artifact_id,
             "Replay provider id for artifact ranking");

  Command robustness(app.add_subcommand(
      "robustness", "Prompt consistency and human agreement per provider"));
  AddOutputOptions(robustness, f);
  robustness
      .Add("manifests", "--manifest,-m", f.manifests, "Scene manifests")
      ->required();
  AddSelectionOptions(robustness, f);
  robustness.Add("providers", "--provider", f.providers,
                 "Provider config (repeatable)");
  robustness.Add("provider_ids", "--provider-id", f.provider_ids,
                 "Replay provider ids (default: all in the log)");
  robustness.Add("human", "--human", f.human,
                 "Human selections CSV scene_id,participant_id,rank,"
                 "candidate_id");

  Command ensemble(
      app.add_subcommand("ensemble", "Pixel-average images into one"));
  ensemble.Add("images", "images", f.images, "Input images");
  ensemble.Add("manifest", "--manifest,-m", f.manifest, "Sample-set manifest");
  ensemble.Add("ids", "--ids", f.ids, "Candidate ids from the manifest");
  ensemble.Add("output", "--output", f.output, "Output image")->required();

  CLI::App* stats = app.add_subcommand("stats", "Hypothesis tests");
  stats->require_subcommand(1);
  Command ttest(stats->add_subcommand("ttest", "Student t-test"));
  ttest.Add("a", "--a", f.a, "Sample file")->required();
  ttest.Add("b", "--b", f.b, "Second sample file (two-sample test)");
  ttest.Add("mu0", "--mu0", f.mu0, "Hypothesized mean (one-sample test)");
  ttest.Add("tails", "--tails", f.tails, "two-sided, greater or less");
  Command pearson(stats->add_subcommand("pearson", "Pearson correlation"));
  pearson.Add("x", "--x", f.x, "First sample file")->required();
  pearson.Add("y", "--y", f.y, "Second sample file")->required();
  Command mos(stats->add_subcommand("mos", "Correlate scores with MOS"));
  mos.Add("scores", "--scores", f.scores, "image_id,score[,group] CSV")
      ->required();
  mos.Add("mos", "--mos", f.mos, "image_id,mos CSV")->required();

  Command degrade(app.add_subcommand("degrade", "Synthetic degradations"));
  degrade.Add("input", "--input,-i", f.input, "Input image");
  degrade.Add("synthetic", "--synthetic", f.synthetic,
              "Generate a textured reference of this side instead");
  degrade.Add("kind", "--kind", f.kind, "blur, noise, pixelate or quantize")
      ->required();
  degrade.Add("strength", "--strength", f.strength, "Degradation strength");
  degrade.Add("strengths", "--strengths", f.strengths,
              "Ascending strengths for --ladder");
  degrade.Add("seed", "--seed", f.seed, "Seed for noise and synthesis");
  degrade.AddFlag("ladder", "--ladder", f.ladder,
                  "Write a ladder manifest instead of one image");
  degrade.Add("scene_id", "--scene-id", f.scene_id, "Ladder scene id");
  degrade.Add("output", "--output", f.output,
              "Output image, or manifest with --ladder")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = ExitCodeFor(ErrorCode::kConfigError);
    ReportError(err, "UsageError", e.what(), code);
    return code;
  }

  try {
    if (score.app()->parsed()) return CmdScore(score, f);
    if (ablation.app()->parsed()) return CmdAblation(ablation, f);
    if (select.app()->parsed()) return CmdSelect(select, f);
    if (robustness.app()->parsed()) return CmdRobustness(robustness, f);
    if (ensemble.app()->parsed()) return CmdEnsemble(f);
    if (ttest.app()->parsed()) return CmdTTest(ttest, f, out);
    if (pearson.app()->parsed()) return CmdPearson(f, out);
    if (mos.app()->parsed()) return CmdMos(f, out);
    if (degrade.app()->parsed()) return CmdDegrade(f, out);
  } catch (const Error& e) {
    const int code = ExitCodeFor(e.code());
    ReportError(err, ErrorCodeName(e.code()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    const int code = ExitCodeFor(ErrorCode::kIoError);
    ReportError(err, "InternalError", e.what(), code);
    return code;
  }
  ReportError(err, "UsageError", "no command", 2);
  return 2;
}

}  // namespace trustsr
