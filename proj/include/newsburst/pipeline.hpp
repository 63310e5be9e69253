// Copyright 2026 The newsburst Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NEWSBURST_PIPELINE_HPP
#define NEWSBURST_PIPELINE_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsburst/cluster.hpp"
#include "newsburst/compose.hpp"
#include "newsburst/core.hpp"
#include "newsburst/embed.hpp"
#include "newsburst/fetch.hpp"
#include "newsburst/ingest.hpp"
#include "newsburst/publish.hpp"
#include "newsburst/score.hpp"

namespace newsburst::pipeline {

struct EmbeddingSpec {
  enum class Kind { Hash, Table } kind = Kind::Hash;
  std::size_t dimension = embed::model_settings::kDimension;  // hash provider
  std::uint64_t seed = 1;                                      // hash provider
  std::filesystem::path path;                                  // table provider
};

struct PipelineConfig {
  std::vector<ingest::FeedSource> sources;
  std::filesystem::path store;
  double window_hours = 24.0;
  double tau = cluster::kDefaultThreshold;
  std::size_t n_tokens = 50;
  std::size_t max_window = cluster::kDefaultMaxNodes;
  EmbeddingSpec embedding;
  std::filesystem::path lexicon;    // optional
  std::filesystem::path stopwords;  // optional
  score::PublishPolicy policy;
  compose::ComposeConfig compose;  // includes hashtags
  std::filesystem::path font;
  std::vector<publish::ChannelConfig> channels;
  std::filesystem::path mirror;  // when set, every fetch reads from this directory
  std::chrono::seconds fetch_timeout{15};
  std::filesystem::path report;  // optional machine-readable report

  /// Throws ConfigError; touches only the local filesystem.
  void validate() const;
};

/// Parses a YAML config. Relative paths resolve against the file's directory.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::string_view yaml, const std::filesystem::path& base_dir);

struct StageError {
  std::string stage;
  std::string subject;
  std::string message;
};

struct ClusterSummary {
  std::vector<std::string> members;
  score::ClusterScore score;
  bool eligible = false;
  std::string post_id;  // set when a post was built
};

struct RunReport {
  Timestamp now{};
  std::size_t fetched = 0;  // article pages extracted
  std::size_t stored = 0;   // inserted or changed records
  std::size_t failed_extractions = 0;
  std::size_t windowed = 0;
  std::size_t vectorized = 0;
  std::size_t skipped = 0;  // window articles without usable tokens
  std::size_t cliques = 0;
  std::size_t clusters = 0;
  std::size_t eligible = 0;
  std::size_t published = 0;   // posts with at least one new delivery
  std::size_t suppressed = 0;  // posts already delivered everywhere
  std::vector<ClusterSummary> cluster_details;
  std::vector<publish::Receipt> receipts;
  std::vector<StageError> errors;
  std::vector<std::string> warnings;
  std::map<std::string, double> timings_ms;

  bool partial_failure() const;
};

/// Report as JSON. Timings are left out unless asked for, so reports of
/// equal runs compare equal.
nlohmann::json report_json(const RunReport& r, bool with_timings = false);
std::string format_report(const RunReport& r, bool with_timings = false);

/// Fetcher chosen by the config: mirror directory or live HTTP.
std::unique_ptr<fetch::Fetcher> make_fetcher(const PipelineConfig& cfg);

/// Exclusive advisory lock on the store; throws IoError when another run holds it.
class StoreLock {
 public:
  explicit StoreLock(const std::filesystem::path& store);
  ~StoreLock();
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

/// Polls every source and upserts new or changed articles into the store.
void ingest_sources(const PipelineConfig& cfg, ingest::ArticleStore& store, fetch::Fetcher& fetcher, Timestamp now,
                    RunReport& report);

struct WindowAnalysis {
  std::vector<Article> articles;  // vectorized window articles, window order
  std::vector<embed::ArticleVector> vectors;
  cluster::SimilarityMatrix matrix;
  std::vector<cluster::NodeSet> cliques;
  std::vector<cluster::Cluster> clusters;
};

/// Window selection through dedup. Throws cluster::WindowTooLarge.
WindowAnalysis analyze_window(const PipelineConfig& cfg, const ingest::ArticleStore& store, Timestamp now,
                              RunReport& report);

/// Ingest, cluster, compose and publish. Only configuration problems throw;
/// everything else lands in the report.
RunReport run_once(const PipelineConfig& cfg, Timestamp now, fetch::Fetcher& fetcher);
RunReport run_once(const PipelineConfig& cfg, Timestamp now);

}  // namespace newsburst::pipeline

#endif  // NEWSBURST_PIPELINE_HPP
