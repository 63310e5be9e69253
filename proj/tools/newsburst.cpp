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

// Command-line front end: ingest, run, inspect, serve-feed, replay.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "cli11/CLI11.hpp"
#include "newsburst/pipeline.hpp"

namespace nb = newsburst;
namespace pl = newsburst::pipeline;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartialFailure = 2;

struct Common {
  std::string config;
  std::string now;
  std::string store;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "pipeline config (YAML)")->required();
  cmd->add_option("--now", c.now, "reference time, ISO 8601 (default: current time)");
  cmd->add_option("--store", c.store, "override the store directory");
}

nb::Timestamp resolve_now(const std::string& text) {
  if (text.empty()) return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  auto t = nb::parse_iso8601(text);
  if (!t) throw nb::ConfigError("--now is not an ISO 8601 timestamp: " + text);
  return *t;
}

pl::PipelineConfig load(const Common& c) {
  auto cfg = pl::load_config(c.config);
  if (!c.store.empty()) cfg.store = std::filesystem::absolute(c.store).lexically_normal();
  return cfg;
}

int finish_run(const pl::PipelineConfig& cfg, const pl::RunReport& report, bool json, bool timings) {
  if (json) {
    std::cout << pl::report_json(report, timings).dump(2) << "\n";
  } else {
    std::cout << pl::format_report(report, timings);
  }
  if (!cfg.report.empty()) {
    nb::fetch::write_file_atomic(cfg.report, pl::report_json(report, timings).dump(2) + "\n");
  }
  return report.partial_failure() ? kPartialFailure : kOk;
}

int cmd_ingest(const Common& c) {
  auto cfg = load(c);
  const auto now = resolve_now(c.now);
  cfg.validate();
  std::filesystem::create_directories(cfg.store);
  pl::StoreLock lock(cfg.store);
  auto store = nb::ingest::ArticleStore::open(cfg.store);
  auto fetcher = pl::make_fetcher(cfg);
  pl::RunReport report;
  report.now = now;
  pl::ingest_sources(cfg, store, *fetcher, now, report);
  std::cout << "fetched " << report.fetched << ", stored " << report.stored << ", failed extractions "
            << report.failed_extractions << ", store size " << store.size() << "\n";
  for (const auto& e : report.errors) std::cout << "error [" << e.stage << "] " << e.subject << ": " << e.message << "\n";
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  return report.errors.empty() ? kOk : kPartialFailure;
}

int cmd_run(pl::PipelineConfig cfg, const Common& c, bool json, bool timings) {
  const auto now = resolve_now(c.now);
  const auto report = pl::run_once(cfg, now);
  return finish_run(cfg, report, json, timings);
}

int cmd_inspect(const Common& c) {
  auto cfg = load(c);
  const auto now = resolve_now(c.now);
  cfg.validate();
  const auto store = nb::ingest::ArticleStore::open(cfg.store);
  pl::RunReport report;
  report.now = now;
  pl::WindowAnalysis w;
  try {
    w = pl::analyze_window(cfg, store, now, report);
  } catch (const nb::cluster::WindowTooLarge& e) {
    std::cerr << "newsburst: " << e.what() << "\n";
    return kPartialFailure;
  }
  const std::size_t n = w.articles.size();
  std::cout << "window " << nb::format_iso8601(now) << ": " << n << " articles (" << report.skipped
            << " skipped)\n";
  for (std::size_t i = 0; i < n; ++i) {
    std::cout << "  [" << i << "] " << w.articles[i].article_id << " " << w.articles[i].source_id << " "
              << w.articles[i].title << "\n";
  }
  std::cout << "similarity\n";
  for (std::size_t i = 0; i < n; ++i) {
    std::cout << " ";
    for (std::size_t j = 0; j < n; ++j) {
      char cell[32];
      std::snprintf(cell, sizeof cell, " %7.4f", w.matrix(i, j));
      std::cout << cell;
    }
    std::cout << "\n";
  }
  std::cout << "cliques (threshold " << cfg.tau << ")\n";
  for (const auto& clique : w.cliques) {
    std::cout << "  {";
    for (std::size_t k = 0; k < clique.size(); ++k) std::cout << (k ? ", " : "") << clique[k];
    std::cout << "}\n";
  }
  std::cout << "clusters\n";
  for (const auto& cl : w.clusters) {
    const auto& s = cl.score;
    std::cout << "  size " << s.size << " sources " << s.distinct_sources << " span " << s.time_span << "s length "
              << s.avg_length << (nb::score::should_publish(s, cfg.policy) ? " eligible" : "") << ":";
    for (const auto& id : cl.members) std::cout << " " << id;
    std::cout << "\n";
  }
  return kOk;
}

int cmd_serve(const Common& c, std::string dir, const std::string& host, int port) {
  if (dir.empty()) {
    const auto cfg = load(c);
    for (const auto& ch : cfg.channels) {
      if (ch.kind == nb::publish::ChannelKind::RssFeed) {
        dir = ch.dir.string();
        break;
      }
    }
    if (dir.empty()) throw nb::ConfigError("no rss channel in the config and no --dir given");
  }
  std::filesystem::create_directories(dir);
  nb::publish::StaticServer server(dir);
  const int bound = server.start(host, port);
  std::cout << "serving " << dir << " at http://" << host << ":" << bound << "/feed.xml" << std::endl;
  server.wait();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"newsburst: turn bursts of related news into social posts"};
  app.require_subcommand(1);

  Common ingest_opts;
  auto* ingest = app.add_subcommand("ingest", "poll feeds into the article store");
  add_common(ingest, ingest_opts);

  Common run_opts;
  bool run_json = false;
  bool run_timings = false;
  auto* run = app.add_subcommand("run", "ingest, cluster, compose and publish once");
  add_common(run, run_opts);
  run->add_flag("--json", run_json, "print the report as JSON");
  run->add_flag("--timings", run_timings, "include stage timings in the report");

  Common inspect_opts;
  auto* inspect = app.add_subcommand("inspect", "dump the window's similarity matrix, cliques and scores");
  add_common(inspect, inspect_opts);

  Common serve_opts;
  std::string serve_dir;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto* serve = app.add_subcommand("serve-feed", "serve the RSS feed and hosted images");
  serve->add_option("--config", serve_opts.config, "pipeline config (YAML)");
  serve->add_option("--dir", serve_dir, "directory to serve (default: the rss channel's dir)");
  serve->add_option("--host", serve_host, "bind address");
  serve->add_option("--port", serve_port, "port, 0 for any");

  Common replay_opts;
  std::string replay_dir;
  bool replay_json = false;
  auto* replay = app.add_subcommand("replay", "run offline against a mirrored fixture directory");
  replay->add_option("dir", replay_dir, "mirror root: <dir>/<host>/<path>")->required();
  add_common(replay, replay_opts);
  replay->add_flag("--json", replay_json, "print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_opts);
    if (*run) return cmd_run(load(run_opts), run_opts, run_json, run_timings);
    if (*inspect) return cmd_inspect(inspect_opts);
    if (*serve) return cmd_serve(serve_opts, serve_dir, serve_host, serve_port);
    if (*replay) {
      auto cfg = load(replay_opts);
      cfg.mirror = std::filesystem::absolute(replay_dir).lexically_normal();
      return cmd_run(std::move(cfg), replay_opts, replay_json, false);
    }
  } catch (const nb::ConfigError& e) {
    std::cerr << "newsburst: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "newsburst: " << e.what() << "\n";
    return kPartialFailure;
  }
  return kOk;
}
