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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "newsburst/cluster.hpp"
#include "newsburst/compose.hpp"
#include "newsburst/embed.hpp"
#include "newsburst/ingest.hpp"
#include "newsburst/pipeline.hpp"
#include "newsburst/publish.hpp"
#include "newsburst/score.hpp"
#include "newsburst/textpipe.hpp"
#include "test_support.hpp"

namespace nb = newsburst;
namespace cl = newsburst::cluster;
using nb::testing::Gen;
using Clock = std::chrono::steady_clock;
using namespace std::chrono_literals;

namespace {

/// Collects the first few mismatches of a criterion.
class Check {
 public:
  void fail(const std::string& why) {
    if (failures_++ < 3) notes_ += (notes_.empty() ? "" : "; ") + why;
  }
  void expect(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    return failures_ ? std::to_string(failures_) + " failure(s): " + notes_ : notes_;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }

 private:
  int failures_ = 0;
  std::string notes_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, const char* spec = "%.3f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

// --- 1 ----------------------------------------------------------------------

std::vector<cl::NodeSet> brute_force_maximal_cliques(const cl::ThresholdGraph& g) {
  const std::size_t n = g.size();
  std::vector<bool> clique(std::size_t{1} << n, false);
  clique[0] = true;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int low = __builtin_ctz(mask);
    const std::uint32_t rest = mask & (mask - 1);
    bool ok = clique[rest];
    for (std::size_t j = 0; ok && j < n; ++j)
      if ((rest >> j & 1) && !g.has_edge(static_cast<std::size_t>(low), j)) ok = false;
    clique[mask] = ok;
  }
  std::set<cl::NodeSet> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (!clique[mask]) continue;
    bool maximal = true;
    for (std::size_t k = 0; k < n && maximal; ++k)
      if (!(mask >> k & 1) && clique[mask | (1u << k)]) maximal = false;
    if (!maximal) continue;
    cl::NodeSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(i);
    out.insert(s);
  }
  return {out.begin(), out.end()};
}

Check clique_oracle() {
  Check c;
  Gen gen(1001);
  const double ps[] = {0.2, 0.5, 0.8};
  const auto t0 = Clock::now();
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + gen.index(12);
    const double p = ps[round % 3];
    cl::ThresholdGraph g(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (gen.chance(p)) g.add_edge(i, j);
    auto got = cl::enumerate_cliques(g);
    std::sort(got.begin(), got.end());
    c.expect(got == brute_force_maximal_cliques(g), "graph " + std::to_string(round) + " differs");
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 10.0, "took " + fmt(secs) + " s");
  c.note("200 graphs in " + fmt(secs) + " s");
  return c;
}

// --- 2 ----------------------------------------------------------------------

std::vector<cl::Cluster> cluster_vectors(const std::vector<nb::embed::ArticleVector>& v, double tau) {
  const auto g = cl::build_threshold_graph(cl::similarity_matrix(v), tau);
  std::vector<cl::Clique> cliques;
  for (const auto& set : cl::enumerate_cliques(g)) {
    cl::Clique q;
    for (auto i : set) q.push_back(v[i].article_id);
    std::sort(q.begin(), q.end());
    cliques.push_back(std::move(q));
  }
  return cl::dedup_clusters(std::move(cliques), [](const cl::Clique& q) {
    nb::score::ClusterScore s;
    s.size = q.size();
    s.distinct_sources = 1;
    return s;
  });
}

Check threshold_correctness() {
  Check c;
  Gen gen(2002);
  const double tau = 0.92;
  std::size_t multi = 0;
  std::size_t pairs = 0;
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 1 + gen.index(50);
    std::vector<Eigen::VectorXd> centres;
    for (int k = 0; k < 5; ++k) centres.push_back(gen.unit_vector(200));
    const double spread = gen.uniform(0.01, 0.03);
    std::vector<nb::embed::ArticleVector> v;
    std::map<std::string, Eigen::VectorXd> by_id;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = gen.chance(0.1) ? gen.unit_vector(200) : gen.near(centres[gen.index(5)], spread);
      const std::string id = "a" + std::to_string(1000 + i);
      by_id[id] = x;
      v.push_back({id, x});
    }
    for (const auto& cluster : cluster_vectors(v, tau)) {
      if (cluster.members.size() > 1) ++multi;
      for (std::size_t i = 0; i < cluster.members.size(); ++i) {
        for (std::size_t j = i + 1; j < cluster.members.size(); ++j) {
          const auto& a = by_id[cluster.members[i]];
          const auto& b = by_id[cluster.members[j]];
          double dot = 0.0;
          for (Eigen::Index k = 0; k < a.size(); ++k) dot += a[k] * b[k];
          const double cos = dot / (std::sqrt(a.dot(a)) * std::sqrt(b.dot(b)));
          ++pairs;
          c.expect(cos > tau - 1e-9, cluster.members[i] + "/" + cluster.members[j] + " cos " + fmt(cos, "%.12f"));
        }
      }
    }
  }
  c.expect(multi > 0, "no multi-member cluster formed; the check would be vacuous");
  c.note(std::to_string(multi) + " multi-member clusters, " + std::to_string(pairs) + " pairs checked");
  return c;
}

// --- 3 ----------------------------------------------------------------------

Check dedup_disjointness() {
  Check c;
  Gen gen(3003);
  for (int round = 0; round < 1000; ++round) {
    const std::size_t universe = 1 + gen.index(20);
    std::vector<cl::Clique> cliques;
    const std::size_t count = gen.index(15);
    for (std::size_t k = 0; k < count; ++k) {
      std::set<std::string> members;
      const std::size_t size = 1 + gen.index(std::min<std::size_t>(universe, 6));
      while (members.size() < size) members.insert("id" + std::to_string(gen.index(universe)));
      cliques.emplace_back(members.begin(), members.end());
    }
    std::map<cl::Clique, nb::score::ClusterScore> ratings;
    for (const auto& q : cliques) {
      ratings[q] = {q.size(), 1 + gen.index(q.size()), gen.range(0, 5) * 60, static_cast<double>(gen.index(4))};
    }
    const auto out = cl::dedup_clusters(cliques, [&](const cl::Clique& q) { return ratings.at(q); });
    std::set<std::string> seen;
    for (const auto& cluster : out)
      for (const auto& id : cluster.members)
        c.expect(seen.insert(id).second, "case " + std::to_string(round) + ": " + id + " in two clusters");
    // A rejected clique must overlap an accepted one.
    for (const auto& q : cliques) {
      const bool accepted = std::any_of(out.begin(), out.end(), [&](const auto& cl) { return cl.members == q; });
      const bool overlaps = std::any_of(q.begin(), q.end(), [&](const auto& id) { return seen.count(id) > 0; });
      c.expect(accepted || overlaps, "case " + std::to_string(round) + ": clique dropped without overlap");
    }
  }
  return c;
}

// --- 4 ----------------------------------------------------------------------

Check vectorization_contract() {
  Check c;
  Gen gen(4004);
  const auto lex = nb::text::Lexicon::load(nb::testing::asset_dir() / "lang/lexicon-cs.tsv");
  const auto stops = nb::text::StopList::load(nb::testing::asset_dir() / "lang/stopwords-cs.txt");
  nb::embed::HashProvider provider(200, 1);
  const nb::embed::VectorizeConfig cfg{50};
  static const std::vector<std::string> words = {"vláda", "rozpočet", "a", "schodek", "miliard", "se", "korun",
                                                 "ministr", "byl", "jednání", "Praha", "svět", "2020"};
  for (int round = 0; round < 300; ++round) {
    std::string body;
    std::size_t sentence = 0;
    while (true) {
      body += words[gen.index(words.size())];
      if (++sentence % 9 == 0) body += ". Nová";
      body += ' ';
      nb::Article probe = nb::testing::make_article("x", "s", nb::testing::at("2020-10-01T00:00:00Z"), body, "");
      if (nb::embed::leading_tokens(probe, {1000}, lex, stops).size() >= 50) break;
    }
    const auto base_article =
        nb::testing::make_article("x", "s", nb::testing::at("2020-10-01T00:00:00Z"), body, gen.text(6));
    auto longer = base_article;
    longer.body += gen.chance(0.5) ? " " + gen.text(40) : "\n\nDalší odstavec. " + gen.text(40);
    try {
      const auto v = nb::embed::vectorize_article(base_article, provider, cfg, lex, stops);
      const auto w = nb::embed::vectorize_article(longer, provider, cfg, lex, stops);
      double sum = 0.0;
      for (Eigen::Index k = 0; k < v.v.size(); ++k) sum += v.v[k] * v.v[k];
      c.expect(std::abs(std::sqrt(sum) - 1.0) <= 1e-9, "norm " + fmt(std::sqrt(sum), "%.15f"));
      c.expect(v.v.size() == w.v.size() &&
                   std::memcmp(v.v.data(), w.v.data(), sizeof(double) * static_cast<std::size_t>(v.v.size())) == 0,
               "vector changed after appending text (round " + std::to_string(round) + ")");
    } catch (const std::exception& e) {
      c.fail(e.what());
    }
  }
  return c;
}

// --- 5 ----------------------------------------------------------------------

Check representative_optimality() {
  Check c;
  Gen gen(5005);
  std::size_t ties = 0;
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 1 + gen.index(8);
    const std::size_t dim = 2 + gen.index(30);
    std::vector<nb::Article> members;
    std::vector<nb::embed::ArticleVector> vectors;
    const auto centre = gen.unit_vector(dim);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "r" + std::to_string(gen.index(1000000));
      if (std::any_of(members.begin(), members.end(), [&](const auto& a) { return a.article_id == id; })) continue;
      members.push_back(nb::testing::make_article(id, "s", nb::testing::at("2020-10-01T00:00:00Z")));
      // Some clusters repeat a vector so the tie-break is exercised.
      if (!vectors.empty() && gen.chance(0.3)) {
        vectors.push_back({id, vectors[gen.index(vectors.size())].v});
      } else {
        vectors.push_back({id, gen.near(centre, 0.3)});
      }
    }
    std::reverse(vectors.begin(), vectors.end());

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (const auto& v : vectors) mean += v.v;
    mean /= static_cast<double>(vectors.size());
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& v : vectors) scored.emplace_back(v.v.dot(mean) / (v.v.norm() * mean.norm()), v.article_id);
    double best = -2.0;
    for (const auto& [cos, id] : scored) best = std::max(best, cos);
    std::string expected;
    std::size_t at_best = 0;
    for (const auto& [cos, id] : scored) {
      if (std::abs(cos - best) <= 1e-12) {
        ++at_best;
        if (expected.empty() || id < expected) expected = id;
      }
    }
    if (at_best > 1) ++ties;
    const auto got = nb::compose::select_representative(members, vectors);
    c.expect(got == expected, "round " + std::to_string(round) + ": got " + got + ", want " + expected);
  }
  c.note(std::to_string(ties) + " clusters with tied optima");
  return c;
}

// --- 6 ----------------------------------------------------------------------

Check window_boundary() {
  Check c;
  const auto now = nb::testing::at("2020-10-01T12:00:00Z");
  nb::ingest::ArticleStore store;
  store.upsert(nb::testing::make_article("inside", "s", now - 23h - 59min - 59s));
  store.upsert(nb::testing::make_article("edge", "s", now - 24h));
  const auto w = nb::ingest::select_window(store, now, 24h);
  c.expect(w.size() == 1 && w[0].article_id == "inside", "window holds " + std::to_string(w.size()) + " articles");
  return c;
}

// --- 7 ----------------------------------------------------------------------

Check end_to_end() {
  Check c;
  nb::testing::TempDir dir;
  auto cfg = nb::pipeline::load_config(NEWSBURST_E2E_CONFIG);
  cfg.store = dir / "store";
  for (auto& ch : cfg.channels) {
    if (!ch.dir.empty()) ch.dir = dir / ch.dir.filename();
    if (!ch.outbox.empty()) ch.outbox = dir / ch.outbox.filename();
  }
  const auto now = nb::testing::at("2020-10-01T12:00:00Z");
  const auto t0 = Clock::now();
  const auto first = nb::pipeline::run_once(cfg, now);
  const auto second = nb::pipeline::run_once(cfg, now);
  const double secs = seconds_since(t0);

  c.expect(first.published == 1, "first run published " + std::to_string(first.published));
  c.expect(first.published + second.published == 1,
           "two runs published " + std::to_string(first.published + second.published));
  c.expect(secs < 5.0, "took " + fmt(secs) + " s");
  for (const auto& e : first.errors) c.fail("[" + e.stage + "] " + e.subject + ": " + e.message);

  std::vector<std::filesystem::path> posts;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "posts"))
    if (entry.path().extension() == ".json") posts.push_back(entry.path());
  c.expect(posts.size() == 1, std::to_string(posts.size()) + " posts written");
  if (posts.size() == 1) {
    const auto post = nlohmann::json::parse(nb::fetch::read_file(posts[0])).get<nb::compose::Post>();
    const auto golden = nb::testing::fixture_dir() / "e2e/golden";
    auto same = [&](const std::string& file, const std::string& value) {
      c.expect(nb::fetch::read_file(golden / file) == value + "\n", file + " mismatch: " + value);
    };
    same("representative.txt", post.representative_article_id);
    same("frame_color.txt", nb::image::to_hex(post.image.frame_color));
    same("description.txt", post.description);
  }
  c.note("two runs in " + fmt(secs) + " s");
  return c;
}

// --- 8 ----------------------------------------------------------------------

Check rss_validity() {
  Check c;
  Gen gen(8008);
  const std::vector<std::string> tricky = {"a < b", "R&D > 5 %", "\"uvozovky\" a 'apostrof'", "Žluťoučký kůň",
                                           "]]> konec", "tab\there"};
  for (std::size_t count : {0u, 1u, 50u}) {
    std::vector<nb::publish::PostRecord> recs;
    for (std::size_t i = 0; i < count; ++i) {
      nb::publish::PostRecord r;
      r.post_id = "p" + std::to_string(1000 + i);
      r.title = tricky[i % tricky.size()] + " " + std::to_string(i);
      r.link = "http://e.test/a?x=1&y=" + std::to_string(i);
      r.image_url = "http://h.test/images/" + std::to_string(i) + ".png";
      r.image_length = 10 * i + 1;
      r.publish_date = nb::testing::at("2020-10-01T00:00:00Z") + std::chrono::minutes(gen.range(0, 600));
      recs.push_back(r);
    }
    std::shuffle(recs.begin(), recs.end(), gen.engine());
    const auto xml = nb::publish::emit_rss(recs, {});
    boost::property_tree::ptree tree;
    try {
      std::istringstream in(xml);
      boost::property_tree::read_xml(in, tree);
    } catch (const std::exception& e) {
      c.fail(std::to_string(count) + " records: not well-formed: " + e.what());
      continue;
    }
    std::vector<std::pair<nb::Timestamp, std::string>> seen;
    std::map<std::string, const nb::publish::PostRecord*> by_guid;
    for (const auto& r : recs) by_guid[r.post_id] = &r;
    for (const auto& [name, item] : tree.get_child("rss.channel")) {
      if (name != "item") continue;
      const auto guid = item.get<std::string>("guid");
      const auto date = nb::parse_rfc822(item.get<std::string>("pubDate"));
      auto it = by_guid.find(guid);
      if (it == by_guid.end() || !date) {
        c.fail("unknown item " + guid);
        continue;
      }
      c.expect(*date == it->second->publish_date, guid + " date");
      c.expect(item.get<std::string>("title") == it->second->title, guid + " title '" + item.get<std::string>("title") + "'");
      c.expect(item.get<std::string>("link") == it->second->link, guid + " link");
      c.expect(item.get<std::string>("enclosure.<xmlattr>.url") == it->second->image_url, guid + " enclosure");
      seen.emplace_back(*date, guid);
    }
    c.expect(seen.size() == count, std::to_string(seen.size()) + " items for " + std::to_string(count) + " records");
    for (std::size_t i = 1; i < seen.size(); ++i)
      c.expect(seen[i - 1].first >= seen[i].first, "items not newest-first at " + std::to_string(i));
  }
  return c;
}

// --- 9 ----------------------------------------------------------------------

Check short_text_budget() {
  Check c;
  Gen gen(9009);
  for (int i = 0; i < 10000; ++i) {
    std::string link = "https://e.test/";
    const std::size_t extra = gen.index(100);
    for (std::size_t k = 0; k < extra; ++k) link += gen.chance(0.1) ? "ř" : "x";
    const std::string title = gen.chance(0.05) ? std::string(400, 'W') : gen.text(80, 14);
    if (nb::utf8_length(link) + 2 > 280) continue;
    const auto s = nb::publish::format_short_text(title, link, 280);
    c.expect(nb::utf8_length(s) <= 280, "length " + std::to_string(nb::utf8_length(s)));
    c.expect(s.size() >= link.size() && s.ends_with(link), "link not at the end: " + s);
  }
  return c;
}

// --- 10 ---------------------------------------------------------------------

Check score_order_laws() {
  Check c;
  Gen gen(10010);
  auto random_score = [&] {
    return nb::score::ClusterScore{1 + gen.index(4), 1 + gen.index(3), gen.range(0, 3) * 300,
                                   static_cast<double>(gen.index(3)) * 2.5};
  };
  for (int i = 0; i < 10000; ++i) {
    const auto a = random_score();
    const auto b = random_score();
    const auto x = random_score();
    const auto ab = nb::score::compare_scores(a, b);
    const auto ba = nb::score::compare_scores(b, a);
    c.expect((ab > 0) == (ba < 0) && (ab == 0) == (ba == 0), "antisymmetry");
    c.expect((ab == 0) == (a == b), "equal only for identical tuples");
    const auto bx = nb::score::compare_scores(b, x);
    const auto ax = nb::score::compare_scores(a, x);
    if (ab >= 0 && bx >= 0) c.expect(ax >= 0, "transitivity (>=)");
    if (ab > 0 && bx > 0) c.expect(ax > 0, "transitivity (>)");
  }
  for (int i = 0; i < 10000; ++i) {
    const nb::score::PublishPolicy p{1 + gen.index(6), 1 + gen.index(4), 7, 5};
    const auto s = random_score();
    auto bigger = s;
    bigger.size += gen.index(4);
    bigger.distinct_sources += gen.index(4);
    if (nb::score::should_publish(s, p)) c.expect(nb::score::should_publish(bigger, p), "should_publish not monotone");
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"clique oracle", clique_oracle},
      {"threshold correctness", threshold_correctness},
      {"dedup disjointness", dedup_disjointness},
      {"vectorization contract", vectorization_contract},
      {"representative optimality", representative_optimality},
      {"window boundary", window_boundary},
      {"end-to-end fixture", end_to_end},
      {"rss validity", rss_validity},
      {"short-text budget", short_text_budget},
      {"score-order laws", score_order_laws},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check result;
    try {
      result = criteria[i].second();
    } catch (const std::exception& e) {
      result.fail(std::string("exception: ") + e.what());
    }
    if (!result.ok()) ++failed;
    std::cout << (result.ok() ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first;
    if (!result.summary().empty()) std::cout << "  (" << result.summary() << ")";
    std::cout << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
