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

#include <algorithm>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "newsburst/cluster.hpp"
#include "test_support.hpp"

namespace nb = newsburst;
namespace cl = newsburst::cluster;
using nb::testing::vec;
using Sets = std::vector<cl::NodeSet>;

namespace {

cl::ThresholdGraph graph(std::size_t n, std::initializer_list<std::pair<std::size_t, std::size_t>> edges) {
  cl::ThresholdGraph g(n);
  for (auto [i, j] : edges) g.add_edge(i, j);
  return g;
}

// Every subset, kept when it is a clique and no single node extends it.
Sets brute_force_cliques(const cl::ThresholdGraph& g) {
  const std::size_t n = g.size();
  auto is_clique = [&](std::uint32_t mask) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if ((mask >> i & 1) && (mask >> j & 1) && !g.has_edge(i, j)) return false;
    return true;
  };
  Sets out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (!is_clique(mask)) continue;
    bool maximal = true;
    for (std::size_t k = 0; k < n && maximal; ++k)
      if (!(mask >> k & 1) && is_clique(mask | (1u << k))) maximal = false;
    if (!maximal) continue;
    cl::NodeSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(i);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  return out;
}

nb::score::ClusterScore size_only(const cl::Clique& c) {
  nb::score::ClusterScore s;
  s.size = c.size();
  s.distinct_sources = 1;
  return s;
}

}  // namespace

TEST(SimilarityMatrix, Examples) {
  std::vector<nb::embed::ArticleVector> v{vec("a", {1, 0}), vec("b", {0, 1})};
  EXPECT_EQ(cl::similarity_matrix(v)(0, 1), 0.0);
  v = {vec("a", {0.6, 0.8}), vec("b", {0.8, 0.6})};
  EXPECT_NEAR(cl::similarity_matrix(v)(0, 1), 0.96, 1e-15);
  v = {vec("a", {0.6, 0.8})};
  const auto m = cl::similarity_matrix(v);
  EXPECT_EQ(m.n(), 1u);
  EXPECT_NEAR(m(0, 0), 1.0, 1e-12);
}

TEST(SimilarityMatrix, RejectsMixedDimensions) {
  std::vector<nb::embed::ArticleVector> v{vec("a", {1, 0}), vec("b", {0, 1, 0})};
  EXPECT_THROW(cl::similarity_matrix(v), nb::PreconditionError);
}

TEST(ThresholdGraph, SingleEdgeBetweenCloseVectors) {
  std::vector<nb::embed::ArticleVector> v{vec("a", {1, 0}), vec("b", {0.6, 0.8}), vec("c", {0.8, 0.6})};
  const auto g = cl::build_threshold_graph(cl::similarity_matrix(v), 0.92);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_TRUE(g.has_edge(2, 1));
}

TEST(ThresholdGraph, ThresholdItselfIsNotAnEdge) {
  cl::SimilarityMatrix m{Eigen::MatrixXd{{1.0, 0.5}, {0.5, 1.0}}};
  EXPECT_EQ(cl::build_threshold_graph(m, 0.5).edge_count(), 0u);
  EXPECT_EQ(cl::build_threshold_graph(m, 0.4999999).edge_count(), 1u);
}

TEST(ThresholdGraph, IdenticalVectorsGiveCompleteGraph) {
  std::vector<nb::embed::ArticleVector> v(4, vec("a", {0.6, 0.8}));
  const auto g = cl::build_threshold_graph(cl::similarity_matrix(v), 0.92);
  EXPECT_EQ(g.edge_count(), 6u);
  EXPECT_EQ(g.neighbours(0), (std::vector<std::size_t>{1, 2, 3}));
}

TEST(ThresholdGraph, RejectsThresholdOutsideUnitInterval) {
  cl::SimilarityMatrix m{Eigen::MatrixXd::Identity(2, 2)};
  EXPECT_THROW(cl::build_threshold_graph(m, 0.0), nb::PreconditionError);
  EXPECT_THROW(cl::build_threshold_graph(m, 1.0), nb::PreconditionError);
}

TEST(Cliques, Path) { EXPECT_EQ(cl::enumerate_cliques(graph(3, {{0, 1}, {1, 2}})), (Sets{{0, 1}, {1, 2}})); }

TEST(Cliques, CompleteGraph) {
  EXPECT_EQ(cl::enumerate_cliques(graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})), (Sets{{0, 1, 2, 3}}));
}

TEST(Cliques, IsolatedNodes) { EXPECT_EQ(cl::enumerate_cliques(graph(3, {})), (Sets{{0}, {1}, {2}})); }

TEST(Cliques, EmptyGraph) { EXPECT_TRUE(cl::enumerate_cliques(cl::ThresholdGraph(0)).empty()); }

TEST(Cliques, GuardRejectsHugeWindows) {
  EXPECT_THROW(cl::enumerate_cliques(cl::ThresholdGraph(11), 10), cl::WindowTooLarge);
}

TEST(Cliques, WorksAcrossWordBoundaries) {
  // 70 nodes span two bitset words; a clique straddling them must be found.
  cl::ThresholdGraph g(70);
  for (std::size_t i : {60, 63, 64, 69})
    for (std::size_t j : {60, 63, 64, 69})
      if (i < j) g.add_edge(i, j);
  const auto cliques = cl::enumerate_cliques(g);
  EXPECT_EQ(cliques.front(), (cl::NodeSet{60, 63, 64, 69}));
  EXPECT_EQ(cliques.size(), 67u);
}

TEST(CliquesProperty, MatchesBruteForce) {
  nb::testing::Gen gen(1);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = gen.index(11) + 1;
    const double p = std::vector<double>{0.2, 0.5, 0.8}[gen.index(3)];
    cl::ThresholdGraph g(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (gen.chance(p)) g.add_edge(i, j);
    EXPECT_EQ(cl::enumerate_cliques(g), brute_force_cliques(g));
  }
}

TEST(Dedup, BetterCliqueWinsAndLoserIsDroppedWhole) {
  const auto out = cl::dedup_clusters({{"b", "d"}, {"a", "b", "c"}}, size_only);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].members, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(out[0].score.size, 3u);
}

TEST(Dedup, DisjointCliquesBothAccepted) {
  const auto a = cl::dedup_clusters({{"a", "b"}, {"c", "d"}}, size_only);
  const auto b = cl::dedup_clusters({{"c", "d"}, {"a", "b"}}, size_only);
  ASSERT_EQ(a.size(), 2u);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(a[0].members, b[0].members);
  EXPECT_EQ(a[0].members, (std::vector<std::string>{"a", "b"}));
}

TEST(Dedup, EqualScoresUseCanonicalOrder) {
  const auto a = cl::dedup_clusters({{"b", "c"}, {"a", "b"}}, size_only);
  const auto b = cl::dedup_clusters({{"a", "b"}, {"b", "c"}}, size_only);
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(a[0].members, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(b[0].members, a[0].members);
}

TEST(Dedup, SecondaryMetricsDecideBetweenEqualSizes) {
  auto rate = [](const cl::Clique& c) {
    nb::score::ClusterScore s;
    s.size = c.size();
    s.distinct_sources = 1;
    s.time_span = c.front() == "a" ? 600 : 60;  // {b, c} is the tighter burst
    return s;
  };
  const auto out = cl::dedup_clusters({{"a", "b"}, {"b", "c"}}, rate);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].members, (std::vector<std::string>{"b", "c"}));
}

TEST(DedupProperty, AcceptedClustersAreDisjointAndAboveThreshold) {
  nb::testing::Gen gen(2);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = gen.index(30) + 1;
    std::vector<Eigen::VectorXd> centres;
    for (int c = 0; c < 4; ++c) centres.push_back(gen.unit_vector(16));
    std::vector<nb::embed::ArticleVector> v;
    for (std::size_t i = 0; i < n; ++i) {
      v.push_back({"id" + std::to_string(100 + i), gen.near(centres[gen.index(4)], 0.08)});
    }
    const auto m = cl::similarity_matrix(v);
    EXPECT_TRUE(m.s.isApprox(m.s.transpose(), 1e-12));
    const auto g = cl::build_threshold_graph(m, 0.92);
    std::vector<cl::Clique> cliques;
    for (const auto& set : cl::enumerate_cliques(g)) {
      cl::Clique c;
      for (auto i : set) c.push_back(v[i].article_id);
      std::sort(c.begin(), c.end());
      cliques.push_back(c);
    }
    const auto clusters = cl::dedup_clusters(cliques, size_only);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[v[i].article_id] = i;
    std::set<std::string> seen;
    for (const auto& c : clusters) {
      for (std::size_t x = 0; x < c.members.size(); ++x) {
        EXPECT_TRUE(seen.insert(c.members[x]).second);
        for (std::size_t y = x + 1; y < c.members.size(); ++y) {
          EXPECT_GT(m(index[c.members[x]], index[c.members[y]]), 0.92);
        }
      }
    }
  }
}

TEST(ClusterProperty, PermutingInputGivesSameClusters) {
  nb::testing::Gen gen(4);
  auto run = [](const std::vector<nb::embed::ArticleVector>& v) {
    const auto g = cl::build_threshold_graph(cl::similarity_matrix(v), 0.92);
    std::vector<cl::Clique> cliques;
    for (const auto& set : cl::enumerate_cliques(g)) {
      cl::Clique c;
      for (auto i : set) c.push_back(v[i].article_id);
      std::sort(c.begin(), c.end());
      cliques.push_back(c);
    }
    std::set<std::vector<std::string>> out;
    for (const auto& c : cl::dedup_clusters(cliques, size_only)) out.insert(c.members);
    return out;
  };
  for (int round = 0; round < 50; ++round) {
    std::vector<Eigen::VectorXd> centres{gen.unit_vector(8), gen.unit_vector(8)};
    std::vector<nb::embed::ArticleVector> v;
    for (std::size_t i = 0; i < 12; ++i) v.push_back({"n" + std::to_string(i), gen.near(centres[i % 2], 0.1)});
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), gen.engine());
    EXPECT_EQ(run(v), run(shuffled));
  }
}
