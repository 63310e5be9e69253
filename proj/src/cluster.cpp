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

#include "newsburst/cluster.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

namespace newsburst::cluster {

SimilarityMatrix similarity_matrix(std::span<const embed::ArticleVector> vectors) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  if (n == 0) return SimilarityMatrix{Eigen::MatrixXd(0, 0)};
  const Eigen::Index dim = vectors.front().v.size();
  Eigen::MatrixXd v(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = vectors[static_cast<std::size_t>(i)].v;
    if (row.size() != dim) throw PreconditionError("vectors of mixed dimension");
    v.row(i) = row.transpose();
  }
  SimilarityMatrix m{v * v.transpose()};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) m.s(j, i) = m.s(i, j);
  }
  return m;
}

ThresholdGraph::ThresholdGraph(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0) {}

void ThresholdGraph::add_edge(std::size_t i, std::size_t j) {
  if (i == j || i >= n_ || j >= n_) throw PreconditionError("invalid edge");
  bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
  bits_[j * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
}

bool ThresholdGraph::has_edge(std::size_t i, std::size_t j) const {
  return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U;
}

std::size_t ThresholdGraph::edge_count() const {
  std::size_t twice = 0;
  for (auto w : bits_) twice += static_cast<std::size_t>(std::popcount(w));
  return twice / 2;
}

std::vector<std::size_t> ThresholdGraph::neighbours(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j) {
    if (has_edge(i, j)) out.push_back(j);
  }
  return out;
}

ThresholdGraph build_threshold_graph(const SimilarityMatrix& m, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw PreconditionError("threshold must lie in (0, 1)");
  ThresholdGraph g(m.n());
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = i + 1; j < m.n(); ++j) {
      if (m(i, j) > tau) g.add_edge(i, j);
    }
  }
  return g;
}

namespace {

using Bits = std::vector<std::uint64_t>;

bool any(const Bits& b) {
  return std::any_of(b.begin(), b.end(), [](std::uint64_t w) { return w != 0; });
}

std::size_t count_and(const Bits& a, std::span<const std::uint64_t> b) {
  std::size_t c = 0;
  for (std::size_t k = 0; k < a.size(); ++k) c += static_cast<std::size_t>(std::popcount(a[k] & b[k]));
  return c;
}

// Tomita-style pivoting: branch only on P \ N(u) for the u in P | X that
// maximises |P & N(u)|.
class CliqueSearch {
 public:
  explicit CliqueSearch(const ThresholdGraph& g) : g_(g) {}

  std::vector<NodeSet> run() {
    Bits p(g_.words(), 0);
    for (std::size_t i = 0; i < g_.size(); ++i) p[i / 64] |= std::uint64_t{1} << (i % 64);
    Bits x(g_.words(), 0);
    NodeSet r;
    expand(r, std::move(p), std::move(x));
    return std::move(out_);
  }

 private:
  void expand(NodeSet& r, Bits p, Bits x) {
    if (!any(p)) {
      if (!any(x)) {
        NodeSet clique = r;
        std::sort(clique.begin(), clique.end());
        out_.push_back(std::move(clique));
      }
      return;
    }
    std::size_t pivot = 0;
    std::size_t best = 0;
    bool have_pivot = false;
    for (std::size_t k = 0; k < p.size(); ++k) {
      std::uint64_t candidates = p[k] | x[k];
      while (candidates) {
        const std::size_t u = k * 64 + static_cast<std::size_t>(std::countr_zero(candidates));
        candidates &= candidates - 1;
        const std::size_t c = count_and(p, g_.row(u));
        if (!have_pivot || c > best) {
          pivot = u;
          best = c;
          have_pivot = true;
        }
      }
    }
    const auto pivot_row = g_.row(pivot);
    Bits branch(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) branch[k] = p[k] & ~pivot_row[k];

    for (std::size_t k = 0; k < branch.size(); ++k) {
      while (branch[k]) {
        const std::size_t v = k * 64 + static_cast<std::size_t>(std::countr_zero(branch[k]));
        branch[k] &= branch[k] - 1;
        const auto nv = g_.row(v);
        Bits p2(p.size());
        Bits x2(p.size());
        for (std::size_t w = 0; w < p.size(); ++w) {
          p2[w] = p[w] & nv[w];
          x2[w] = x[w] & nv[w];
        }
        r.push_back(v);
        expand(r, std::move(p2), std::move(x2));
        r.pop_back();
        p[v / 64] &= ~(std::uint64_t{1} << (v % 64));
        x[v / 64] |= std::uint64_t{1} << (v % 64);
      }
    }
  }

  const ThresholdGraph& g_;
  std::vector<NodeSet> out_;
};

}  // namespace

std::vector<NodeSet> enumerate_cliques(const ThresholdGraph& g, std::size_t max_nodes) {
  if (g.size() > max_nodes) {
    throw WindowTooLarge("window holds " + std::to_string(g.size()) + " articles, clique search is capped at " +
                         std::to_string(max_nodes));
  }
  if (g.size() == 0) return {};
  auto cliques = CliqueSearch(g).run();
  std::sort(cliques.begin(), cliques.end(), [](const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  return cliques;
}

bool canonical_less(const Clique& a, const Clique& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return a < b;
}

std::vector<Cluster> dedup_clusters(std::vector<Clique> cliques,
                                    const std::function<score::ClusterScore(const Clique&)>& rate) {
  struct Rated {
    Clique members;
    score::ClusterScore score;
  };
  std::vector<Rated> rated;
  rated.reserve(cliques.size());
  for (auto& c : cliques) {
    std::sort(c.begin(), c.end());
    score::ClusterScore s = rate(c);
    rated.push_back({std::move(c), s});
  }
  std::sort(rated.begin(), rated.end(), [](const Rated& a, const Rated& b) {
    const auto order = score::compare_scores(a.score, b.score);
    if (order != 0) return order > 0;
    return canonical_less(a.members, b.members);
  });

  std::set<std::string, std::less<>> taken;
  std::vector<Cluster> accepted;
  for (auto& r : rated) {
    const bool overlaps =
        std::any_of(r.members.begin(), r.members.end(), [&](const std::string& id) { return taken.contains(id); });
    if (overlaps) continue;
    taken.insert(r.members.begin(), r.members.end());
    accepted.push_back(Cluster{std::move(r.members), r.score});
  }
  return accepted;
}

}  // namespace newsburst::cluster
