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

#ifndef NEWSBURST_CLUSTER_HPP
#define NEWSBURST_CLUSTER_HPP

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "newsburst/core.hpp"
#include "newsburst/embed.hpp"
#include "newsburst/score.hpp"

namespace newsburst::cluster {

inline constexpr double kDefaultThreshold = 0.92;
inline constexpr std::size_t kDefaultMaxNodes = 2000;

class WindowTooLarge : public Error {
 public:
  using Error::Error;
};

/// Pairwise cosine similarities of unit vectors, S = V * V^T with V holding
/// one vector per row. Exactly symmetric.
struct SimilarityMatrix {
  Eigen::MatrixXd s;
  std::size_t n() const { return static_cast<std::size_t>(s.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

SimilarityMatrix similarity_matrix(std::span<const embed::ArticleVector> vectors);

/// Undirected graph over article indices with an edge wherever the
/// similarity strictly exceeds the threshold.
class ThresholdGraph {
 public:
  explicit ThresholdGraph(std::size_t n);

  void add_edge(std::size_t i, std::size_t j);
  bool has_edge(std::size_t i, std::size_t j) const;
  std::size_t size() const { return n_; }
  std::size_t edge_count() const;
  /// Neighbours of `i` in ascending order.
  std::vector<std::size_t> neighbours(std::size_t i) const;

  std::span<const std::uint64_t> row(std::size_t i) const {
    return std::span(bits_).subspan(i * words_, words_);
  }
  std::size_t words() const { return words_; }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;  // n_ rows of words_ words
};

ThresholdGraph build_threshold_graph(const SimilarityMatrix& m, double tau);

using NodeSet = std::vector<std::size_t>;  // ascending

/// All maximal cliques (isolated nodes give singletons), by pivoted
/// Bron-Kerbosch. Ordered by size descending, then lexicographically.
/// Throws WindowTooLarge when the graph exceeds `max_nodes`.
std::vector<NodeSet> enumerate_cliques(const ThresholdGraph& g, std::size_t max_nodes = kDefaultMaxNodes);

/// Clique expressed as article ids, ascending.
using Clique = std::vector<std::string>;

struct Cluster {
  std::vector<std::string> members;  // ascending article ids
  score::ClusterScore score;
};

/// Canonical clique order: larger first, then lexicographic member ids.
bool canonical_less(const Clique& a, const Clique& b);

/// Rates every clique, walks them best-first (ties in canonical order) and
/// keeps a clique only if none of its members is already taken; a clique
/// with any taken member is dropped whole. Accepted clusters are disjoint
/// and returned in acceptance order.
std::vector<Cluster> dedup_clusters(std::vector<Clique> cliques,
                                    const std::function<score::ClusterScore(const Clique&)>& rate);

}  // namespace newsburst::cluster

#endif  // NEWSBURST_CLUSTER_HPP
