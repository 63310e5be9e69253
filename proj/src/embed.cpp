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

#include "newsburst/embed.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <charconv>
#include <cmath>
#include <sstream>

#include "newsburst/fetch.hpp"

namespace newsburst::embed {

namespace {

double checked_norm(const Eigen::VectorXd& v) {
  // Fixed summation order so results do not depend on SIMD width.
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += v[i] * v[i];
  return std::sqrt(sum);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::unique_ptr<TableProvider> TableProvider::load(const std::filesystem::path& path) {
  std::string content;
  try {
    content = fetch::read_file(path);
  } catch (const IoError& e) {
    throw BadVectorFile(e.what());
  }
  return parse(content);
}

std::unique_ptr<TableProvider> TableProvider::parse(std::string_view content) {
  std::unique_ptr<TableProvider> table(new TableProvider());
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> BadVectorFile {
    return BadVectorFile("vector file line " + std::to_string(line_no) + ": " + what);
  };

  std::size_t expected_rows = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (!header_seen) {
      if (fields.size() != 2) throw fail("expected header 'count dimension'");
      std::size_t count = 0;
      std::size_t dim = 0;
      auto r1 = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), count);
      auto r2 = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), dim);
      if (r1.ec != std::errc() || r2.ec != std::errc() || dim == 0) throw fail("bad header");
      expected_rows = count;
      table->dimension_ = dim;
      header_seen = true;
      continue;
    }
    if (fields.size() != table->dimension_ + 1) {
      throw fail("expected " + std::to_string(table->dimension_) + " components, got " +
                 std::to_string(fields.size() - 1));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(table->dimension_));
    for (std::size_t i = 0; i < table->dimension_; ++i) {
      auto x = parse_double(fields[i + 1]);
      if (!x) throw fail("non-numeric component '" + std::string(fields[i + 1]) + "'");
      v[static_cast<Eigen::Index>(i)] = *x;
    }
    table->rows_.insert_or_assign(std::string(fields[0]), std::move(v));
  }
  if (!header_seen) throw BadVectorFile("empty vector file");
  if (table->rows_.size() != expected_rows) {
    throw BadVectorFile("header announces " + std::to_string(expected_rows) + " vectors, file has " +
                        std::to_string(table->rows_.size()));
  }
  return table;
}

std::optional<Eigen::VectorXd> TableProvider::lookup(std::string_view token) const {
  auto it = rows_.find(token);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

HashProvider::HashProvider(std::size_t dimension, std::uint64_t seed) : dimension_(dimension) {
  if (dimension == 0) throw PreconditionError("hash provider dimension must be >= 1");
  key_ = "newsburst-hash-v1:";
  for (int b = 0; b < 8; ++b) key_.push_back(static_cast<char>((seed >> (8 * b)) & 0xFF));
}

std::optional<Eigen::VectorXd> HashProvider::lookup(std::string_view token) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dimension_));
  std::string message(token);
  message.push_back('\0');
  const std::size_t index_at = message.size();
  message.resize(index_at + 4);
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int mac_len = 0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    for (int b = 0; b < 4; ++b) message[index_at + b] = static_cast<char>((i >> (8 * b)) & 0xFF);
    HMAC(EVP_sha256(), key_.data(), static_cast<int>(key_.size()),
         reinterpret_cast<const unsigned char*>(message.data()), message.size(), mac, &mac_len);
    std::uint64_t h = 0;
    for (int b = 0; b < 8; ++b) h |= static_cast<std::uint64_t>(mac[b]) << (8 * b);
    const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
    v[static_cast<Eigen::Index>(i)] = 2.0 * unit - 1.0;
  }
  const double norm = checked_norm(v);
  if (norm == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] /= norm;
  return v;
}

std::unique_ptr<EmbeddingProvider> load_table_provider(const std::filesystem::path& path) {
  return TableProvider::load(path);
}

std::unique_ptr<EmbeddingProvider> hash_provider(std::size_t dimension, std::uint64_t seed) {
  return std::make_unique<HashProvider>(dimension, seed);
}

std::vector<std::string> leading_tokens(const Article& article, const VectorizeConfig& cfg,
                                        const text::Lexicon& lexicon, const text::StopList& stops) {
  std::vector<std::string> tokens = text::preprocess(article.title, lexicon, stops);
  if (tokens.size() < cfg.n_tokens) {
    auto body = text::preprocess(article.body, lexicon, stops);
    for (auto& t : body) {
      if (tokens.size() >= cfg.n_tokens) break;
      tokens.push_back(std::move(t));
    }
  }
  if (tokens.size() > cfg.n_tokens) tokens.resize(cfg.n_tokens);
  return tokens;
}

ArticleVector vectorize_article(const Article& article, const EmbeddingProvider& provider,
                                const VectorizeConfig& cfg, const text::Lexicon& lexicon,
                                const text::StopList& stops) {
  if (cfg.n_tokens == 0) throw PreconditionError("n_tokens must be >= 1");
  const auto tokens = leading_tokens(article, cfg, lexicon, stops);
  const auto dim = static_cast<Eigen::Index>(provider.dimension());
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  std::size_t used = 0;
  for (const auto& t : tokens) {
    auto v = provider.lookup(t);
    if (!v) continue;
    for (Eigen::Index i = 0; i < dim; ++i) sum[i] += (*v)[i];
    ++used;
  }
  if (used == 0) {
    throw NoEmbeddableTokens("article " + article.article_id + " has no embeddable tokens among its first " +
                             std::to_string(cfg.n_tokens));
  }
  for (Eigen::Index i = 0; i < dim; ++i) sum[i] /= static_cast<double>(used);
  const double norm = checked_norm(sum);
  if (norm == 0.0) throw NoEmbeddableTokens("article " + article.article_id + " averages to the zero vector");
  for (Eigen::Index i = 0; i < dim; ++i) sum[i] /= norm;
  return ArticleVector{article.article_id, std::move(sum)};
}

}  // namespace newsburst::embed
