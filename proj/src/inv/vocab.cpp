// Copyright 2026 The mtk Authors.
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

#include "mtk/inv/vocab.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace mtk::inv {

long Vocabulary::find(std::string_view token) const {
  for (size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] == token) return static_cast<long>(i);
  return -1;
}

void Vocabulary::validate() const {
  if (size() < 2) throw ConfigError("vocabulary: needs at least 2 tokens");
  if (embeddings.rows() != size())
    throw ConfigError("vocabulary: token count does not match embedding rows");
  if (embeddings.cols() < 1) throw ConfigError("vocabulary: embedding width must be >= 1");
  std::unordered_set<std::string> seen;
  for (const std::string& tok : tokens) {
    if (tok.empty()) throw ConfigError("vocabulary: empty token");
    for (char ch : tok)
      if (std::isspace(static_cast<unsigned char>(ch)))
        throw ConfigError("vocabulary: token contains whitespace: '" + tok + "'");
    if (!seen.insert(tok).second) throw ConfigError("vocabulary: duplicate token '" + tok + "'");
  }
  if (!embeddings.allFinite()) throw ConfigError("vocabulary: non-finite embedding value");
}

Vocabulary read_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vocabulary file: " + path);
  long v = 0, d = 0;
  if (!(in >> v >> d) || v < 1 || d < 1)
    throw ConfigError("vocabulary file: bad header (want 'V D'): " + path);
  Vocabulary vocab;
  vocab.tokens.resize(static_cast<size_t>(v));
  vocab.embeddings.resize(v, d);
  for (long r = 0; r < v; ++r) {
    if (!(in >> vocab.tokens[static_cast<size_t>(r)]))
      throw ConfigError("vocabulary file: missing token on row " + std::to_string(r));
    for (long c = 0; c < d; ++c)
      if (!(in >> vocab.embeddings(r, c)))
        throw ConfigError("vocabulary file: row " + std::to_string(r) + " ('" +
                          vocab.tokens[static_cast<size_t>(r)] + "') has fewer than " +
                          std::to_string(d) + " values");
  }
  std::string extra;
  if (in >> extra)
    throw ConfigError("vocabulary file: trailing content after " + std::to_string(v) +
                      " rows: " + path);
  vocab.validate();
  return vocab;
}

void write_vocabulary(const std::string& path, const Vocabulary& vocab) {
  vocab.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write vocabulary file: " + path);
  out << vocab.size() << ' ' << vocab.dim() << '\n';
  char buf[64];
  for (long r = 0; r < vocab.size(); ++r) {
    out << vocab.tokens[static_cast<size_t>(r)];
    for (long c = 0; c < vocab.dim(); ++c) {
      std::snprintf(buf, sizeof(buf), " %.17g", vocab.embeddings(r, c));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write failed for vocabulary file: " + path);
}

Vec read_embedding_line(const std::string& path, long expect_dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embedding file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<double> vals;
    double x;
    while (ss >> x) vals.push_back(x);
    if (vals.empty()) continue;  // skip blank lines before the data line
    if (expect_dim >= 0 && static_cast<long>(vals.size()) != expect_dim)
      throw ConfigError("embedding file: expected " + std::to_string(expect_dim) +
                        " values, got " + std::to_string(vals.size()) + ": " + path);
    Vec out(static_cast<Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) out(static_cast<Index>(i)) = vals[i];
    if (!out.allFinite()) throw ConfigError("embedding file: non-finite value: " + path);
    return out;
  }
  throw ConfigError("embedding file: no values found: " + path);
}

void write_embedding_columns(const std::string& path, const Mat& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write embedding file: " + path);
  char buf[64];
  for (Index c = 0; c < columns.cols(); ++c) {
    for (Index r = 0; r < columns.rows(); ++r) {
      std::snprintf(buf, sizeof(buf), r == 0 ? "%.17g" : " %.17g", columns(r, c));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write failed for embedding file: " + path);
}

}  // namespace mtk::inv
