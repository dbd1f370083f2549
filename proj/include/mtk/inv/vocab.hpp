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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mtk/common.hpp"

namespace mtk::inv {

/// Token table with one embedding row per token.
struct Vocabulary {
  std::vector<std::string> tokens;
  Mat embeddings;  // V x D

  long size() const { return static_cast<long>(tokens.size()); }
  long dim() const { return embeddings.cols(); }
  /// Row index of a token, -1 when absent.
  long find(std::string_view token) const;
  /// At least two rows, tokens whitespace-free and unique, all values finite.
  void validate() const;
};

/// Text format: header "V D", then V lines "token v1 ... vD".
Vocabulary read_vocabulary(const std::string& path);
void write_vocabulary(const std::string& path, const Vocabulary& vocab);

/// One line of floats. A non-negative expect_dim enforces the length.
Vec read_embedding_line(const std::string& path, long expect_dim = -1);
/// One text line of D floats per column of the D x N matrix.
void write_embedding_columns(const std::string& path, const Mat& columns);

}  // namespace mtk::inv
