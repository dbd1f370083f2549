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

#include <functional>
#include <string>
#include <vector>

#include "mtk/inv/pca.hpp"
#include "mtk/inv/vocab.hpp"
#include "mtk/rng.hpp"

namespace mtk::inv {

/// Six-slot prompt "a <style> image of <object> <etc>": carrier-word
/// embeddings in columns 0, 2, 3 and the three trainable pseudo-tokens in
/// columns 1, 4, 5.
struct PromptEmbedding {
  Mat slots;  // D x 6
};

inline constexpr int kNumSlots = 6;
inline constexpr int kPseudoSlots[3] = {1, 4, 5};
inline constexpr const char* kCarrierWords[3] = {"a", "image", "of"};
inline constexpr int kCarrierSlots[3] = {0, 2, 3};

/// Mean of the three pseudo-token slots.
Vec pool_pseudo(const PromptEmbedding& prompt);

enum class TokenKind { kStyle, kObject, kEtc };

/// Starting value for one pseudo-token slot. Style and object tokens are a
/// softmax(cos/temperature)-weighted blend of the top_k most cosine-similar
/// vocabulary rows (all-zero query rejected). The residual "etc" token is a
/// seeded Gaussian whose componentwise deviation is the mean per-row
/// deviation of the vocabulary.
Vec init_token(const Vec& query_embed, const Vocabulary& vocab, TokenKind kind,
               double temperature = 0.1, int top_k = 16, uint64_t seed = 0);

/// Slots the three pseudo-tokens into the template; carrier words must be in
/// the vocabulary.
PromptEmbedding assemble_prompt(const Vec& e_style, const Vec& e_object, const Vec& e_etc,
                                const Vocabulary& vocab);

/// Deterministic scalar loss of a prompt at a fixed noise key.
struct ScoringOracle {
  std::string name;
  std::function<double(const PromptEmbedding&, uint64_t)> evaluate;
};

/// || pool(e) - target ||^2.
ScoringOracle quadratic_oracle(const Vec& target);
/// 1 - cos(pool(e), target); rejects a zero target.
ScoringOracle cosine_oracle(const Vec& target);
/// Cosine loss plus a Gaussian perturbation drawn deterministically from the
/// prompt bytes and the noise key.
ScoringOracle noisy_proxy_oracle(const Vec& target, double noise_std);

struct InversionOptions {
  int generations = 200;  // per joint run, or per token round when sequential
  double sigma0 = 0.5;
  bool sequential = false;  // one round per pseudo-token instead of a joint run
  uint64_t noise_key = 0;
};

struct TraceRow {
  long generation = 0;
  double best_loss = 0.0;
  double sigma = 0.0;
};

struct InversionResult {
  Mat slots;  // D x 3 optimized pseudo-tokens (style, object, etc)
  std::vector<TraceRow> trace;
  double best_loss = 0.0;
  double initial_loss = 0.0;  // oracle at the unmodified starting slots
};

/// Minimizes the oracle over subspace coefficients starting from the base
/// prompt's pseudo-tokens e0: each candidate decodes slot-wise as
/// e = e0 + basis * Q_slot, so components of e0 orthogonal to the subspace
/// are preserved. Carrier slots stay frozen. The noise key is fixed for the
/// whole run and the reported best never regresses. Oracle exceptions and
/// non-finite losses are rethrown as NumericalError naming the generation.
InversionResult optimize_embedding(const ScoringOracle& oracle, const PromptEmbedding& base,
                                   const EmbeddingSubspace& subspace,
                                   const InversionOptions& opt, uint64_t seed);

/// "generation,best_loss,sigma" rows.
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

}  // namespace mtk::inv
