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

#include "mtk/inv/invert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mtk/inv/cma.hpp"

namespace mtk::inv {

namespace {

uint64_t hash_prompt(const PromptEmbedding& prompt) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a over the slot bytes
  for (Index c = 0; c < prompt.slots.cols(); ++c)
    for (Index r = 0; r < prompt.slots.rows(); ++r) {
      const uint64_t bits = std::bit_cast<uint64_t>(prompt.slots(r, c));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xff;
        h *= 1099511628211ull;
      }
    }
  return h;
}

double cosine_loss(const Vec& pool, const Vec& target, double target_norm) {
  const double pn = pool.norm();
  if (pn < 1e-300) return 1.0;  // zero pool is orthogonal by convention
  return 1.0 - pool.dot(target) / (pn * target_norm);
}

double checked_eval(const ScoringOracle& oracle, const PromptEmbedding& prompt,
                    uint64_t noise_key, const std::string& where) {
  double loss;
  try {
    loss = oracle.evaluate(prompt, noise_key);
  } catch (const std::exception& ex) {
    throw NumericalError("oracle '" + oracle.name + "' failed at " + where + ": " + ex.what());
  }
  if (!std::isfinite(loss))
    throw NumericalError("oracle '" + oracle.name + "' returned non-finite loss at " + where);
  return loss;
}

}  // namespace

Vec pool_pseudo(const PromptEmbedding& prompt) {
  if (prompt.slots.cols() != kNumSlots)
    throw std::invalid_argument("pool_pseudo: prompt must have 6 slots");
  Vec out = Vec::Zero(prompt.slots.rows());
  for (int s : kPseudoSlots) out += prompt.slots.col(s);
  return out / 3.0;
}

Vec init_token(const Vec& query_embed, const Vocabulary& vocab, TokenKind kind,
               double temperature, int top_k, uint64_t seed) {
  const long v = vocab.size();
  const long dim = vocab.dim();
  if (v < 1 || dim < 1) throw ConfigError("init_token: empty vocabulary");
  if (vocab.embeddings.rows() != v)
    throw ConfigError("init_token: token count does not match embedding rows");

  if (kind == TokenKind::kEtc) {
    // Residual token: seeded Gaussian at the vocabulary's typical per-row
    // component deviation.
    double mean_std = 0.0;
    for (long r = 0; r < v; ++r) {
      const auto row = vocab.embeddings.row(r);
      const double mu = row.mean();
      mean_std += std::sqrt((row.array() - mu).square().mean());
    }
    mean_std /= static_cast<double>(v);
    Rng rng(Rng::derive(seed, "etc-token"));
    Vec out(dim);
    for (long i = 0; i < dim; ++i) out(i) = mean_std * rng.normal();
    return out;
  }

  if (!(temperature > 0.0)) throw ConfigError("init_token: temperature must be positive");
  if (top_k < 1) throw ConfigError("init_token: top_k must be >= 1");
  if (query_embed.size() != dim)
    throw ConfigError("init_token: query width " + std::to_string(query_embed.size()) +
                      " does not match the vocabulary width " + std::to_string(dim));
  const double qn = query_embed.norm();
  if (qn == 0.0) throw ConfigError("init_token: all-zero query embedding");

  Vec sims(v);
  for (long r = 0; r < v; ++r) {
    const double rn = vocab.embeddings.row(r).norm();
    sims(r) = rn < 1e-300 ? -std::numeric_limits<double>::infinity()
                          : vocab.embeddings.row(r).dot(query_embed.transpose()) / (rn * qn);
  }

  const int k = static_cast<int>(std::min<long>(top_k, v));
  std::vector<long> order(static_cast<size_t>(v));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    return sims(a) != sims(b) ? sims(a) > sims(b) : a < b;
  });
  if (!std::isfinite(sims(order[0])))
    throw ConfigError("init_token: vocabulary has no nonzero rows");

  const double smax = sims(order[0]);
  Vec weights(k);
  for (int i = 0; i < k; ++i)
    weights(i) = std::isfinite(sims(order[static_cast<size_t>(i)]))
                     ? std::exp((sims(order[static_cast<size_t>(i)]) - smax) / temperature)
                     : 0.0;
  weights /= weights.sum();

  Vec out = Vec::Zero(dim);
  for (int i = 0; i < k; ++i)
    out += weights(i) * vocab.embeddings.row(order[static_cast<size_t>(i)]).transpose();
  return out;
}

PromptEmbedding assemble_prompt(const Vec& e_style, const Vec& e_object, const Vec& e_etc,
                                const Vocabulary& vocab) {
  const long dim = e_style.size();
  if (e_object.size() != dim || e_etc.size() != dim)
    throw ConfigError("assemble_prompt: pseudo-token widths disagree");
  if (vocab.dim() != dim)
    throw ConfigError("assemble_prompt: vocabulary width " + std::to_string(vocab.dim()) +
                      " does not match the pseudo-tokens");
  PromptEmbedding prompt;
  prompt.slots.resize(dim, kNumSlots);
  for (int i = 0; i < 3; ++i) {
    const long row = vocab.find(kCarrierWords[i]);
    if (row < 0)
      throw ConfigError(std::string("assemble_prompt: carrier word '") + kCarrierWords[i] +
                        "' missing from the vocabulary");
    prompt.slots.col(kCarrierSlots[i]) = vocab.embeddings.row(row).transpose();
  }
  prompt.slots.col(kPseudoSlots[0]) = e_style;
  prompt.slots.col(kPseudoSlots[1]) = e_object;
  prompt.slots.col(kPseudoSlots[2]) = e_etc;
  return prompt;
}

ScoringOracle quadratic_oracle(const Vec& target) {
  if (target.size() < 1) throw ConfigError("quadratic oracle: empty target");
  return {"quadratic", [target](const PromptEmbedding& prompt, uint64_t) {
            return (pool_pseudo(prompt) - target).squaredNorm();
          }};
}

ScoringOracle cosine_oracle(const Vec& target) {
  const double tn = target.norm();
  if (tn == 0.0) throw ConfigError("cosine oracle: zero target vector");
  return {"cosine", [target, tn](const PromptEmbedding& prompt, uint64_t) {
            return cosine_loss(pool_pseudo(prompt), target, tn);
          }};
}

ScoringOracle noisy_proxy_oracle(const Vec& target, double noise_std) {
  const double tn = target.norm();
  if (tn == 0.0) throw ConfigError("noisy-proxy oracle: zero target vector");
  if (!(noise_std >= 0.0)) throw ConfigError("noisy-proxy oracle: negative noise");
  return {"noisy-proxy", [target, tn, noise_std](const PromptEmbedding& prompt, uint64_t key) {
            Rng rng(Rng::derive(hash_prompt(prompt) ^ key, "noisy-proxy"));
            return cosine_loss(pool_pseudo(prompt), target, tn) + noise_std * rng.normal();
          }};
}

InversionResult optimize_embedding(const ScoringOracle& oracle, const PromptEmbedding& base,
                                   const EmbeddingSubspace& subspace,
                                   const InversionOptions& opt, uint64_t seed) {
  if (!oracle.evaluate) throw ConfigError("optimize_embedding: oracle has no evaluate");
  if (opt.generations < 1) throw ConfigError("optimize_embedding: budget must be >= 1");
  if (base.slots.cols() != kNumSlots)
    throw ConfigError("optimize_embedding: prompt must have 6 slots");
  const long dim = base.slots.rows();
  if (subspace.basis.rows() != dim)
    throw ConfigError("optimize_embedding: subspace width does not match the prompt");
  const int d = static_cast<int>(subspace.basis.cols());

  InversionResult res;
  res.slots.resize(dim, 3);
  for (int s = 0; s < 3; ++s) res.slots.col(s) = base.slots.col(kPseudoSlots[s]);
  res.initial_loss = checked_eval(oracle, base, opt.noise_key, "the initial evaluation");
  res.best_loss = std::numeric_limits<double>::infinity();

  Rng rng(Rng::derive(seed, "cma-sampling"));
  long generation = 0;

  // Joint mode optimizes the concatenation of all three coefficient blocks;
  // sequential mode runs one block per round with the others frozen at the
  // current best.
  const auto run_round = [&](const std::vector<int>& active_slots) {
    const int n = d * static_cast<int>(active_slots.size());
    CmaState state = cma_init(Vec::Zero(n), opt.sigma0);
    const Mat round_base = res.slots;  // decode base, frozen for the round
    PromptEmbedding prompt = base;
    for (int s = 0; s < 3; ++s) prompt.slots.col(kPseudoSlots[s]) = round_base.col(s);

    for (int g = 0; g < opt.generations; ++g, ++generation) {
      const Mat cand = cma_sample(state, rng);
      std::vector<double> fitness(static_cast<size_t>(state.lambda));
      for (int k = 0; k < state.lambda; ++k) {
        for (size_t a = 0; a < active_slots.size(); ++a)
          prompt.slots.col(kPseudoSlots[active_slots[a]]) =
              round_base.col(active_slots[a]) +
              subspace.basis * cand.col(k).segment(static_cast<Index>(a) * d, d);
        fitness[static_cast<size_t>(k)] =
            checked_eval(oracle, prompt, opt.noise_key,
                         "generation " + std::to_string(generation) + ", sample " +
                             std::to_string(k));
        if (fitness[static_cast<size_t>(k)] < res.best_loss) {
          res.best_loss = fitness[static_cast<size_t>(k)];
          for (size_t a = 0; a < active_slots.size(); ++a)
            res.slots.col(active_slots[a]) = prompt.slots.col(kPseudoSlots[active_slots[a]]);
        }
      }
      cma_step(state, fitness);
      res.trace.push_back({generation, res.best_loss, state.sigma});
    }
  };

  if (opt.sequential) {
    for (int s = 0; s < 3; ++s) run_round({s});
  } else {
    run_round({0, 1, 2});
  }
  return res;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write trace: " + path);
  out << "generation,best_loss,sigma\n";
  char buf[96];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g\n", r.generation, r.best_loss, r.sigma);
    out << buf;
  }
  if (!out) throw ConfigError("write failed for trace: " + path);
}

}  // namespace mtk::inv
