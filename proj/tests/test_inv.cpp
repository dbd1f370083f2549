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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "mtk/inv/cma.hpp"
#include "mtk/inv/invert.hpp"
#include "mtk/inv/pca.hpp"
#include "mtk/inv/vocab.hpp"
#include "mtk/rng.hpp"

using namespace mtk;
using namespace mtk::inv;

namespace {

Mat random_matrix(Rng& rng, long rows, long cols, double lo = -1.0, double hi = 1.0) {
  Mat m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
  return m;
}

/// Cyclic Jacobi eigensolver, independent of the library implementation.
void jacobi_eig(Mat a, Mat& vectors, Vec& values) {
  const long n = a.rows();
  vectors = Mat::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (long p = 0; p < n; ++p)
      for (long q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (long p = 0; p < n; ++p)
      for (long q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double phi = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        Mat j = Mat::Identity(n, n);
        j(p, p) = std::cos(phi);
        j(q, q) = std::cos(phi);
        j(p, q) = std::sin(phi);
        j(q, p) = -std::sin(phi);
        a = (j.transpose() * a * j).eval();
        vectors = (vectors * j).eval();
      }
  }
  values = a.diagonal();
}

/// Top-d eigenpairs of the sample covariance, by the Jacobi oracle, with the
/// same sign canonicalization as the implementation.
void oracle_pca(const Mat& rows, int d, Mat& basis, Vec& eigenvalues) {
  const Mat centered = rows.rowwise() - rows.colwise().mean();
  const Mat cov = centered.transpose() * centered / static_cast<double>(rows.rows() - 1);
  Mat vectors;
  Vec values;
  jacobi_eig(cov, vectors, values);
  std::vector<long> order(static_cast<size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](long x, long y) { return values(x) > values(y); });
  basis.resize(rows.cols(), d);
  eigenvalues.resize(d);
  for (int i = 0; i < d; ++i) {
    Vec col = vectors.col(order[static_cast<size_t>(i)]);
    Index peak = 0;
    col.cwiseAbs().maxCoeff(&peak);
    if (col(peak) < 0.0) col = -col;
    basis.col(i) = col;
    eigenvalues(i) = values(order[static_cast<size_t>(i)]);
  }
}

Vocabulary random_vocab(Rng& rng, long v, long d) {
  Vocabulary vocab;
  vocab.tokens.reserve(static_cast<size_t>(v));
  for (long i = 0; i < v; ++i) vocab.tokens.push_back("tok" + std::to_string(i));
  vocab.tokens[0] = "a";
  vocab.tokens[1] = "image";
  vocab.tokens[2] = "of";
  vocab.embeddings = random_matrix(rng, v, d);
  return vocab;
}

}  // namespace

TEST_CASE("pca matches an independent dense eigendecomposition") {
  Rng rng(31);
  const Mat rows = random_matrix(rng, 10, 6);
  const EmbeddingSubspace sub = pca_fit(rows, 3);

  Mat want_basis;
  Vec want_values;
  oracle_pca(rows, 3, want_basis, want_values);
  CHECK((sub.basis - want_basis).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((sub.eigenvalues - want_values).cwiseAbs().maxCoeff() < 1e-8);

  CHECK((sub.basis.transpose() * sub.basis - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-8);
  CHECK(sub.eigenvalues(0) >= sub.eigenvalues(1));
  CHECK(sub.eigenvalues(1) >= sub.eigenvalues(2));
  CHECK(sub.eigenvalues(2) >= 0.0);
  CHECK((sub.mean.transpose() - rows.colwise().mean()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pca on collinear data recovers the line") {
  Mat rows(5, 4);
  rows.setZero();
  for (int i = 0; i < 5; ++i) rows(i, 0) = i - 2.0;  // points along axis 0
  const EmbeddingSubspace sub = pca_fit(rows, 2);
  CHECK(std::abs(sub.basis(0, 0) - 1.0) < 1e-12);
  CHECK(sub.basis.col(0).tail(3).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sub.eigenvalues(0) == doctest::Approx(2.5).epsilon(1e-12));  // var of -2..2
  CHECK(sub.eigenvalues(1) < 1e-12);
}

TEST_CASE("pca reconstruction error never grows with d") {
  Rng rng(77);
  const Mat rows = random_matrix(rng, 20, 12);
  double prev = std::numeric_limits<double>::infinity();
  for (int d : {1, 2, 4, 8}) {
    const EmbeddingSubspace sub = pca_fit(rows, d);
    const Mat centered = rows.rowwise() - sub.mean.transpose();
    const Mat recon = centered * sub.basis * sub.basis.transpose();
    const double err = (centered - recon).squaredNorm() / rows.rows();
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("pca rejects impossible dimensions") {
  Rng rng(1);
  const Mat rows = random_matrix(rng, 6, 4);
  CHECK_THROWS_AS(pca_fit(rows, 0), ConfigError);
  CHECK_THROWS_AS(pca_fit(rows, 6), ConfigError);   // d >= V
  CHECK_THROWS_AS(pca_fit(rows, 5), ConfigError);   // d > D
  CHECK_NOTHROW(pca_fit(rows, 4));
}

TEST_CASE("token initialization blends by cosine similarity") {
  SUBCASE("single-word vocabulary returns that embedding") {
    Vocabulary vocab;
    vocab.tokens = {"only"};
    vocab.embeddings = Mat(1, 3);
    vocab.embeddings << 0.3, -0.7, 2.0;
    const Vec q = Vec3(1, 1, 1);
    const Vec e0 = init_token(q, vocab, TokenKind::kStyle, 0.5, 4);
    CHECK((e0.transpose() - vocab.embeddings.row(0)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("equal similarities average") {
    Vocabulary vocab;
    vocab.tokens = {"p", "q"};
    vocab.embeddings = Mat(2, 3);
    vocab.embeddings << 1, 1, 0, 1, -1, 0;
    const Vec e0 = init_token(Vec3(1, 0, 0), vocab, TokenKind::kObject, 0.1, 2);
    CHECK((e0 - Vec3(1, 0, 0)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("similarities 0.9 and 0.1 at temperature 0.1") {
    Vocabulary vocab;
    vocab.tokens = {"near", "far"};
    vocab.embeddings = Mat(2, 3);
    vocab.embeddings.row(0) << 0.9, std::sqrt(1.0 - 0.81), 0.0;
    vocab.embeddings.row(1) << 0.1, 0.0, std::sqrt(1.0 - 0.01);
    const Vec e0 = init_token(Vec3(1, 0, 0), vocab, TokenKind::kStyle, 0.1, 2);
    const double w0 = std::exp(9.0) / (std::exp(9.0) + std::exp(1.0));
    const Vec want = w0 * vocab.embeddings.row(0).transpose() +
                     (1.0 - w0) * vocab.embeddings.row(1).transpose();
    CHECK((e0 - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(w0 == doctest::Approx(0.99966).epsilon(1e-4));
  }
  SUBCASE("residual token is a seeded Gaussian at the vocabulary scale") {
    Rng rng(6);
    Vocabulary vocab = random_vocab(rng, 50, 768);
    const Vec a = init_token(Vec(), vocab, TokenKind::kEtc, 0.1, 16, 123);
    const Vec b = init_token(Vec(), vocab, TokenKind::kEtc, 0.1, 16, 123);
    const Vec c = init_token(Vec(), vocab, TokenKind::kEtc, 0.1, 16, 124);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);

    double mean_std = 0.0;
    for (long r = 0; r < vocab.size(); ++r) {
      const double mu = vocab.embeddings.row(r).mean();
      mean_std += std::sqrt((vocab.embeddings.row(r).array() - mu).square().mean());
    }
    mean_std /= vocab.size();
    const double sample_std = std::sqrt(a.squaredNorm() / a.size());
    CHECK(sample_std == doctest::Approx(mean_std).epsilon(0.10));
  }
  SUBCASE("rejects degenerate queries and parameters") {
    Rng rng(2);
    Vocabulary vocab = random_vocab(rng, 8, 5);
    CHECK_THROWS_AS(init_token(Vec::Zero(5), vocab, TokenKind::kStyle), ConfigError);
    CHECK_THROWS_AS(init_token(Vec::Ones(5), vocab, TokenKind::kStyle, 0.0), ConfigError);
    CHECK_THROWS_AS(init_token(Vec::Ones(5), vocab, TokenKind::kStyle, 0.1, 0), ConfigError);
    CHECK_THROWS_AS(init_token(Vec::Ones(4), vocab, TokenKind::kStyle), ConfigError);
  }
}

TEST_CASE("prompt assembly follows the six-slot template") {
  Rng rng(9);
  Vocabulary vocab = random_vocab(rng, 10, 7);
  const Vec style = Vec::Constant(7, 0.1);
  const Vec object = Vec::Constant(7, 0.2);
  const Vec etc = Vec::Constant(7, 0.3);
  PromptEmbedding prompt = assemble_prompt(style, object, etc, vocab);
  REQUIRE(prompt.slots.cols() == 6);
  CHECK((prompt.slots.col(0).transpose() - vocab.embeddings.row(vocab.find("a")))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((prompt.slots.col(2).transpose() - vocab.embeddings.row(vocab.find("image")))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((prompt.slots.col(3).transpose() - vocab.embeddings.row(vocab.find("of")))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((prompt.slots.col(1) - style).cwiseAbs().maxCoeff() == 0.0);
  CHECK((prompt.slots.col(4) - object).cwiseAbs().maxCoeff() == 0.0);
  CHECK((prompt.slots.col(5) - etc).cwiseAbs().maxCoeff() == 0.0);

  const PromptEmbedding other = assemble_prompt(style, object * 2.0, etc, vocab);
  int changed = 0;
  for (int c = 0; c < 6; ++c)
    if ((other.slots.col(c) - prompt.slots.col(c)).cwiseAbs().maxCoeff() > 0.0) changed++;
  CHECK(changed == 1);

  Vocabulary broken = vocab;
  broken.tokens[2] = "off";
  CHECK_THROWS_AS(assemble_prompt(style, object, etc, broken), ConfigError);
}

TEST_CASE("population size is even and logarithmic") {
  CHECK(cma_population_size(1) == 4);
  CHECK(cma_population_size(8) == 10);   // 4 + floor(3 ln 8) = 10
  CHECK(cma_population_size(24) == 14);  // 13 rounded up for mirrored pairs
}

TEST_CASE("evolution strategy finds a sphere optimum") {
  Vec c(8);
  c << 0.3, -0.5, 0.8, -0.1, 0.4, 0.9, -0.7, 0.2;
  CmaState state = cma_init(Vec::Zero(8), 0.5);
  Rng rng(7);
  for (int g = 0; g < 300; ++g) {
    const Mat x = cma_sample(state, rng);
    std::vector<double> fitness(static_cast<size_t>(state.lambda));
    for (int k = 0; k < state.lambda; ++k)
      fitness[static_cast<size_t>(k)] = (x.col(k) - c).squaredNorm();
    cma_step(state, fitness);
    if ((state.m - c).norm() < 1e-5) break;
  }
  CHECK((state.m - c).norm() < 1e-5);
}

TEST_CASE("constant fitness leaves the mean in place") {
  CmaState state = cma_init(Vec::Constant(6, 0.25), 0.7);
  Rng rng(13);
  const Vec before = state.m;
  for (int g = 0; g < 3; ++g) {
    cma_sample(state, rng);
    cma_step(state, std::vector<double>(static_cast<size_t>(state.lambda), 5.0));
    CHECK((state.m - before).cwiseAbs().maxCoeff() < state.sigma * 1e-12);
  }
}

TEST_CASE("the update is translation invariant") {
  Vec c(6);
  c << 1.0, -2.0, 0.5, -1.0, 0.25, 2.0;
  CmaState a = cma_init(Vec::Zero(6), 0.5);
  CmaState b = cma_init(c, 0.5);
  Rng rng_a(42), rng_b(42);
  for (int g = 0; g < 50; ++g) {
    const Mat xa = cma_sample(a, rng_a);
    const Mat xb = cma_sample(b, rng_b);
    CHECK((xb - (xa.colwise() + c)).cwiseAbs().maxCoeff() < 1e-10);
    std::vector<double> fa(static_cast<size_t>(a.lambda));
    for (int k = 0; k < a.lambda; ++k) {
      fa[static_cast<size_t>(k)] = xa.col(k).squaredNorm();
      const double fbk = (xb.col(k) - c).squaredNorm();
      CHECK(fbk == doctest::Approx(fa[static_cast<size_t>(k)]).epsilon(1e-6));
    }
    // Ranks drive the update; a translated objective differs in trailing
    // ulps and can flip near-ties, so both runs get the same vector.
    cma_step(a, fa);
    cma_step(b, fa);
    CHECK(a.sigma == b.sigma);
    CHECK((a.C - b.C).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.p_sigma - b.p_sigma).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b.m - a.m - c).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("step size stays positive over a long run") {
  Rng init(8);
  const Mat half = random_matrix(init, 5, 5);
  const Mat quad = half.transpose() * half + 0.1 * Mat::Identity(5, 5);
  const Vec lin = random_matrix(init, 5, 1).col(0);
  CmaState state = cma_init(Vec::Zero(5), 0.4);
  Rng rng(88);
  bool positive = true;
  for (int g = 0; g < 1000; ++g) {
    const Mat x = cma_sample(state, rng);
    std::vector<double> fitness(static_cast<size_t>(state.lambda));
    for (int k = 0; k < state.lambda; ++k)
      fitness[static_cast<size_t>(k)] =
          x.col(k).dot(quad * x.col(k)) + lin.dot(x.col(k));
    cma_step(state, fitness);
    positive = positive && state.sigma > 0.0 && std::isfinite(state.sigma);
  }
  CHECK(positive);
  CHECK(state.generation == 1000);
}

TEST_CASE("the strategy rejects protocol misuse and bad fitness") {
  CmaState state = cma_init(Vec::Zero(3), 0.5);
  Rng rng(3);
  CHECK_THROWS_AS(cma_step(state, std::vector<double>(4, 1.0)), std::invalid_argument);
  cma_sample(state, rng);
  CHECK_THROWS_AS(cma_sample(state, rng), std::invalid_argument);
  CHECK_THROWS_AS(cma_step(state, std::vector<double>(2, 1.0)), std::invalid_argument);
  std::vector<double> fitness(static_cast<size_t>(state.lambda), 1.0);
  fitness[3] = std::numeric_limits<double>::quiet_NaN();
  try {
    cma_step(state, fitness);
    FAIL("expected NumericalError");
  } catch (const NumericalError& ex) {
    CHECK(std::string(ex.what()).find("sample 3") != std::string::npos);
  }
  CHECK_THROWS_AS(cma_init(Vec::Zero(3), 0.0), ConfigError);
}

TEST_CASE("builtin oracles follow their closed forms") {
  Rng rng(15);
  Vocabulary vocab = random_vocab(rng, 8, 6);
  const Vec t = random_matrix(rng, 6, 1).col(0);
  const PromptEmbedding at_target = assemble_prompt(t, t, t, vocab);
  const PromptEmbedding at_negative = assemble_prompt(-t, -t, -t, vocab);

  CHECK(quadratic_oracle(t).evaluate(at_target, 0) < 1e-18);
  CHECK(cosine_oracle(t).evaluate(at_target, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cosine_oracle(t).evaluate(at_negative, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(cosine_oracle(Vec::Zero(6)), ConfigError);

  const ScoringOracle noisy = noisy_proxy_oracle(t, 0.05);
  const double l1 = noisy.evaluate(at_target, 11);
  const double l2 = noisy.evaluate(at_target, 11);
  const double l3 = noisy.evaluate(at_target, 12);
  CHECK(l1 == l2);
  CHECK(l1 != l3);
  CHECK(std::abs(l1) < 1.0);  // cosine 0 plus modest noise
}

TEST_CASE("subspace optimization recovers a hidden coefficient vector") {
  Rng rng(5);
  Vocabulary vocab = random_vocab(rng, 20, 32);
  const EmbeddingSubspace sub = pca_fit(vocab.embeddings, 8);

  const Vec q_style = random_matrix(rng, 32, 1).col(0);
  const Vec q_object = random_matrix(rng, 32, 1).col(0);
  const Vec e_style = init_token(q_style, vocab, TokenKind::kStyle);
  const Vec e_object = init_token(q_object, vocab, TokenKind::kObject);
  const Vec e_etc = init_token(Vec(), vocab, TokenKind::kEtc, 0.1, 16, 44);
  const PromptEmbedding base = assemble_prompt(e_style, e_object, e_etc, vocab);

  const Vec hidden = random_matrix(rng, 8, 1).col(0);
  const Vec target_object = e_object + sub.basis * hidden;
  const ScoringOracle oracle{"object-probe",
                             [&](const PromptEmbedding& p, uint64_t) {
                               return (p.slots.col(4) - target_object).squaredNorm();
                             }};

  InversionOptions opt;
  opt.sequential = true;  // the object round is an exact 8-dim sphere problem
  opt.generations = 120;
  const InversionResult res = optimize_embedding(oracle, base, sub, opt, 19);
  CHECK((res.slots.col(1) - target_object).norm() < 1e-3);
  REQUIRE(res.trace.size() == 360);
  for (size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i].best_loss <= res.trace[i - 1].best_loss);
}

TEST_CASE("quadratic inversion collapses the loss within budget") {
  for (uint64_t seed : {3ull, 4ull}) {
    Rng rng(40 + seed);
    Vocabulary vocab = random_vocab(rng, 24, 64);
    const EmbeddingSubspace sub = pca_fit(vocab.embeddings, 8);
    const Vec e_style = init_token(random_matrix(rng, 64, 1).col(0), vocab, TokenKind::kStyle);
    const Vec e_object =
        init_token(random_matrix(rng, 64, 1).col(0), vocab, TokenKind::kObject);
    const Vec e_etc = init_token(Vec(), vocab, TokenKind::kEtc, 0.1, 16, seed);
    const PromptEmbedding base = assemble_prompt(e_style, e_object, e_etc, vocab);

    const Vec hidden = random_matrix(rng, 8, 1).col(0);
    const Vec target = pool_pseudo(base) + sub.basis * hidden;
    const ScoringOracle oracle = quadratic_oracle(target);

    double worst_escape = 0.0;
    const Mat complement =
        Mat::Identity(64, 64) - sub.basis * sub.basis.transpose();
    const ScoringOracle probe{"probe", [&](const PromptEmbedding& p, uint64_t key) {
                                for (int s = 0; s < 3; ++s) {
                                  const Vec delta = p.slots.col(kPseudoSlots[s]) -
                                                    base.slots.col(kPseudoSlots[s]);
                                  worst_escape = std::max(
                                      worst_escape, (complement * delta).cwiseAbs().maxCoeff());
                                }
                                return oracle.evaluate(p, key);
                              }};

    InversionOptions opt;
    const InversionResult res = optimize_embedding(probe, base, sub, opt, seed);
    CAPTURE(seed);
    CHECK(res.initial_loss > 0.0);
    CHECK(res.best_loss < 1e-6 * res.initial_loss);
    CHECK(worst_escape < 1e-10);  // candidates never leave the subspace
    REQUIRE(res.trace.size() == 200);

    // orthogonal residue of the starting slots is carried over exactly
    for (int s = 0; s < 3; ++s) {
      const Vec drift = complement * (res.slots.col(s) - base.slots.col(kPseudoSlots[s]));
      CHECK(drift.cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("a budget of one returns the best of the first population") {
  Rng rng(62);
  Vocabulary vocab = random_vocab(rng, 12, 16);
  const EmbeddingSubspace sub = pca_fit(vocab.embeddings, 4);
  const PromptEmbedding base =
      assemble_prompt(Vec::Ones(16), Vec::Ones(16), Vec::Ones(16), vocab);
  const ScoringOracle oracle = quadratic_oracle(Vec::Zero(16));
  InversionOptions opt;
  opt.generations = 1;
  const InversionResult res = optimize_embedding(oracle, base, sub, opt, 5);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.best_loss == res.trace[0].best_loss);
  CHECK(std::isfinite(res.best_loss));
}

TEST_CASE("oracle failures carry the generation index") {
  Rng rng(70);
  Vocabulary vocab = random_vocab(rng, 12, 16);
  const EmbeddingSubspace sub = pca_fit(vocab.embeddings, 4);
  const PromptEmbedding base =
      assemble_prompt(Vec::Ones(16), Vec::Ones(16), Vec::Ones(16), vocab);
  int calls = 0;
  const ScoringOracle flaky{"flaky", [&](const PromptEmbedding&, uint64_t) -> double {
                              if (++calls > 12) throw std::runtime_error("backend down");
                              return 1.0;
                            }};
  InversionOptions opt;
  opt.generations = 5;
  try {
    optimize_embedding(flaky, base, sub, opt, 1);
    FAIL("expected NumericalError");
  } catch (const NumericalError& ex) {
    const std::string what = ex.what();
    CHECK(what.find("flaky") != std::string::npos);
    CHECK(what.find("generation") != std::string::npos);
  }
}

TEST_CASE("vocabulary files round-trip and reject malformed input") {
  Rng rng(50);
  Vocabulary vocab = random_vocab(rng, 5, 4);
  const std::string path = "test_inv_vocab.txt";
  write_vocabulary(path, vocab);
  const Vocabulary back = read_vocabulary(path);
  CHECK(back.tokens == vocab.tokens);
  CHECK((back.embeddings - vocab.embeddings).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());

  const auto write_file = [](const std::string& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
  };
  const std::string bad = "test_inv_bad.txt";
  write_file(bad, "not a header\n");
  CHECK_THROWS_AS(read_vocabulary(bad), ConfigError);
  write_file(bad, "2 2\nfoo 1 2\nfoo 3 4\n");
  CHECK_THROWS_AS(read_vocabulary(bad), ConfigError);  // duplicate token
  write_file(bad, "2 3\nfoo 1 2 3\nbar 4 5\n");
  CHECK_THROWS_AS(read_vocabulary(bad), ConfigError);  // short row
  write_file(bad, "1 2\nfoo 1 2\n");
  CHECK_THROWS_AS(read_vocabulary(bad), ConfigError);  // V < 2
  write_file(bad, "2 2\nfoo 1 2\nbar 3 nan\n");
  CHECK_THROWS_AS(read_vocabulary(bad), ConfigError);  // non-finite
  write_file(bad, "2 2\nfoo 1 2\nbar 3 4\nextra\n");
  CHECK_THROWS_AS(read_vocabulary(bad), ConfigError);  // trailing content
  std::remove(bad.c_str());
}

TEST_CASE("embedding files hold one vector per line") {
  Mat cols(3, 2);
  cols << 0.5, -1.25, 2.0, 0.0625, -3.5, 4.0;
  const std::string path = "test_inv_embed.txt";
  write_embedding_columns(path, cols);
  const Vec first = read_embedding_line(path, 3);
  CHECK((first - cols.col(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(read_embedding_line(path, 5), ConfigError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_embedding_line("missing_file.txt"), ConfigError);
}

TEST_CASE("trace files use the generation,best_loss,sigma layout") {
  const std::vector<TraceRow> rows = {{0, 0.5, 0.25}, {1, 0.125, 0.0625}};
  const std::string path = "test_inv_trace.csv";
  write_trace_csv(path, rows);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "generation,best_loss,sigma");
  std::getline(in, line);
  CHECK(line == "0,0.5,0.25");
  std::getline(in, line);
  CHECK(line == "1,0.125,0.0625");
  in.close();
  std::remove(path.c_str());
}
