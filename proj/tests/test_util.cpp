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

#include <cmath>
#include <vector>

#include "mtk/common.hpp"
#include "mtk/rng.hpp"

using mtk::BoundingBox;
using mtk::Rng;

TEST_CASE("rng streams are reproducible and seed-sensitive") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 10; ++i) differs = differs || (a2.uniform() != c.uniform());
  CHECK(differs);
}

TEST_CASE("uniform_int stays in range and covers values") {
  Rng rng(7);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const uint64_t v = rng.uniform_int(5);
    REQUIRE(v < 5);
    hits[static_cast<int>(v)]++;
  }
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("normal samples have plausible moments") {
  Rng rng(123);
  double s1 = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("derived seeds differ per tag and are stable") {
  const uint64_t s1 = Rng::derive(42, "sampling");
  const uint64_t s2 = Rng::derive(42, "init");
  const uint64_t s3 = Rng::derive(43, "sampling");
  CHECK(s1 != s2);
  CHECK(s1 != s3);
  CHECK(s1 == Rng::derive(42, "sampling"));
}

TEST_CASE("bounding box geometry helpers") {
  BoundingBox box;
  box.lo = mtk::Vec3(-1.0, -1.0, -1.0);
  box.hi = mtk::Vec3(1.0, 1.0, 1.0);
  CHECK(box.cubical());
  CHECK(box.cell_edge(64) == doctest::Approx(2.0 / 64.0).epsilon(1e-15));
  CHECK(box.extent().x() == doctest::Approx(2.0));

  BoundingBox bad;
  bad.lo = mtk::Vec3(1.0, 0.0, 0.0);
  bad.hi = mtk::Vec3(0.0, 1.0, 1.0);
  CHECK_THROWS_AS(bad.validate(), mtk::ConfigError);
}
