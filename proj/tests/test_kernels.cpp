// Copyright 2026 The greenrec Authors
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

#include <random>
#include <stdexcept>

#include "doctest.h"
#include "greenrec/kernels.hpp"
#include "support.hpp"

using namespace greenrec;

TEST_CASE("stable_sum recovers cancelled digits") {
  std::vector<double> v = {1e16, 1.0, -1e16, 1.0};
  CHECK(stable_sum(v) == 2.0);
  std::vector<double> empty;
  CHECK(stable_sum(empty) == 0.0);
}

TEST_CASE("for_each_index visits every index once and rethrows") {
  for (Exec e : {Exec::Serial, Exec::Parallel}) {
    std::vector<int> hits(1000, 0);
    for_each_index(hits.size(), e, [&](std::size_t i) { ++hits[i]; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(for_each_index(100, e,
                                   [](std::size_t i) {
                                     if (i == 42) throw std::runtime_error("x");
                                   }),
                    std::runtime_error);
  }
}

TEST_CASE("cosine over the co-rated support") {
  std::vector<Cell> a = {{0, 1}, {1, 2}, {3, 4}};
  std::vector<Cell> b = {{1, 4}, {2, 9}, {3, 8}};
  CHECK(kernels::cosine_corated(a, b) == doctest::Approx(1.0));
  std::vector<Cell> c = {{5, 1}};
  CHECK(kernels::cosine_corated(a, c) == 0.0);
}

TEST_CASE("neighbour kernel: serial, parallel and reference agree bitwise") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    std::uniform_int_distribution<int> dim(1, 60);
    const std::size_t nu = dim(rng), ni = dim(rng);
    SparseRatingMatrix m(nu, ni, testutil::random_entries(rng, nu, ni, 0.25, t % 2 == 0));
    auto ref = kernels::item_cosine_neighbors_reference(m, 0.0);
    CHECK(kernels::item_cosine_neighbors(m, 0.0, Exec::Serial) == ref);
    CHECK(kernels::item_cosine_neighbors(m, 0.0, Exec::Parallel) == ref);
    for (std::size_t i = 0; i < ref.size(); ++i)
      for (const auto& c : ref[i]) {
        REQUIRE(c.index != i);
        REQUIRE(c.rating > 0.0);
        REQUIRE(c.rating <= 1.0 + 1e-12);
      }
  }
}
