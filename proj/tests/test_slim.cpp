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

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "greenrec/error.hpp"
#include "greenrec/models.hpp"
#include "support.hpp"

using namespace greenrec;
using namespace greenrec::models;

namespace {

double frob_half(const SparseRatingMatrix& m) {
  double s = 0;
  for (Index u = 0; u < m.n_users(); ++u)
    for (auto& c : m.user_row(u)) s += 0.5 * c.rating * c.rating;
  return s;
}

void check_constraints(const SlimPredictor& p) {
  for (Index j = 0; j < p.columns().size(); ++j) {
    for (const auto& c : p.columns()[j]) {
      REQUIRE(c.rating >= 0.0);
      REQUIRE(c.index != j);
    }
  }
}

// Dense 4x3 toy; zeros are missing entries.
constexpr std::array<std::array<double, 3>, 4> kToy = {{{5, 4, 0}, {4, 5, 1}, {0, 1, 5}, {3, 3, 2}}};

std::vector<Interaction> toy_entries() {
  std::vector<Interaction> e;
  for (Index u = 0; u < 4; ++u)
    for (Index i = 0; i < 3; ++i)
      if (kToy[u][i] != 0) e.push_back({u, i, kToy[u][i], {}});
  return e;
}

// Objective of one column j with weights w on the two other items.
double toy_column_objective(Index j, double wa, double wb, double beta, double lambda) {
  const Index a = (j + 1) % 3, b = (j + 2) % 3;
  double s = 0;
  for (const auto& row : kToy) {
    const double r = row[j] - (row[a] * wa + row[b] * wb);
    s += 0.5 * r * r;
  }
  return s + 0.5 * beta * (wa * wa + wb * wb) + lambda * (wa + wb);
}

}  // namespace

TEST_CASE("slim output satisfies the constraints and a monotone objective") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    auto train = share(SparseRatingMatrix(25, 20, testutil::random_entries(rng, 25, 20, 0.3)));
    for (double beta : {0.005, 0.5}) {
      for (double lambda : {0.005, 0.5}) {
        auto p = fit_slim(train, {beta, lambda, 50, 1e-6, Exec::Parallel});
        check_constraints(p);
        const auto& trace = p.objective_trace();
        REQUIRE(trace.size() >= 2);
        for (std::size_t n = 1; n < trace.size(); ++n) CHECK(trace[n] <= trace[n - 1] * (1 + 1e-12));
        CHECK(trace.back() == doctest::Approx(slim_objective(*train, p.columns(), beta, lambda)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("per-column objective is non-increasing per pass") {
  std::mt19937_64 rng(2);
  SparseRatingMatrix m(30, 15, testutil::random_entries(rng, 30, 15, 0.4));
  for (Index j = 0; j < 15; ++j) {
    auto col = solve_slim_column(m, j, {0.05, 0.05, 100, 1e-8, Exec::Serial});
    for (std::size_t n = 1; n < col.objective.size(); ++n) CHECK(col.objective[n] <= col.objective[n - 1] * (1 + 1e-12));
  }
}

TEST_CASE("slim with a huge l1 penalty is all zero") {
  std::mt19937_64 rng(3);
  auto train = share(SparseRatingMatrix(10, 8, testutil::random_entries(rng, 10, 8, 0.5)));
  auto p = fit_slim(train, {0.05, 1e9, 10, 1e-4, Exec::Serial});
  for (const auto& c : p.columns()) CHECK(c.empty());
  CHECK(p.objective_trace().back() == doctest::Approx(frob_half(*train)));
  auto s = TrainingSummary::from(*train);
  for (Index u = 0; u < 10; ++u)
    for (Index i = 0; i < 8; ++i)
      if (s.user_seen(u) && s.item_seen(i)) CHECK(p.predict(u, i) == 0.0);
}

TEST_CASE("duplicated columns: each copy explains the other") {
  // Items 0 and 1 are identical; item 2 is rated by disjoint users.
  std::vector<Interaction> e;
  const double r[] = {5, 3, 4, 1, 2};
  for (Index u = 0; u < 5; ++u) {
    e.push_back({u, 0, r[u], {}});
    e.push_back({u, 1, r[u], {}});
  }
  e.push_back({5, 2, 4, {}});
  e.push_back({6, 2, 2, {}});
  auto train = share(SparseRatingMatrix(7, 3, e));
  auto p = fit_slim(train, {1e-4, 1e-4, 200, 1e-9, Exec::Serial});
  REQUIRE(p.columns()[1].size() == 1);
  CHECK(p.columns()[1][0].index == 0);
  CHECK(p.columns()[1][0].rating == doctest::Approx(1.0).epsilon(1e-3));
  for (Index u = 0; u < 5; ++u) CHECK(p.predict(u, 1) == doctest::Approx(r[u]).epsilon(1e-3));
}

TEST_CASE("3-item toy matches the brute-force grid optimum") {
  const double beta = 0.05, lambda = 0.05;
  auto train = share(SparseRatingMatrix(4, 3, toy_entries()));
  auto p = fit_slim(train, {beta, lambda, 1000, 1e-10, Exec::Serial});
  check_constraints(p);
  const double fitted = slim_objective(*train, p.columns(), beta, lambda);

  // Columns decouple, so the joint grid minimum over {0, 0.1, ..., 1}^6 is the
  // sum of per-column grid minima. Check that with the joint sweep too.
  double grid_best = std::numeric_limits<double>::infinity();
  std::array<double, 3> col_best;
  col_best.fill(std::numeric_limits<double>::infinity());
  for (Index j = 0; j < 3; ++j)
    for (int a = 0; a <= 10; ++a)
      for (int b = 0; b <= 10; ++b)
        col_best[j] = std::min(col_best[j], toy_column_objective(j, a / 10.0, b / 10.0, beta, lambda));
  for (int n = 0; n < 1771561; ++n) {
    int x = n;
    double s = 0;
    for (Index j = 0; j < 3; ++j) {
      const int a = x % 11, b = (x / 11) % 11;
      x /= 121;
      s += toy_column_objective(j, a / 10.0, b / 10.0, beta, lambda);
    }
    grid_best = std::min(grid_best, s);
  }
  CHECK(grid_best == doctest::Approx(col_best[0] + col_best[1] + col_best[2]));
  CHECK(fitted <= grid_best + 1e-3);

  // A fine per-column grid brackets the true optimum tightly.
  double fine = 0;
  for (Index j = 0; j < 3; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= 1500; ++a)
      for (int b = 0; b <= 1500; ++b) best = std::min(best, toy_column_objective(j, a / 1000.0, b / 1000.0, beta, lambda));
    fine += best;
  }
  CHECK(fitted <= fine + 1e-6);
  CHECK(fitted >= fine - 1e-3);
}

TEST_CASE("slim serial and parallel agree bitwise") {
  std::mt19937_64 rng(4);
  auto train = share(SparseRatingMatrix(60, 40, testutil::random_entries(rng, 60, 40, 0.2)));
  auto a = fit_slim(train, {0.05, 0.05, 100, 1e-4, Exec::Serial});
  auto b = fit_slim(train, {0.05, 0.05, 100, 1e-4, Exec::Parallel});
  CHECK(a.columns() == b.columns());
  CHECK(a.objective_trace() == b.objective_trace());
}

TEST_CASE("slim validation") {
  auto train = share(SparseRatingMatrix(2, 2, testutil::dense_triples({{0, 0, 1.0}})));
  CHECK_THROWS_AS(fit_slim(train, {-1, 0.05, 10, 1e-4, Exec::Serial}), ValidationError);
  CHECK_THROWS_AS(fit_slim(train, {0.05, 0.05, 0, 1e-4, Exec::Serial}), ValidationError);
  CHECK_THROWS_AS(fit_slim(share(SparseRatingMatrix(2, 2, {})), {}), TrainingError);
}
