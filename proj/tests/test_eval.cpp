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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "greenrec/error.hpp"
#include "greenrec/eval.hpp"
#include "support.hpp"

using namespace greenrec;
using namespace greenrec::eval;

namespace {

RankedList list_of(std::initializer_list<double> greenness_by_rank) {
  RankedList l;
  Index item = 0;
  double score = 100;
  for (double g : greenness_by_rank) l.entries.push_back({item++, score--, 0.0, g});
  return l;
}

double naive_gdcg(const std::vector<double>& g, std::size_t k) {
  double s = 0;
  for (std::size_t r = 0; r < std::min(k, g.size()); ++r) s += (std::pow(2.0, g[r]) - 1) / std::log2(r + 2.0);
  return s;
}

double naive_ndcg(std::vector<ScoredRating> batch, std::size_t k) {
  std::sort(batch.begin(), batch.end(), [](const ScoredRating& a, const ScoredRating& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.item != b.item) return a.item < b.item;
    return a.user < b.user;
  });
  std::vector<double> truth;
  for (auto& x : batch) truth.push_back(x.rating);
  double dcg = 0;
  for (std::size_t r = 0; r < std::min(k, truth.size()); ++r) dcg += (std::pow(2.0, truth[r]) - 1) / std::log2(r + 2.0);
  std::sort(truth.rbegin(), truth.rend());
  double idcg = 0;
  for (std::size_t r = 0; r < std::min(k, truth.size()); ++r) idcg += (std::pow(2.0, truth[r]) - 1) / std::log2(r + 2.0);
  return idcg == 0 ? 1.0 : dcg / idcg;
}

std::vector<ScoredRating> random_scored(std::mt19937_64& rng, std::size_t count) {
  std::uniform_int_distribution<int> r5(0, 5), slot(0, 6);
  std::uniform_real_distribution<double> s(0, 5);
  std::vector<ScoredRating> out(count);
  for (std::size_t n = 0; n < count; ++n) {
    auto& x = out[n];
    // Distinct (user, item) pairs, many shared items.
    x.user = static_cast<Index>(n % 51);
    x.item = static_cast<Index>(n / 51 * 7 + slot(rng));
    x.score = std::round(s(rng) * 4) / 4;  // plenty of ties
    x.rating = r5(rng);
    x.greenness = s(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("gdcg examples") {
  std::vector<RankedList> one = {list_of({5})};
  CHECK(gdcg_at_k(one, 10) == 31.0);
  std::vector<RankedList> zero = {list_of({0, 0, 0})};
  CHECK(gdcg_at_k(zero, 10) == 0.0);
  std::vector<RankedList> ex = {list_of({3, 1, 2})};
  CHECK(gdcg_at_k(ex, 3) == doctest::Approx(7 + 1 / std::log2(3.0) + 1.5));
  CHECK(gdcg_at_k(ex, 3) == doctest::Approx(9.1309).epsilon(1e-4));
  CHECK(gdcg_at_k(ex, 1) == 7.0);
  std::vector<RankedList> none;
  CHECK_THROWS_AS(gdcg_at_k(none, 10), ValidationError);
}

TEST_CASE("gndcg examples") {
  std::vector<RankedList> sorted = {list_of({5, 3, 1})};
  CHECK(gndcg_at_k(sorted, 10) == 1.0);
  std::vector<RankedList> ex = {list_of({3, 1, 2})};
  CHECK(gndcg_at_k(ex, 3) == doctest::Approx(9.1309 / 9.3927).epsilon(1e-4));
  CHECK(gndcg_at_k(ex, 3) == doctest::Approx(0.9721).epsilon(1e-4));
  MetricDiagnostics diag;
  std::vector<RankedList> zero = {list_of({0, 0})};
  CHECK(gndcg_at_k(zero, 5, &diag) == 1.0);
  CHECK(diag.zero_ideal_lists == 1);
}

TEST_CASE("gndcg ideal equals the exhaustive maximum over permutations") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(1, 8), users(1, 4), half(0, 10), kk(1, 10);
  for (int t = 0; t < 200; ++t) {
    std::vector<RankedList> lists(users(rng));
    double best_total = 0, actual_total = 0;
    const std::size_t k = kk(rng);
    for (auto& l : lists) {
      std::vector<double> g(len(rng));
      for (auto& x : g) x = half(rng) / 2.0;
      for (std::size_t n = 0; n < g.size(); ++n) l.entries.push_back({static_cast<Index>(n), 0, 0, g[n]});
      actual_total += list_gdcg(l, k);
      std::vector<std::size_t> perm(g.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      double best = 0;
      do {
        std::vector<double> p;
        for (auto n : perm) p.push_back(g[n]);
        best = std::max(best, naive_gdcg(p, k));
      } while (std::next_permutation(perm.begin(), perm.end()));
      RankedList ideal = l;
      order_by_greenness(ideal);
      REQUIRE(list_gdcg(ideal, k) == doctest::Approx(best).epsilon(1e-15));
      best_total += best;
    }
    const double expected = best_total == 0 ? 1.0 : actual_total / best_total;
    CHECK(gndcg_at_k(lists, k) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("batch ndcg example and naive reference") {
  std::vector<ScoredRating> b = {{0, 0, 3, 1, 0}, {0, 1, 2, 5, 0}, {0, 2, 1, 0, 0}};
  const double dcg = 1 + 31 / std::log2(3.0), idcg = 31 + 1 / std::log2(3.0);
  CHECK(dcg == doctest::Approx(20.558).epsilon(1e-4));
  CHECK(batch_ndcg(b, 3) == doctest::Approx(dcg / idcg));
  CHECK(batch_ndcg(b, 3) == doctest::Approx(0.650).epsilon(1e-3));

  std::vector<ScoredRating> perfect = {{0, 0, 3, 5, 0}, {0, 1, 2, 4, 0}, {0, 2, 1, 1, 0}};
  CHECK(batch_ndcg(perfect, 3) == 1.0);
  auto reversed = perfect;
  for (auto& x : reversed) x.score = -x.score;
  CHECK(batch_ndcg(reversed, 3) < 1.0);

  bool zero = false;
  std::vector<ScoredRating> zeros = {{0, 0, 3, 0, 0}};
  CHECK(batch_ndcg(zeros, 3, &zero) == 1.0);
  CHECK(zero);

  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    auto s = random_scored(rng, 1 + t % 120);
    for (std::size_t k : {1, 10, 50}) CHECK(testutil::rel_err(batch_ndcg(s, k), naive_ndcg(s, k)) <= 1e-12);
  }
}

TEST_CASE("ndcg_batched keeps the partial batch and is deterministic") {
  auto batches = make_batches(250, {100, 5});
  REQUIRE(batches.size() == 3);
  CHECK(batches[2].size() == 50);
  std::vector<int> seen(250, 0);
  for (auto& b : batches)
    for (auto n : b) ++seen[n];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

  std::mt19937_64 rng(3);
  auto s = random_scored(rng, 437);
  BatchOptions o{100, 9};
  double expected = 0;
  for (auto& b : make_batches(s.size(), o)) {
    std::vector<ScoredRating> part;
    for (auto n : b) part.push_back(s[n]);
    expected += naive_ndcg(part, 10);
  }
  expected /= 5;
  CHECK(testutil::rel_err(ndcg_batched(s, 10, o), expected) <= 1e-12);
  CHECK(ndcg_batched(s, 10, o, Exec::Serial) == ndcg_batched(s, 10, o, Exec::Parallel));
  CHECK(ndcg_batched(s, 10, o) == ndcg_batched(s, 10, o));
}

TEST_CASE("metrics are bounded and invariant to user order") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    auto s = random_scored(rng, 200);
    auto m = evaluate_scored(s, kDefaultKs, {100, 1});
    for (std::size_t n = 0; n < m.ks.size(); ++n) {
      CHECK(m.ndcg[n] >= 0.0);
      CHECK(m.ndcg[n] <= 1.0);
      CHECK(m.gndcg[n] >= 0.0);
      CHECK(m.gndcg[n] <= 1.0);
    }
    // Relabel users with a permutation; per-user lists are unchanged as sets.
    std::vector<Index> relabel(51);
    std::iota(relabel.begin(), relabel.end(), Index{0});
    std::shuffle(relabel.begin(), relabel.end(), rng);
    auto lists = user_lists(s);
    auto t2 = s;
    for (auto& x : t2) x.user = relabel[x.user];
    auto lists2 = user_lists(t2);
    for (std::size_t k : kDefaultKs) CHECK(gndcg_at_k(lists2, k) == doctest::Approx(gndcg_at_k(lists, k)).epsilon(1e-12));
  }
}

TEST_CASE("gndcg is one exactly when every list is greenness ordered") {
  std::vector<RankedList> l = {list_of({4, 4, 2}), list_of({1})};
  CHECK(gndcg_at_k(l, 10) == 1.0);
  l[0] = list_of({4, 2, 4});
  CHECK(gndcg_at_k(l, 10) < 1.0);
}

TEST_CASE("require_greenness lists missing items") {
  auto d = testutil::make_dataset({{"u", "a", 1}, {"u", "b", 2}, {"v", "c", 3}});
  footprint::GreennessTable t;
  t.items["a"] = {1.0, 4.0};
  std::vector<std::size_t> rows = {0, 1, 2};
  try {
    require_greenness(t, d, rows);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("b") != std::string::npos);
    CHECK(msg.find("c") != std::string::npos);
  }
  std::vector<std::size_t> ok = {0};
  CHECK(require_greenness(t, d, ok)[0] == 4.0);
}

TEST_CASE("global mean ties fall back to the item order") {
  std::vector<ScoredRating> s = {{0, 3, 4, 5, 1}, {0, 1, 4, 2, 3}, {1, 2, 4, 1, 0}};
  auto lists = user_lists(s);
  REQUIRE(lists.size() == 2);
  CHECK(lists[0].entries[0].item == 1);
  CHECK(lists[0].entries[1].item == 3);
}

TEST_CASE("aggregate and report csv") {
  SplitMetrics a{{10}, {0.5}, {0.2}, {}}, b{{10}, {0.7}, {0.4}, {}};
  std::vector<SplitMetrics> s = {a, b};
  auto rows = aggregate("svd", 1.0, s);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mean == doctest::Approx(0.6));
  CHECK(rows[0].std == doctest::Approx(std::sqrt(0.02)));
  std::ostringstream out;
  write_report_csv(out, rows);
  CHECK(out.str().rfind("algo,alpha,k,metric,mean,std,n_splits\n", 0) == 0);
  CHECK(out.str().find("svd,1,10,ndcg,0.6") != std::string::npos);
  CHECK(format_number(0.1) == "0.1");
  std::vector<double> one = {3.0};
  CHECK(sample_std(one) == 0.0);
}
