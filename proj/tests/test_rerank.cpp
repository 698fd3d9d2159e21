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
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "greenrec/error.hpp"
#include "greenrec/rerank.hpp"

using namespace greenrec;
using namespace greenrec::eval;
using namespace greenrec::rerank;

namespace {

std::vector<ScoredRating> random_scored(std::mt19937_64& rng, std::size_t n, std::size_t users) {
  std::uniform_int_distribution<int> r5(0, 5);
  std::uniform_int_distribution<Index> u(0, static_cast<Index>(users - 1)), i(0, 200);
  std::uniform_real_distribution<double> s(0, 5), g(0, 5);
  std::vector<ScoredRating> out(n);
  for (auto& x : out) x = {u(rng), i(rng), s(rng), static_cast<double>(r5(rng)), g(rng)};
  return out;
}

}  // namespace

TEST_CASE("utility examples") {
  CHECK(utility(4.8, 1, 0.5) == doctest::Approx(2.9));
  CHECK(utility(4.2, 5, 0.5) == doctest::Approx(4.6));
  CHECK(utility(3.3, 1.7, 1.0) == 3.3);
  CHECK(utility(3.3, 1.7, 0.0) == 1.7);
  CHECK_THROWS_AS(utility(1, 1, 1.5), DomainError);
  CHECK_THROWS_AS(utility(1, 1, -0.1), DomainError);

  RankedList l{0, {{1, 4.8, 5, 1}, {2, 4.2, 4, 5}}};
  auto r = rerank_list(l, 0.5);
  CHECK(r.entries[0].item == 2);
  CHECK(r.entries[0].score == doctest::Approx(4.6));
}

TEST_CASE("rerank endpoints and tie rule") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    RankedList l{0, {}};
    std::uniform_real_distribution<double> s(0, 5);
    for (Index i = 0; i < 12; ++i) l.entries.push_back({i, s(rng), 0, std::round(s(rng))});
    order_by_score(l);
    auto one = rerank_list(l, 1.0);
    for (std::size_t n = 0; n < l.entries.size(); ++n) CHECK(one.entries[n].item == l.entries[n].item);
    auto zero = rerank_list(l, 0.0);
    std::vector<RankedList> z = {zero};
    for (std::size_t k : {1, 5, 20}) CHECK(gndcg_at_k(z, k) == 1.0);
    std::set<Index> before, after;
    for (auto& e : l.entries) before.insert(e.item);
    for (auto& e : rerank_list(l, 0.37).entries) after.insert(e.item);
    CHECK(before == after);
  }
  RankedList tie{0, {{7, 2, 0, 4}, {3, 4, 0, 2}}};
  auto r = rerank_list(tie, 0.5);
  CHECK(r.entries[0].item == 3);
}

TEST_CASE("scores are clipped before mixing") {
  RankedList l{0, {{1, 9.0, 0, 0}, {2, 5.0, 0, 1}}};
  // Clipped to 5 both, so item 2 wins on greenness.
  CHECK(rerank_list(l, 0.9).entries[0].item == 2);
}

TEST_CASE("per-list gdcg is non-increasing in alpha") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> s(0, 5);
  for (int t = 0; t < 200; ++t) {
    RankedList l{0, {}};
    for (Index i = 0; i < 10; ++i) l.entries.push_back({i, s(rng), 0, s(rng)});
    const auto alphas = default_alphas();
    double prev = -1;
    for (auto it = alphas.rbegin(); it != alphas.rend(); ++it) {
      // Pairwise swaps toward greenness order only happen as alpha drops, so
      // the full-list GDCG at horizon = list length is monotone.
      const double g = list_gdcg(rerank_list(l, *it), l.entries.size());
      CHECK(g >= prev - 1e-12);
      prev = g;
    }
  }
}

TEST_CASE("sweep endpoints on scored data") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto s = random_scored(rng, 300, 25);
    std::vector<double> alphas = {0.0, 0.5, 1.0};
    BatchOptions b{100, 4};
    auto pts = alpha_sweep_scored(s, alphas, kDefaultKs, b);
    auto base = evaluate_scored(s, kDefaultKs, b);
    for (auto& p : pts) {
      const std::size_t n = std::find(kDefaultKs.begin(), kDefaultKs.end(), p.k) - kDefaultKs.begin();
      if (p.alpha == 1.0) {
        CHECK(p.ndcg == base.ndcg[n]);
        CHECK(p.gndcg == base.gndcg[n]);
        CHECK(p.ndcg_rel == 0.0);
        CHECK(p.gndcg_rel == 0.0);
      }
      if (p.alpha == 0.0) {
        CHECK(p.gndcg == 1.0);
        CHECK(p.gndcg >= base.gndcg[n]);
      }
    }
    CHECK(pts.size() == alphas.size() * kDefaultKs.size());
  }
}

TEST_CASE("alpha and k parsing") {
  auto a = default_alphas();
  REQUIRE(a.size() == 11);
  CHECK(a[3] == 0.3);
  CHECK(a.back() == 1.0);
  CHECK(parse_alphas("0:1:0.1") == a);
  CHECK(parse_alphas("0.2,0.6,1") == std::vector<double>{0.2, 0.6, 1.0});
  CHECK(parse_alphas("1") == std::vector<double>{1.0});
  CHECK_THROWS_AS(parse_alphas("0:2:0.5"), DomainError);
  CHECK_THROWS_AS(parse_alphas("a,b"), ValidationError);
  CHECK(parse_ks("10,20,50") == kDefaultKs);
  CHECK_THROWS_AS(parse_ks("0"), ValidationError);
  CHECK(relative_change(1.5, 1.0) == doctest::Approx(0.5));
  CHECK(relative_change(0, 0) == 0.0);
}

TEST_CASE("tradeoff csv") {
  std::vector<TradeoffPoint> p = {{1.0, 10, 0.9, 0.4, 0, 0}, {0.5, 10, 0.8, 0.6, -0.1, 0.5}};
  std::ostringstream out;
  write_tradeoff_csv(out, "svd", p);
  CHECK(out.str() == "algo,alpha,k,ndcg,gndcg,ndcg_rel,gndcg_rel\nsvd,1,10,0.9,0.4,0,0\nsvd,0.5,10,0.8,0.6,-0.1,0.5\n");
}
