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
#include <map>
#include <set>

#include "doctest.h"
#include "greenrec/error.hpp"
#include "greenrec/prep.hpp"
#include "greenrec/synth.hpp"
#include "support.hpp"

using namespace greenrec;
using namespace greenrec::prep;

namespace {

using Pair = std::pair<std::string, std::string>;

// Straightforward replay of the five filter steps on (user id, item id) pairs.
std::set<Pair> naive_prefilter(const Dataset& d, std::size_t min_items, double min_mean,
                               const std::function<bool(const std::string&)>& keep) {
  std::vector<Pair> live;
  for (const auto& x : d.interactions) live.push_back({d.users.id(x.user), d.items.id(x.item)});
  auto item_counts = [&] {
    std::map<std::string, std::size_t> c;
    for (auto& p : live) ++c[p.second];
    return c;
  };
  auto user_counts = [&] {
    std::map<std::string, std::size_t> c;
    for (auto& p : live) ++c[p.first];
    return c;
  };
  auto ic = item_counts();
  std::erase_if(live, [&](const Pair& p) { return ic[p.second] < min_items; });
  if (keep) std::erase_if(live, [&](const Pair& p) { return !keep(p.second); });
  // Step 4 in user index order.
  for (Index u = 0; u < d.n_users(); ++u) {
    const std::string& uid = d.users.id(u);
    auto uc = user_counts();
    if (uc[uid] != 1) continue;
    auto it = std::find_if(live.begin(), live.end(), [&](const Pair& p) { return p.first == uid; });
    ic = item_counts();
    if (ic[it->second] - 1 >= min_items) live.erase(it);
  }
  auto uc = user_counts();
  std::map<std::string, std::vector<double>> activity;
  for (auto& p : live) activity[p.second].push_back(static_cast<double>(uc[p.first]));
  std::set<std::string> sparse;
  for (auto& [item, acts] : activity) {
    double s = 0;
    for (double a : acts) s += a;
    if (s / static_cast<double>(acts.size()) < min_mean) sparse.insert(item);
  }
  std::erase_if(live, [&](const Pair& p) { return sparse.count(p.second) > 0; });
  return {live.begin(), live.end()};
}

std::set<Pair> pairs_of(const Dataset& d) {
  std::set<Pair> out;
  for (const auto& x : d.interactions) out.insert({d.users.id(x.user), d.items.id(x.item)});
  return out;
}

}  // namespace

TEST_CASE("prefilter drops an item with 19 ratings at threshold 20") {
  std::vector<testutil::Triple> t;
  for (int u = 0; u < 25; ++u) {
    t.push_back({"u" + std::to_string(u), "big", 5});
    if (u < 19) t.push_back({"u" + std::to_string(u), "small", 4});
  }
  auto d = testutil::make_dataset(t);
  auto r = prefilter(d, {.min_item_ratings = 20, .min_user_mean = 1});
  CHECK(r.report.sparse_items == 1);
  CHECK_FALSE(r.dataset.items.find("small").has_value());
  CHECK(r.dataset.items.find("big").has_value());
}

TEST_CASE("prefilter leaves a compliant dataset unchanged") {
  std::vector<testutil::Triple> t;
  for (int u = 0; u < 4; ++u)
    for (int i = 0; i < 3; ++i) t.push_back({"u" + std::to_string(u), "i" + std::to_string(i), 3});
  auto d = testutil::make_dataset(t);
  auto r = prefilter(d, {.min_item_ratings = 4, .min_user_mean = 3});
  CHECK(pairs_of(r.dataset) == pairs_of(d));
  CHECK(r.report.interactions_out == d.size());
}

TEST_CASE("prefilter to empty is an error") {
  auto d = testutil::make_dataset({{"a", "x", 1}});
  CHECK_THROWS_AS(prefilter(d, {}), FilterError);
}

TEST_CASE("prefilter matches a naive replay on long-tail data") {
  synth::SynthParams p;
  p.n_users = 500;
  p.n_items = 200;
  p.n_interactions = 6000;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    p.seed = seed;
    const auto data = synth::generate(p).dataset;
    auto keep = [](const std::string& id) { return id.back() != '7'; };
    for (auto [mi, mm] : {std::pair<std::size_t, double>{20, 20}, {5, 8}, {3, 2}}) {
      PrefilterOptions o{mi, mm, keep};
      std::set<Pair> expected = naive_prefilter(data, mi, mm, keep);
      if (expected.empty()) {
        CHECK_THROWS_AS(prefilter(data, o), FilterError);
        continue;
      }
      CHECK(pairs_of(prefilter(data, o).dataset) == expected);
    }
  }
}

TEST_CASE("split of a single interaction is underfilled") {
  auto d = testutil::make_dataset({{"a", "x", 4}});
  auto s = split(d, {}, 1);
  CHECK(s.test.empty());
  CHECK(s.validation.empty());
  CHECK(s.train.size() == 1);
  CHECK(s.underfilled);
  CHECK(s.diagnostic.find("underfilled") != std::string::npos);
}

namespace {

void check_split_invariants(const Dataset& d, const SplitResult& s) {
  std::vector<int> seen(d.size(), 0);
  for (auto r : s.train) ++seen[r];
  for (auto r : s.validation) ++seen[r];
  for (auto r : s.test) ++seen[r];
  for (int c : seen) REQUIRE(c == 1);
  std::set<Index> users, items;
  for (auto r : s.train) {
    users.insert(d.interactions[r].user);
    items.insert(d.interactions[r].item);
  }
  for (const auto* part : {&s.validation, &s.test}) {
    for (auto r : *part) {
      REQUIRE(users.count(d.interactions[r].user));
      REQUIRE(items.count(d.interactions[r].item));
    }
  }
}

}  // namespace

TEST_CASE("split invariants over random datasets") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    std::uniform_int_distribution<int> dim(2, 40);
    auto d = testutil::random_dataset(rng, dim(rng), dim(rng), 0.3);
    if (d.size() == 0) continue;
    auto a = split(d, {}, 100 + t);
    check_split_invariants(d, a);
    auto b = split(d, {}, 100 + t);
    CHECK(a.train == b.train);
    CHECK(a.validation == b.validation);
    CHECK(a.test == b.test);
    if (!a.underfilled) {
      CHECK(a.test.size() == static_cast<std::size_t>(std::ceil(0.2 * d.size() - 1e-9)));
      CHECK(a.validation.size() == a.test.size());
    }
  }
}

TEST_CASE("split keeps the rating histogram close to the full data") {
  synth::SynthParams p = synth::SynthParams::preset("default");
  p.seed = 4;
  auto d = synth::generate(p).dataset;
  auto s = split(d, {}, 0);
  CHECK_FALSE(s.underfilled);
  auto hist = [&](const std::vector<std::size_t>& rows) {
    std::array<double, 6> h{};
    for (auto r : rows) h[static_cast<int>(d.interactions[r].rating)] += 1.0 / static_cast<double>(rows.size());
    return h;
  };
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto full = hist(all);
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    const auto h = hist(*part);
    for (int b = 0; b < 6; ++b) CHECK(std::abs(h[b] - full[b]) <= 0.05);
  }
}

TEST_CASE("make_splits composes split and is deterministic") {
  std::mt19937_64 rng(2);
  auto d = testutil::random_dataset(rng, 30, 30, 0.3);
  auto many = make_splits(d, 5, 40);
  REQUIRE(many.size() == 5);
  std::set<std::uint64_t> seeds;
  for (auto& s : many) seeds.insert(s.seed);
  CHECK(seeds.size() == 5);
  auto one = make_splits(d, 1, 40);
  auto direct = split(d, {}, 40);
  CHECK(one[0].test == direct.test);
  CHECK(one[0].validation == direct.validation);
  auto again = make_splits(d, 5, 40);
  for (int s = 0; s < 5; ++s) CHECK(again[s].test == many[s].test);
}

TEST_CASE("split manifest round-trips") {
  std::mt19937_64 rng(8);
  auto d = testutil::random_dataset(rng, 20, 20, 0.4);
  auto s = split(d, {}, 3);
  auto dir = testutil::temp_dir("manifest");
  write_manifest(dir / "split.csv", d, s);
  auto back = read_manifest(dir / "split.csv", d);
  CHECK(back.train == s.train);
  CHECK(back.validation == s.validation);
  CHECK(back.test == s.test);
  CHECK(back.seed == 3);
  CHECK(std::filesystem::exists(dir / "split.json"));
}
