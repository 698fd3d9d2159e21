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
#include <map>
#include <set>

#include "doctest.h"
#include "greenrec/error.hpp"
#include "greenrec/synth.hpp"
#include "support.hpp"

using namespace greenrec;
using namespace greenrec::synth;

TEST_CASE("default preset shape") {
  auto p = SynthParams::preset("default");
  p.seed = 11;
  auto data = generate(p);
  const auto& d = data.dataset;
  CHECK(d.size() == p.n_interactions);

  std::set<std::pair<Index, Index>> pairs;
  std::size_t fives = 0;
  std::map<Index, std::size_t> per_item;
  for (const auto& x : d.interactions) {
    pairs.insert({x.user, x.item});
    fives += x.rating == 5.0;
    ++per_item[x.item];
    REQUIRE(x.rating >= 0.0);
    REQUIRE(x.rating <= 5.0);
  }
  CHECK(pairs.size() == d.size());
  CHECK(static_cast<double>(fives) / static_cast<double>(d.size()) == doctest::Approx(0.77).epsilon(0.02 / 0.77));

  std::vector<std::size_t> counts;
  for (Index i = 0; i < p.n_items; ++i) counts.push_back(per_item.count(i) ? per_item[i] : 0);
  std::sort(counts.rbegin(), counts.rend());
  const std::size_t top = std::max<std::size_t>(1, counts.size() / 100);
  double top_mean = 0;
  for (std::size_t n = 0; n < top; ++n) top_mean += static_cast<double>(counts[n]) / static_cast<double>(top);
  const double median = static_cast<double>(counts[counts.size() / 2]);
  CHECK(top_mean >= 10 * std::max(median, 1.0));

  std::vector<double> g;
  for (const auto& [id, rec] : data.greenness.items) {
    REQUIRE(rec.greenness >= 0.0);
    REQUIRE(rec.greenness <= 5.0);
    REQUIRE(rec.co2_kg > 0.0);
    g.push_back(rec.greenness);
  }
  CHECK(g.size() == p.n_items);
  std::sort(g.begin(), g.end());
  CHECK(std::abs(g[g.size() / 2] - p.greenness_mode) <= 0.5);
  // Histogram mode over unit bins.
  std::map<int, int> bins;
  for (double x : g) ++bins[std::min(4, static_cast<int>(x))];
  auto mode = std::max_element(bins.begin(), bins.end(), [](auto& a, auto& b) { return a.second < b.second; });
  CHECK(std::abs(mode->first + 0.5 - p.greenness_mode) <= 0.5);
}

TEST_CASE("synth is deterministic per seed") {
  auto p = SynthParams::preset("tiny");
  p.seed = 3;
  auto a = generate(p), b = generate(p);
  REQUIRE(a.dataset.size() == b.dataset.size());
  for (std::size_t n = 0; n < a.dataset.size(); ++n) {
    CHECK(a.dataset.interactions[n].rating == b.dataset.interactions[n].rating);
    CHECK(a.dataset.users.id(a.dataset.interactions[n].user) == b.dataset.users.id(b.dataset.interactions[n].user));
  }
  p.seed = 4;
  auto c = generate(p);
  bool differs = false;
  for (std::size_t n = 0; n < std::min(a.dataset.size(), c.dataset.size()); ++n)
    differs |= a.dataset.users.id(a.dataset.interactions[n].user) != c.dataset.users.id(c.dataset.interactions[n].user);
  CHECK(differs);
}

TEST_CASE("synth parameters are validated") {
  SynthParams p = SynthParams::preset("tiny");
  p.rating_pmf = {0.5, 0.5, 0.5, 0, 0, 0};
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = SynthParams::preset("tiny");
  p.n_interactions = p.n_users * p.n_items + 1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = SynthParams::preset("tiny");
  p.item_popularity_exponent = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK_THROWS_AS(SynthParams::preset("huge"), ValidationError);
  p = SynthParams::preset("tiny");
  p.apply(nlohmann::json{{"n_users", 10}, {"seed", 5}});
  CHECK(p.n_users == 10);
  CHECK(p.seed == 5);
}

TEST_CASE("synth writes loadable files") {
  auto p = SynthParams::preset("tiny");
  auto data = generate(p);
  auto dir = testutil::temp_dir("synth");
  write(dir, data);
  auto back = load_interactions(dir / "interactions.csv");
  CHECK(back.dataset.size() == data.dataset.size());
  auto g = footprint::load_greenness(dir / "greenness.csv");
  CHECK(g.items.size() == data.greenness.items.size());
}
