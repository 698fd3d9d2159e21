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
#include <random>
#include <sstream>

#include "doctest.h"
#include "greenrec/error.hpp"
#include "greenrec/footprint.hpp"

using namespace greenrec;
using namespace greenrec::footprint;

namespace {

struct Cell {
  Category category;
  Unit unit;
  double grams;
};

// Transcribed from the published conversion table.
const Cell kTable[] = {
    {Category::Liquids, Unit::Pint, 473.18},           {Category::Liquids, Unit::Cup, 236.59},
    {Category::Liquids, Unit::Teaspoon, 4.93},         {Category::Liquids, Unit::Tablespoon, 14.79},
    {Category::SugarsAndSweeteners, Unit::Pint, 414.02}, {Category::SugarsAndSweeteners, Unit::Cup, 227.36},
    {Category::SugarsAndSweeteners, Unit::Teaspoon, 4.74}, {Category::SugarsAndSweeteners, Unit::Tablespoon, 14.21},
    {Category::Flours, Unit::Pint, 250.31},            {Category::Flours, Unit::Cup, 125.16},
    {Category::Flours, Unit::Teaspoon, 2.61},          {Category::Flours, Unit::Tablespoon, 7.82},
    {Category::OilsAndFats, Unit::Pint, 434.38},       {Category::OilsAndFats, Unit::Cup, 217.66},
    {Category::OilsAndFats, Unit::Teaspoon, 4.53},     {Category::OilsAndFats, Unit::Tablespoon, 13.6},
    {Category::Spices, Unit::Pint, 264.98},            {Category::Spices, Unit::Cup, 132.49},
    {Category::Spices, Unit::Teaspoon, 2.76},          {Category::Spices, Unit::Tablespoon, 8.28},
    {Category::Nuts, Unit::Pint, 217.66},              {Category::Nuts, Unit::Cup, 108.83},
    {Category::FruitsAndVegetables, Unit::Pint, 104.10}, {Category::FruitsAndVegetables, Unit::Cup, 150},
};

const Category kCategories[] = {Category::Liquids, Category::SugarsAndSweeteners, Category::Flours,
                                Category::OilsAndFats, Category::Spices, Category::Nuts,
                                Category::FruitsAndVegetables};

}  // namespace

TEST_CASE("every table cell is reproduced bit-exactly") {
  for (const auto& c : kTable) {
    CAPTURE(to_string(c.category));
    CAPTURE(to_string(c.unit));
    REQUIRE(grams_per_unit(c.category, c.unit).has_value());
    CHECK(*grams_per_unit(c.category, c.unit) == c.grams);
    CHECK(to_grams(c.category, c.unit, 1.0) == c.grams);
  }
  for (Category cat : kCategories) {
    CHECK(to_grams(cat, Unit::Pinch, 1.0) == 0.36);
    CHECK(to_grams(cat, Unit::Grams, 12.5) == 12.5);
  }
  for (Category cat : {Category::Nuts, Category::FruitsAndVegetables})
    for (Unit u : {Unit::Teaspoon, Unit::Tablespoon}) CHECK_FALSE(grams_per_unit(cat, u).has_value());
}

TEST_CASE("to_grams examples") {
  CHECK(to_grams(Category::Liquids, Unit::Cup, 1.0) == 236.59);
  CHECK(to_grams(Category::Flours, Unit::Tablespoon, 2.0) == doctest::Approx(15.64));
  CHECK(to_grams(Category::Nuts, Unit::Grams, 12.5) == 12.5);
  try {
    to_grams(Category::Nuts, Unit::Teaspoon, 1.0);
    FAIL("expected a conversion error");
  } catch (const ConversionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("na. conversion") != std::string::npos);
    CHECK(msg.find("nuts") != std::string::npos);
    CHECK(msg.find("teaspoon") != std::string::npos);
  }
  CHECK_THROWS_AS(to_grams(Category::Liquids, Unit::Cup, -1.0), ConversionError);
}

TEST_CASE("unit and category names parse") {
  CHECK(parse_unit("Cup") == Unit::Cup);
  CHECK(parse_unit("cups") == Unit::Cup);
  CHECK(parse_unit("tbsp") == Unit::Tablespoon);
  CHECK(parse_unit("g") == Unit::Grams);
  CHECK(parse_category("oils and fats") == Category::OilsAndFats);
  CHECK(parse_category("fruits_and_vegetables") == Category::FruitsAndVegetables);
  CHECK_THROWS_AS(parse_unit("bushel"), ConversionError);
}

TEST_CASE("to_grams is linear in the amount") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amt(0.01, 100.0);
  for (const auto& c : kTable) {
    const double a = amt(rng), b = amt(rng);
    const double lhs = to_grams(c.category, c.unit, a + b);
    const double rhs = to_grams(c.category, c.unit, a) + to_grams(c.category, c.unit, b);
    CHECK(std::abs(lhs - rhs) <= 4 * std::numeric_limits<double>::epsilon() * lhs);
  }
}

TEST_CASE("recipe_co2 examples") {
  std::vector<IngredientMass> one = {{1000, 2.0}};
  CHECK(recipe_co2(one).kg == 2.0);
  std::vector<IngredientMass> two = {{500, 4.0}, {30, 100.0}};
  auto r = recipe_co2(two, 50);
  CHECK(r.kg == doctest::Approx(2.0));
  CHECK(r.ingredients_used == 1);
  std::vector<IngredientMass> small = {{49.9, 1.0}};
  auto s = recipe_co2(small);
  CHECK(s.kg == 0.0);
  CHECK(s.no_significant_ingredients);
  std::vector<IngredientMass> bad = {{100, -1.0}};
  CHECK_THROWS_AS(recipe_co2(bad), DomainError);
}

TEST_CASE("recipe_co2 is permutation invariant and additive") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> g(0, 400), f(0, 30);
  for (int t = 0; t < 50; ++t) {
    std::vector<IngredientMass> a(6), b(5);
    for (auto& x : a) x = {g(rng), f(rng)};
    for (auto& x : b) x = {g(rng), f(rng)};
    auto joined = a;
    joined.insert(joined.end(), b.begin(), b.end());
    CHECK(recipe_co2(joined).kg == doctest::Approx(recipe_co2(a).kg + recipe_co2(b).kg));
    std::shuffle(joined.begin(), joined.end(), rng);
    CHECK(recipe_co2(joined).kg == doctest::Approx(recipe_co2(a).kg + recipe_co2(b).kg));
  }
}

TEST_CASE("calibrate examples") {
  std::vector<double> v = {0.1, 1, 100};
  auto c = calibrate(v);
  CHECK(c.raw_min == doctest::Approx(std::log(1.01)));
  CHECK(c.raw_min == doctest::Approx(0.00995).epsilon(1e-3));
  CHECK(c.raw_max == doctest::Approx(std::log(11.0)));
  CHECK(c.raw_max == doctest::Approx(2.3979).epsilon(1e-4));
  std::vector<double> same = {2.0, 2.0};
  CHECK_THROWS_AS(calibrate(same), CalibrationError);
  std::vector<double> pair = {0.5, 2.0};
  auto p = calibrate(pair);
  CHECK(p.raw_min == doctest::Approx(std::log(1.5)));
  CHECK(p.raw_max == doctest::Approx(std::log(3.0)));
}

TEST_CASE("greenness examples") {
  std::vector<double> v = {0.1, 1, 100};
  auto c = calibrate(v);
  CHECK(greenness(0.1, c) == doctest::Approx(5.0));
  CHECK(greenness(100, c) == doctest::Approx(0.0));
  const double expected = 5.0 * (std::log(2.0) - std::log(1.01)) / (std::log(11.0) - std::log(1.01));
  CHECK(greenness(1.0, c) == doctest::Approx(expected));
  CHECK(greenness(1.0, c) == doctest::Approx(1.430).epsilon(1e-3));
  CHECK_THROWS_AS(greenness(0.0, c), DomainError);
  CHECK_THROWS_AS(greenness(-2.0, c), DomainError);
}

TEST_CASE("greenness is bounded and monotone") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> logc(std::log(1e-6), std::log(1e6));
  for (int t = 0; t < 50; ++t) {
    std::vector<double> ref = {std::exp(logc(rng)), std::exp(logc(rng))};
    if (ref[0] == ref[1]) continue;
    auto cal = calibrate(ref);
    const double lo = std::min(ref[0], ref[1]), hi = std::max(ref[0], ref[1]);
    std::uniform_real_distribution<double> inside(std::log(lo), std::log(hi));
    for (int s = 0; s < 20; ++s) {
      double a = std::exp(inside(rng)), b = std::exp(inside(rng));
      if (a > b) std::swap(a, b);
      CHECK(greenness(a, cal) >= greenness(b, cal));
    }
  }
  std::vector<double> ref = {0.1, 10};
  auto cal = calibrate(ref);
  for (int t = 0; t < 10000; ++t) {
    const double g = greenness(std::exp(logc(rng)), cal);
    REQUIRE(g >= 0.0);
    REQUIRE(g <= 5.0);
  }
}

TEST_CASE("fixed-scale greenness and the 4.46 -> 3.37 fixture") {
  const double s = fit_fixed_scale(4.46, 3.37);
  CHECK(greenness_fixed_scale(4.46, s) == doctest::Approx(3.37));
  CHECK(greenness_fixed_scale(1e-6, s) == 5.0);
  CHECK_THROWS_AS(greenness_fixed_scale(1.0, 0.0), DomainError);
}

TEST_CASE("greenness table io") {
  std::istringstream in("item_id,co2_kg\nr1,0.5\nr2,2.0\nr3,1.0\n");
  auto t = load_greenness(in);
  CHECK(t.items.at("r1").greenness == doctest::Approx(5.0));
  CHECK(t.items.at("r2").greenness == doctest::Approx(0.0));
  CHECK(t.items.at("r3").greenness > 0.0);
  std::ostringstream out;
  write_greenness(out, t);
  std::istringstream back(out.str());
  auto u = load_greenness(back);
  for (const auto& [id, rec] : t.items) {
    CHECK(u.items.at(id).co2_kg == rec.co2_kg);
    CHECK(u.items.at(id).greenness == rec.greenness);
  }
  IdIndex items;
  items.intern("r2");
  items.intern("zz");
  auto aligned = t.aligned(items);
  CHECK(aligned[0] == doctest::Approx(0.0));
  CHECK(std::isnan(aligned[1]));

  std::istringstream bad("item_id,co2_kg\nr1,-1\n");
  CHECK_THROWS_AS(load_greenness(bad), RowError);
}

TEST_CASE("emission factors load") {
  std::istringstream in("ingredient,kg_co2_per_kg\nbeef,60\nonion,0.5\n");
  auto f = load_emission_factors(in);
  CHECK(f.at("beef") == 60.0);
  CHECK(f.size() == 2);
}
