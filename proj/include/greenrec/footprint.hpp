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

#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greenrec/core.hpp"

namespace greenrec::footprint {

enum class Unit { Grams, Pint, Cup, Teaspoon, Tablespoon, Pinch };

enum class Category { Liquids, SugarsAndSweeteners, Flours, OilsAndFats, Spices, Nuts, FruitsAndVegetables };

inline constexpr double kPinchGrams = 0.36;
inline constexpr double kDefaultThresholdGrams = 50.0;

Unit parse_unit(std::string_view name);
Category parse_category(std::string_view name);
std::string_view to_string(Unit unit);
std::string_view to_string(Category category);

/// Grams per one unit of `unit` for `category`, or nullopt where the table
/// has "na.". Grams → 1, Pinch → 0.36 for every category.
std::optional<double> grams_per_unit(Category category, Unit unit);

/// The conversion table as shipped (CSV text, one row per category).
std::string_view conversion_table_csv();

double to_grams(Category category, Unit unit, double amount);

struct IngredientQuantity {
  std::string name;
  double amount = 0.0;
  Unit unit = Unit::Grams;
  Category category = Category::Liquids;
};

struct EmissionFactor {
  std::string ingredient;
  double kg_co2_per_kg = 0.0;
};

/// ingredient name → factor. CSV columns `ingredient,kg_co2_per_kg`.
std::map<std::string, double> load_emission_factors(const std::filesystem::path& path);
std::map<std::string, double> load_emission_factors(std::istream& in);

struct IngredientMass {
  double grams = 0.0;
  double kg_co2_per_kg = 0.0;
};

struct RecipeCo2 {
  double kg = 0.0;
  std::size_t ingredients_used = 0;
  bool no_significant_ingredients = false;
};

/// Weighted sum over ingredients of at least `threshold_g` grams.
RecipeCo2 recipe_co2(std::span<const IngredientMass> ingredients, double threshold_g = kDefaultThresholdGrams);

/// ln(1 + 1/c), the uncalibrated greenness of a CO2-eq value in kg.
double raw_greenness(double co2_kg);

/// Min-max range of raw greenness over a reference set of CO2-eq values.
struct GreennessCalibration {
  double raw_min = 0.0;
  double raw_max = 1.0;
};

GreennessCalibration calibrate(std::span<const double> co2_values);

/// Affine map of raw greenness onto [0,5] using the calibration, clamped.
double greenness(double co2_kg, const GreennessCalibration& calibration);

/// Fixed-scale alternative: min(5, scale * raw). Needs no reference set.
double greenness_fixed_scale(double co2_kg, double scale);

/// Scale for which greenness_fixed_scale(co2_kg, scale) == g (g < 5).
double fit_fixed_scale(double co2_kg, double g);

struct GreennessRecord {
  double co2_kg = 0.0;
  double greenness = 0.0;
};

struct GreennessTable {
  std::map<std::string, GreennessRecord> items;
  GreennessCalibration calibration;

  /// Computes greenness for every item from its CO2 with a calibration fitted
  /// over the whole table.
  static GreennessTable from_co2(const std::map<std::string, double>& co2_by_item);

  /// Greenness per dense item index of `items`; NaN where the table has no
  /// entry.
  std::vector<double> aligned(const IdIndex& item_index) const;
};

/// CSV `item_id,co2_kg[,greenness]`. When the greenness column is absent (or
/// `recompute` is set) values are derived from a calibration over the file.
GreennessTable load_greenness(const std::filesystem::path& path, bool recompute = false);
GreennessTable load_greenness(std::istream& in, bool recompute = false);
void write_greenness(const std::filesystem::path& path, const GreennessTable& table);
void write_greenness(std::ostream& out, const GreennessTable& table);

}  // namespace greenrec::footprint
