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

#include "greenrec/footprint.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>

#include "greenrec/csv.hpp"
#include "greenrec/error.hpp"

namespace greenrec::footprint {

namespace {

#include "unit_table.inc"

constexpr std::array kCategoryNames{"liquids",  "sugars_and_sweeteners", "flours", "oils_and_fats",
                                    "spices",   "nuts",                  "fruits_and_vegetables"};
constexpr std::array kUnitNames{"grams", "pint", "cup", "teaspoon", "tablespoon", "pinch"};

// rows: categories; columns: pint, cup, teaspoon, tablespoon
using Table = std::array<std::array<std::optional<double>, 4>, kCategoryNames.size()>;

const Table& table() {
  static const Table parsed = [] {
    Table t{};
    std::istringstream in{std::string(kUnitTableCsv)};
    csv::Reader reader(in);
    std::vector<std::string> row;
    reader.next(row);  // header
    while (reader.next(row)) {
      const auto cat = static_cast<std::size_t>(parse_category(row.at(0)));
      for (std::size_t col = 0; col < 4; ++col) {
        const std::string& cell = row.at(col + 2);
        if (cell == "na.") continue;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) throw FormatError("bad conversion cell " + cell);
        t[cat][col] = v;
      }
    }
    return t;
  }();
  return parsed;
}

std::string normalize(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == ' ' || c == '-') c = '_';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

Unit parse_unit(std::string_view name) {
  const std::string n = normalize(name);
  if (n == "g" || n == "gram") return Unit::Grams;
  if (n == "tsp") return Unit::Teaspoon;
  if (n == "tbsp") return Unit::Tablespoon;
  for (std::size_t i = 0; i < kUnitNames.size(); ++i) {
    if (n == kUnitNames[i] || n == std::string(kUnitNames[i]) + "s")
      return static_cast<Unit>(i);
  }
  throw ConversionError("unknown unit '" + std::string(name) + "'");
}

Category parse_category(std::string_view name) {
  const std::string n = normalize(name);
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
    if (n == kCategoryNames[i]) return static_cast<Category>(i);
  throw ConversionError("unknown ingredient category '" + std::string(name) + "'");
}

std::string_view to_string(Unit unit) { return kUnitNames.at(static_cast<std::size_t>(unit)); }
std::string_view to_string(Category category) { return kCategoryNames.at(static_cast<std::size_t>(category)); }

std::string_view conversion_table_csv() { return kUnitTableCsv; }

std::optional<double> grams_per_unit(Category category, Unit unit) {
  switch (unit) {
    case Unit::Grams:
      return 1.0;
    case Unit::Pinch:
      return kPinchGrams;
    default:
      return table().at(static_cast<std::size_t>(category)).at(static_cast<std::size_t>(unit) - 1);
  }
}

double to_grams(Category category, Unit unit, double amount) {
  if (!(amount > 0.0) || !std::isfinite(amount))
    throw ConversionError("amount must be finite and positive, got " + std::to_string(amount));
  if (unit == Unit::Grams) return amount;
  auto rate = grams_per_unit(category, unit);
  if (!rate) {
    throw ConversionError("na. conversion for category '" + std::string(to_string(category)) + "' and unit '" +
                          std::string(to_string(unit)) + "'");
  }
  return amount * *rate;
}

std::map<std::string, double> load_emission_factors(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw SchemaError("emission factor file is empty");
  const int name_col = csv::column_index(row, "ingredient");
  const int factor_col = csv::column_index(row, "kg_co2_per_kg");
  if (name_col < 0 || factor_col < 0) throw SchemaError("emission factors need columns ingredient,kg_co2_per_kg");
  std::map<std::string, double> out;
  while (reader.next(row)) {
    const std::string& cell = row.at(factor_col);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !(v >= 0.0))
      throw RowError(reader.line(), "invalid emission factor '" + cell + "'");
    out[row.at(name_col)] = v;
  }
  return out;
}

std::map<std::string, double> load_emission_factors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return load_emission_factors(in);
}

RecipeCo2 recipe_co2(std::span<const IngredientMass> ingredients, double threshold_g) {
  RecipeCo2 out;
  for (const auto& ing : ingredients) {
    if (!(ing.grams >= 0.0) || !(ing.kg_co2_per_kg >= 0.0))
      throw DomainError("ingredient grams and emission factors must be non-negative");
    if (ing.grams < threshold_g) continue;
    out.kg += ing.grams / 1000.0 * ing.kg_co2_per_kg;
    ++out.ingredients_used;
  }
  out.no_significant_ingredients = out.ingredients_used == 0;
  return out;
}

double raw_greenness(double co2_kg) {
  if (!(co2_kg > 0.0) || !std::isfinite(co2_kg))
    throw DomainError("CO2-eq must be finite and positive, got " + std::to_string(co2_kg));
  return std::log1p(1.0 / co2_kg);
}

GreennessCalibration calibrate(std::span<const double> co2_values) {
  if (co2_values.empty()) throw CalibrationError("no CO2 values to calibrate on");
  const auto [lo, hi] = std::minmax_element(co2_values.begin(), co2_values.end());
  // raw greenness is decreasing in CO2
  GreennessCalibration cal{raw_greenness(*hi), raw_greenness(*lo)};
  if (!(cal.raw_min < cal.raw_max)) throw CalibrationError("degenerate calibration range: all CO2 values identical");
  return cal;
}

double greenness(double co2_kg, const GreennessCalibration& calibration) {
  if (!(calibration.raw_min < calibration.raw_max)) throw CalibrationError("invalid calibration range");
  const double raw = raw_greenness(co2_kg);
  const double g = 5.0 * (raw - calibration.raw_min) / (calibration.raw_max - calibration.raw_min);
  return std::clamp(g, 0.0, 5.0);
}

double greenness_fixed_scale(double co2_kg, double scale) {
  if (!(scale > 0.0)) throw DomainError("greenness scale must be positive");
  return std::min(5.0, scale * raw_greenness(co2_kg));
}

double fit_fixed_scale(double co2_kg, double g) {
  if (!(g > 0.0 && g < 5.0)) throw DomainError("target greenness must lie in (0,5)");
  return g / raw_greenness(co2_kg);
}

GreennessTable GreennessTable::from_co2(const std::map<std::string, double>& co2_by_item) {
  std::vector<double> values;
  values.reserve(co2_by_item.size());
  for (const auto& [id, c] : co2_by_item) values.push_back(c);
  GreennessTable t;
  t.calibration = calibrate(values);
  for (const auto& [id, c] : co2_by_item) t.items[id] = {c, greenness(c, t.calibration)};
  return t;
}

std::vector<double> GreennessTable::aligned(const IdIndex& item_index) const {
  std::vector<double> out(item_index.size(), std::numeric_limits<double>::quiet_NaN());
  for (Index i = 0; i < item_index.size(); ++i) {
    auto it = items.find(item_index.id(i));
    if (it != items.end()) out[i] = it->second.greenness;
  }
  return out;
}

GreennessTable load_greenness(std::istream& in, bool recompute) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw SchemaError("greenness file is empty");
  const int id_col = csv::column_index(row, "item_id");
  const int co2_col = csv::column_index(row, "co2_kg");
  const int g_col = csv::column_index(row, "greenness");
  if (id_col < 0 || co2_col < 0) throw SchemaError("greenness file needs columns item_id,co2_kg");

  auto number = [&](const std::string& cell) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) throw RowError(reader.line(), "bad number '" + cell + "'");
    return v;
  };

  std::map<std::string, double> co2;
  std::map<std::string, double> given;
  while (reader.next(row)) {
    const double c = number(row.at(co2_col));
    if (!(c > 0.0)) throw RowError(reader.line(), "co2_kg must be positive");
    co2[row.at(id_col)] = c;
    if (g_col >= 0 && static_cast<std::size_t>(g_col) < row.size() && !row[g_col].empty()) {
      const double g = number(row[g_col]);
      if (g < 0.0 || g > 5.0) throw RowError(reader.line(), "greenness outside [0,5]");
      given[row.at(id_col)] = g;
    }
  }
  if (recompute || given.size() != co2.size()) return GreennessTable::from_co2(co2);

  GreennessTable t;
  std::vector<double> values;
  for (const auto& [id, c] : co2) values.push_back(c);
  try {
    t.calibration = calibrate(values);
  } catch (const CalibrationError&) {
    t.calibration = {};
  }
  for (const auto& [id, c] : co2) t.items[id] = {c, given.at(id)};
  return t;
}

GreennessTable load_greenness(const std::filesystem::path& path, bool recompute) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return load_greenness(in, recompute);
}

void write_greenness(std::ostream& out, const GreennessTable& table) {
  csv::write_row(out, {"item_id", "co2_kg", "greenness"});
  char a[32], b[32];
  for (const auto& [id, rec] : table.items) {
    auto ea = std::to_chars(a, a + sizeof a, rec.co2_kg).ptr;
    auto eb = std::to_chars(b, b + sizeof b, rec.greenness).ptr;
    csv::write_row(out, {id, std::string(a, ea), std::string(b, eb)});
  }
}

void write_greenness(const std::filesystem::path& path, const GreennessTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_greenness(out, table);
}

}  // namespace greenrec::footprint
