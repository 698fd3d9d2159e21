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

#include "greenrec/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "greenrec/csv.hpp"
#include "greenrec/error.hpp"

namespace greenrec {

Index IdIndex::intern(std::string_view id) {
  auto [it, inserted] = lookup_.try_emplace(std::string(id), static_cast<Index>(ids_.size()));
  if (inserted) ids_.emplace_back(id);
  return it->second;
}

std::optional<Index> IdIndex::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Dataset reindex(const Dataset& source, std::span<const std::size_t> rows) {
  Dataset out;
  out.interactions.reserve(rows.size());
  for (std::size_t row : rows) {
    const Interaction& x = source.interactions.at(row);
    out.interactions.push_back({out.users.intern(source.users.id(x.user)), out.items.intern(source.items.id(x.item)),
                                x.rating, x.timestamp});
  }
  return out;
}

InteractionSchema InteractionSchema::parse(std::string_view spec) {
  InteractionSchema schema;
  while (!spec.empty()) {
    auto comma = spec.find(',');
    std::string_view pair = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) throw ValidationError("schema entry '" + std::string(pair) + "' is not key=column");
    std::string_view key = pair.substr(0, eq);
    std::string value(pair.substr(eq + 1));
    if (key == "user")
      schema.user = value;
    else if (key == "item")
      schema.item = value;
    else if (key == "rating")
      schema.rating = value;
    else if (key == "date" || key == "timestamp")
      schema.timestamp = value;
    else
      throw ValidationError("unknown schema key '" + std::string(key) + "'");
  }
  return schema;
}

namespace {

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

}  // namespace

LoadResult load_interactions(std::istream& in, const InteractionSchema& schema, const LoadOptions& options) {
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw SchemaError("interaction file is empty (header row required)");

  const int user_col = csv::column_index(header, schema.user);
  const int item_col = csv::column_index(header, schema.item);
  const int rating_col = csv::column_index(header, schema.rating);
  const int time_col = schema.timestamp.empty() ? -1 : csv::column_index(header, schema.timestamp);
  for (auto [col, name] : {std::pair{user_col, &schema.user}, {item_col, &schema.item}, {rating_col, &schema.rating}}) {
    if (col < 0) throw SchemaError("missing column '" + *name + "'");
  }
  const auto needed = static_cast<std::size_t>(std::max({user_col, item_col, rating_col, time_col}) + 1);

  LoadResult result;
  Dataset& ds = result.dataset;
  // (user, item) → position in ds.interactions
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    ++result.report.rows_read;
    auto fail = [&](const std::string& what) {
      if (!options.skip_bad_rows) throw RowError(reader.line(), what);
      ++result.report.rows_skipped;
    };
    if (fields.size() < needed) {
      fail("expected at least " + std::to_string(needed) + " fields, got " + std::to_string(fields.size()));
      continue;
    }
    auto rating = parse_number(fields[rating_col]);
    if (!rating || !std::isfinite(*rating)) {
      fail("unparsable rating '" + fields[rating_col] + "'");
      continue;
    }
    if (*rating < kMinRating || *rating > kMaxRating) {
      fail("rating out of range [0,5]: " + fields[rating_col]);
      continue;
    }
    Interaction x{ds.users.intern(fields[user_col]), ds.items.intern(fields[item_col]), *rating,
                  time_col >= 0 ? fields[time_col] : std::string{}};
    const std::uint64_t key = (std::uint64_t{x.user} << 32) | x.item;
    auto [it, inserted] = seen.try_emplace(key, ds.interactions.size());
    if (inserted) {
      ds.interactions.push_back(std::move(x));
      continue;
    }
    ++result.report.duplicates_removed;
    Interaction& kept = ds.interactions[it->second];
    // ISO-8601 strings of equal shape order lexicographically.
    const bool older = !kept.timestamp.empty() && !x.timestamp.empty() && x.timestamp < kept.timestamp;
    if (!older) kept = std::move(x);
  }
  return result;
}

LoadResult load_interactions(const std::filesystem::path& path, const InteractionSchema& schema,
                             const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return load_interactions(in, schema, options);
}

void write_interactions(std::ostream& out, const Dataset& dataset) {
  csv::write_row(out, {"user_id", "item_id", "rating", "date"});
  for (const auto& x : dataset.interactions) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x.rating);
    csv::write_row(out, {dataset.users.id(x.user), dataset.items.id(x.item), std::string(buf, end), x.timestamp});
  }
}

void write_interactions(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_interactions(out, dataset);
}

namespace {

void fill_orientation(std::size_t n_rows, std::span<const Interaction> entries, bool by_user,
                      std::vector<std::size_t>& ptr, std::vector<Cell>& cells) {
  ptr.assign(n_rows + 1, 0);
  for (const auto& x : entries) ++ptr[(by_user ? x.user : x.item) + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  cells.resize(entries.size());
  std::vector<std::size_t> cursor(ptr.begin(), ptr.end() - 1);
  for (const auto& x : entries) {
    const Index row = by_user ? x.user : x.item;
    cells[cursor[row]++] = {by_user ? x.item : x.user, x.rating};
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    std::stable_sort(cells.begin() + ptr[r], cells.begin() + ptr[r + 1],
                     [](const Cell& a, const Cell& b) { return a.index < b.index; });
  }
}

}  // namespace

SparseRatingMatrix::SparseRatingMatrix(std::size_t n_users, std::size_t n_items,
                                       std::span<const Interaction> entries) {
  std::vector<Interaction> unique;
  unique.reserve(entries.size());
  std::unordered_map<std::uint64_t, std::size_t> seen;
  for (const auto& x : entries) {
    if (x.user >= n_users || x.item >= n_items) throw DomainError("interaction index outside matrix shape");
    const std::uint64_t key = (std::uint64_t{x.user} << 32) | x.item;
    auto [it, inserted] = seen.try_emplace(key, unique.size());
    if (inserted)
      unique.push_back({x.user, x.item, x.rating, {}});
    else
      unique[it->second].rating = x.rating;
  }
  fill_orientation(n_users, unique, true, user_ptr_, user_cells_);
  fill_orientation(n_items, unique, false, item_ptr_, item_cells_);
}

std::span<const Cell> SparseRatingMatrix::user_row(Index user) const {
  return {user_cells_.data() + user_ptr_.at(user), user_ptr_.at(user + 1) - user_ptr_[user]};
}

std::span<const Cell> SparseRatingMatrix::item_column(Index item) const {
  return {item_cells_.data() + item_ptr_.at(item), item_ptr_.at(item + 1) - item_ptr_[item]};
}

std::optional<double> SparseRatingMatrix::rating(Index user, Index item) const {
  auto row = user_row(user);
  auto it = std::lower_bound(row.begin(), row.end(), item, [](const Cell& c, Index v) { return c.index < v; });
  if (it == row.end() || it->index != item) return std::nullopt;
  return it->rating;
}

std::optional<double> SparseRatingMatrix::sparsity() const {
  const double cells = static_cast<double>(n_users()) * static_cast<double>(n_items());
  if (cells == 0.0) return std::nullopt;
  return 1.0 - static_cast<double>(nnz()) / cells;
}

double SparseRatingMatrix::mean_rating() const {
  if (user_cells_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : user_cells_) sum += c.rating;
  return sum / static_cast<double>(user_cells_.size());
}

SparseRatingMatrix SparseRatingMatrix::transposed() const {
  SparseRatingMatrix t;
  t.user_ptr_ = item_ptr_;
  t.user_cells_ = item_cells_;
  t.item_ptr_ = user_ptr_;
  t.item_cells_ = user_cells_;
  return t;
}

std::vector<Interaction> SparseRatingMatrix::triples() const {
  std::vector<Interaction> out;
  out.reserve(nnz());
  for (Index u = 0; u < n_users(); ++u)
    for (const auto& c : user_row(u)) out.push_back({u, c.index, c.rating, {}});
  return out;
}

SparseRatingMatrix build_matrix(const Dataset& dataset) {
  return SparseRatingMatrix(dataset.n_users(), dataset.n_items(), dataset.interactions);
}

SparseRatingMatrix build_matrix(const Dataset& dataset, std::span<const std::size_t> rows) {
  std::vector<Interaction> subset;
  subset.reserve(rows.size());
  for (std::size_t r : rows) {
    const auto& x = dataset.interactions.at(r);
    subset.push_back({x.user, x.item, x.rating, {}});
  }
  return SparseRatingMatrix(dataset.n_users(), dataset.n_items(), subset);
}

}  // namespace greenrec
