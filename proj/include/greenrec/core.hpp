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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace greenrec {

using Index = std::uint32_t;

inline constexpr double kMinRating = 0.0;
inline constexpr double kMaxRating = 5.0;

/// Bijection between opaque external ids and dense indices [0, size).
class IdIndex {
 public:
  /// Returns the dense index for `id`, inserting it when new.
  Index intern(std::string_view id);
  std::optional<Index> find(std::string_view id) const;
  const std::string& id(Index index) const { return ids_.at(index); }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> lookup_;
};

/// One (user, item, rating) event in dense-index space. The timestamp is the
/// raw ISO-8601 text (empty when the source had none).
struct Interaction {
  Index user = 0;
  Index item = 0;
  double rating = 0.0;
  std::string timestamp;
};

struct Dataset {
  std::vector<Interaction> interactions;
  IdIndex users;
  IdIndex items;

  std::size_t n_users() const noexcept { return users.size(); }
  std::size_t n_items() const noexcept { return items.size(); }
  std::size_t size() const noexcept { return interactions.size(); }
};

/// Builds a dataset with fresh dense indices from a subset of `source`'s
/// interactions. Ids are assigned in order of first appearance.
Dataset reindex(const Dataset& source, std::span<const std::size_t> rows);

struct InteractionSchema {
  std::string user = "user_id";
  std::string item = "item_id";
  std::string rating = "rating";
  std::string timestamp = "date";  // optional column; empty disables it

  /// Parses `user=uid,item=rid,rating=stars,date=when`; unspecified keys keep
  /// their defaults.
  static InteractionSchema parse(std::string_view spec);
};

struct LoadOptions {
  bool skip_bad_rows = false;
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;
  std::size_t duplicates_removed = 0;
};

struct LoadResult {
  Dataset dataset;
  LoadReport report;
};

/// Reads an interaction CSV. Duplicate (user, item) pairs keep the entry with
/// the latest timestamp; ties and missing timestamps fall back to the last
/// occurrence in the file.
LoadResult load_interactions(const std::filesystem::path& path, const InteractionSchema& schema = {},
                             const LoadOptions& options = {});
LoadResult load_interactions(std::istream& in, const InteractionSchema& schema = {},
                             const LoadOptions& options = {});

void write_interactions(const std::filesystem::path& path, const Dataset& dataset);
void write_interactions(std::ostream& out, const Dataset& dataset);

struct Cell {
  Index index = 0;
  double rating = 0.0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Ratings held twice: row-major by user and column-major by item, each row
/// sorted by the other index. Immutable after construction.
class SparseRatingMatrix {
 public:
  SparseRatingMatrix() = default;

  /// At most one entry per (user, item); later duplicates overwrite earlier.
  SparseRatingMatrix(std::size_t n_users, std::size_t n_items, std::span<const Interaction> entries);

  std::size_t n_users() const noexcept { return user_ptr_.empty() ? 0 : user_ptr_.size() - 1; }
  std::size_t n_items() const noexcept { return item_ptr_.empty() ? 0 : item_ptr_.size() - 1; }
  std::size_t nnz() const noexcept { return user_cells_.size(); }

  std::span<const Cell> user_row(Index user) const;
  std::span<const Cell> item_column(Index item) const;
  std::optional<double> rating(Index user, Index item) const;

  /// 1 - nnz / (users * items); nullopt for an empty index space.
  std::optional<double> sparsity() const;

  double mean_rating() const;

  /// Same entries with users and items swapped.
  SparseRatingMatrix transposed() const;

  /// All (user, item, rating) triples in row-major order.
  std::vector<Interaction> triples() const;

 private:
  std::vector<std::size_t> user_ptr_;
  std::vector<Cell> user_cells_;
  std::vector<std::size_t> item_ptr_;
  std::vector<Cell> item_cells_;
};

SparseRatingMatrix build_matrix(const Dataset& dataset);

/// Matrix over the full index space of `dataset` restricted to `rows`.
SparseRatingMatrix build_matrix(const Dataset& dataset, std::span<const std::size_t> rows);

}  // namespace greenrec
