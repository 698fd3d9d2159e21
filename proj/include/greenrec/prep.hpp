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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "greenrec/core.hpp"

namespace greenrec::prep {

struct PrefilterOptions {
  std::size_t min_item_ratings = 20;
  double min_user_mean = 20.0;
  /// Keep-predicate on external item ids (stands in for "all ingredients
  /// found"). Empty keeps every item.
  std::function<bool(const std::string&)> item_keep;
};

/// Entities removed by each step, in order.
struct PrefilterReport {
  std::size_t sparse_items = 0;         // 1: fewer than min_item_ratings ratings
  std::size_t rejected_items = 0;       // 2: failed the keep-predicate
  std::size_t empty_users = 0;          // 3: no interactions left
  std::size_t single_item_users = 0;    // 4: only rating is on a well-covered item
  std::size_t sparse_neighborhood = 0;  // 5: items whose raters are inactive on average
  std::size_t empty_users_after = 0;    // 3 again, after step 5
  std::size_t interactions_in = 0;
  std::size_t interactions_out = 0;
};

struct PrefilterResult {
  Dataset dataset;
  PrefilterReport report;
};

/// The five-step sparse-entity filter, followed by a second empty-user sweep.
/// Activity counts used by step 5 are taken after step 4. The result is
/// reindexed in order of first appearance.
PrefilterResult prefilter(const Dataset& dataset, const PrefilterOptions& options = {});

struct Ratios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

/// A partition of a dataset's interaction rows. Row lists are sorted.
struct SplitResult {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
  Ratios ratios;
  double achieved_validation = 0.0;
  double achieved_test = 0.0;
  bool underfilled = false;
  std::string diagnostic;
};

/// Moves uniformly drawn interactions whose user and item both have at least
/// two training interactions into test until it holds the target fraction of
/// all interactions, then carves validation out of the remaining training set
/// the same way.
SplitResult split(const Dataset& dataset, const Ratios& ratios, std::uint64_t seed);

/// `n` splits with seeds base_seed, base_seed+1, ...; computed in parallel.
std::vector<SplitResult> make_splits(const Dataset& dataset, std::size_t n, std::uint64_t base_seed,
                                     const Ratios& ratios = {});

/// `<stem>.csv` with user_id,item_id,partition and `<stem>.json` sidecar.
void write_manifest(const std::filesystem::path& csv_path, const Dataset& dataset, const SplitResult& split);

/// Rebuilds a split from a manifest against `dataset` (matched by ids).
SplitResult read_manifest(const std::filesystem::path& csv_path, const Dataset& dataset);

}  // namespace greenrec::prep
