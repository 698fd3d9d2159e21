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

#include "greenrec/prep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>

#include <fmt/format.h>

#include "greenrec/csv.hpp"
#include "greenrec/error.hpp"
#include "json.hpp"

namespace greenrec::prep {

PrefilterResult prefilter(const Dataset& dataset, const PrefilterOptions& options) {
  if (options.min_item_ratings < 1 || options.min_user_mean < 1.0)
    throw ValidationError("prefilter thresholds must be at least 1");

  const auto& rows = dataset.interactions;
  std::vector<char> alive(rows.size(), 1);
  std::vector<std::size_t> item_count(dataset.n_items(), 0);
  std::vector<std::size_t> user_count(dataset.n_users(), 0);
  auto recount = [&] {
    std::fill(item_count.begin(), item_count.end(), 0);
    std::fill(user_count.begin(), user_count.end(), 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!alive[r]) continue;
      ++item_count[rows[r].item];
      ++user_count[rows[r].user];
    }
  };
  auto drop_items = [&](const std::vector<char>& doomed) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (alive[r] && doomed[rows[r].item]) alive[r] = 0;
    recount();
  };
  auto count_emptied_users = [&](std::vector<std::size_t>& before) {
    std::size_t n = 0;
    for (Index u = 0; u < dataset.n_users(); ++u)
      if (before[u] > 0 && user_count[u] == 0) ++n;
    before = user_count;
    return n;
  };

  PrefilterResult result;
  PrefilterReport& rep = result.report;
  rep.interactions_in = rows.size();
  recount();
  std::vector<std::size_t> users_before = user_count;

  // 1
  std::vector<char> doomed(dataset.n_items(), 0);
  for (Index i = 0; i < dataset.n_items(); ++i) {
    if (item_count[i] > 0 && item_count[i] < options.min_item_ratings) {
      doomed[i] = 1;
      ++rep.sparse_items;
    }
  }
  drop_items(doomed);

  // 2
  if (options.item_keep) {
    std::fill(doomed.begin(), doomed.end(), 0);
    for (Index i = 0; i < dataset.n_items(); ++i) {
      if (item_count[i] > 0 && !options.item_keep(dataset.items.id(i))) {
        doomed[i] = 1;
        ++rep.rejected_items;
      }
    }
    drop_items(doomed);
  }

  // 3
  rep.empty_users = count_emptied_users(users_before);

  // 4
  std::vector<std::size_t> only_row(dataset.n_users(), std::numeric_limits<std::size_t>::max());
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (alive[r] && user_count[rows[r].user] == 1) only_row[rows[r].user] = r;
  for (Index u = 0; u < dataset.n_users(); ++u) {
    if (user_count[u] != 1) continue;
    const std::size_t r = only_row[u];
    const Index i = rows[r].item;
    if (item_count[i] >= options.min_item_ratings + 1) {
      alive[r] = 0;
      --item_count[i];
      user_count[u] = 0;
      ++rep.single_item_users;
    }
  }
  users_before = user_count;

  // 5
  std::vector<double> rater_activity(dataset.n_items(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (alive[r]) rater_activity[rows[r].item] += static_cast<double>(user_count[rows[r].user]);
  std::fill(doomed.begin(), doomed.end(), 0);
  for (Index i = 0; i < dataset.n_items(); ++i) {
    if (item_count[i] == 0) continue;
    if (rater_activity[i] / static_cast<double>(item_count[i]) < options.min_user_mean) {
      doomed[i] = 1;
      ++rep.sparse_neighborhood;
    }
  }
  drop_items(doomed);

  // 3 again
  rep.empty_users_after = count_emptied_users(users_before);

  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (alive[r]) kept.push_back(r);
  if (kept.empty()) throw FilterError("prefilter: dataset filtered to empty");
  rep.interactions_out = kept.size();
  result.dataset = reindex(dataset, kept);
  return result;
}

namespace {

class EligiblePool {
 public:
  explicit EligiblePool(std::size_t n_rows) : pos_(n_rows, kAbsent) {}

  void add(std::size_t row) {
    pos_[row] = rows_.size();
    rows_.push_back(row);
  }
  void remove(std::size_t row) {
    const std::size_t p = pos_[row];
    if (p == kAbsent) return;
    const std::size_t last = rows_.back();
    rows_[p] = last;
    pos_[last] = p;
    rows_.pop_back();
    pos_[row] = kAbsent;
  }
  void clear() {
    for (std::size_t r : rows_) pos_[r] = kAbsent;
    rows_.clear();
  }
  bool empty() const { return rows_.empty(); }
  std::size_t size() const { return rows_.size(); }
  std::size_t at(std::size_t k) const { return rows_[k]; }

 private:
  static constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> pos_;
};

std::size_t target_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

}  // namespace

SplitResult split(const Dataset& dataset, const Ratios& ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
    throw ValidationError("split ratios must be non-negative and sum to 1");

  const auto& rows = dataset.interactions;
  const std::size_t n = rows.size();
  std::vector<std::vector<std::size_t>> user_rows(dataset.n_users()), item_rows(dataset.n_items());
  std::vector<std::size_t> user_count(dataset.n_users(), 0), item_count(dataset.n_items(), 0);
  for (std::size_t r = 0; r < n; ++r) {
    user_rows[rows[r].user].push_back(r);
    item_rows[rows[r].item].push_back(r);
    ++user_count[rows[r].user];
    ++item_count[rows[r].item];
  }

  std::vector<char> in_train(n, 1);
  EligiblePool pool(n);
  std::mt19937_64 rng(seed);

  auto carve = [&](std::size_t target, std::vector<std::size_t>& out) {
    pool.clear();
    for (std::size_t r = 0; r < n; ++r)
      if (in_train[r] && user_count[rows[r].user] >= 2 && item_count[rows[r].item] >= 2) pool.add(r);
    while (out.size() < target && !pool.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      const std::size_t r = pool.at(pick(rng));
      pool.remove(r);
      in_train[r] = 0;
      out.push_back(r);
      const Index u = rows[r].user, i = rows[r].item;
      // Once a count reaches 1 the remaining training row is pinned.
      if (--user_count[u] == 1)
        for (std::size_t other : user_rows[u]) pool.remove(other);
      if (--item_count[i] == 1)
        for (std::size_t other : item_rows[i]) pool.remove(other);
    }
  };

  SplitResult result;
  result.seed = seed;
  result.ratios = ratios;
  const std::size_t test_target = target_count(ratios.test, n);
  const std::size_t val_target = target_count(ratios.validation, n);
  carve(test_target, result.test);
  carve(val_target, result.validation);
  for (std::size_t r = 0; r < n; ++r)
    if (in_train[r]) result.train.push_back(r);
  std::sort(result.test.begin(), result.test.end());
  std::sort(result.validation.begin(), result.validation.end());

  const double total = n == 0 ? 1.0 : static_cast<double>(n);
  result.achieved_test = static_cast<double>(result.test.size()) / total;
  result.achieved_validation = static_cast<double>(result.validation.size()) / total;
  if (result.test.size() < test_target || result.validation.size() < val_target) {
    result.underfilled = true;
    result.diagnostic = fmt::format("underfilled split: achieved train/validation/test = {:.4f}/{:.4f}/{:.4f}",
                                    static_cast<double>(result.train.size()) / total, result.achieved_validation,
                                    result.achieved_test);
  }
  return result;
}

std::vector<SplitResult> make_splits(const Dataset& dataset, std::size_t n, std::uint64_t base_seed,
                                     const Ratios& ratios) {
  if (n < 1) throw ValidationError("make_splits needs n >= 1");
  std::vector<SplitResult> out(n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t s = 0; s < n; ++s) {
    try {
      out[s] = split(dataset, ratios, base_seed + s);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void write_manifest(const std::filesystem::path& csv_path, const Dataset& dataset, const SplitResult& split) {
  std::vector<const char*> partition(dataset.size(), "train");
  for (std::size_t r : split.validation) partition[r] = "validation";
  for (std::size_t r : split.test) partition[r] = "test";
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error("cannot write " + csv_path.string());
    csv::write_row(out, {"user_id", "item_id", "partition"});
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      const auto& x = dataset.interactions[r];
      csv::write_row(out, {dataset.users.id(x.user), dataset.items.id(x.item), partition[r]});
    }
  }
  nlohmann::json meta = {
      {"seed", split.seed},
      {"ratios", {{"train", split.ratios.train}, {"validation", split.ratios.validation}, {"test", split.ratios.test}}},
      {"achieved",
       {{"train", dataset.size() ? static_cast<double>(split.train.size()) / static_cast<double>(dataset.size()) : 0.0},
        {"validation", split.achieved_validation},
        {"test", split.achieved_test}}},
      {"counts", {{"train", split.train.size()}, {"validation", split.validation.size()}, {"test", split.test.size()}}},
      {"underfilled", split.underfilled},
      {"diagnostic", split.diagnostic},
  };
  auto json_path = csv_path;
  json_path.replace_extension(".json");
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw Error("cannot write " + json_path.string());
  out << meta.dump(2) << '\n';
}

SplitResult read_manifest(const std::filesystem::path& csv_path, const Dataset& dataset) {
  std::map<std::pair<Index, Index>, std::size_t> row_of;
  for (std::size_t r = 0; r < dataset.size(); ++r)
    row_of[{dataset.interactions[r].user, dataset.interactions[r].item}] = r;

  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw Error("cannot open " + csv_path.string());
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw SchemaError("empty split manifest");
  const int ucol = csv::column_index(row, "user_id");
  const int icol = csv::column_index(row, "item_id");
  const int pcol = csv::column_index(row, "partition");
  if (ucol < 0 || icol < 0 || pcol < 0) throw SchemaError("split manifest needs user_id,item_id,partition");

  SplitResult split;
  std::vector<char> assigned(dataset.size(), 0);
  while (reader.next(row)) {
    auto u = dataset.users.find(row.at(ucol));
    auto i = dataset.items.find(row.at(icol));
    if (!u || !i) throw RowError(reader.line(), "manifest entry not present in dataset");
    auto it = row_of.find({*u, *i});
    if (it == row_of.end()) throw RowError(reader.line(), "manifest entry not present in dataset");
    const std::string& part = row.at(pcol);
    if (part == "train")
      split.train.push_back(it->second);
    else if (part == "validation")
      split.validation.push_back(it->second);
    else if (part == "test")
      split.test.push_back(it->second);
    else
      throw RowError(reader.line(), "unknown partition '" + part + "'");
    assigned[it->second] = 1;
  }
  if (std::find(assigned.begin(), assigned.end(), 0) != assigned.end())
    throw SchemaError("split manifest does not cover every interaction of the dataset");
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());

  auto json_path = csv_path;
  json_path.replace_extension(".json");
  if (std::ifstream meta_in{json_path}) {
    const auto meta = nlohmann::json::parse(meta_in);
    split.seed = meta.value("seed", std::uint64_t{0});
    if (meta.contains("ratios")) {
      split.ratios = {meta["ratios"].value("train", 0.6), meta["ratios"].value("validation", 0.2),
                      meta["ratios"].value("test", 0.2)};
    }
    split.underfilled = meta.value("underfilled", false);
    split.diagnostic = meta.value("diagnostic", std::string{});
  }
  const double total = dataset.size() ? static_cast<double>(dataset.size()) : 1.0;
  split.achieved_test = static_cast<double>(split.test.size()) / total;
  split.achieved_validation = static_cast<double>(split.validation.size()) / total;
  return split;
}

}  // namespace greenrec::prep
