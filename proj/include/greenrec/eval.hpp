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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "greenrec/core.hpp"
#include "greenrec/footprint.hpp"
#include "greenrec/kernels.hpp"
#include "greenrec/models.hpp"
#include "greenrec/prep.hpp"

namespace greenrec::eval {

struct RankedEntry {
  Index item = 0;
  double score = 0.0;
  double rating = 0.0;
  double greenness = 0.0;
};

struct RankedList {
  Index owner = 0;
  std::vector<RankedEntry> entries;
};

/// Score descending, ties by ascending item.
void order_by_score(RankedList& list);
/// Greenness descending, ties by ascending item.
void order_by_greenness(RankedList& list);

/// Counts of degenerate cases that were resolved by convention.
struct MetricDiagnostics {
  std::size_t zero_ideal_lists = 0;    // GNDCG with all greenness 0
  std::size_t zero_ideal_batches = 0;  // NDCG batch with all ratings 0
};

/// Sum over the first k entries, in the list's current order, of
/// (2^g - 1) / log2(rank + 1).
double list_gdcg(const RankedList& list, std::size_t k);

/// Mean of list_gdcg over lists, each taken in its current order.
double gdcg_at_k(std::span<const RankedList> lists, std::size_t k);

/// gdcg_at_k over the given order divided by gdcg_at_k over each list sorted
/// by greenness. Defined as 1 when the ideal is 0.
double gndcg_at_k(std::span<const RankedList> lists, std::size_t k, MetricDiagnostics* diagnostics = nullptr);

/// One scored test interaction.
struct ScoredRating {
  Index user = 0;
  Index item = 0;
  double score = 0.0;
  double rating = 0.0;
  double greenness = 0.0;
};

struct BatchOptions {
  std::size_t batch_size = 100;
  std::uint64_t seed = 0;
};

/// Seeded shuffle of [0, n) cut into consecutive batches; the last batch may be
/// short.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, const BatchOptions& options);

/// NDCG@k of one batch ranked by score (ties: item, then user) with gains
/// 2^r - 1. Sets *zero_ideal and returns 1 when every rating is 0.
double batch_ndcg(std::span<const ScoredRating> batch, std::size_t k, bool* zero_ideal = nullptr);

/// Mean batch_ndcg over make_batches(scored.size(), options).
double ndcg_batched(std::span<const ScoredRating> scored, std::size_t k, const BatchOptions& options,
                    Exec exec = Exec::Parallel, MetricDiagnostics* diagnostics = nullptr);

/// Greenness per item of `dataset`, failing with the ids of every item in
/// `rows` that the table lacks.
std::vector<double> require_greenness(const footprint::GreennessTable& table, const Dataset& dataset,
                                      std::span<const std::size_t> rows);

/// Predictions for dataset rows, clipped to [0,5].
std::vector<ScoredRating> score_interactions(const models::Predictor& predictor, const Dataset& dataset,
                                             std::span<const std::size_t> rows, std::span<const double> greenness,
                                             Exec exec = Exec::Parallel);

/// Groups scored interactions into per-user lists ordered by score; users
/// ascending.
std::vector<RankedList> user_lists(std::span<const ScoredRating> scored);

inline const std::vector<std::size_t> kDefaultKs = {10, 20, 50};

struct SplitMetrics {
  std::vector<std::size_t> ks;
  std::vector<double> ndcg;
  std::vector<double> gndcg;
  MetricDiagnostics diagnostics;
};

/// Batched NDCG and per-user GNDCG for each k on already scored interactions.
SplitMetrics evaluate_scored(std::span<const ScoredRating> scored, std::span<const std::size_t> ks,
                             const BatchOptions& batches, Exec exec = Exec::Parallel);

SplitMetrics evaluate(const models::Predictor& predictor, const Dataset& dataset, const prep::SplitResult& split,
                      const footprint::GreennessTable& greenness, std::span<const std::size_t> ks = kDefaultKs,
                      const BatchOptions& batches = {}, Exec exec = Exec::Parallel);

/// Mean and sample standard deviation of one metric over splits.
struct MetricSummary {
  std::string algo;
  double alpha = 1.0;
  std::size_t k = 0;
  std::string metric;  // "ndcg" or "gndcg"
  double mean = 0.0;
  double std = 0.0;
  std::size_t n_splits = 0;
};

double sample_std(std::span<const double> values);

/// Summaries for every k and both metrics; all splits must share the same ks.
std::vector<MetricSummary> aggregate(const std::string& algo, double alpha, std::span<const SplitMetrics> splits);

/// algo,alpha,k,metric,mean,std,n_splits
void write_report_csv(std::ostream& out, std::span<const MetricSummary> rows);

/// Shortest round-trip decimal form used by every CSV writer.
std::string format_number(double value);

}  // namespace greenrec::eval
