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

#include "greenrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "greenrec/csv.hpp"
#include "greenrec/error.hpp"

namespace greenrec::eval {

void order_by_score(RankedList& list) {
  std::stable_sort(list.entries.begin(), list.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return a.score != b.score ? a.score > b.score : a.item < b.item;
  });
}

void order_by_greenness(RankedList& list) {
  std::stable_sort(list.entries.begin(), list.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return a.greenness != b.greenness ? a.greenness > b.greenness : a.item < b.item;
  });
}

namespace {

double discount(std::size_t rank) { return std::log2(static_cast<double>(rank) + 1.0); }

double exp_gain(double value) { return std::exp2(value) - 1.0; }

void require_k(std::size_t k) {
  if (k < 1) throw ValidationError("k must be at least 1");
}

}  // namespace

double list_gdcg(const RankedList& list, std::size_t k) {
  require_k(k);
  const std::size_t n = std::min(k, list.entries.size());
  double sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) sum += exp_gain(list.entries[r].greenness) / discount(r + 1);
  return sum;
}

double gdcg_at_k(std::span<const RankedList> lists, std::size_t k) {
  if (lists.empty()) throw ValidationError("GDCG over an empty user set");
  std::vector<double> terms(lists.size());
  for (std::size_t u = 0; u < lists.size(); ++u) terms[u] = list_gdcg(lists[u], k);
  return stable_sum(terms) / static_cast<double>(lists.size());
}

double gndcg_at_k(std::span<const RankedList> lists, std::size_t k, MetricDiagnostics* diagnostics) {
  const double actual = gdcg_at_k(lists, k);
  std::vector<RankedList> ideal(lists.begin(), lists.end());
  for (auto& l : ideal) order_by_greenness(l);
  const double best = gdcg_at_k(ideal, k);
  if (best == 0.0) {
    if (diagnostics) ++diagnostics->zero_ideal_lists;
    return 1.0;
  }
  return std::min(1.0, actual / best);
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, const BatchOptions& options) {
  if (options.batch_size < 1) throw ValidationError("batch size must be at least 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += options.batch_size) {
    const std::size_t end = std::min(n, start + options.batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

double batch_ndcg(std::span<const ScoredRating> batch, std::size_t k, bool* zero_ideal) {
  require_k(k);
  if (zero_ideal) *zero_ideal = false;
  std::vector<ScoredRating> ranked(batch.begin(), batch.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const ScoredRating& a, const ScoredRating& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.item != b.item) return a.item < b.item;
    return a.user < b.user;
  });
  std::vector<double> ratings(ranked.size());
  for (std::size_t r = 0; r < ranked.size(); ++r) ratings[r] = ranked[r].rating;
  const std::size_t n = std::min(k, ranked.size());
  double dcg = 0.0;
  for (std::size_t r = 0; r < n; ++r) dcg += exp_gain(ratings[r]) / discount(r + 1);
  std::sort(ratings.begin(), ratings.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t r = 0; r < n; ++r) idcg += exp_gain(ratings[r]) / discount(r + 1);
  if (idcg == 0.0) {
    if (zero_ideal) *zero_ideal = true;
    return 1.0;
  }
  return std::min(1.0, dcg / idcg);
}

double ndcg_batched(std::span<const ScoredRating> scored, std::size_t k, const BatchOptions& options, Exec exec,
                    MetricDiagnostics* diagnostics) {
  if (scored.empty()) throw ValidationError("NDCG over an empty test set");
  require_k(k);
  const auto batches = make_batches(scored.size(), options);
  std::vector<double> values(batches.size());
  std::vector<char> zero(batches.size(), 0);
  for_each_index(batches.size(), exec, [&](std::size_t b) {
    std::vector<ScoredRating> batch;
    batch.reserve(batches[b].size());
    for (std::size_t i : batches[b]) batch.push_back(scored[i]);
    bool z = false;
    values[b] = batch_ndcg(batch, k, &z);
    zero[b] = z ? 1 : 0;
  });
  if (diagnostics)
    diagnostics->zero_ideal_batches += static_cast<std::size_t>(std::count(zero.begin(), zero.end(), 1));
  return stable_sum(values) / static_cast<double>(values.size());
}

std::vector<double> require_greenness(const footprint::GreennessTable& table, const Dataset& dataset,
                                      std::span<const std::size_t> rows) {
  std::vector<double> g = table.aligned(dataset.items);
  std::vector<Index> missing;
  for (std::size_t r : rows) {
    const Index i = dataset.interactions.at(r).item;
    if (std::isnan(g[i])) missing.push_back(i);
  }
  if (missing.empty()) return g;
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  std::string list;
  for (std::size_t n = 0; n < missing.size() && n < 20; ++n) list += (n ? ", " : "") + dataset.items.id(missing[n]);
  if (missing.size() > 20) list += fmt::format(", ... ({} total)", missing.size());
  throw ValidationError("missing greenness for test items: " + list);
}

std::vector<ScoredRating> score_interactions(const models::Predictor& predictor, const Dataset& dataset,
                                             std::span<const std::size_t> rows, std::span<const double> greenness,
                                             Exec exec) {
  std::vector<ScoredRating> out(rows.size());
  for_each_index(rows.size(), exec, [&](std::size_t n) {
    const Interaction& x = dataset.interactions.at(rows[n]);
    const double p = predictor.predict(x.user, x.item);
    out[n] = {x.user, x.item, std::clamp(p, kMinRating, kMaxRating), x.rating,
              x.item < greenness.size() ? greenness[x.item] : 0.0};
  });
  return out;
}

std::vector<RankedList> user_lists(std::span<const ScoredRating> scored) {
  std::map<Index, RankedList> by_user;
  for (const auto& s : scored) {
    RankedList& l = by_user[s.user];
    l.owner = s.user;
    l.entries.push_back({s.item, s.score, s.rating, s.greenness});
  }
  std::vector<RankedList> out;
  out.reserve(by_user.size());
  for (auto& [u, l] : by_user) {
    order_by_score(l);
    out.push_back(std::move(l));
  }
  return out;
}

SplitMetrics evaluate_scored(std::span<const ScoredRating> scored, std::span<const std::size_t> ks,
                             const BatchOptions& batches, Exec exec) {
  if (ks.empty()) throw ValidationError("no list lengths given");
  SplitMetrics m;
  m.ks.assign(ks.begin(), ks.end());
  const auto lists = user_lists(scored);
  for (std::size_t k : ks) {
    m.ndcg.push_back(ndcg_batched(scored, k, batches, exec, &m.diagnostics));
    m.gndcg.push_back(gndcg_at_k(lists, k, &m.diagnostics));
  }
  return m;
}

SplitMetrics evaluate(const models::Predictor& predictor, const Dataset& dataset, const prep::SplitResult& split,
                      const footprint::GreennessTable& greenness, std::span<const std::size_t> ks,
                      const BatchOptions& batches, Exec exec) {
  const auto g = require_greenness(greenness, dataset, split.test);
  const auto scored = score_interactions(predictor, dataset, split.test, g, exec);
  return evaluate_scored(scored, ks, batches, exec);
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = stable_sum(values) / static_cast<double>(values.size());
  std::vector<double> sq(values.size());
  for (std::size_t n = 0; n < values.size(); ++n) sq[n] = (values[n] - mean) * (values[n] - mean);
  return std::sqrt(stable_sum(sq) / static_cast<double>(values.size() - 1));
}

std::vector<MetricSummary> aggregate(const std::string& algo, double alpha, std::span<const SplitMetrics> splits) {
  if (splits.empty()) throw ValidationError("nothing to aggregate");
  const auto& ks = splits.front().ks;
  for (const auto& s : splits)
    if (s.ks != ks) throw ValidationError("splits were evaluated at different list lengths");
  std::vector<MetricSummary> out;
  for (std::size_t n = 0; n < ks.size(); ++n) {
    for (const char* metric : {"ndcg", "gndcg"}) {
      const bool is_ndcg = metric[0] == 'n';
      std::vector<double> v;
      for (const auto& s : splits) v.push_back(is_ndcg ? s.ndcg[n] : s.gndcg[n]);
      out.push_back({algo, alpha, ks[n], metric, stable_sum(v) / static_cast<double>(v.size()), sample_std(v),
                     v.size()});
    }
  }
  return out;
}

std::string format_number(double value) { return fmt::format("{}", value); }

void write_report_csv(std::ostream& out, std::span<const MetricSummary> rows) {
  csv::write_row(out, {"algo", "alpha", "k", "metric", "mean", "std", "n_splits"});
  for (const auto& r : rows)
    csv::write_row(out, {r.algo, format_number(r.alpha), std::to_string(r.k), r.metric, format_number(r.mean),
                         format_number(r.std), std::to_string(r.n_splits)});
}

}  // namespace greenrec::eval
