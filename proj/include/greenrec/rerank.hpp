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

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greenrec/eval.hpp"

namespace greenrec::rerank {

/// alpha * r_hat + (1 - alpha) * g. Throws DomainError for alpha outside [0,1].
double utility(double r_hat, double g, double alpha);

/// Replaces scores by utilities (scores clipped to [0,5] first) and reorders by
/// descending utility, ties by ascending item.
eval::RankedList rerank_list(const eval::RankedList& list, double alpha);

/// Same transform on scored interactions; used for both the per-user lists and
/// the NDCG batches.
std::vector<eval::ScoredRating> rerank_scored(std::span<const eval::ScoredRating> scored, double alpha);

struct TradeoffPoint {
  double alpha = 1.0;
  std::size_t k = 0;
  double ndcg = 0.0;
  double gndcg = 0.0;
  double ndcg_rel = 0.0;   // ndcg / ndcg(alpha=1) - 1
  double gndcg_rel = 0.0;  // gndcg / gndcg(alpha=1) - 1
};

/// value / baseline - 1; 0 when both are 0.
double relative_change(double value, double baseline);

/// Evaluates every (alpha, k) on reranked copies of `scored`. The alpha=1
/// baseline is always computed for the relative columns.
std::vector<TradeoffPoint> alpha_sweep_scored(std::span<const eval::ScoredRating> scored,
                                              std::span<const double> alphas, std::span<const std::size_t> ks,
                                              const eval::BatchOptions& batches, Exec exec = Exec::Parallel);

std::vector<TradeoffPoint> alpha_sweep(const models::Predictor& predictor, const Dataset& dataset,
                                       const prep::SplitResult& split, const footprint::GreennessTable& greenness,
                                       std::span<const double> alphas, std::span<const std::size_t> ks = eval::kDefaultKs,
                                       const eval::BatchOptions& batches = {}, Exec exec = Exec::Parallel);

/// The eleven values 0, 0.1, ..., 1.
std::vector<double> default_alphas();

/// "lo:hi:step" (inclusive, values rounded to 1e-9) or a comma list.
std::vector<double> parse_alphas(std::string_view text);

/// Comma list of positive integers.
std::vector<std::size_t> parse_ks(std::string_view text);

/// algo,alpha,k,ndcg,gndcg,ndcg_rel,gndcg_rel
void write_tradeoff_csv(std::ostream& out, const std::string& algo, std::span<const TradeoffPoint> points,
                        bool header = true);

}  // namespace greenrec::rerank
