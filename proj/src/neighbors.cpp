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

#include "greenrec/error.hpp"
#include "greenrec/models.hpp"

namespace greenrec::models {

NeighborPredictor::NeighborPredictor(TrainingSummary summary, TrainSet oriented, Orientation orientation,
                                     std::size_t k, double min_sim, kernels::NeighborRows neighbors)
    : Predictor(std::move(summary)),
      oriented_(std::move(oriented)),
      orientation_(orientation),
      k_(k),
      min_sim_(min_sim),
      neighbors_(std::move(neighbors)) {}

double NeighborPredictor::predict(Index user, Index item) const {
  check_index(user, item);
  // In oriented space the "item" is the entity whose neighbours we aggregate.
  const bool by_item = orientation_ == Orientation::Item;
  const Index target = by_item ? item : user;
  const Index profile_owner = by_item ? user : item;
  const bool target_seen = by_item ? summary_.item_seen(item) : summary_.user_seen(user);
  const bool owner_seen = by_item ? summary_.user_seen(user) : summary_.item_seen(item);
  const double target_mean = by_item ? summary_.item_mean[item] : summary_.user_mean[user];
  const double owner_mean = by_item ? summary_.user_mean[user] : summary_.item_mean[item];
  auto fallback = [&] {
    if (target_seen) return target_mean;
    if (owner_seen) return owner_mean;
    return summary_.global_mean;
  };
  if (!target_seen || !owner_seen) return fallback();

  struct Candidate {
    double sim;
    double rating;
    Index index;
  };
  std::vector<Candidate> candidates;
  const auto& sims = neighbors_[target];
  auto profile = oriented_->user_row(profile_owner);
  auto a = sims.begin();
  auto b = profile.begin();
  while (a != sims.end() && b != profile.end()) {
    if (a->index < b->index) {
      ++a;
    } else if (b->index < a->index) {
      ++b;
    } else {
      if (a->rating > min_sim_) candidates.push_back({a->rating, b->rating, a->index});
      ++a;
      ++b;
    }
  }
  if (candidates.empty()) return fallback();

  const std::size_t keep = std::min(k_, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                    [](const Candidate& x, const Candidate& y) {
                      return x.sim != y.sim ? x.sim > y.sim : x.index < y.index;
                    });
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < keep; ++n) {
    num += candidates[n].sim * candidates[n].rating;
    den += candidates[n].sim;
  }
  return den > 0.0 ? num / den : fallback();
}

namespace {

NeighborPredictor fit_neighbors(const TrainSet& train, NeighborPredictor::Orientation orientation,
                                std::size_t k_neighbors, double min_sim, Exec exec) {
  if (k_neighbors < 1) throw ValidationError("k_neighbors must be at least 1");
  if (!(min_sim >= 0.0)) throw ValidationError("min_sim must be non-negative");
  TrainSet oriented = orientation == NeighborPredictor::Orientation::Item ? train : share(train->transposed());
  auto neighbors = kernels::item_cosine_neighbors(*oriented, min_sim, exec);
  return NeighborPredictor(TrainingSummary::from(*train), std::move(oriented), orientation, k_neighbors, min_sim,
                           std::move(neighbors));
}

}  // namespace

NeighborPredictor fit_itemnn(const TrainSet& train, std::size_t k_neighbors, double min_sim, Exec exec) {
  return fit_neighbors(train, NeighborPredictor::Orientation::Item, k_neighbors, min_sim, exec);
}

NeighborPredictor fit_usernn(const TrainSet& train, std::size_t k_neighbors, double min_sim, Exec exec) {
  return fit_neighbors(train, NeighborPredictor::Orientation::User, k_neighbors, min_sim, exec);
}

}  // namespace greenrec::models
