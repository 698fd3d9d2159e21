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
#include <cmath>
#include <limits>
#include <random>

#include "greenrec/error.hpp"
#include "greenrec/models.hpp"

namespace greenrec::models {

CoClusterPredictor::CoClusterPredictor(TrainingSummary summary, std::size_t user_clusters, std::size_t item_clusters,
                                       std::vector<std::uint32_t> user_assignment,
                                       std::vector<std::uint32_t> item_assignment, std::vector<double> cocluster_mean,
                                       std::vector<double> user_cluster_mean, std::vector<double> item_cluster_mean)
    : Predictor(std::move(summary)),
      user_clusters_(user_clusters),
      item_clusters_(item_clusters),
      user_assignment_(std::move(user_assignment)),
      item_assignment_(std::move(item_assignment)),
      cocluster_mean_(std::move(cocluster_mean)),
      user_cluster_mean_(std::move(user_cluster_mean)),
      item_cluster_mean_(std::move(item_cluster_mean)) {
  if (user_assignment_.size() != n_users() || item_assignment_.size() != n_items() ||
      cocluster_mean_.size() != user_clusters_ * item_clusters_ || user_cluster_mean_.size() != user_clusters_ ||
      item_cluster_mean_.size() != item_clusters_)
    throw FormatError("co-clustering parameters have inconsistent shapes");
}

double CoClusterPredictor::predict(Index user, Index item) const {
  check_index(user, item);
  if (!summary_.user_seen(user) || !summary_.item_seen(item)) return summary_.fallback(user, item);
  const std::uint32_t cu = user_assignment_[user], ci = item_assignment_[item];
  return cocluster_mean_[cu * item_clusters_ + ci] + (summary_.user_mean[user] - user_cluster_mean_[cu]) +
         (summary_.item_mean[item] - item_cluster_mean_[ci]);
}

namespace {

struct Means {
  std::vector<double> cocluster, user_cluster, item_cluster;
};

Means compute_means(const SparseRatingMatrix& R, double mu, std::size_t ku, std::size_t ki,
                    const std::vector<std::uint32_t>& ua, const std::vector<std::uint32_t>& ia) {
  std::vector<double> co_sum(ku * ki, 0.0), u_sum(ku, 0.0), i_sum(ki, 0.0);
  std::vector<std::size_t> co_n(ku * ki, 0), u_n(ku, 0), i_n(ki, 0);
  for (Index u = 0; u < R.n_users(); ++u) {
    for (const Cell& c : R.user_row(u)) {
      const std::size_t cu = ua[u], ci = ia[c.index];
      co_sum[cu * ki + ci] += c.rating;
      ++co_n[cu * ki + ci];
      u_sum[cu] += c.rating;
      ++u_n[cu];
      i_sum[ci] += c.rating;
      ++i_n[ci];
    }
  }
  auto mean = [mu](double s, std::size_t n) { return n ? s / static_cast<double>(n) : mu; };
  Means m;
  m.cocluster.resize(ku * ki);
  m.user_cluster.resize(ku);
  m.item_cluster.resize(ki);
  for (std::size_t k = 0; k < ku * ki; ++k) m.cocluster[k] = mean(co_sum[k], co_n[k]);
  for (std::size_t k = 0; k < ku; ++k) m.user_cluster[k] = mean(u_sum[k], u_n[k]);
  for (std::size_t k = 0; k < ki; ++k) m.item_cluster[k] = mean(i_sum[k], i_n[k]);
  return m;
}

// Squared error of `entity` (a row of `R` in the current orientation) if it sat in
// cluster `c`. `transposed` swaps the role of the co-cluster mean indices.
struct Orientation {
  const SparseRatingMatrix* rows;
  const std::vector<double>* row_mean;    // entity means (mu_u or mu_i)
  const std::vector<double>* col_mean;    // partner means
  const std::vector<std::uint32_t>* partner_assignment;
  bool rows_are_users;
};

double entity_cost(const Orientation& o, const Means& m, std::size_t ki, Index entity, std::uint32_t c) {
  const double own_mean = (*o.row_mean)[entity];
  double cost = 0.0;
  for (const Cell& cell : o.rows->user_row(entity)) {
    const std::uint32_t partner = (*o.partner_assignment)[cell.index];
    const std::size_t cu = o.rows_are_users ? c : partner;
    const std::size_t ci = o.rows_are_users ? partner : c;
    const double pred = m.cocluster[cu * ki + ci] + (o.rows_are_users ? own_mean : (*o.col_mean)[cell.index]) -
                        m.user_cluster[cu] + (o.rows_are_users ? (*o.col_mean)[cell.index] : own_mean) -
                        m.item_cluster[ci];
    const double e = cell.rating - pred;
    cost += e * e;
  }
  return cost;
}

// Returns true when any assignment changed.
bool reassign(const Orientation& o, const Means& m, std::size_t n_clusters, std::size_t ki,
              std::vector<std::uint32_t>& assignment) {
  const std::size_t n = o.rows->n_users();
  bool changed = false;
  std::vector<double> current_cost(n, 0.0);
  std::vector<std::size_t> members(n_clusters, 0);
  for (Index e = 0; e < n; ++e) {
    if (o.rows->user_row(e).empty()) continue;
    double best_cost = entity_cost(o, m, ki, e, assignment[e]);
    std::uint32_t best = assignment[e];
    for (std::uint32_t c = 0; c < n_clusters; ++c) {
      if (c == assignment[e]) continue;
      const double cost = entity_cost(o, m, ki, e, c);
      if (cost < best_cost) {
        best_cost = cost;
        best = c;
      }
    }
    if (best != assignment[e]) {
      assignment[e] = best;
      changed = true;
    }
    current_cost[e] = best_cost;
    ++members[best];
  }

  // Re-seed empty clusters with the worst-fit entity of a cluster that can spare one.
  for (std::uint32_t c = 0; c < n_clusters; ++c) {
    if (members[c] > 0) continue;
    Index worst = static_cast<Index>(n);
    double worst_cost = -1.0;
    for (Index e = 0; e < n; ++e) {
      if (o.rows->user_row(e).empty() || members[assignment[e]] < 2) continue;
      if (current_cost[e] > worst_cost) {
        worst_cost = current_cost[e];
        worst = e;
      }
    }
    if (worst == n) break;
    --members[assignment[worst]];
    assignment[worst] = c;
    ++members[c];
    changed = true;
  }
  return changed;
}

}  // namespace

CoClusterPredictor fit_cocluster(const SparseRatingMatrix& train, const CoClusterOptions& options) {
  if (options.user_clusters < 1 || options.item_clusters < 1) throw ValidationError("cluster counts must be at least 1");
  if (train.nnz() == 0) throw TrainingError("cannot co-cluster an empty training set");
  const std::size_t ku = options.user_clusters, ki = options.item_clusters;
  TrainingSummary summary = TrainingSummary::from(train);
  const double mu = summary.global_mean;

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::uint32_t> pick_u(0, static_cast<std::uint32_t>(ku - 1));
  std::uniform_int_distribution<std::uint32_t> pick_i(0, static_cast<std::uint32_t>(ki - 1));
  std::vector<std::uint32_t> ua(train.n_users()), ia(train.n_items());
  for (auto& a : ua) a = pick_u(rng);
  for (auto& a : ia) a = pick_i(rng);

  const SparseRatingMatrix transposed = train.transposed();
  const Orientation users{&train, &summary.user_mean, &summary.item_mean, &ia, true};
  const Orientation items{&transposed, &summary.item_mean, &summary.user_mean, &ua, false};

  std::size_t epochs_run = 0;
  Means m = compute_means(train, mu, ku, ki, ua, ia);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    ++epochs_run;
    const bool users_changed = reassign(users, m, ku, ki, ua);
    m = compute_means(train, mu, ku, ki, ua, ia);
    const bool items_changed = reassign(items, m, ki, ki, ia);
    m = compute_means(train, mu, ku, ki, ua, ia);
    if (!users_changed && !items_changed) break;
  }

  CoClusterPredictor model(std::move(summary), ku, ki, std::move(ua), std::move(ia), std::move(m.cocluster),
                           std::move(m.user_cluster), std::move(m.item_cluster));
  double sq = 0.0;
  for (Index u = 0; u < train.n_users(); ++u) {
    for (const Cell& c : train.user_row(u)) {
      const double e = c.rating - model.predict(u, c.index);
      sq += e * e;
    }
  }
  model.set_training_info(epochs_run, std::sqrt(sq / static_cast<double>(train.nnz())));
  return model;
}

}  // namespace greenrec::models
