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

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "greenrec/core.hpp"
#include "greenrec/kernels.hpp"
#include "json.hpp"

namespace greenrec::models {

enum class Algorithm { Random, GlobalMean, ItemNN, UserNN, SVD, SVDpp, CoClustering, SLIM };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Random, Algorithm::GlobalMean, Algorithm::ItemNN,
                                               Algorithm::UserNN, Algorithm::SVD,        Algorithm::SVDpp,
                                               Algorithm::CoClustering, Algorithm::SLIM};

std::string_view to_string(Algorithm algo);
/// Accepts the tags printed by to_string (case-insensitive); throws
/// ValidationError otherwise.
Algorithm parse_algorithm(std::string_view tag);

using HyperParams = std::map<std::string, double>;

using TrainSet = std::shared_ptr<const SparseRatingMatrix>;
TrainSet share(SparseRatingMatrix matrix);

/// Means of the training set. Entities without training ratings have NaN
/// means.
struct TrainingSummary {
  double global_mean = 0.0;
  std::vector<double> user_mean;
  std::vector<double> item_mean;

  static TrainingSummary from(const SparseRatingMatrix& train);

  bool user_seen(Index u) const { return u < user_mean.size() && !std::isnan(user_mean[u]); }
  bool item_seen(Index i) const { return i < item_mean.size() && !std::isnan(item_mean[i]); }

  /// Item mean, else user mean, else global mean.
  double fallback(Index u, Index i) const;
};

class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual Algorithm algorithm() const = 0;

  /// Raw model output; finite for every (u, i) in the index space. Callers
  /// clip to the rating scale where needed.
  virtual double predict(Index user, Index item) const = 0;

  /// Algorithm-specific parameter blocks for the model artifact.
  virtual void write_blocks(nlohmann::json& blocks) const = 0;

  const TrainingSummary& summary() const noexcept { return summary_; }
  std::size_t n_users() const noexcept { return summary_.user_mean.size(); }
  std::size_t n_items() const noexcept { return summary_.item_mean.size(); }

 protected:
  explicit Predictor(TrainingSummary summary) : summary_(std::move(summary)) {}
  void check_index(Index user, Index item) const;

  TrainingSummary summary_;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

// ---------------------------------------------------------------------------
// Baselines

class RandomPredictor final : public Predictor {
 public:
  RandomPredictor(TrainingSummary summary, std::uint64_t seed) : Predictor(std::move(summary)), seed_(seed) {}
  Algorithm algorithm() const override { return Algorithm::Random; }
  /// Uniform on [0,5], a pure function of (seed, user, item).
  double predict(Index user, Index item) const override;
  void write_blocks(nlohmann::json& blocks) const override;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

class GlobalMeanPredictor final : public Predictor {
 public:
  explicit GlobalMeanPredictor(TrainingSummary summary) : Predictor(std::move(summary)) {}
  Algorithm algorithm() const override { return Algorithm::GlobalMean; }
  double predict(Index user, Index item) const override;
  void write_blocks(nlohmann::json&) const override {}
};

RandomPredictor fit_random(const SparseRatingMatrix& train, std::uint64_t seed);
GlobalMeanPredictor fit_global_mean(const SparseRatingMatrix& train);

// ---------------------------------------------------------------------------
// Neighborhood models

/// Cosine k-nearest-neighbour regression. The item variant predicts r_ui from
/// the user's ratings on the k items most similar to i; the user variant is
/// the same computation on the transposed matrix. When no neighbour overlaps,
/// the target entity's mean is used first (item mean for ItemNN, user mean for
/// UserNN), then the other entity's mean, then the global mean, so that
/// UserNN on R and ItemNN on R^T agree everywhere.
class NeighborPredictor final : public Predictor {
 public:
  enum class Orientation { Item, User };

  NeighborPredictor(TrainingSummary summary, TrainSet oriented, Orientation orientation, std::size_t k,
                    double min_sim, kernels::NeighborRows neighbors);

  Algorithm algorithm() const override {
    return orientation_ == Orientation::Item ? Algorithm::ItemNN : Algorithm::UserNN;
  }
  double predict(Index user, Index item) const override;
  void write_blocks(nlohmann::json& blocks) const override;

  const kernels::NeighborRows& neighbors() const noexcept { return neighbors_; }
  std::size_t k() const noexcept { return k_; }
  double min_sim() const noexcept { return min_sim_; }
  Orientation orientation() const noexcept { return orientation_; }
  const TrainSet& oriented_ratings() const noexcept { return oriented_; }

 private:
  TrainSet oriented_;  // R for ItemNN, R^T for UserNN
  Orientation orientation_;
  std::size_t k_;
  double min_sim_;
  kernels::NeighborRows neighbors_;
};

NeighborPredictor fit_itemnn(const TrainSet& train, std::size_t k_neighbors, double min_sim = 0.0,
                             Exec exec = Exec::Parallel);
NeighborPredictor fit_usernn(const TrainSet& train, std::size_t k_neighbors, double min_sim = 0.0,
                             Exec exec = Exec::Parallel);

// ---------------------------------------------------------------------------
// Latent factor models (SVD and SVD++), trained by SGD

/// Parameters of r = [mu] + b_u + b_i + q_i . (p_u + |N(u)|^-1/2 sum_j y_j).
/// SVD has no implicit term and, by default, no global mean.
struct FactorParams {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t factors = 0;
  bool implicit = false;  // SVD++
  bool use_mu = false;
  double mu = 0.0;
  std::vector<double> user_bias, item_bias;
  std::vector<double> user_factors;      // n_users x factors
  std::vector<double> item_factors;      // n_items x factors
  std::vector<double> implicit_factors;  // n_items x factors, SVD++ only

  static FactorParams zeros(std::size_t n_users, std::size_t n_items, std::size_t factors, bool implicit);

  double* p(Index u) { return user_factors.data() + u * factors; }
  double* q(Index i) { return item_factors.data() + i * factors; }
  double* y(Index j) { return implicit_factors.data() + j * factors; }
  const double* p(Index u) const { return user_factors.data() + u * factors; }
  const double* q(Index i) const { return item_factors.data() + i * factors; }
  const double* y(Index j) const { return implicit_factors.data() + j * factors; }

  /// Visits every parameter block in a fixed order (biases, p, q, y).
  template <class F>
  void for_each_block(F&& f) {
    f(user_bias);
    f(item_bias);
    f(user_factors);
    f(item_factors);
    f(implicit_factors);
  }
};

/// Direct evaluation of the factor model for one pair.
double factor_predict(const FactorParams& params, const SparseRatingMatrix& train, Index user, Index item);

/// Sum over training ratings of 0.5 e^2 + 0.5 reg (b_u^2 + b_i^2 + |p_u|^2 +
/// |q_i|^2 [+ sum_{j in N(u)} |y_j|^2]). SGD descends this objective one
/// rating at a time.
double factor_objective(const FactorParams& params, const SparseRatingMatrix& train, double reg);

/// Analytic gradient of factor_objective, in the same layout as `params`.
FactorParams factor_gradient(const FactorParams& params, const SparseRatingMatrix& train, double reg);

struct FactorOptions {
  std::size_t factors = 20;
  double lr = 0.01;
  double reg = 0.02;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
  bool use_mu = false;  // SVD only; SVD++ always includes mu
  double init_std = 0.1;
  bool freeze_latents = false;
};

struct TrainingTrace {
  std::vector<double> epoch_objective;
  double train_rmse = 0.0;
};

class FactorPredictor final : public Predictor {
 public:
  FactorPredictor(TrainingSummary summary, TrainSet train, FactorParams params, TrainingTrace trace = {});

  Algorithm algorithm() const override { return params_.implicit ? Algorithm::SVDpp : Algorithm::SVD; }
  double predict(Index user, Index item) const override;
  void write_blocks(nlohmann::json& blocks) const override;

  const FactorParams& params() const noexcept { return params_; }
  const TrainingTrace& trace() const noexcept { return trace_; }
  const TrainSet& train() const noexcept { return train_; }

 private:
  TrainSet train_;
  FactorParams params_;
  TrainingTrace trace_;
  std::vector<double> user_vectors_;  // p_u plus the normalized implicit sum
};

FactorPredictor fit_svd(const TrainSet& train, const FactorOptions& options);
FactorPredictor fit_svdpp(const TrainSet& train, const FactorOptions& options);

// ---------------------------------------------------------------------------
// Co-clustering

struct CoClusterOptions {
  std::size_t user_clusters = 3;
  std::size_t item_clusters = 3;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
};

/// r = C_ui + (mu_u - C_u) + (mu_i - C_i) over user clusters, item clusters and
/// their co-clusters, fitted by alternating reassignment. Empty co-clusters
/// take the global mean. An emptied cluster is re-seeded with the entity that
/// currently has the largest squared error among clusters of size > 1.
class CoClusterPredictor final : public Predictor {
 public:
  CoClusterPredictor(TrainingSummary summary, std::size_t user_clusters, std::size_t item_clusters,
                     std::vector<std::uint32_t> user_assignment, std::vector<std::uint32_t> item_assignment,
                     std::vector<double> cocluster_mean, std::vector<double> user_cluster_mean,
                     std::vector<double> item_cluster_mean);

  Algorithm algorithm() const override { return Algorithm::CoClustering; }
  double predict(Index user, Index item) const override;
  void write_blocks(nlohmann::json& blocks) const override;

  const std::vector<std::uint32_t>& user_assignment() const noexcept { return user_assignment_; }
  const std::vector<std::uint32_t>& item_assignment() const noexcept { return item_assignment_; }
  std::size_t user_clusters() const noexcept { return user_clusters_; }
  std::size_t item_clusters() const noexcept { return item_clusters_; }
  const std::vector<double>& cocluster_mean() const noexcept { return cocluster_mean_; }
  const std::vector<double>& user_cluster_mean() const noexcept { return user_cluster_mean_; }
  const std::vector<double>& item_cluster_mean() const noexcept { return item_cluster_mean_; }
  std::size_t epochs_run() const noexcept { return epochs_run_; }
  double train_rmse() const noexcept { return train_rmse_; }
  void set_training_info(std::size_t epochs_run, double rmse) {
    epochs_run_ = epochs_run;
    train_rmse_ = rmse;
  }

 private:
  std::size_t user_clusters_, item_clusters_;
  std::vector<std::uint32_t> user_assignment_, item_assignment_;
  std::vector<double> cocluster_mean_, user_cluster_mean_, item_cluster_mean_;
  std::size_t epochs_run_ = 0;
  double train_rmse_ = 0.0;
};

CoClusterPredictor fit_cocluster(const SparseRatingMatrix& train, const CoClusterOptions& options);

// ---------------------------------------------------------------------------
// SLIM

struct SlimOptions {
  double beta = 0.05;
  double lambda = 0.05;
  std::size_t max_passes = 100;
  double tol = 1e-4;
  Exec exec = Exec::Parallel;
};

/// One column of W: non-negative weights on other items, sorted by item.
struct SlimColumn {
  std::vector<Cell> weights;
  bool converged = false;
  std::size_t passes = 0;
  /// Column objective before the first pass and after each pass.
  std::vector<double> objective;
};

/// Coordinate descent for column j of
///   0.5 |r_j - R w|^2 + 0.5 beta |w|^2 + lambda |w|_1,  w >= 0, w_j = 0.
/// Only items sharing a rater with j can become non-zero.
SlimColumn solve_slim_column(const SparseRatingMatrix& train, Index column, const SlimOptions& options);

/// Full objective 0.5 |R - RW|_F^2 + 0.5 beta |W|_F^2 + lambda |W|_1 for W given
/// as per-column sparse weights.
double slim_objective(const SparseRatingMatrix& train, const std::vector<std::vector<Cell>>& columns, double beta,
                      double lambda);

class SlimPredictor final : public Predictor {
 public:
  SlimPredictor(TrainingSummary summary, TrainSet train, std::vector<std::vector<Cell>> columns);

  Algorithm algorithm() const override { return Algorithm::SLIM; }
  /// r_u . w_i for seen pairs; unseen users/items use the fallback chain.
  double predict(Index user, Index item) const override;
  void write_blocks(nlohmann::json& blocks) const override;

  const std::vector<std::vector<Cell>>& columns() const noexcept { return columns_; }
  /// Aggregate objective before the first pass and after each pass; a column
  /// that stopped early keeps its final value.
  const std::vector<double>& objective_trace() const noexcept { return objective_trace_; }
  const std::vector<char>& converged() const noexcept { return converged_; }
  void set_training_info(std::vector<double> trace, std::vector<char> converged) {
    objective_trace_ = std::move(trace);
    converged_ = std::move(converged);
  }

 private:
  TrainSet train_;
  std::vector<std::vector<Cell>> columns_;
  std::vector<double> objective_trace_;
  std::vector<char> converged_;
};

SlimPredictor fit_slim(const TrainSet& train, const SlimOptions& options);

// ---------------------------------------------------------------------------

/// Fits `algo` from a flat hyperparameter map. Recognized keys:
///   itemnn/usernn: k, min_sim
///   svd/svdpp:     factors, lr, reg, epochs, use_mu (svd)
///   cocluster:     user_clusters, item_clusters, epochs
///   slim:          beta, lambda, max_passes, tol
PredictorPtr fit(Algorithm algo, const TrainSet& train, const HyperParams& hyper, std::uint64_t seed,
                 Exec exec = Exec::Parallel);

}  // namespace greenrec::models
