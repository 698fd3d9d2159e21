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
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "greenrec/error.hpp"
#include "greenrec/models.hpp"

namespace greenrec::models {

FactorParams FactorParams::zeros(std::size_t n_users, std::size_t n_items, std::size_t factors, bool implicit) {
  FactorParams p;
  p.n_users = n_users;
  p.n_items = n_items;
  p.factors = factors;
  p.implicit = implicit;
  p.use_mu = implicit;
  p.user_bias.assign(n_users, 0.0);
  p.item_bias.assign(n_items, 0.0);
  p.user_factors.assign(n_users * factors, 0.0);
  p.item_factors.assign(n_items * factors, 0.0);
  if (implicit) p.implicit_factors.assign(n_items * factors, 0.0);
  return p;
}

namespace {

double implicit_norm(std::size_t rated) { return rated == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(rated)); }

// out = p_u + |N(u)|^-1/2 sum_{j in N(u)} y_j
void user_vector(const FactorParams& params, const SparseRatingMatrix& train, Index u, double* out) {
  const std::size_t f = params.factors;
  std::copy_n(params.p(u), f, out);
  if (!params.implicit) return;
  auto rated = train.user_row(u);
  if (rated.empty()) return;
  std::vector<double> sum(f, 0.0);
  for (const Cell& c : rated) {
    const double* y = params.y(c.index);
    for (std::size_t k = 0; k < f; ++k) sum[k] += y[k];
  }
  const double norm = implicit_norm(rated.size());
  for (std::size_t k = 0; k < f; ++k) out[k] += norm * sum[k];
}

double score(const FactorParams& params, const double* user_vec, Index u, Index i) {
  const double* q = params.q(i);
  double dot = 0.0;
  for (std::size_t k = 0; k < params.factors; ++k) dot += q[k] * user_vec[k];
  return (params.use_mu ? params.mu : 0.0) + params.user_bias[u] + params.item_bias[i] + dot;
}

double squared_norm(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += v[k] * v[k];
  return s;
}

}  // namespace

double factor_predict(const FactorParams& params, const SparseRatingMatrix& train, Index user, Index item) {
  std::vector<double> z(params.factors);
  user_vector(params, train, user, z.data());
  return score(params, z.data(), user, item);
}

double factor_objective(const FactorParams& params, const SparseRatingMatrix& train, double reg) {
  const std::size_t f = params.factors;
  std::vector<double> z(f);
  double total = 0.0;
  for (Index u = 0; u < train.n_users(); ++u) {
    auto row = train.user_row(u);
    if (row.empty()) continue;
    user_vector(params, train, u, z.data());
    double implicit_sq = 0.0;
    if (params.implicit)
      for (const Cell& c : row) implicit_sq += squared_norm(params.y(c.index), f);
    const double user_sq = params.user_bias[u] * params.user_bias[u] + squared_norm(params.p(u), f);
    for (const Cell& c : row) {
      const Index i = c.index;
      const double e = c.rating - score(params, z.data(), u, i);
      const double item_sq = params.item_bias[i] * params.item_bias[i] + squared_norm(params.q(i), f);
      total += 0.5 * e * e + 0.5 * reg * (user_sq + item_sq + implicit_sq);
    }
  }
  return total;
}

FactorParams factor_gradient(const FactorParams& params, const SparseRatingMatrix& train, double reg) {
  const std::size_t f = params.factors;
  FactorParams g = FactorParams::zeros(params.n_users, params.n_items, f, params.implicit);
  g.use_mu = params.use_mu;
  g.mu = 0.0;
  std::vector<double> z(f), implicit_grad(f);
  for (Index u = 0; u < train.n_users(); ++u) {
    auto row = train.user_row(u);
    if (row.empty()) continue;
    user_vector(params, train, u, z.data());
    const double norm = implicit_norm(row.size());
    std::fill(implicit_grad.begin(), implicit_grad.end(), 0.0);
    for (const Cell& c : row) {
      const Index i = c.index;
      const double e = c.rating - score(params, z.data(), u, i);
      g.user_bias[u] += -e + reg * params.user_bias[u];
      g.item_bias[i] += -e + reg * params.item_bias[i];
      const double* p = params.p(u);
      const double* q = params.q(i);
      double* gp = g.p(u);
      double* gq = g.q(i);
      for (std::size_t k = 0; k < f; ++k) {
        gp[k] += -e * q[k] + reg * p[k];
        gq[k] += -e * z[k] + reg * q[k];
        implicit_grad[k] += -e * norm * q[k];
      }
    }
    if (!params.implicit) continue;
    const double samples = static_cast<double>(row.size());
    for (const Cell& c : row) {
      const double* y = params.y(c.index);
      double* gy = g.y(c.index);
      for (std::size_t k = 0; k < f; ++k) gy[k] += implicit_grad[k] + samples * reg * y[k];
    }
  }
  return g;
}

namespace {

// One SGD step on the per-rating term of factor_objective; all partial
// derivatives are taken at the pre-step parameters.
void sgd_step(FactorParams& params, const SparseRatingMatrix& train, const Interaction& s, double lr, double reg,
              bool freeze_latents, std::vector<double>& z, std::vector<double>& q_old) {
  const std::size_t f = params.factors;
  const Index u = s.user, i = s.item;
  user_vector(params, train, u, z.data());
  const double e = s.rating - score(params, z.data(), u, i);

  params.user_bias[u] -= lr * (-e + reg * params.user_bias[u]);
  params.item_bias[i] -= lr * (-e + reg * params.item_bias[i]);
  if (freeze_latents) return;

  double* p = params.p(u);
  double* q = params.q(i);
  std::copy_n(q, f, q_old.data());
  if (params.implicit) {
    auto rated = train.user_row(u);
    const double norm = implicit_norm(rated.size());
    for (const Cell& c : rated) {
      double* y = params.y(c.index);
      for (std::size_t k = 0; k < f; ++k) y[k] -= lr * (-e * norm * q_old[k] + reg * y[k]);
    }
  }
  for (std::size_t k = 0; k < f; ++k) {
    const double pk = p[k];
    p[k] -= lr * (-e * q_old[k] + reg * pk);
    q[k] -= lr * (-e * z[k] + reg * q_old[k]);
  }
}

FactorPredictor train_factors(const TrainSet& train, const FactorOptions& options, bool implicit) {
  if (options.factors < 1) throw ValidationError("factors must be at least 1");
  if (!(options.lr > 0.0) || !(options.reg > 0.0)) throw ValidationError("lr and reg must be positive");
  if (train->nnz() == 0) throw TrainingError("cannot train a factor model on an empty training set");

  const SparseRatingMatrix& R = *train;
  FactorParams params = FactorParams::zeros(R.n_users(), R.n_items(), options.factors, implicit);
  params.use_mu = implicit || options.use_mu;
  params.mu = R.mean_rating();

  std::mt19937_64 rng(options.seed);
  if (options.init_std > 0.0) {
    std::normal_distribution<double> init(0.0, options.init_std);
    for (double& v : params.user_factors) v = init(rng);
    for (double& v : params.item_factors) v = init(rng);
    for (double& v : params.implicit_factors) v = init(rng);
  }

  std::vector<Interaction> samples = R.triples();
  std::vector<std::size_t> order(samples.size());
  std::vector<double> z(options.factors), q_old(options.factors);
  TrainingTrace trace;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t s : order) sgd_step(params, R, samples[s], options.lr, options.reg, options.freeze_latents, z, q_old);
    const double objective = factor_objective(params, R, options.reg);
    if (!std::isfinite(objective))
      throw TrainingError(fmt::format("{} diverged at epoch {} (lr={})", implicit ? "svdpp" : "svd", epoch, options.lr));
    trace.epoch_objective.push_back(objective);
  }

  double sq = 0.0;
  for (const auto& s : samples) {
    const double e = s.rating - factor_predict(params, R, s.user, s.item);
    sq += e * e;
  }
  trace.train_rmse = std::sqrt(sq / static_cast<double>(samples.size()));
  return FactorPredictor(TrainingSummary::from(R), train, std::move(params), std::move(trace));
}

}  // namespace

FactorPredictor::FactorPredictor(TrainingSummary summary, TrainSet train, FactorParams params, TrainingTrace trace)
    : Predictor(std::move(summary)), train_(std::move(train)), params_(std::move(params)), trace_(std::move(trace)) {
  if (params_.n_users != n_users() || params_.n_items != n_items())
    throw FormatError("factor parameters do not match the training index space");
  user_vectors_.resize(params_.n_users * params_.factors);
  for (Index u = 0; u < params_.n_users; ++u)
    user_vector(params_, *train_, u, user_vectors_.data() + u * params_.factors);
}

double FactorPredictor::predict(Index user, Index item) const {
  check_index(user, item);
  if (!summary_.user_seen(user) || !summary_.item_seen(item)) return summary_.fallback(user, item);
  return score(params_, user_vectors_.data() + user * params_.factors, user, item);
}

FactorPredictor fit_svd(const TrainSet& train, const FactorOptions& options) {
  return train_factors(train, options, false);
}

FactorPredictor fit_svdpp(const TrainSet& train, const FactorOptions& options) {
  return train_factors(train, options, true);
}

}  // namespace greenrec::models
