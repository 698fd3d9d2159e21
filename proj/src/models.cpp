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
#include <cctype>
#include <cmath>
#include <limits>

#include "greenrec/error.hpp"
#include "greenrec/models.hpp"

namespace greenrec::models {

namespace {

constexpr std::string_view kTags[] = {"random", "globalmean", "itemnn", "usernn", "svd", "svdpp", "cocluster", "slim"};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(Algorithm algo) { return kTags[static_cast<std::size_t>(algo)]; }

Algorithm parse_algorithm(std::string_view tag) {
  std::string t;
  for (char c : tag)
    if (c != '_' && c != '-' && c != ' ') t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "svd++") return Algorithm::SVDpp;
  if (t == "coclustering") return Algorithm::CoClustering;
  if (t == "global" || t == "mean") return Algorithm::GlobalMean;
  for (std::size_t i = 0; i < std::size(kTags); ++i)
    if (t == kTags[i]) return static_cast<Algorithm>(i);
  throw ValidationError("unknown algorithm '" + std::string(tag) + "'");
}

TrainSet share(SparseRatingMatrix matrix) { return std::make_shared<const SparseRatingMatrix>(std::move(matrix)); }

TrainingSummary TrainingSummary::from(const SparseRatingMatrix& train) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  TrainingSummary s;
  s.global_mean = train.mean_rating();
  s.user_mean.assign(train.n_users(), nan);
  s.item_mean.assign(train.n_items(), nan);
  for (Index u = 0; u < train.n_users(); ++u) {
    auto row = train.user_row(u);
    if (row.empty()) continue;
    double sum = 0.0;
    for (const auto& c : row) sum += c.rating;
    s.user_mean[u] = sum / static_cast<double>(row.size());
  }
  for (Index i = 0; i < train.n_items(); ++i) {
    auto col = train.item_column(i);
    if (col.empty()) continue;
    double sum = 0.0;
    for (const auto& c : col) sum += c.rating;
    s.item_mean[i] = sum / static_cast<double>(col.size());
  }
  return s;
}

double TrainingSummary::fallback(Index u, Index i) const {
  if (item_seen(i)) return item_mean[i];
  if (user_seen(u)) return user_mean[u];
  return global_mean;
}

void Predictor::check_index(Index user, Index item) const {
  if (user >= n_users() || item >= n_items())
    throw std::out_of_range("prediction index (" + std::to_string(user) + ", " + std::to_string(item) +
                            ") outside the trained index space");
}

double RandomPredictor::predict(Index user, Index item) const {
  check_index(user, item);
  const std::uint64_t h = splitmix64(seed_ ^ splitmix64((std::uint64_t{user} << 32) | item));
  return 5.0 * static_cast<double>(h >> 11) * 0x1.0p-53;
}

double GlobalMeanPredictor::predict(Index user, Index item) const {
  check_index(user, item);
  return summary_.global_mean;
}

RandomPredictor fit_random(const SparseRatingMatrix& train, std::uint64_t seed) {
  return RandomPredictor(TrainingSummary::from(train), seed);
}

GlobalMeanPredictor fit_global_mean(const SparseRatingMatrix& train) {
  if (train.nnz() == 0) throw TrainingError("global mean of an empty training set");
  return GlobalMeanPredictor(TrainingSummary::from(train));
}

namespace {

double require(const HyperParams& hyper, const char* key) {
  auto it = hyper.find(key);
  if (it == hyper.end()) throw ValidationError(std::string("missing hyperparameter '") + key + "'");
  return it->second;
}

double optional(const HyperParams& hyper, const char* key, double fallback) {
  auto it = hyper.find(key);
  return it == hyper.end() ? fallback : it->second;
}

std::size_t count(const HyperParams& hyper, const char* key) {
  const double v = require(hyper, key);
  if (!(v >= 0.0) || v != std::floor(v)) throw ValidationError(std::string("hyperparameter '") + key + "' must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

PredictorPtr fit(Algorithm algo, const TrainSet& train, const HyperParams& hyper, std::uint64_t seed, Exec exec) {
  switch (algo) {
    case Algorithm::Random:
      return std::make_shared<RandomPredictor>(fit_random(*train, seed));
    case Algorithm::GlobalMean:
      return std::make_shared<GlobalMeanPredictor>(fit_global_mean(*train));
    case Algorithm::ItemNN:
      return std::make_shared<NeighborPredictor>(fit_itemnn(train, count(hyper, "k"), optional(hyper, "min_sim", 0.0), exec));
    case Algorithm::UserNN:
      return std::make_shared<NeighborPredictor>(fit_usernn(train, count(hyper, "k"), optional(hyper, "min_sim", 0.0), exec));
    case Algorithm::SVD:
    case Algorithm::SVDpp: {
      FactorOptions o;
      o.factors = count(hyper, "factors");
      o.lr = require(hyper, "lr");
      o.reg = require(hyper, "reg");
      o.epochs = count(hyper, "epochs");
      o.use_mu = optional(hyper, "use_mu", 0.0) != 0.0;
      o.seed = seed;
      return std::make_shared<FactorPredictor>(algo == Algorithm::SVD ? fit_svd(train, o) : fit_svdpp(train, o));
    }
    case Algorithm::CoClustering: {
      CoClusterOptions o;
      o.user_clusters = count(hyper, "user_clusters");
      o.item_clusters = count(hyper, "item_clusters");
      o.epochs = count(hyper, "epochs");
      o.seed = seed;
      return std::make_shared<CoClusterPredictor>(fit_cocluster(*train, o));
    }
    case Algorithm::SLIM: {
      SlimOptions o;
      o.beta = require(hyper, "beta");
      o.lambda = require(hyper, "lambda");
      o.max_passes = static_cast<std::size_t>(optional(hyper, "max_passes", 100));
      o.tol = optional(hyper, "tol", 1e-4);
      o.exec = exec;
      return std::make_shared<SlimPredictor>(fit_slim(train, o));
    }
  }
  throw ValidationError("unhandled algorithm");
}

}  // namespace greenrec::models
