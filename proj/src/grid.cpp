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

#include "greenrec/grid.hpp"

#include <algorithm>

#include "greenrec/error.hpp"

namespace greenrec::models {

HyperGrid::HyperGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  for (const auto& a : axes_) {
    if (a.values.empty()) throw ValidationError("grid axis '" + a.name + "' has no values");
    for (const auto& b : axes_)
      if (&a != &b && a.name == b.name) throw ValidationError("grid axis '" + a.name + "' given twice");
  }
}

std::size_t HyperGrid::size() const noexcept {
  std::size_t n = 1;
  for (const auto& a : axes_) n *= a.values.size();
  return n;
}

HyperParams HyperGrid::point(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("grid point index out of range");
  HyperParams p;
  for (auto a = axes_.rbegin(); a != axes_.rend(); ++a) {
    p[a->name] = a->values[index % a->values.size()];
    index /= a->values.size();
  }
  return p;
}

std::vector<HyperParams> HyperGrid::points() const {
  std::vector<HyperParams> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
  return out;
}

HyperGrid HyperGrid::standard(Algorithm algo) {
  switch (algo) {
    case Algorithm::Random:
    case Algorithm::GlobalMean:
      return HyperGrid{};
    case Algorithm::ItemNN:
    case Algorithm::UserNN:
      return HyperGrid({{"k", {20, 40, 60}}});
    case Algorithm::SVD:
    case Algorithm::SVDpp:
      return HyperGrid({{"factors", {20, 50, 100, 150}},
                        {"lr", {0.1, 0.01, 0.001, 0.0001}},
                        {"reg", {0.1, 0.01, 0.001, 0.0001}},
                        {"epochs", {20, 50, 80}}});
    case Algorithm::CoClustering:
      return HyperGrid({{"user_clusters", {3, 6, 12, 24}}, {"item_clusters", {3, 6, 12, 24}}, {"epochs", {20, 50, 80}}});
    case Algorithm::SLIM:
      return HyperGrid({{"beta", {0.005, 0.05, 0.5}}, {"lambda", {0.005, 0.05, 0.5}}});
  }
  return HyperGrid{};
}

HyperGrid HyperGrid::desk(Algorithm algo) {
  switch (algo) {
    case Algorithm::ItemNN:
    case Algorithm::UserNN:
      return HyperGrid({{"k", {20, 40}}});
    case Algorithm::SVD:
    case Algorithm::SVDpp:
      return HyperGrid({{"factors", {20}}, {"lr", {0.01}}, {"reg", {0.1, 0.01}}, {"epochs", {20}}});
    case Algorithm::CoClustering:
      return HyperGrid({{"user_clusters", {3, 6}}, {"item_clusters", {3, 6}}, {"epochs", {20}}});
    case Algorithm::SLIM:
      return HyperGrid({{"beta", {0.05, 0.5}}, {"lambda", {0.05}}});
    default:
      return standard(algo);
  }
}

HyperGrid HyperGrid::from_json(Algorithm algo, const nlohmann::json& spec) {
  if (spec.is_null()) return standard(algo);
  if (spec.is_string()) {
    const auto name = spec.get<std::string>();
    if (name == "default") return standard(algo);
    if (name == "desk") return desk(algo);
    throw ValidationError("unknown grid preset '" + name + "'");
  }
  if (!spec.is_object()) throw ValidationError("grid must be a preset name or an object of value lists");
  std::vector<GridAxis> axes;
  for (const auto& [name, values] : spec.items()) {
    GridAxis axis{name, {}};
    if (values.is_number()) {
      axis.values.push_back(values.get<double>());
    } else if (values.is_array()) {
      for (const auto& v : values) {
        if (!v.is_number()) throw ValidationError("grid axis '" + name + "' must hold numbers");
        axis.values.push_back(v.get<double>());
      }
    } else {
      throw ValidationError("grid axis '" + name + "' must be a number or a list");
    }
    axes.push_back(std::move(axis));
  }
  return HyperGrid(std::move(axes));
}

nlohmann::json HyperGrid::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& a : axes_) j[a.name] = a.values;
  return j;
}

double validation_score(const Predictor& predictor, std::span<const Interaction> validation, std::size_t k,
                        const eval::BatchOptions& batches, Exec exec) {
  std::vector<eval::ScoredRating> scored(validation.size());
  for (std::size_t n = 0; n < validation.size(); ++n) {
    const auto& x = validation[n];
    scored[n] = {x.user, x.item, std::clamp(predictor.predict(x.user, x.item), kMinRating, kMaxRating), x.rating, 0.0};
  }
  return eval::ndcg_batched(scored, k, batches, exec);
}

GridSearchResult grid_search(Algorithm algo, const HyperGrid& grid, const TrainSet& train,
                             std::span<const Interaction> validation, const GridSearchOptions& options) {
  if (validation.empty()) throw ValidationError("grid search needs a non-empty validation set");
  const std::size_t n = grid.size();
  GridSearchResult result;
  result.points.resize(n);
  // Parallelism goes to the outer loop when there is more than one point.
  const Exec inner = n > 1 ? Exec::Serial : options.exec;
  bool have_best = false;
  for_each_index(n, n > 1 ? options.exec : Exec::Serial, [&](std::size_t idx) {
    GridPointResult& point = result.points[idx];
    point.params = grid.point(idx);
    PredictorPtr model;
    try {
      model = fit(algo, train, point.params, options.seed, inner);
      point.score = validation_score(*model, validation, options.metric_k, options.batches, inner);
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      point.failed = true;
      point.error = e.what();
      return;
    }
#pragma omp critical(greenrec_grid_best)
    {
      if (!have_best || point.score > result.score || (point.score == result.score && idx < result.best_index)) {
        have_best = true;
        result.best_index = idx;
        result.score = point.score;
        result.predictor = model;
      }
    }
  });
  if (!have_best) {
    std::string first = result.points.empty() ? "" : result.points.front().error;
    throw TrainingError("every grid point failed for " + std::string(to_string(algo)) + ": " + first);
  }
  result.best = result.points[result.best_index].params;
  return result;
}

}  // namespace greenrec::models
