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
#include <span>
#include <string>
#include <vector>

#include "greenrec/eval.hpp"
#include "greenrec/models.hpp"
#include "json.hpp"

namespace greenrec::models {

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

/// Cartesian product of named axes. Points are enumerated odometer-style with
/// the last axis varying fastest. A grid without axes has one empty point.
class HyperGrid {
 public:
  HyperGrid() = default;
  explicit HyperGrid(std::vector<GridAxis> axes);

  const std::vector<GridAxis>& axes() const noexcept { return axes_; }
  std::size_t size() const noexcept;
  HyperParams point(std::size_t index) const;
  std::vector<HyperParams> points() const;

  /// The full search space for each algorithm.
  static HyperGrid standard(Algorithm algo);
  /// A small grid inside the full space, sized for quick runs.
  static HyperGrid desk(Algorithm algo);
  /// "default", "desk", or an object of axis name -> value list.
  static HyperGrid from_json(Algorithm algo, const nlohmann::json& spec);
  nlohmann::json to_json() const;

 private:
  std::vector<GridAxis> axes_;
};

struct GridSearchOptions {
  std::size_t metric_k = 10;
  eval::BatchOptions batches;
  std::uint64_t seed = 0;
  Exec exec = Exec::Parallel;
};

struct GridPointResult {
  HyperParams params;
  double score = 0.0;
  bool failed = false;
  std::string error;
};

struct GridSearchResult {
  std::size_t best_index = 0;
  HyperParams best;
  PredictorPtr predictor;
  double score = 0.0;
  std::vector<GridPointResult> points;
};

/// Fits every grid point on `train` and keeps the one with the highest batched
/// NDCG@metric_k on `validation`; ties go to the earlier point. Points that
/// fail are recorded and skipped. Throws TrainingError if every point fails.
GridSearchResult grid_search(Algorithm algo, const HyperGrid& grid, const TrainSet& train,
                             std::span<const Interaction> validation, const GridSearchOptions& options = {});

/// Validation score used by grid_search.
double validation_score(const Predictor& predictor, std::span<const Interaction> validation, std::size_t k,
                        const eval::BatchOptions& batches, Exec exec = Exec::Serial);

}  // namespace greenrec::models
