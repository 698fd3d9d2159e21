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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "greenrec/models.hpp"
#include "json.hpp"

namespace greenrec::serialize {

inline constexpr const char* kModelFormat = "greenrec-model";
inline constexpr int kModelVersion = 1;

/// Base64 of the values as little-endian IEEE-754 doubles.
std::string encode_doubles(std::span<const double> values);
std::vector<double> decode_doubles(std::string_view text);

/// {"ptr": ..., "index": ..., "value": ...} for rows of cells.
nlohmann::json encode_rows(const std::vector<std::vector<Cell>>& rows);
std::vector<std::vector<Cell>> decode_rows(const nlohmann::json& block);

struct ModelInfo {
  models::HyperParams hyperparameters;
  std::uint64_t seed = 0;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  nlohmann::json provenance = nlohmann::json::object();
};

/// The training matrix is always stored so that summaries and any
/// training-dependent terms are rebuilt exactly on load.
nlohmann::json model_to_json(const models::Predictor& predictor, const SparseRatingMatrix& train,
                             const ModelInfo& info);

struct LoadedModel {
  models::PredictorPtr predictor;
  models::TrainSet train;
  ModelInfo info;
};

LoadedModel model_from_json(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const models::Predictor& predictor,
                const SparseRatingMatrix& train, const ModelInfo& info);
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace greenrec::serialize
