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

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "greenrec/error.hpp"
#include "greenrec/eval.hpp"
#include "greenrec/grid.hpp"
#include "greenrec/prep.hpp"
#include "greenrec/rerank.hpp"
#include "greenrec/synth.hpp"
#include "json.hpp"

namespace greenrec::experiment {

/// A failure inside run_benchmark, tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct AlgorithmConfig {
  models::Algorithm algorithm = models::Algorithm::GlobalMean;
  models::HyperGrid grid;
};

struct ExperimentConfig {
  // Data: either files or a synthetic preset.
  std::filesystem::path interactions;
  std::filesystem::path greenness;
  std::string schema;
  bool recompute_greenness = false;
  std::optional<synth::SynthParams> synth;

  bool prefilter = true;
  prep::PrefilterOptions prefilter_options;
  bool require_greenness = true;  // prefilter keeps only items with a greenness entry

  std::size_t n_splits = 5;
  std::uint64_t split_seed = 0;
  prep::Ratios ratios;

  std::vector<AlgorithmConfig> algorithms;
  std::vector<std::size_t> ks = eval::kDefaultKs;
  std::vector<double> alphas = rerank::default_alphas();
  std::size_t metric_k = 10;
  std::size_t batch_size = 100;
  std::uint64_t seed = 0;

  std::filesystem::path output = "greenrec-out";

  /// Relative paths are resolved against `base_dir`. Unknown keys and unknown
  /// algorithm tags are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static ExperimentConfig from_file(const std::filesystem::path& path);

  /// Checks everything that can be checked without doing work.
  void validate() const;

  nlohmann::json to_json() const;
};

struct AlgorithmResult {
  models::Algorithm algorithm;
  std::vector<models::GridSearchResult> searches;                // per split
  std::vector<std::vector<rerank::TradeoffPoint>> sweeps;        // per split
  std::vector<eval::MetricSummary> report;                       // all alphas
  std::vector<rerank::TradeoffPoint> tradeoff;                   // split means
};

struct BenchmarkResult {
  Dataset dataset;
  std::vector<prep::SplitResult> splits;
  std::vector<AlgorithmResult> algorithms;
};

/// prefilter -> make_splits -> grid_search per split -> evaluate -> alpha sweep,
/// writing splits/, models/, report.csv, tradeoff.csv, plot_long.csv and
/// manifest.json under config.output. Artifacts finished before a failing
/// stage stay on disk.
BenchmarkResult run_benchmark(const ExperimentConfig& config, Exec exec = Exec::Parallel);

/// Mean over splits of each (alpha, k) point; relative columns compare means.
std::vector<rerank::TradeoffPoint> mean_tradeoff(const std::vector<std::vector<rerank::TradeoffPoint>>& sweeps);

}  // namespace greenrec::experiment
