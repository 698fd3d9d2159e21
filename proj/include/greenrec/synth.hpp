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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "greenrec/core.hpp"
#include "greenrec/footprint.hpp"
#include "json.hpp"

namespace greenrec::synth {

struct SynthParams {
  // Dense enough that per-user test lists reach the k horizons being scored.
  std::size_t n_users = 250;
  std::size_t n_items = 1500;
  std::size_t n_interactions = 20000;
  double item_popularity_exponent = 1.1;
  double user_activity_exponent = 0.8;
  std::array<double, 6> rating_pmf = {0.02, 0.01, 0.01, 0.04, 0.15, 0.77};
  double greenness_mode = 3.0;
  double greenness_sd = 1.0;
  double co2_log_mu = 0.0;     // lognormal location of CO2-eq in kg
  double co2_log_sigma = 0.8;  // lognormal scale
  /// Share of rating variance explained by latent user/item affinity, in
  /// [0,1). 0 gives i.i.d. ratings; the marginal pmf is kept either way.
  double rating_signal = 0.6;
  std::size_t latent_dim = 8;
  std::uint64_t seed = 0;

  /// "recipe-like" (alias "default") or "tiny".
  static SynthParams preset(std::string_view name);

  /// Overrides fields from a JSON object with the same names.
  void apply(const nlohmann::json& overrides);

  void validate() const;
};

struct SynthData {
  Dataset dataset;
  footprint::GreennessTable greenness;
};

/// Users and items are drawn from independent Zipf laws over randomly permuted
/// ids, duplicate pairs are redrawn, ratings follow rating_pmf through a
/// Gaussian copula on latent affinity, and greenness follows a normal clamped
/// to [0,5] (realized through CO2 values and recalibrated over the item set).
SynthData generate(const SynthParams& params);

/// interactions.csv and greenness.csv under `dir`.
void write(const std::filesystem::path& dir, const SynthData& data);

}  // namespace greenrec::synth
