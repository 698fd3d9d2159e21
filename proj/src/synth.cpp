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

#include "greenrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include <fmt/format.h>

#include "greenrec/error.hpp"

namespace greenrec::synth {

SynthParams SynthParams::preset(std::string_view name) {
  SynthParams p;
  if (name == "recipe-like" || name == "default") return p;
  if (name == "tiny") {
    p.n_users = 60;
    p.n_items = 30;
    p.n_interactions = 400;
    return p;
  }
  throw ValidationError("unknown synth preset '" + std::string(name) + "'");
}

void SynthParams::apply(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("synth overrides must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") continue;
    if (key == "n_users") n_users = value.get<std::size_t>();
    else if (key == "n_items") n_items = value.get<std::size_t>();
    else if (key == "n_interactions") n_interactions = value.get<std::size_t>();
    else if (key == "item_popularity_exponent") item_popularity_exponent = value.get<double>();
    else if (key == "user_activity_exponent") user_activity_exponent = value.get<double>();
    else if (key == "rating_pmf") rating_pmf = value.get<std::array<double, 6>>();
    else if (key == "greenness_mode") greenness_mode = value.get<double>();
    else if (key == "greenness_sd") greenness_sd = value.get<double>();
    else if (key == "co2_log_mu") co2_log_mu = value.get<double>();
    else if (key == "co2_log_sigma") co2_log_sigma = value.get<double>();
    else if (key == "rating_signal") rating_signal = value.get<double>();
    else if (key == "latent_dim") latent_dim = value.get<std::size_t>();
    else if (key == "seed") seed = value.get<std::uint64_t>();
    else throw ValidationError("unknown synth parameter '" + key + "'");
  }
}

void SynthParams::validate() const {
  if (n_users < 1 || n_items < 1) throw ValidationError("synth needs at least one user and one item");
  if (n_interactions > n_users * n_items) throw ValidationError("n_interactions exceeds n_users * n_items");
  if (!(item_popularity_exponent > 0.0) || !(user_activity_exponent > 0.0))
    throw ValidationError("Zipf exponents must be positive");
  double total = 0.0;
  for (double p : rating_pmf) {
    if (!(p >= 0.0)) throw ValidationError("rating pmf entries must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("rating pmf must sum to 1");
  if (!(greenness_mode >= 0.0 && greenness_mode <= 5.0)) throw ValidationError("greenness_mode must lie in [0,5]");
  if (!(greenness_sd > 0.0)) throw ValidationError("greenness_sd must be positive");
  if (!(co2_log_sigma > 0.0)) throw ValidationError("co2_log_sigma must be positive");
  if (!(rating_signal >= 0.0 && rating_signal < 1.0)) throw ValidationError("rating_signal must lie in [0,1)");
  if (latent_dim < 1) throw ValidationError("latent_dim must be at least 1");
}

namespace {

// Zipf law over ranks; rank r is assigned to a randomly permuted id.
struct ZipfSampler {
  std::discrete_distribution<std::size_t> rank;
  std::vector<std::size_t> id_of_rank;

  ZipfSampler(std::size_t n, double exponent, std::mt19937_64& rng) : id_of_rank(n) {
    std::vector<double> w(n);
    for (std::size_t r = 0; r < n; ++r) w[r] = std::pow(static_cast<double>(r + 1), -exponent);
    rank = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    std::iota(id_of_rank.begin(), id_of_rank.end(), std::size_t{0});
    std::shuffle(id_of_rank.begin(), id_of_rank.end(), rng);
  }

  std::size_t operator()(std::mt19937_64& rng) { return id_of_rank[rank(rng)]; }
};

struct Latent {
  double bias;
  std::vector<double> factors;
};

std::vector<Latent> draw_latents(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<Latent> out(n);
  for (auto& l : out) {
    l.bias = normal(rng);
    l.factors.resize(dim);
    for (double& f : l.factors) f = normal(rng);
  }
  return out;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::string pad_id(char prefix, std::size_t n, std::size_t width) {
  return fmt::format("{}{:0{}}", prefix, n, width);
}

}  // namespace

SynthData generate(const SynthParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);

  // Greenness first, realized as CO2 inside the lognormal's +-3 sigma range.
  std::normal_distribution<double> green(p.greenness_mode, p.greenness_sd);
  const double raw_lo = footprint::raw_greenness(std::exp(p.co2_log_mu + 3.0 * p.co2_log_sigma));
  const double raw_hi = footprint::raw_greenness(std::exp(p.co2_log_mu - 3.0 * p.co2_log_sigma));
  const std::size_t width = std::to_string(std::max(p.n_users, p.n_items)).size();
  std::map<std::string, double> co2;
  for (std::size_t i = 0; i < p.n_items; ++i) {
    const double g = std::clamp(green(rng), 0.0, 5.0);
    const double raw = raw_lo + g / 5.0 * (raw_hi - raw_lo);
    co2[pad_id('r', i, width)] = 1.0 / std::expm1(raw);
  }

  const auto users = draw_latents(p.n_users, p.latent_dim, rng);
  const auto items = draw_latents(p.n_items, p.latent_dim, rng);
  ZipfSampler pick_item(p.n_items, p.item_popularity_exponent, rng);
  ZipfSampler pick_user(p.n_users, p.user_activity_exponent, rng);

  std::array<double, 6> cdf{};
  std::partial_sum(p.rating_pmf.begin(), p.rating_pmf.end(), cdf.begin());
  std::normal_distribution<double> noise;
  const double signal = std::sqrt(p.rating_signal), rest = std::sqrt(1.0 - p.rating_signal);
  const double dim_norm = 1.0 / std::sqrt(static_cast<double>(p.latent_dim));

  SynthData out;
  std::unordered_set<std::uint64_t> seen;
  const std::size_t max_attempts = 100 * std::max<std::size_t>(p.n_interactions, 1);
  std::size_t attempts = 0;
  while (out.dataset.interactions.size() < p.n_interactions) {
    if (++attempts > max_attempts)
      throw ValidationError(fmt::format("could only place {} of {} distinct interactions; use a smaller n_interactions",
                                        out.dataset.interactions.size(), p.n_interactions));
    const std::size_t u = pick_user(rng), i = pick_item(rng);
    if (!seen.insert((std::uint64_t{u} << 32) | i).second) continue;
    double dot = 0.0;
    for (std::size_t d = 0; d < p.latent_dim; ++d) dot += users[u].factors[d] * items[i].factors[d];
    const double affinity = (users[u].bias + items[i].bias + dot * dim_norm) / std::sqrt(3.0);
    const double quantile = normal_cdf(signal * affinity + rest * noise(rng));
    int rating = 5;
    for (int r = 0; r < 6; ++r) {
      if (quantile <= cdf[r]) {
        rating = r;
        break;
      }
    }
    Interaction x;
    x.user = out.dataset.users.intern(pad_id('u', u, width));
    x.item = out.dataset.items.intern(pad_id('r', i, width));
    x.rating = rating;
    x.timestamp = "2000-01-01";
    out.dataset.interactions.push_back(std::move(x));
  }
  out.greenness = footprint::GreennessTable::from_co2(co2);
  return out;
}

void write(const std::filesystem::path& dir, const SynthData& data) {
  std::filesystem::create_directories(dir);
  write_interactions(dir / "interactions.csv", data.dataset);
  footprint::write_greenness(dir / "greenness.csv", data.greenness);
}

}  // namespace greenrec::synth
