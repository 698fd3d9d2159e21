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
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "greenrec/core.hpp"

namespace testutil {

using greenrec::Dataset;
using greenrec::Index;
using greenrec::Interaction;
using greenrec::SparseRatingMatrix;

struct Triple {
  std::string user, item;
  double rating;
};

inline Dataset make_dataset(const std::vector<Triple>& triples) {
  Dataset d;
  for (const auto& t : triples) {
    Interaction x;
    x.user = d.users.intern(t.user);
    x.item = d.items.intern(t.item);
    x.rating = t.rating;
    d.interactions.push_back(x);
  }
  return d;
}

inline std::vector<Interaction> dense_triples(std::initializer_list<std::tuple<Index, Index, double>> list) {
  std::vector<Interaction> out;
  for (const auto& [u, i, r] : list) out.push_back({u, i, r, {}});
  return out;
}

inline SparseRatingMatrix matrix(std::size_t n_users, std::size_t n_items, const std::vector<Interaction>& entries) {
  return SparseRatingMatrix(n_users, n_items, entries);
}

/// Every cell present with probability `density`, integer ratings 0..5.
inline std::vector<Interaction> random_entries(std::mt19937_64& rng, std::size_t n_users, std::size_t n_items,
                                               double density, bool integer = true) {
  std::bernoulli_distribution keep(density);
  std::uniform_int_distribution<int> r5(0, 5);
  std::uniform_real_distribution<double> real5(0.0, 5.0);
  std::vector<Interaction> out;
  for (Index u = 0; u < n_users; ++u)
    for (Index i = 0; i < n_items; ++i)
      if (keep(rng)) out.push_back({u, i, integer ? static_cast<double>(r5(rng)) : real5(rng), {}});
  return out;
}

inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n_users, std::size_t n_items, double density) {
  Dataset d;
  for (std::size_t u = 0; u < n_users; ++u) d.users.intern("u" + std::to_string(u));
  for (std::size_t i = 0; i < n_items; ++i) d.items.intern("i" + std::to_string(i));
  d.interactions = random_entries(rng, n_users, n_items, density);
  return d;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("greenrec_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / scale;
}

}  // namespace testutil
