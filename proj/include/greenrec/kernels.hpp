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

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#include "greenrec/core.hpp"

namespace greenrec {

/// Execution policy for the data-parallel kernels. Both policies produce
/// bitwise-identical results; Serial exists for testing and as the baseline
/// the benchmark compares against.
enum class Exec { Serial, Parallel };

/// Sets the OpenMP thread cap; 0 leaves the runtime default.
void set_thread_limit(int threads);

/// Runs body(i) for i in [0, n). Exceptions thrown by any iteration are
/// rethrown (the first one caught) after the loop.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(greenrec_for_each_index)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Compensated (Neumaier) sum in input order.
double stable_sum(std::span<const double> values);

namespace kernels {

/// Per-item neighbor lists: (neighbor item, similarity) sorted by neighbor
/// index, self excluded, only similarities strictly above `min_sim`.
using NeighborRows = std::vector<std::vector<Cell>>;

/// Cosine similarity of two sparse vectors restricted to their co-rated
/// support; zero when the support is empty or either restricted norm is 0.
double cosine_corated(std::span<const Cell> a, std::span<const Cell> b);

/// Item-item cosine similarities via per-row co-occurrence accumulation.
NeighborRows item_cosine_neighbors(const SparseRatingMatrix& ratings, double min_sim, Exec exec = Exec::Parallel);

/// Pairwise-merge reference of item_cosine_neighbors; O(items^2) merges.
NeighborRows item_cosine_neighbors_reference(const SparseRatingMatrix& ratings, double min_sim);

}  // namespace kernels
}  // namespace greenrec
