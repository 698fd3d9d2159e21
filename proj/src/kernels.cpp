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

#include "greenrec/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace greenrec {

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

double stable_sum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      compensation += (sum - t) + v;
    else
      compensation += (v - t) + sum;
    sum = t;
  }
  return sum + compensation;
}

namespace kernels {

double cosine_corated(std::span<const Cell> a, std::span<const Cell> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->index < ib->index) {
      ++ia;
    } else if (ib->index < ia->index) {
      ++ib;
    } else {
      dot += ia->rating * ib->rating;
      na += ia->rating * ia->rating;
      nb += ib->rating * ib->rating;
      ++ia;
      ++ib;
    }
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

namespace {

struct Scratch {
  std::vector<double> dot, norm_self, norm_other;
  std::vector<Index> touched;
  std::vector<char> seen;

  explicit Scratch(std::size_t n) : dot(n, 0.0), norm_self(n, 0.0), norm_other(n, 0.0), seen(n, 0) {}
};

void neighbor_row(const SparseRatingMatrix& m, Index item, double min_sim, Scratch& s, std::vector<Cell>& out) {
  for (const Cell& by : m.item_column(item)) {
    const double r_self = by.rating;
    for (const Cell& other : m.user_row(by.index)) {
      if (other.index == item) continue;
      if (!s.seen[other.index]) {
        s.seen[other.index] = 1;
        s.touched.push_back(other.index);
      }
      s.dot[other.index] += r_self * other.rating;
      s.norm_self[other.index] += r_self * r_self;
      s.norm_other[other.index] += other.rating * other.rating;
    }
  }
  std::sort(s.touched.begin(), s.touched.end());
  out.clear();
  for (Index j : s.touched) {
    const double denom = s.norm_self[j] * s.norm_other[j];
    const double sim = denom == 0.0 ? 0.0 : s.dot[j] / std::sqrt(denom);
    if (sim > min_sim) out.push_back({j, sim});
    s.dot[j] = s.norm_self[j] = s.norm_other[j] = 0.0;
    s.seen[j] = 0;
  }
  s.touched.clear();
}

}  // namespace

NeighborRows item_cosine_neighbors(const SparseRatingMatrix& ratings, double min_sim, Exec exec) {
  const std::size_t n = ratings.n_items();
  NeighborRows rows(n);
  if (exec == Exec::Serial) {
    Scratch s(n);
    for (Index i = 0; i < n; ++i) neighbor_row(ratings, i, min_sim, s, rows[i]);
    return rows;
  }
#pragma omp parallel
  {
    Scratch s(n);
#pragma omp for schedule(dynamic, 8)
    for (std::size_t i = 0; i < n; ++i) neighbor_row(ratings, static_cast<Index>(i), min_sim, s, rows[i]);
  }
  return rows;
}

NeighborRows item_cosine_neighbors_reference(const SparseRatingMatrix& ratings, double min_sim) {
  const std::size_t n = ratings.n_items();
  NeighborRows rows(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sim = cosine_corated(ratings.item_column(i), ratings.item_column(j));
      if (sim > min_sim) rows[i].push_back({j, sim});
    }
  }
  return rows;
}

}  // namespace kernels
}  // namespace greenrec
