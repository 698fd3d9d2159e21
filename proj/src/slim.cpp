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
#include <cmath>

#include "greenrec/error.hpp"
#include "greenrec/models.hpp"

namespace greenrec::models {

namespace {

// Items sharing at least one rater with `column`, ascending, excluding itself.
std::vector<Index> candidate_items(const SparseRatingMatrix& R, Index column) {
  std::vector<Index> out;
  for (const Cell& rater : R.item_column(column))
    for (const Cell& c : R.user_row(rater.index))
      if (c.index != column) out.push_back(c.index);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double column_objective(const std::vector<double>& residual, const std::vector<Index>& touched,
                        const std::vector<double>& w, double beta, double lambda) {
  double fit = 0.0, l2 = 0.0, l1 = 0.0;
  for (Index u : touched) fit += residual[u] * residual[u];
  for (double x : w) {
    l2 += x * x;
    l1 += x;
  }
  return 0.5 * fit + 0.5 * beta * l2 + lambda * l1;
}

}  // namespace

SlimColumn solve_slim_column(const SparseRatingMatrix& R, Index column, const SlimOptions& options) {
  if (column >= R.n_items()) throw std::out_of_range("slim column outside the item range");
  SlimColumn out;
  const std::vector<Index> cand = candidate_items(R, column);

  // Dense residual over users; `touched` lists every user whose entry may be non-zero.
  std::vector<double> residual(R.n_users(), 0.0);
  std::vector<char> mark(R.n_users(), 0);
  std::vector<Index> touched;
  for (const Cell& c : R.item_column(column)) {
    residual[c.index] = c.rating;
    mark[c.index] = 1;
    touched.push_back(c.index);
  }
  for (Index k : cand)
    for (const Cell& c : R.item_column(k))
      if (!mark[c.index]) {
        mark[c.index] = 1;
        touched.push_back(c.index);
      }

  std::vector<double> z(cand.size(), 0.0);
  for (std::size_t n = 0; n < cand.size(); ++n)
    for (const Cell& c : R.item_column(cand[n])) z[n] += c.rating * c.rating;

  std::vector<double> w(cand.size(), 0.0);
  out.objective.push_back(column_objective(residual, touched, w, options.beta, options.lambda));
  for (std::size_t pass = 0; pass < options.max_passes; ++pass) {
    double max_change = 0.0;
    for (std::size_t n = 0; n < cand.size(); ++n) {
      auto col = R.item_column(cand[n]);
      double rho = w[n] * z[n];
      for (const Cell& c : col) rho += c.rating * residual[c.index];
      const double updated = std::max(0.0, (rho - options.lambda) / (z[n] + options.beta));
      const double delta = updated - w[n];
      if (delta == 0.0) continue;
      for (const Cell& c : col) residual[c.index] -= delta * c.rating;
      w[n] = updated;
      max_change = std::max(max_change, std::abs(delta));
    }
    ++out.passes;
    out.objective.push_back(column_objective(residual, touched, w, options.beta, options.lambda));
    if (max_change <= options.tol) {
      out.converged = true;
      break;
    }
  }
  for (std::size_t n = 0; n < cand.size(); ++n)
    if (w[n] > 0.0) out.weights.push_back({cand[n], w[n]});
  return out;
}

double slim_objective(const SparseRatingMatrix& R, const std::vector<std::vector<Cell>>& columns, double beta,
                      double lambda) {
  if (columns.size() != R.n_items()) throw ValidationError("slim_objective needs one column per item");
  std::vector<double> per_column(columns.size(), 0.0);
  std::vector<double> residual(R.n_users(), 0.0);
  for (Index j = 0; j < columns.size(); ++j) {
    std::fill(residual.begin(), residual.end(), 0.0);
    for (const Cell& c : R.item_column(j)) residual[c.index] = c.rating;
    double l2 = 0.0, l1 = 0.0;
    for (const Cell& w : columns[j]) {
      if (w.index == j) throw ValidationError("slim weight on the diagonal");
      for (const Cell& c : R.item_column(w.index)) residual[c.index] -= w.rating * c.rating;
      l2 += w.rating * w.rating;
      l1 += std::abs(w.rating);
    }
    double fit = 0.0;
    for (double r : residual) fit += r * r;
    per_column[j] = 0.5 * fit + 0.5 * beta * l2 + lambda * l1;
  }
  return stable_sum(per_column);
}

SlimPredictor::SlimPredictor(TrainingSummary summary, TrainSet train, std::vector<std::vector<Cell>> columns)
    : Predictor(std::move(summary)), train_(std::move(train)), columns_(std::move(columns)) {
  if (columns_.size() != n_items() || train_->n_users() != n_users())
    throw FormatError("slim weights do not match the training index space");
}

double SlimPredictor::predict(Index user, Index item) const {
  check_index(user, item);
  if (!summary_.user_seen(user) || !summary_.item_seen(item)) return summary_.fallback(user, item);
  const auto row = train_->user_row(user);
  const auto& w = columns_[item];
  double s = 0.0;
  auto a = row.begin();
  auto b = w.begin();
  while (a != row.end() && b != w.end()) {
    if (a->index < b->index) {
      ++a;
    } else if (b->index < a->index) {
      ++b;
    } else {
      s += a->rating * b->rating;
      ++a;
      ++b;
    }
  }
  return s;
}

SlimPredictor fit_slim(const TrainSet& train, const SlimOptions& options) {
  if (!(options.beta >= 0.0) || !(options.lambda >= 0.0)) throw ValidationError("beta and lambda must be non-negative");
  if (options.max_passes < 1) throw ValidationError("max_passes must be at least 1");
  if (train->nnz() == 0) throw TrainingError("cannot fit slim on an empty training set");
  const SparseRatingMatrix& R = *train;
  std::vector<SlimColumn> solved(R.n_items());
  for_each_index(R.n_items(), options.exec,
                 [&](std::size_t j) { solved[j] = solve_slim_column(R, static_cast<Index>(j), options); });

  std::size_t length = 0;
  for (const auto& c : solved) length = std::max(length, c.objective.size());
  std::vector<double> trace(length, 0.0), terms(solved.size());
  for (std::size_t p = 0; p < length; ++p) {
    for (std::size_t j = 0; j < solved.size(); ++j) {
      const auto& obj = solved[j].objective;
      terms[j] = obj[std::min(p, obj.size() - 1)];
    }
    trace[p] = stable_sum(terms);
  }

  std::vector<std::vector<Cell>> columns(solved.size());
  std::vector<char> converged(solved.size());
  for (std::size_t j = 0; j < solved.size(); ++j) {
    columns[j] = std::move(solved[j].weights);
    converged[j] = solved[j].converged ? 1 : 0;
  }
  SlimPredictor model(TrainingSummary::from(R), train, std::move(columns));
  model.set_training_info(std::move(trace), std::move(converged));
  return model;
}

}  // namespace greenrec::models
