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

#include "greenrec/rerank.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "greenrec/csv.hpp"
#include "greenrec/error.hpp"

namespace greenrec::rerank {

double utility(double r_hat, double g, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1], got " + eval::format_number(alpha));
  return alpha * r_hat + (1.0 - alpha) * g;
}

eval::RankedList rerank_list(const eval::RankedList& list, double alpha) {
  eval::RankedList out = list;
  for (auto& e : out.entries) {
    if (std::isnan(e.greenness)) throw ValidationError("missing greenness for item " + std::to_string(e.item));
    e.score = utility(std::clamp(e.score, kMinRating, kMaxRating), e.greenness, alpha);
  }
  eval::order_by_score(out);
  return out;
}

std::vector<eval::ScoredRating> rerank_scored(std::span<const eval::ScoredRating> scored, double alpha) {
  std::vector<eval::ScoredRating> out(scored.begin(), scored.end());
  for (auto& s : out) {
    if (std::isnan(s.greenness)) throw ValidationError("missing greenness for item " + std::to_string(s.item));
    s.score = utility(std::clamp(s.score, kMinRating, kMaxRating), s.greenness, alpha);
  }
  return out;
}

double relative_change(double value, double baseline) {
  if (baseline == 0.0) return value == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  return value / baseline - 1.0;
}

std::vector<TradeoffPoint> alpha_sweep_scored(std::span<const eval::ScoredRating> scored,
                                              std::span<const double> alphas, std::span<const std::size_t> ks,
                                              const eval::BatchOptions& batches, Exec exec) {
  if (alphas.empty()) throw ValidationError("no alpha values given");
  for (double a : alphas) utility(0.0, 0.0, a);
  const auto base_scored = rerank_scored(scored, 1.0);
  const eval::SplitMetrics base = eval::evaluate_scored(base_scored, ks, batches, exec);
  std::vector<TradeoffPoint> out;
  for (double alpha : alphas) {
    const eval::SplitMetrics m =
        alpha == 1.0 ? base : eval::evaluate_scored(rerank_scored(scored, alpha), ks, batches, exec);
    for (std::size_t n = 0; n < ks.size(); ++n)
      out.push_back({alpha, ks[n], m.ndcg[n], m.gndcg[n], relative_change(m.ndcg[n], base.ndcg[n]),
                     relative_change(m.gndcg[n], base.gndcg[n])});
  }
  return out;
}

std::vector<TradeoffPoint> alpha_sweep(const models::Predictor& predictor, const Dataset& dataset,
                                       const prep::SplitResult& split, const footprint::GreennessTable& greenness,
                                       std::span<const double> alphas, std::span<const std::size_t> ks,
                                       const eval::BatchOptions& batches, Exec exec) {
  const auto g = eval::require_greenness(greenness, dataset, split.test);
  const auto scored = eval::score_interactions(predictor, dataset, split.test, g, exec);
  return alpha_sweep_scored(scored, alphas, ks, batches, exec);
}

std::vector<double> default_alphas() { return parse_alphas("0:1:0.1"); }

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ValidationError("not a number: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double round9(double v) { return std::round(v * 1e9) / 1e9; }

}  // namespace

std::vector<double> parse_alphas(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split_on(text, ':');
    if (parts.size() != 3) throw ValidationError("alpha range must be lo:hi:step");
    const double lo = parse_double(parts[0]), hi = parse_double(parts[1]), step = parse_double(parts[2]);
    if (!(step > 0.0) || hi < lo) throw ValidationError("alpha range needs lo <= hi and step > 0");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(round9(lo + static_cast<double>(i) * step));
  } else {
    for (auto part : split_on(text, ',')) out.push_back(parse_double(part));
  }
  for (double a : out) utility(0.0, 0.0, a);
  return out;
}

std::vector<std::size_t> parse_ks(std::string_view text) {
  std::vector<std::size_t> out;
  for (auto part : split_on(text, ',')) {
    const double v = parse_double(part);
    if (!(v >= 1.0) || v != std::floor(v)) throw ValidationError("list length must be a positive integer");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void write_tradeoff_csv(std::ostream& out, const std::string& algo, std::span<const TradeoffPoint> points,
                        bool header) {
  if (header) csv::write_row(out, {"algo", "alpha", "k", "ndcg", "gndcg", "ndcg_rel", "gndcg_rel"});
  for (const auto& p : points)
    csv::write_row(out, {algo, eval::format_number(p.alpha), std::to_string(p.k), eval::format_number(p.ndcg),
                         eval::format_number(p.gndcg), eval::format_number(p.ndcg_rel),
                         eval::format_number(p.gndcg_rel)});
}

}  // namespace greenrec::rerank
