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

#include "greenrec/experiment.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <algorithm>

#include <fmt/format.h>

#include "greenrec/csv.hpp"
#include "greenrec/serialize.hpp"

namespace greenrec::experiment {

namespace {

void check_keys(const nlohmann::json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(fmt::format("unknown key '{}' in {}", key, where));
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

template <class T>
T get(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(fmt::format("config key '{}' has the wrong type", key));
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  check_keys(j, "config",
             {"data", "prefilter", "split", "algorithms", "ks", "alphas", "metric_k", "batch_size", "seed", "output"});
  ExperimentConfig c;
  if (j.contains("data")) {
    const auto& d = j.at("data");
    check_keys(d, "data", {"interactions", "greenness", "schema", "recompute_greenness", "synth"});
    if (d.contains("interactions")) c.interactions = resolve(base, get<std::string>(d, "interactions", ""));
    if (d.contains("greenness")) c.greenness = resolve(base, get<std::string>(d, "greenness", ""));
    c.schema = get<std::string>(d, "schema", "");
    c.recompute_greenness = get<bool>(d, "recompute_greenness", false);
    if (d.contains("synth")) {
      const auto& s = d.at("synth");
      auto params = synth::SynthParams::preset(s.is_object() ? get<std::string>(s, "preset", "default")
                                                              : s.get<std::string>());
      if (s.is_object()) {
        try {
          params.apply(s);
        } catch (const nlohmann::json::exception& e) {
          throw ValidationError(std::string("bad synth parameter: ") + e.what());
        }
      }
      c.synth = params;
    }
  }
  if (j.contains("prefilter")) {
    const auto& p = j.at("prefilter");
    if (p.is_boolean()) {
      c.prefilter = p.get<bool>();
    } else {
      check_keys(p, "prefilter", {"enabled", "min_item_ratings", "min_user_mean", "require_greenness"});
      c.prefilter = get<bool>(p, "enabled", true);
      c.prefilter_options.min_item_ratings = get<std::size_t>(p, "min_item_ratings", 20);
      c.prefilter_options.min_user_mean = get<double>(p, "min_user_mean", 20.0);
      c.require_greenness = get<bool>(p, "require_greenness", true);
    }
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    check_keys(s, "split", {"count", "seed", "ratios"});
    c.n_splits = get<std::size_t>(s, "count", 5);
    c.split_seed = get<std::uint64_t>(s, "seed", 0);
    if (s.contains("ratios")) {
      const auto r = get<std::vector<double>>(s, "ratios", {});
      if (r.size() != 3) throw ValidationError("split ratios must list train, validation and test");
      c.ratios = {r[0], r[1], r[2]};
    }
  }
  if (j.contains("algorithms")) {
    const auto& a = j.at("algorithms");
    if (!a.is_array()) throw ValidationError("algorithms must be a list");
    for (const auto& entry : a) {
      AlgorithmConfig ac;
      if (entry.is_string()) {
        ac.algorithm = models::parse_algorithm(entry.get<std::string>());
        ac.grid = models::HyperGrid::standard(ac.algorithm);
      } else {
        check_keys(entry, "algorithm entry", {"name", "grid"});
        ac.algorithm = models::parse_algorithm(get<std::string>(entry, "name", ""));
        ac.grid = models::HyperGrid::from_json(ac.algorithm, entry.value("grid", nlohmann::json()));
      }
      c.algorithms.push_back(std::move(ac));
    }
  }
  if (j.contains("ks")) c.ks = get<std::vector<std::size_t>>(j, "ks", {});
  if (j.contains("alphas")) {
    const auto& a = j.at("alphas");
    c.alphas = a.is_string() ? rerank::parse_alphas(a.get<std::string>()) : get<std::vector<double>>(j, "alphas", {});
  }
  c.metric_k = get<std::size_t>(j, "metric_k", 10);
  c.batch_size = get<std::size_t>(j, "batch_size", 100);
  c.seed = get<std::uint64_t>(j, "seed", 0);
  if (j.contains("output")) c.output = resolve(base, get<std::string>(j, "output", ""));
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void ExperimentConfig::validate() const {
  if (!synth && interactions.empty()) throw ValidationError("config names neither an interaction file nor a synth preset");
  if (synth && !interactions.empty()) throw ValidationError("config names both an interaction file and a synth preset");
  if (synth) synth->validate();
  if (!synth) {
    if (!std::filesystem::exists(interactions)) throw ValidationError("missing interaction file " + interactions.string());
    if (greenness.empty()) throw ValidationError("config needs a greenness file");
    if (!std::filesystem::exists(greenness)) throw ValidationError("missing greenness file " + greenness.string());
  }
  if (n_splits < 1) throw ValidationError("split count must be at least 1");
  if (algorithms.empty()) throw ValidationError("no algorithms configured");
  if (ks.empty()) throw ValidationError("ks must not be empty");
  for (std::size_t k : ks)
    if (k < 1) throw ValidationError("ks must be positive");
  if (alphas.empty()) throw ValidationError("alphas must not be empty");
  for (double a : alphas) rerank::utility(0.0, 0.0, a);
  if (metric_k < 1 || batch_size < 1) throw ValidationError("metric_k and batch_size must be positive");
  const double total = ratios.train + ratios.validation + ratios.test;
  if (!(ratios.train > 0.0 && ratios.validation > 0.0 && ratios.test > 0.0) || std::abs(total - 1.0) > 1e-9)
    throw ValidationError("split ratios must be positive and sum to 1");
  std::set<models::Algorithm> seen;
  for (const auto& a : algorithms)
    if (!seen.insert(a.algorithm).second)
      throw ValidationError("algorithm '" + std::string(models::to_string(a.algorithm)) + "' listed twice");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  if (synth) {
    const auto& s = *synth;
    j["data"]["synth"] = {{"n_users", s.n_users},
                          {"n_items", s.n_items},
                          {"n_interactions", s.n_interactions},
                          {"item_popularity_exponent", s.item_popularity_exponent},
                          {"user_activity_exponent", s.user_activity_exponent},
                          {"rating_pmf", s.rating_pmf},
                          {"greenness_mode", s.greenness_mode},
                          {"greenness_sd", s.greenness_sd},
                          {"co2_log_mu", s.co2_log_mu},
                          {"co2_log_sigma", s.co2_log_sigma},
                          {"rating_signal", s.rating_signal},
                          {"latent_dim", s.latent_dim},
                          {"seed", s.seed}};
  } else {
    j["data"] = {{"interactions", interactions.generic_string()},
                 {"greenness", greenness.generic_string()},
                 {"schema", schema},
                 {"recompute_greenness", recompute_greenness}};
  }
  j["prefilter"] = {{"enabled", prefilter},
                    {"min_item_ratings", prefilter_options.min_item_ratings},
                    {"min_user_mean", prefilter_options.min_user_mean},
                    {"require_greenness", require_greenness}};
  j["split"] = {{"count", n_splits}, {"seed", split_seed}, {"ratios", {ratios.train, ratios.validation, ratios.test}}};
  j["algorithms"] = nlohmann::json::array();
  for (const auto& a : algorithms)
    j["algorithms"].push_back({{"name", std::string(models::to_string(a.algorithm))}, {"grid", a.grid.to_json()}});
  j["ks"] = ks;
  j["alphas"] = alphas;
  j["metric_k"] = metric_k;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["output"] = output.generic_string();
  return j;
}

std::vector<rerank::TradeoffPoint> mean_tradeoff(const std::vector<std::vector<rerank::TradeoffPoint>>& sweeps) {
  if (sweeps.empty()) return {};
  const std::size_t n = sweeps.front().size();
  std::vector<rerank::TradeoffPoint> out(n);
  std::map<std::size_t, std::pair<double, double>> baseline;  // k -> mean (ndcg, gndcg) at alpha = 1
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<double> nd, gn;
    for (const auto& s : sweeps) {
      if (s.size() != n || s[p].alpha != sweeps.front()[p].alpha || s[p].k != sweeps.front()[p].k)
        throw ValidationError("sweeps cover different points");
      nd.push_back(s[p].ndcg);
      gn.push_back(s[p].gndcg);
    }
    const double m = static_cast<double>(sweeps.size());
    out[p].alpha = sweeps.front()[p].alpha;
    out[p].k = sweeps.front()[p].k;
    out[p].ndcg = stable_sum(nd) / m;
    out[p].gndcg = stable_sum(gn) / m;
  }
  for (const auto& pt : out)
    if (pt.alpha == 1.0) baseline[pt.k] = {pt.ndcg, pt.gndcg};
  for (auto& pt : out) {
    auto it = baseline.find(pt.k);
    if (it == baseline.end()) continue;
    pt.ndcg_rel = rerank::relative_change(pt.ndcg, it->second.first);
    pt.gndcg_rel = rerank::relative_change(pt.gndcg, it->second.second);
  }
  return out;
}


namespace {

template <class F>
auto staged(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<double> with_baseline(const std::vector<double>& alphas) {
  std::vector<double> out = alphas;
  if (std::find(out.begin(), out.end(), 1.0) == out.end()) out.push_back(1.0);
  return out;
}

std::vector<rerank::TradeoffPoint> only_alphas(const std::vector<rerank::TradeoffPoint>& points,
                                               const std::vector<double>& alphas) {
  std::vector<rerank::TradeoffPoint> out;
  for (const auto& p : points)
    if (std::find(alphas.begin(), alphas.end(), p.alpha) != alphas.end()) out.push_back(p);
  return out;
}

nlohmann::json hyper_json(const models::HyperParams& h) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : h) j[k] = v;
  return j;
}

}  // namespace

BenchmarkResult run_benchmark(const ExperimentConfig& config, Exec exec) {
  config.validate();
  namespace fs = std::filesystem;
  const fs::path out_dir = config.output;
  staged("output", [&] {
    fs::create_directories(out_dir / "splits");
    fs::create_directories(out_dir / "models");
  });

  BenchmarkResult result;
  footprint::GreennessTable greenness;
  Dataset raw = staged("load", [&] {
    if (config.synth) {
      auto data = synth::generate(*config.synth);
      greenness = std::move(data.greenness);
      return std::move(data.dataset);
    }
    greenness = footprint::load_greenness(config.greenness, config.recompute_greenness);
    const auto schema = config.schema.empty() ? InteractionSchema{} : InteractionSchema::parse(config.schema);
    return load_interactions(config.interactions, schema).dataset;
  });

  nlohmann::json manifest;
  manifest["config"] = config.to_json();
  manifest["data"] = {{"users_in", raw.n_users()}, {"items_in", raw.n_items()}, {"interactions_in", raw.size()}};

  result.dataset = staged("prefilter", [&] {
    if (!config.prefilter) return std::move(raw);
    prep::PrefilterOptions options = config.prefilter_options;
    if (config.require_greenness)
      options.item_keep = [&greenness](const std::string& id) { return greenness.items.count(id) > 0; };
    auto filtered = prep::prefilter(raw, options);
    const auto& r = filtered.report;
    manifest["prefilter"] = {{"sparse_items", r.sparse_items},
                             {"rejected_items", r.rejected_items},
                             {"empty_users", r.empty_users},
                             {"single_item_users", r.single_item_users},
                             {"sparse_neighborhood", r.sparse_neighborhood},
                             {"empty_users_after", r.empty_users_after},
                             {"interactions_out", r.interactions_out}};
    return std::move(filtered.dataset);
  });
  const Dataset& data = result.dataset;
  manifest["data"]["users"] = data.n_users();
  manifest["data"]["items"] = data.n_items();
  manifest["data"]["interactions"] = data.size();

  result.splits = staged("split", [&] {
    auto splits = prep::make_splits(data, config.n_splits, config.split_seed, config.ratios);
    manifest["splits"] = nlohmann::json::array();
    for (std::size_t s = 0; s < splits.size(); ++s) {
      const fs::path path = out_dir / "splits" / fmt::format("split_{}.csv", s);
      prep::write_manifest(path, data, splits[s]);
      manifest["splits"].push_back({{"index", s},
                                    {"seed", splits[s].seed},
                                    {"file", fmt::format("splits/split_{}.csv", s)},
                                    {"train", splits[s].train.size()},
                                    {"validation", splits[s].validation.size()},
                                    {"test", splits[s].test.size()},
                                    {"underfilled", splits[s].underfilled},
                                    {"diagnostic", splits[s].diagnostic}});
    }
    return splits;
  });

  const auto g = staged("evaluate", [&] {
    std::vector<std::size_t> all(data.size());
    for (std::size_t n = 0; n < all.size(); ++n) all[n] = n;
    return eval::require_greenness(greenness, data, all);
  });

  const auto alphas = with_baseline(config.alphas);
  manifest["runs"] = nlohmann::json::array();
  std::string tradeoff_csv, plot_csv;
  {
    std::ostringstream t, p;
    csv::write_row(t, {"algo", "alpha", "k", "ndcg", "gndcg", "ndcg_rel", "gndcg_rel"});
    csv::write_row(p, {"algo", "split", "split_seed", "alpha", "k", "metric", "value"});
    tradeoff_csv = t.str();
    plot_csv = p.str();
  }
  std::vector<eval::MetricSummary> report;

  for (const auto& ac : config.algorithms) {
    const std::string tag(models::to_string(ac.algorithm));
    AlgorithmResult ar{ac.algorithm, {}, {}, {}, {}};
    for (std::size_t s = 0; s < result.splits.size(); ++s) {
      const auto& split = result.splits[s];
      const std::string stage = fmt::format("train:{}:split{}", tag, s);
      auto search = staged(stage, [&] {
        auto train = models::share(build_matrix(data, split.train));
        std::vector<Interaction> validation;
        for (std::size_t r : split.validation) validation.push_back(data.interactions[r]);
        models::GridSearchOptions options;
        options.metric_k = config.metric_k;
        options.batches = {config.batch_size, split.seed};
        options.seed = config.seed;
        options.exec = exec;
        auto found = models::grid_search(ac.algorithm, ac.grid, train, validation, options);
        serialize::ModelInfo info;
        info.hyperparameters = found.best;
        info.seed = config.seed;
        info.user_ids = data.users.ids();
        info.item_ids = data.items.ids();
        info.provenance = {{"split", s}, {"split_seed", split.seed}, {"validation_ndcg", found.score}};
        serialize::save_model(out_dir / "models" / fmt::format("{}_split{}.json", tag, s), *found.predictor, *train,
                              info);
        return found;
      });
      auto sweep = staged(fmt::format("evaluate:{}:split{}", tag, s), [&] {
        const auto scored = eval::score_interactions(*search.predictor, data, split.test, g, exec);
        return rerank::alpha_sweep_scored(scored, alphas, config.ks, {config.batch_size, split.seed}, exec);
      });

      nlohmann::json failed = nlohmann::json::array();
      for (std::size_t p = 0; p < search.points.size(); ++p)
        if (search.points[p].failed) failed.push_back({{"index", p}, {"error", search.points[p].error}});
      manifest["runs"].push_back({{"algo", tag},
                                  {"split", s},
                                  {"split_seed", split.seed},
                                  {"model", fmt::format("models/{}_split{}.json", tag, s)},
                                  {"hyperparameters", hyper_json(search.best)},
                                  {"grid_index", search.best_index},
                                  {"grid_size", search.points.size()},
                                  {"validation_ndcg", search.score},
                                  {"failed_points", failed}});
      std::ostringstream p;
      for (const auto& pt : only_alphas(sweep, config.alphas)) {
        for (const char* metric : {"ndcg", "gndcg"}) {
          const double v = metric[0] == 'n' ? pt.ndcg : pt.gndcg;
          csv::write_row(p, {tag, std::to_string(s), std::to_string(split.seed), eval::format_number(pt.alpha),
                             std::to_string(pt.k), metric, eval::format_number(v)});
        }
      }
      plot_csv += p.str();
      search.predictor.reset();  // the artifact is on disk; keep memory flat
      ar.searches.push_back(std::move(search));
      ar.sweeps.push_back(std::move(sweep));
    }

    ar.tradeoff = only_alphas(mean_tradeoff(ar.sweeps), config.alphas);
    for (double alpha : config.alphas) {
      std::vector<eval::SplitMetrics> per_split;
      for (const auto& sweep : ar.sweeps) {
        eval::SplitMetrics m;
        for (const auto& pt : sweep) {
          if (pt.alpha != alpha) continue;
          m.ks.push_back(pt.k);
          m.ndcg.push_back(pt.ndcg);
          m.gndcg.push_back(pt.gndcg);
        }
        per_split.push_back(std::move(m));
      }
      auto rows = eval::aggregate(tag, alpha, per_split);
      ar.report.insert(ar.report.end(), rows.begin(), rows.end());
    }
    report.insert(report.end(), ar.report.begin(), ar.report.end());
    std::ostringstream t;
    rerank::write_tradeoff_csv(t, tag, ar.tradeoff, false);
    tradeoff_csv += t.str();
    result.algorithms.push_back(std::move(ar));
  }

  staged("write", [&] {
    std::ostringstream r;
    eval::write_report_csv(r, report);
    write_file(out_dir / "report.csv", r.str());
    write_file(out_dir / "tradeoff.csv", tradeoff_csv);
    write_file(out_dir / "plot_long.csv", plot_csv);
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  });
  return result;
}

}  // namespace greenrec::experiment
