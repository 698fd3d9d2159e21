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

// greenrec command-line driver.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "greenrec/csv.hpp"
#include "greenrec/error.hpp"
#include "greenrec/eval.hpp"
#include "greenrec/experiment.hpp"
#include "greenrec/footprint.hpp"
#include "greenrec/grid.hpp"
#include "greenrec/models.hpp"
#include "greenrec/prep.hpp"
#include "greenrec/rerank.hpp"
#include "greenrec/serialize.hpp"
#include "greenrec/synth.hpp"

namespace fs = std::filesystem;
using namespace greenrec;

namespace {

std::uint64_t env_seed() {
  const char* s = std::getenv("GREENREC_SEED");
  if (!s || !*s) return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("GREENREC_SEED must be a non-negative integer, got '{}'", s));
  }
}

void emit(const fs::path& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("cannot write " + out.string());
  f << text;
}

Dataset load_data(const fs::path& path, const std::string& schema, bool skip_bad) {
  const auto s = schema.empty() ? InteractionSchema{} : InteractionSchema::parse(schema);
  return load_interactions(path, s, {skip_bad}).dataset;
}

std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw ValidationError("ratios must be three numbers, got '" + text + "'");
    }
  }
  if (v.size() != 3) throw ValidationError("ratios must be three numbers, got '" + text + "'");
  return v;
}

prep::Ratios to_ratios(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

models::HyperGrid grid_from(models::Algorithm algo, const std::string& spec) {
  if (spec == "default" || spec == "desk") return models::HyperGrid::from_json(algo, spec);
  std::ifstream in(spec);
  if (!in) throw ValidationError("grid must be 'default', 'desk' or a JSON file, got '" + spec + "'");
  try {
    return models::HyperGrid::from_json(algo, nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("{}: {}", spec, e.what()));
  }
}

/// Re-expresses `data` in the model's index space, keeping row order. Ids the
/// model never saw are appended after the model's own.
Dataset align_to_model(const Dataset& data, const serialize::ModelInfo& info) {
  Dataset out;
  for (const auto& id : info.user_ids) out.users.intern(id);
  for (const auto& id : info.item_ids) out.items.intern(id);
  out.interactions.reserve(data.size());
  for (const auto& x : data.interactions) {
    Interaction y = x;
    y.user = out.users.intern(data.users.id(x.user));
    y.item = out.items.intern(data.items.id(x.item));
    out.interactions.push_back(std::move(y));
  }
  return out;
}

void require_known(const Dataset& data, std::span<const std::size_t> rows, const serialize::ModelInfo& info) {
  std::vector<std::string> unknown;
  for (auto r : rows) {
    const auto& x = data.interactions[r];
    if (x.user >= info.user_ids.size()) unknown.push_back("user " + data.users.id(x.user));
    if (x.item >= info.item_ids.size()) unknown.push_back("item " + data.items.id(x.item));
    if (unknown.size() >= 20) break;
  }
  if (unknown.empty()) return;
  std::string list;
  for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
  throw ValidationError("test rows reference entities the model was not trained on: " + list);
}

struct HeldOut {
  serialize::LoadedModel model;
  Dataset data;
  prep::SplitResult split;
  footprint::GreennessTable greenness;
};

HeldOut load_held_out(const fs::path& model_path, const fs::path& data_path, const std::string& schema,
                      const fs::path& split_path, const fs::path& greenness_path) {
  HeldOut h;
  h.model = serialize::load_model(model_path);
  h.data = align_to_model(load_data(data_path, schema, false), h.model.info);
  h.split = prep::read_manifest(split_path, h.data);
  require_known(h.data, h.split.test, h.model.info);
  h.greenness = footprint::load_greenness(greenness_path);
  return h;
}

// ---------------------------------------------------------------------------

void add_ingest(CLI::App& app) {
  auto* cmd = app.add_subcommand("ingest", "Load, validate and deduplicate an interaction CSV");
  auto in = std::make_shared<std::string>();
  auto schema = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto skip = std::make_shared<bool>(false);
  cmd->add_option("--in", *in, "Interaction CSV")->required();
  cmd->add_option("--schema", *schema, "Column mapping, e.g. user=uid,item=rid,rating=stars,date=");
  cmd->add_option("--out", *out, "Write the cleaned CSV here");
  cmd->add_flag("--skip-bad-rows", *skip, "Skip malformed rows instead of failing");
  cmd->callback([=] {
    const auto s = schema->empty() ? InteractionSchema{} : InteractionSchema::parse(*schema);
    auto res = load_interactions(*in, s, {*skip});
    const auto m = build_matrix(res.dataset);
    fmt::print("users {}\nitems {}\ninteractions {}\nmean rating {}\nsparsity {}\n", res.dataset.n_users(),
               res.dataset.n_items(), res.dataset.size(), res.dataset.size() ? m.mean_rating() : 0.0,
               m.sparsity() ? eval::format_number(*m.sparsity()) : "n/a");
    fmt::print("rows read {}\nrows skipped {}\nduplicates removed {}\n", res.report.rows_read, res.report.rows_skipped,
               res.report.duplicates_removed);
    if (!out->empty()) write_interactions(*out, res.dataset);
  });
}

void add_prefilter(CLI::App& app) {
  auto* cmd = app.add_subcommand("prefilter", "Remove sparse users and items");
  struct Opts {
    std::string in, schema, greenness, out;
    std::size_t min_items = 20;
    double min_mean = 20;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--in", o->in, "Interaction CSV")->required();
  cmd->add_option("--schema", o->schema, "Column mapping");
  cmd->add_option("--greenness", o->greenness, "Keep only items listed in this greenness CSV");
  cmd->add_option("--min-item-ratings", o->min_items, "Minimum ratings per item")->capture_default_str();
  cmd->add_option("--min-user-mean", o->min_mean, "Minimum mean rater activity per item")->capture_default_str();
  cmd->add_option("--out", o->out, "Filtered interaction CSV")->required();
  cmd->callback([o] {
    auto data = load_data(o->in, o->schema, false);
    prep::PrefilterOptions opts{o->min_items, o->min_mean, {}};
    std::optional<footprint::GreennessTable> table;
    if (!o->greenness.empty()) {
      table = footprint::load_greenness(o->greenness);
      opts.item_keep = [&table](const std::string& id) { return table->items.count(id) > 0; };
    }
    auto r = prep::prefilter(data, opts);
    const auto& rep = r.report;
    fmt::print("interactions {} -> {}\n", rep.interactions_in, rep.interactions_out);
    fmt::print("sparse items {}\nrejected items {}\nempty users {}\nsingle-item users {}\n", rep.sparse_items,
               rep.rejected_items, rep.empty_users, rep.single_item_users);
    fmt::print("sparse-neighbourhood items {}\nempty users after {}\n", rep.sparse_neighborhood,
               rep.empty_users_after);
    write_interactions(o->out, r.dataset);
  });
}

void add_split(CLI::App& app) {
  auto* cmd = app.add_subcommand("split", "Write train/validation/test split manifests");
  struct Opts {
    std::string in, schema, out, ratios = "0.6,0.2,0.2";
    std::size_t count = 5;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--in", o->in, "Interaction CSV")->required();
  cmd->add_option("--schema", o->schema, "Column mapping");
  cmd->add_option("--count", o->count, "Number of splits")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Seed of the first split (default: GREENREC_SEED or 0)");
  cmd->add_option("--ratios", o->ratios, "train,validation,test")->capture_default_str();
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->callback([o] {
    const auto data = load_data(o->in, o->schema, false);
    if (o->count < 1) throw ValidationError("--count must be at least 1");
    const auto splits = prep::make_splits(data, o->count, o->seed.value_or(env_seed()), to_ratios(parse_ratios(o->ratios)));
    fs::create_directories(o->out);
    for (std::size_t s = 0; s < splits.size(); ++s) {
      prep::write_manifest(fs::path(o->out) / fmt::format("split_{}.csv", s), data, splits[s]);
      fmt::print("split_{} seed {}: train {} validation {} test {}{}\n", s, splits[s].seed, splits[s].train.size(),
                 splits[s].validation.size(), splits[s].test.size(),
                 splits[s].underfilled ? " (" + splits[s].diagnostic + ")" : "");
    }
  });
}

void add_synth(CLI::App& app) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic interaction and greenness dataset");
  struct Opts {
    std::string preset = "recipe-like", out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> set;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--preset", o->preset, "recipe-like (default) or tiny")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Seed (default: GREENREC_SEED or 0)");
  cmd->add_option("--set", o->set, "Override a parameter, e.g. --set n_users=500");
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->callback([o] {
    auto p = synth::SynthParams::preset(o->preset);
    nlohmann::json overrides = nlohmann::json::object();
    for (const auto& kv : o->set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
      try {
        overrides[kv.substr(0, eq)] = nlohmann::json::parse(kv.substr(eq + 1));
      } catch (const nlohmann::json::exception&) {
        throw ValidationError("bad value in --set " + kv);
      }
    }
    try {
      p.apply(overrides);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("bad synth parameter: ") + e.what());
    }
    p.seed = o->seed.value_or(env_seed());
    const auto data = synth::generate(p);
    synth::write(o->out, data);
    fmt::print("wrote {} interactions over {} users and {} items to {}\n", data.dataset.size(), data.dataset.n_users(),
               data.dataset.n_items(), o->out);
  });
}

void add_train(CLI::App& app) {
  auto* cmd = app.add_subcommand("train", "Grid-search one algorithm and save the best model");
  struct Opts {
    std::string data, schema, split, algo, grid = "default", out;
    std::optional<std::uint64_t> seed, split_seed;
    std::size_t metric_k = 10, batch_size = 100;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--data", o->data, "Interaction CSV")->required();
  cmd->add_option("--schema", o->schema, "Column mapping");
  auto* split = cmd->add_option("--split", o->split, "Split manifest CSV");
  cmd->add_option("--split-seed", o->split_seed, "Make a 6/2/2 split with this seed instead")->excludes(split);
  cmd->add_option("--algo", o->algo, "random, globalmean, itemnn, usernn, svd, svdpp, cocluster or slim")->required();
  cmd->add_option("--grid", o->grid, "default, desk, or a JSON file of axis -> values")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Model seed (default: GREENREC_SEED or 0)");
  cmd->add_option("--metric-k", o->metric_k, "Validation NDCG horizon")->capture_default_str();
  cmd->add_option("--batch-size", o->batch_size, "Validation batch size")->capture_default_str();
  cmd->add_option("--out", o->out, "Model artifact path")->required();
  cmd->callback([o] {
    const auto algo = models::parse_algorithm(o->algo);
    const auto grid = grid_from(algo, o->grid);
    const auto seed = o->seed.value_or(env_seed());
    const auto data = load_data(o->data, o->schema, false);
    const auto sp = o->split.empty() ? prep::split(data, {}, o->split_seed.value_or(seed))
                                     : prep::read_manifest(o->split, data);
    auto train = models::share(build_matrix(data, sp.train));
    std::vector<Interaction> validation;
    for (auto r : sp.validation) validation.push_back(data.interactions[r]);
    models::GridSearchOptions opts;
    opts.metric_k = o->metric_k;
    opts.batches = {o->batch_size, sp.seed};
    opts.seed = seed;
    auto found = models::grid_search(algo, grid, train, validation, opts);
    serialize::ModelInfo info;
    info.hyperparameters = found.best;
    info.seed = seed;
    info.user_ids = data.users.ids();
    info.item_ids = data.items.ids();
    info.provenance = {{"data", o->data}, {"split_seed", sp.seed}, {"grid_index", found.best_index},
                       {"grid_size", grid.size()}, {"validation_ndcg", found.score}};
    serialize::save_model(o->out, *found.predictor, *train, info);
    std::string params;
    for (const auto& [k, v] : found.best) params += fmt::format(" {}={}", k, eval::format_number(v));
    std::size_t failed = 0;
    for (const auto& p : found.points) failed += p.failed;
    fmt::print("{} best point {}/{}:{} validation NDCG@{} {}{}\n", models::to_string(algo), found.best_index + 1,
               grid.size(), params, o->metric_k, eval::format_number(found.score),
               failed ? fmt::format(" ({} points failed)", failed) : "");
  });
}

struct HeldOutOpts {
  std::string model, data, schema, split, greenness, ks = "10,20,50", out;
  std::size_t batch_size = 100;
};

void add_held_out_options(CLI::App* cmd, HeldOutOpts& o) {
  cmd->add_option("--model", o.model, "Model artifact")->required();
  cmd->add_option("--data", o.data, "Interaction CSV the model was trained from")->required();
  cmd->add_option("--schema", o.schema, "Column mapping");
  cmd->add_option("--split", o.split, "Split manifest CSV")->required();
  cmd->add_option("--greenness", o.greenness, "Greenness CSV")->required();
  cmd->add_option("--ks", o.ks, "List lengths")->capture_default_str();
  cmd->add_option("--batch-size", o.batch_size, "NDCG batch size")->capture_default_str();
  cmd->add_option("--out", o.out, "Output CSV (default: stdout)");
}

void add_evaluate(CLI::App& app) {
  auto* cmd = app.add_subcommand("evaluate", "NDCG@k and GNDCG@k of a model on a split's test set");
  auto o = std::make_shared<HeldOutOpts>();
  add_held_out_options(cmd, *o);
  cmd->callback([o] {
    const auto ks = rerank::parse_ks(o->ks);
    auto h = load_held_out(o->model, o->data, o->schema, o->split, o->greenness);
    const auto m = eval::evaluate(*h.model.predictor, h.data, h.split, h.greenness, ks, {o->batch_size, h.split.seed});
    std::vector<eval::SplitMetrics> one = {m};
    const auto rows = eval::aggregate(std::string(models::to_string(h.model.predictor->algorithm())), 1.0, one);
    std::ostringstream s;
    eval::write_report_csv(s, rows);
    emit(o->out, s.str());
  });
}

void add_sweep(CLI::App& app) {
  auto* cmd = app.add_subcommand("sweep", "Greenness-aware reranking over a range of alpha values");
  auto o = std::make_shared<HeldOutOpts>();
  auto alphas = std::make_shared<std::string>("0:1:0.1");
  add_held_out_options(cmd, *o);
  cmd->add_option("--alphas", *alphas, "lo:hi:step or a comma list")->capture_default_str();
  cmd->callback([o, alphas] {
    const auto ks = rerank::parse_ks(o->ks);
    const auto a = rerank::parse_alphas(*alphas);
    auto h = load_held_out(o->model, o->data, o->schema, o->split, o->greenness);
    auto points = rerank::alpha_sweep(*h.model.predictor, h.data, h.split, h.greenness, a, ks,
                                      {o->batch_size, h.split.seed});
    std::ostringstream s;
    rerank::write_tradeoff_csv(s, std::string(models::to_string(h.model.predictor->algorithm())), points);
    emit(o->out, s.str());
  });
}

void add_bench(CLI::App& app) {
  auto* cmd = app.add_subcommand("bench", "Full pipeline: prefilter, split, grid search, evaluate, sweep");
  struct Opts {
    std::string config, out, algos, alphas, ks, synth, grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> splits;
    bool no_prefilter = false;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--config", o->config, "Experiment config (JSON)");
  cmd->add_option("--synth", o->synth, "Use a synthetic preset instead of files");
  cmd->add_option("--out", o->out, "Output directory");
  cmd->add_option("--seed", o->seed, "Model and split seed (default: config, else GREENREC_SEED)");
  cmd->add_option("--splits", o->splits, "Number of splits");
  cmd->add_option("--algos", o->algos, "Comma list of algorithms");
  cmd->add_option("--grid", o->grid, "Grid preset for --algos: default or desk");
  cmd->add_option("--alphas", o->alphas, "lo:hi:step or a comma list");
  cmd->add_option("--ks", o->ks, "List lengths");
  cmd->add_flag("--no-prefilter", o->no_prefilter, "Skip the sparse-entity filter");
  cmd->callback([o] {
    experiment::ExperimentConfig c;
    bool seed_from_config = false;
    if (!o->config.empty()) {
      c = experiment::ExperimentConfig::from_file(o->config);
      std::ifstream in(o->config);
      const auto j = nlohmann::json::parse(in);
      seed_from_config = j.contains("seed");
    }
    if (!o->synth.empty()) c.synth = synth::SynthParams::preset(o->synth);
    if (o->seed || !seed_from_config) {
      c.seed = o->seed.value_or(env_seed());
      c.split_seed = c.seed;
      // A synth block in the config carries its own seed.
      if (!o->synth.empty()) c.synth->seed = c.seed;
    }
    if (o->splits) c.n_splits = *o->splits;
    if (!o->out.empty()) c.output = o->out;
    if (!o->algos.empty()) {
      c.algorithms.clear();
      std::stringstream ss(o->algos);
      std::string tag;
      while (std::getline(ss, tag, ',')) {
        const auto a = models::parse_algorithm(tag);
        c.algorithms.push_back({a, grid_from(a, o->grid.empty() ? "default" : o->grid)});
      }
    } else if (!o->grid.empty()) {
      for (auto& a : c.algorithms) a.grid = grid_from(a.algorithm, o->grid);
    }
    if (c.algorithms.empty())
      for (auto a : models::kAllAlgorithms) c.algorithms.push_back({a, grid_from(a, o->grid.empty() ? "default" : o->grid)});
    if (!o->alphas.empty()) c.alphas = rerank::parse_alphas(o->alphas);
    if (!o->ks.empty()) c.ks = rerank::parse_ks(o->ks);
    if (o->no_prefilter) c.prefilter = false;
    if (!c.synth && c.interactions.empty())
      throw ValidationError("bench needs --config with data paths or --synth <preset>");
    auto result = experiment::run_benchmark(c);
    fmt::print("{} interactions, {} splits, {} algorithms -> {}\n", result.dataset.size(), result.splits.size(),
               result.algorithms.size(), c.output.string());
    for (const auto& a : result.algorithms)
      for (const auto& p : a.tradeoff)
        if (p.alpha == 1.0)
          fmt::print("  {:<10} k={:<3} NDCG {:.4f}  GNDCG {:.4f}\n", models::to_string(a.algorithm), p.k, p.ndcg,
                     p.gndcg);
  });
}

void add_footprint(CLI::App& app) {
  auto* cmd = app.add_subcommand("footprint", "CO2-eq and greenness utilities");
  cmd->require_subcommand(1);

  auto* convert = cmd->add_subcommand("convert", "Convert a household measure to grams");
  struct Conv {
    std::string category, unit;
    double amount = 1.0;
  };
  auto c = std::make_shared<Conv>();
  convert->add_option("--category", c->category, "Ingredient category, e.g. liquids")->required();
  convert->add_option("--unit", c->unit, "pint, cup, teaspoon, tablespoon, pinch or grams")->required();
  convert->add_option("--amount", c->amount, "Amount in the given unit")->capture_default_str();
  convert->callback([c] {
    fmt::print("{}\n", eval::format_number(footprint::to_grams(footprint::parse_category(c->category),
                                                              footprint::parse_unit(c->unit), c->amount)));
  });

  auto* calibrate = cmd->add_subcommand("calibrate", "Compute greenness for a CO2-eq table");
  auto cal_in = std::make_shared<std::string>();
  auto cal_out = std::make_shared<std::string>();
  calibrate->add_option("--in", *cal_in, "CSV with item_id,co2_kg")->required();
  calibrate->add_option("--out", *cal_out, "Output CSV (default: stdout)");
  calibrate->callback([cal_in, cal_out] {
    const auto table = footprint::load_greenness(*cal_in, true);
    std::cerr << fmt::format("calibration: raw greenness in [{}, {}] over {} items\n",
                             eval::format_number(table.calibration.raw_min),
                             eval::format_number(table.calibration.raw_max), table.items.size());
    std::ostringstream s;
    footprint::write_greenness(s, table);
    emit(*cal_out, s.str());
  });

  auto* recipe = cmd->add_subcommand("recipe", "Recipe CO2-eq from ingredient quantities");
  struct Rec {
    std::string ingredients, factors, out;
    double threshold = footprint::kDefaultThresholdGrams;
  };
  auto r = std::make_shared<Rec>();
  recipe->add_option("--ingredients", r->ingredients, "CSV with recipe_id,ingredient,amount,unit,category")
      ->required();
  recipe->add_option("--factors", r->factors, "CSV with ingredient,kg_co2_per_kg")->required();
  recipe->add_option("--threshold", r->threshold, "Ignore ingredients lighter than this (grams)")
      ->capture_default_str();
  recipe->add_option("--out", r->out, "Output CSV (default: stdout)");
  recipe->callback([r] {
    const auto factors = footprint::load_emission_factors(r->factors);
    std::ifstream in(r->ingredients);
    if (!in) throw ValidationError("cannot open " + r->ingredients);
    csv::Reader reader(in);
    std::vector<std::string> f;
    if (!reader.next(f)) throw SchemaError(r->ingredients + ": empty file");
    int col[5];
    const char* names[] = {"recipe_id", "ingredient", "amount", "unit", "category"};
    for (int n = 0; n < 5; ++n)
      if ((col[n] = csv::column_index(f, names[n])) < 0)
        throw SchemaError(fmt::format("{}: missing column '{}'", r->ingredients, names[n]));
    std::map<std::string, std::vector<footprint::IngredientMass>> recipes;
    std::vector<std::string> order;
    while (reader.next(f)) {
      const std::size_t line = reader.line();
      for (int n = 0; n < 5; ++n)
        if (static_cast<std::size_t>(col[n]) >= f.size()) throw RowError(line, "too few fields");
      const auto it = factors.find(f[col[1]]);
      if (it == factors.end()) throw RowError(line, "no emission factor for '" + f[col[1]] + "'");
      double amount = 0;
      try {
        amount = std::stod(f[col[2]]);
      } catch (const std::exception&) {
        throw RowError(line, "amount is not a number");
      }
      double grams = 0;
      try {
        grams = footprint::to_grams(footprint::parse_category(f[col[4]]), footprint::parse_unit(f[col[3]]), amount);
      } catch (const Error& e) {
        throw RowError(line, e.what());
      }
      if (!recipes.count(f[col[0]])) order.push_back(f[col[0]]);
      recipes[f[col[0]]].push_back({grams, it->second});
    }
    std::ostringstream s;
    csv::write_row(s, {"recipe_id", "co2_kg", "ingredients_used"});
    for (const auto& id : order) {
      const auto res = footprint::recipe_co2(recipes[id], r->threshold);
      csv::write_row(s, {id, eval::format_number(res.kg), std::to_string(res.ingredients_used)});
    }
    emit(r->out, s.str());
  });
}

bool is_validation(const std::exception& e) {
  return dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
         dynamic_cast<const RowError*>(&e) || dynamic_cast<const ConversionError*>(&e) ||
         dynamic_cast<const DomainError*>(&e) || dynamic_cast<const FormatError*>(&e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"greenrec: greenness-aware recommender benchmarking"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.fallthrough();

  add_ingest(app);
  add_prefilter(app);
  add_split(app);
  add_synth(app);
  add_train(app);
  add_evaluate(app);
  add_sweep(app);
  add_bench(app);
  add_footprint(app);
  app.parse_complete_callback([&] { set_thread_limit(threads); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_validation(e) ? 1 : 2;
  }
  return 0;
}
