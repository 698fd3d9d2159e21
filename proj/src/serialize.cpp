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

#include "greenrec/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "greenrec/error.hpp"

namespace greenrec {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<unsigned char> unbase64(std::string_view text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (int c = 0; c < 64; ++c) lookup[static_cast<unsigned char>(kAlphabet[c])] = c;
  if (text.size() % 4 != 0) throw FormatError("base64 block length is not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=' && i + 4 == text.size() && j >= 2) {
        v[j] = 0;
        ++pad;
        continue;
      }
      if (pad) throw FormatError("malformed base64 padding");
      v[j] = lookup[static_cast<unsigned char>(c)];
      if (v[j] < 0) throw FormatError("invalid base64 character");
    }
    const std::uint32_t w = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<unsigned char>(w >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>(w >> 8));
    if (pad < 1) out.push_back(static_cast<unsigned char>(w));
  }
  return out;
}

}  // namespace

namespace serialize {

std::string encode_doubles(std::span<const double> values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t n = 0; n < values.size(); ++n) {
    const auto bits = std::bit_cast<std::uint64_t>(values[n]);
    for (int b = 0; b < 8; ++b) bytes[n * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return base64(bytes);
}

std::vector<double> decode_doubles(std::string_view text) {
  const auto bytes = unbase64(text);
  if (bytes.size() % 8 != 0) throw FormatError("block size is not a multiple of 8 bytes");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t n = 0; n < out.size(); ++n) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t{bytes[n * 8 + b]} << (8 * b);
    out[n] = std::bit_cast<double>(bits);
  }
  return out;
}

namespace {

std::vector<double> to_doubles(const std::vector<std::uint32_t>& v) { return {v.begin(), v.end()}; }

std::uint32_t to_index(double v) {
  if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::uint32_t>(v))) throw FormatError("invalid index value");
  return static_cast<std::uint32_t>(v);
}

std::vector<std::uint32_t> to_indices(const std::vector<double>& v) {
  std::vector<std::uint32_t> out(v.size());
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = to_index(v[n]);
  return out;
}

std::vector<double> block(const nlohmann::json& blocks, const char* name) {
  if (!blocks.contains(name)) throw FormatError(std::string("model artifact lacks block '") + name + "'");
  return decode_doubles(blocks.at(name).get<std::string>());
}

double scalar(const nlohmann::json& blocks, const char* name) {
  if (!blocks.contains(name) || !blocks.at(name).is_number())
    throw FormatError(std::string("model artifact lacks scalar '") + name + "'");
  return blocks.at(name).get<double>();
}

}  // namespace

nlohmann::json encode_rows(const std::vector<std::vector<Cell>>& rows) {
  std::vector<double> ptr{0.0}, index, value;
  for (const auto& r : rows) {
    for (const Cell& c : r) {
      index.push_back(c.index);
      value.push_back(c.rating);
    }
    ptr.push_back(static_cast<double>(index.size()));
  }
  return {{"ptr", encode_doubles(ptr)}, {"index", encode_doubles(index)}, {"value", encode_doubles(value)}};
}

std::vector<std::vector<Cell>> decode_rows(const nlohmann::json& j) {
  const auto ptr = block(j, "ptr");
  const auto index = block(j, "index");
  const auto value = block(j, "value");
  if (ptr.empty() || index.size() != value.size() || to_index(ptr.back()) != index.size())
    throw FormatError("inconsistent sparse block");
  std::vector<std::vector<Cell>> rows(ptr.size() - 1);
  for (std::size_t r = 0; r + 1 < ptr.size(); ++r) {
    const std::size_t lo = to_index(ptr[r]), hi = to_index(ptr[r + 1]);
    if (lo > hi || hi > index.size()) throw FormatError("inconsistent sparse block");
    for (std::size_t n = lo; n < hi; ++n) rows[r].push_back({to_index(index[n]), value[n]});
  }
  return rows;
}

}  // namespace serialize

namespace models {

using serialize::encode_doubles;
using serialize::encode_rows;

void RandomPredictor::write_blocks(nlohmann::json& blocks) const { blocks["seed"] = std::to_string(seed_); }

void NeighborPredictor::write_blocks(nlohmann::json& blocks) const {
  blocks["k"] = k_;
  blocks["min_sim"] = min_sim_;
  blocks["neighbors"] = encode_rows(neighbors_);
}

void FactorPredictor::write_blocks(nlohmann::json& blocks) const {
  blocks["factors"] = params_.factors;
  blocks["use_mu"] = params_.use_mu;
  blocks["mu"] = encode_doubles(std::span<const double>(&params_.mu, 1));
  blocks["user_bias"] = encode_doubles(params_.user_bias);
  blocks["item_bias"] = encode_doubles(params_.item_bias);
  blocks["user_factors"] = encode_doubles(params_.user_factors);
  blocks["item_factors"] = encode_doubles(params_.item_factors);
  if (params_.implicit) blocks["implicit_factors"] = encode_doubles(params_.implicit_factors);
  blocks["epoch_objective"] = encode_doubles(trace_.epoch_objective);
  blocks["train_rmse"] = trace_.train_rmse;
}

void CoClusterPredictor::write_blocks(nlohmann::json& blocks) const {
  blocks["user_clusters"] = user_clusters_;
  blocks["item_clusters"] = item_clusters_;
  blocks["user_assignment"] = encode_doubles(serialize::to_doubles(user_assignment_));
  blocks["item_assignment"] = encode_doubles(serialize::to_doubles(item_assignment_));
  blocks["cocluster_mean"] = encode_doubles(cocluster_mean_);
  blocks["user_cluster_mean"] = encode_doubles(user_cluster_mean_);
  blocks["item_cluster_mean"] = encode_doubles(item_cluster_mean_);
  blocks["epochs_run"] = epochs_run_;
  blocks["train_rmse"] = train_rmse_;
}

void SlimPredictor::write_blocks(nlohmann::json& blocks) const {
  blocks["weights"] = encode_rows(columns_);
  blocks["objective_trace"] = encode_doubles(objective_trace_);
  std::vector<double> conv(converged_.begin(), converged_.end());
  blocks["converged"] = encode_doubles(conv);
}

}  // namespace models

namespace serialize {

nlohmann::json model_to_json(const models::Predictor& predictor, const SparseRatingMatrix& train,
                             const ModelInfo& info) {
  if (train.n_users() != predictor.n_users() || train.n_items() != predictor.n_items())
    throw ValidationError("training matrix does not match the model's index space");
  if (info.user_ids.size() != train.n_users() || info.item_ids.size() != train.n_items())
    throw ValidationError("id lists do not match the model's index space");
  nlohmann::json doc;
  doc["format"] = kModelFormat;
  doc["version"] = kModelVersion;
  doc["algorithm"] = std::string(models::to_string(predictor.algorithm()));
  doc["hyperparameters"] = info.hyperparameters;
  doc["seed"] = std::to_string(info.seed);
  doc["user_ids"] = info.user_ids;
  doc["item_ids"] = info.item_ids;
  std::vector<double> users, items, ratings;
  for (const auto& t : train.triples()) {
    users.push_back(t.user);
    items.push_back(t.item);
    ratings.push_back(t.rating);
  }
  doc["train"] = {{"users", encode_doubles(users)}, {"items", encode_doubles(items)},
                  {"ratings", encode_doubles(ratings)}};
  nlohmann::json blocks = nlohmann::json::object();
  predictor.write_blocks(blocks);
  doc["blocks"] = std::move(blocks);
  doc["provenance"] = info.provenance;
  return doc;
}

LoadedModel model_from_json(const nlohmann::json& doc) {
  using namespace models;
  try {
    if (doc.value("format", "") != kModelFormat) throw FormatError("not a greenrec model artifact");
    const int version = doc.at("version").get<int>();
    if (version != kModelVersion) throw FormatError("unsupported model version " + std::to_string(version));
    LoadedModel out;
    const Algorithm algo = parse_algorithm(doc.at("algorithm").get<std::string>());
    out.info.hyperparameters = doc.at("hyperparameters").get<HyperParams>();
    out.info.seed = std::stoull(doc.at("seed").get<std::string>());
    out.info.user_ids = doc.at("user_ids").get<std::vector<std::string>>();
    out.info.item_ids = doc.at("item_ids").get<std::vector<std::string>>();
    out.info.provenance = doc.value("provenance", nlohmann::json::object());

    const auto& tj = doc.at("train");
    const auto users = block(tj, "users"), items = block(tj, "items"), ratings = block(tj, "ratings");
    if (users.size() != items.size() || users.size() != ratings.size()) throw FormatError("inconsistent train block");
    std::vector<Interaction> entries(users.size());
    for (std::size_t n = 0; n < users.size(); ++n) entries[n] = {to_index(users[n]), to_index(items[n]), ratings[n], {}};
    out.train = share(SparseRatingMatrix(out.info.user_ids.size(), out.info.item_ids.size(), entries));
    const SparseRatingMatrix& R = *out.train;
    TrainingSummary summary = TrainingSummary::from(R);

    const auto& b = doc.at("blocks");
    switch (algo) {
      case Algorithm::Random:
        out.predictor = std::make_shared<RandomPredictor>(std::move(summary), std::stoull(b.at("seed").get<std::string>()));
        break;
      case Algorithm::GlobalMean:
        out.predictor = std::make_shared<GlobalMeanPredictor>(std::move(summary));
        break;
      case Algorithm::ItemNN:
      case Algorithm::UserNN: {
        const bool by_item = algo == Algorithm::ItemNN;
        TrainSet oriented = by_item ? out.train : share(R.transposed());
        auto neighbors = decode_rows(b.at("neighbors"));
        if (neighbors.size() != oriented->n_items()) throw FormatError("neighbor block has the wrong row count");
        out.predictor = std::make_shared<NeighborPredictor>(
            std::move(summary), std::move(oriented),
            by_item ? NeighborPredictor::Orientation::Item : NeighborPredictor::Orientation::User,
            static_cast<std::size_t>(scalar(b, "k")), scalar(b, "min_sim"), std::move(neighbors));
        break;
      }
      case Algorithm::SVD:
      case Algorithm::SVDpp: {
        const bool implicit = algo == Algorithm::SVDpp;
        FactorParams p = FactorParams::zeros(R.n_users(), R.n_items(), static_cast<std::size_t>(scalar(b, "factors")),
                                             implicit);
        p.use_mu = b.at("use_mu").get<bool>();
        const auto mu = block(b, "mu");
        if (mu.size() != 1) throw FormatError("mu block must hold one value");
        p.mu = mu[0];
        auto assign = [&](std::vector<double>& dst, const char* name) {
          auto v = block(b, name);
          if (v.size() != dst.size()) throw FormatError(std::string("block '") + name + "' has the wrong size");
          dst = std::move(v);
        };
        assign(p.user_bias, "user_bias");
        assign(p.item_bias, "item_bias");
        assign(p.user_factors, "user_factors");
        assign(p.item_factors, "item_factors");
        if (implicit) assign(p.implicit_factors, "implicit_factors");
        TrainingTrace trace;
        trace.epoch_objective = block(b, "epoch_objective");
        trace.train_rmse = scalar(b, "train_rmse");
        out.predictor = std::make_shared<FactorPredictor>(std::move(summary), out.train, std::move(p), std::move(trace));
        break;
      }
      case Algorithm::CoClustering: {
        auto model = std::make_shared<CoClusterPredictor>(
            std::move(summary), static_cast<std::size_t>(scalar(b, "user_clusters")),
            static_cast<std::size_t>(scalar(b, "item_clusters")), to_indices(block(b, "user_assignment")),
            to_indices(block(b, "item_assignment")), block(b, "cocluster_mean"), block(b, "user_cluster_mean"),
            block(b, "item_cluster_mean"));
        model->set_training_info(static_cast<std::size_t>(scalar(b, "epochs_run")), scalar(b, "train_rmse"));
        out.predictor = std::move(model);
        break;
      }
      case Algorithm::SLIM: {
        auto model = std::make_shared<SlimPredictor>(std::move(summary), out.train, decode_rows(b.at("weights")));
        const auto conv = block(b, "converged");
        model->set_training_info(block(b, "objective_trace"), std::vector<char>(conv.begin(), conv.end()));
        out.predictor = std::move(model);
        break;
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model artifact: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw FormatError("malformed model artifact: bad numeric field");
  }
}

void save_model(const std::filesystem::path& path, const models::Predictor& predictor,
                const SparseRatingMatrix& train, const ModelInfo& info) {
  const auto doc = model_to_json(predictor, train, info);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(1) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace serialize
}  // namespace greenrec
