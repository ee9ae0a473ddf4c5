// Copyright 2026 The Stackcast Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stackcast/learner.hpp"

#include <cmath>

#include "stackcast/error.hpp"

namespace stackcast {

std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::cart: return "cart";
    case LearnerKind::random_forest: return "random_forest";
    case LearnerKind::extra_trees: return "extra_trees";
    case LearnerKind::gbdt: return "gbdt";
    case LearnerKind::ordered_boost: return "ordered_boost";
    case LearnerKind::mlp: return "mlp";
    case LearnerKind::linear: return "linear";
    case LearnerKind::ridge: return "ridge";
  }
  return "unknown";
}

LearnerKind parse_learner_kind(const std::string& s) {
  for (auto k : {LearnerKind::cart, LearnerKind::random_forest, LearnerKind::extra_trees,
                 LearnerKind::gbdt, LearnerKind::ordered_boost, LearnerKind::mlp,
                 LearnerKind::linear, LearnerKind::ridge}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown learner kind '" + s + "'");
}

LearnerSpec LearnerSpec::of(LearnerKind kind) {
  LearnerSpec s;
  s.kind = kind;
  if (kind == LearnerKind::extra_trees) s.forest.mode = ForestMode::extra_trees;
  if (kind == LearnerKind::ordered_boost) s.boost = BoostParams::ordered_defaults();
  return s;
}

void LearnerSpec::validate() const {
  switch (kind) {
    case LearnerKind::cart: cart.validate(); break;
    case LearnerKind::random_forest:
    case LearnerKind::extra_trees:
      forest.validate();
      if ((kind == LearnerKind::extra_trees) != (forest.mode == ForestMode::extra_trees)) {
        throw ConfigError(to_string(kind) + ": forest mode does not match learner kind");
      }
      break;
    case LearnerKind::gbdt:
    case LearnerKind::ordered_boost: boost.validate(); break;
    case LearnerKind::mlp:
      arch.validate();
      mlp.validate();
      break;
    case LearnerKind::linear: break;
    case LearnerKind::ridge:
      if (!(ridge_alpha > 0.0)) throw ConfigError("ridge: alpha must be > 0");
      break;
  }
}

LearnerSpec LearnerSpec::with_seed(std::uint64_t seed) const {
  LearnerSpec s = *this;
  s.forest.seed = seed;
  s.boost.seed = seed;
  s.mlp.seed = seed;
  return s;
}

double Regressor::predict_row(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw DataError(to_string(kind_) + ": expected " + std::to_string(n_features_) +
                    " features, got " + std::to_string(x.size()));
  }
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Forest>) {
          return predict_forest_row(m, x);
        } else {
          return m.predict_row(x);
        }
      },
      model_);
}

std::vector<double> Regressor::predict(const Matrix& x) const {
  if (x.cols() != n_features_) {
    throw DataError(to_string(kind_) + ": expected " + std::to_string(n_features_) +
                    " features, got " + std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_row(x.row(i));
  return out;
}

std::optional<std::vector<double>> Regressor::importance() const {
  return std::visit(
      [&](const auto& m) -> std::optional<std::vector<double>> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Tree>) {
          return impurity_importance(m, n_features_);
        } else if constexpr (std::is_same_v<T, Forest> || std::is_same_v<T, BoostModel>) {
          return impurity_importance(m);
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          std::vector<double> imp(m.weights.size());
          for (std::size_t i = 0; i < imp.size(); ++i) imp[i] = std::abs(m.weights[i]);
          normalize_importance(imp);
          return imp;
        } else {
          return std::nullopt;
        }
      },
      model_);
}

nlohmann::json Regressor::to_json() const {
  nlohmann::json body = std::visit(
      [](const auto& m) -> nlohmann::json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Forest>) {
          nlohmann::json trees = nlohmann::json::array();
          for (const auto& t : m.trees) trees.push_back(t.to_json());
          return {{"mode", to_string(m.mode)}, {"trees", trees}};
        } else {
          return m.to_json();
        }
      },
      model_);
  return {{"kind", to_string(kind_)}, {"n_features", n_features_}, {"model", body}};
}

Regressor Regressor::from_json(const nlohmann::json& j) {
  const LearnerKind kind = parse_learner_kind(j.at("kind").get<std::string>());
  const auto n_features = j.at("n_features").get<std::size_t>();
  const auto& body = j.at("model");
  switch (kind) {
    case LearnerKind::cart: return {kind, n_features, Tree::from_json(body)};
    case LearnerKind::random_forest:
    case LearnerKind::extra_trees: {
      Forest f;
      f.n_features = n_features;
      f.mode = parse_forest_mode(body.at("mode").get<std::string>());
      for (const auto& t : body.at("trees")) f.trees.push_back(Tree::from_json(t));
      return {kind, n_features, std::move(f)};
    }
    case LearnerKind::gbdt:
    case LearnerKind::ordered_boost: return {kind, n_features, BoostModel::from_json(body)};
    case LearnerKind::mlp: return {kind, n_features, MlpModel::from_json(body)};
    case LearnerKind::linear:
    case LearnerKind::ridge: return {kind, n_features, LinearModel::from_json(body)};
  }
  throw std::invalid_argument("Regressor::from_json: unknown kind");
}

Regressor fit_learner(const Dataset& train, const LearnerSpec& spec) {
  spec.validate();
  const std::size_t p = train.n_features();
  switch (spec.kind) {
    case LearnerKind::cart: return {spec.kind, p, fit_cart(train, spec.cart)};
    case LearnerKind::random_forest:
    case LearnerKind::extra_trees: return {spec.kind, p, fit_forest(train, spec.forest)};
    case LearnerKind::gbdt:
      return {spec.kind, p, fit_gbdt(bin_features(train, spec.boost.max_bins), spec.boost)};
    case LearnerKind::ordered_boost: return {spec.kind, p, fit_ordered_boost(train, spec.boost)};
    case LearnerKind::mlp: return {spec.kind, p, fit_mlp(train, spec.arch, spec.mlp)};
    case LearnerKind::linear: return {spec.kind, p, fit_linear(train.x(), train.y(), 0.0)};
    case LearnerKind::ridge: return {spec.kind, p, fit_linear(train.x(), train.y(), spec.ridge_alpha)};
  }
  throw std::invalid_argument("fit_learner: unknown kind");
}

}  // namespace stackcast
