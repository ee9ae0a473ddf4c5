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

#include "stackcast/meta.hpp"

#include <numeric>
#include <set>

#include "stackcast/error.hpp"
#include "stackcast/random.hpp"

namespace stackcast {

std::string to_string(OofMode m) {
  return m == OofMode::contiguous_blocks ? "contiguous_blocks" : "forward_chain";
}

std::string to_string(MasterKind m) {
  switch (m) {
    case MasterKind::mlp: return "mlp";
    case MasterKind::linear: return "linear";
    case MasterKind::ridge: return "ridge";
  }
  return "unknown";
}

OofMode parse_oof_mode(const std::string& s) {
  if (s == "contiguous_blocks") return OofMode::contiguous_blocks;
  if (s == "forward_chain") return OofMode::forward_chain;
  throw ConfigError("unknown oof mode '" + s + "'");
}

MasterKind parse_master_kind(const std::string& s) {
  if (s == "mlp") return MasterKind::mlp;
  if (s == "linear") return MasterKind::linear;
  if (s == "ridge") return MasterKind::ridge;
  throw ConfigError("unknown master kind '" + s + "'");
}

LearnerSpec MasterSpec::learner_spec() const {
  LearnerSpec s;
  switch (kind) {
    case MasterKind::mlp: s.kind = LearnerKind::mlp; break;
    case MasterKind::linear: s.kind = LearnerKind::linear; break;
    case MasterKind::ridge: s.kind = LearnerKind::ridge; break;
  }
  s.arch = arch;
  s.mlp = mlp;
  s.ridge_alpha = ridge_alpha;
  return s;
}

std::pair<std::size_t, std::size_t> oof_block(std::size_t n, int n_folds, int k) {
  const auto kk = static_cast<std::size_t>(k), K = static_cast<std::size_t>(n_folds);
  return {kk * n / K, (kk + 1) * n / K};
}

namespace {

std::vector<std::size_t> range_except(std::size_t n, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> idx;
  idx.reserve(n - (end - begin));
  for (std::size_t i = 0; i < n; ++i) {
    if (i < begin || i >= end) idx.push_back(i);
  }
  return idx;
}

template <typename Fn>
auto with_identity(const std::string& who, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(who + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(who + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(who + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(who + ": " + e.what());
  }
}

}  // namespace

std::vector<double> oof_predictions(const Dataset& train, const FitPredict& learner,
                                    const OofScheme& scheme) {
  const std::size_t n = train.n_rows();
  if (scheme.n_folds < 2) throw ConfigError("oof: n_folds must be >= 2");
  if (n < static_cast<std::size_t>(scheme.n_folds)) {
    throw DataError("oof: " + std::to_string(n) + " rows cannot form " +
                    std::to_string(scheme.n_folds) + " folds");
  }
  std::vector<double> out(n);
  for (int k = 0; k < scheme.n_folds; ++k) {
    const auto [begin, end] = oof_block(n, scheme.n_folds, k);
    const Dataset held = train.slice(begin, end);
    std::vector<double> pred;
    if (scheme.mode == OofMode::contiguous_blocks) {
      const auto idx = range_except(n, begin, end);
      pred = learner(train.take_rows(idx), held);
    } else if (k == 0) {
      const auto& y = train.y();
      pred.assign(end - begin, std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n));
    } else {
      pred = learner(train.slice(0, begin), held);
    }
    if (pred.size() != end - begin) throw std::logic_error("oof: learner returned wrong length");
    std::copy(pred.begin(), pred.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
  }
  return out;
}

std::vector<double> oof_predictions(const Dataset& train, const LearnerSpec& spec,
                                    const OofScheme& scheme, std::uint64_t seed) {
  const LearnerSpec seeded = spec.with_seed(seed);
  return oof_predictions(
      train,
      [&](const Dataset& fit, const Dataset& predict) {
        return fit_learner(fit, seeded).predict(predict.x());
      },
      scheme);
}

void validate_stack(const std::vector<LearnerSpec>& specs) {
  if (specs.empty()) throw ConfigError("stack: at least one sub-learner is required");
  std::set<LearnerKind> seen;
  for (const auto& s : specs) {
    if (s.kind != LearnerKind::gbdt && s.kind != LearnerKind::ordered_boost &&
        s.kind != LearnerKind::random_forest && s.kind != LearnerKind::extra_trees) {
      throw ConfigError("stack: '" + to_string(s.kind) + "' cannot be a sub-learner");
    }
    if (!seen.insert(s.kind).second) {
      throw ConfigError("stack: duplicate sub-learner '" + to_string(s.kind) + "'");
    }
    s.validate();
  }
}

Matrix build_meta_features(const Dataset& train, const std::vector<LearnerSpec>& specs,
                           const OofScheme& scheme, std::uint64_t seed) {
  validate_stack(specs);
  Matrix meta(train.n_rows(), specs.size());
  for (std::size_t m = 0; m < specs.size(); ++m) {
    const auto col = with_identity(to_string(specs[m].kind), [&] {
      return oof_predictions(train, specs[m], scheme, mix_seed(seed, m));
    });
    for (std::size_t i = 0; i < col.size(); ++i) meta(i, m) = col[i];
  }
  return meta;
}

std::vector<Regressor> fit_sub_learners(const Dataset& train, const std::vector<LearnerSpec>& specs,
                                        std::uint64_t seed) {
  validate_stack(specs);
  std::vector<Regressor> subs;
  for (std::size_t m = 0; m < specs.size(); ++m) {
    subs.push_back(with_identity(to_string(specs[m].kind), [&] {
      return fit_learner(train, specs[m].with_seed(mix_seed(seed, m)));
    }));
  }
  return subs;
}

Regressor fit_master(const Matrix& meta, std::span<const double> y, const MasterSpec& master,
                     std::uint64_t seed) {
  const LearnerSpec spec = master.learner_spec().with_seed(mix_seed(seed, 0x3a57));
  spec.validate();
  const std::size_t p = meta.cols();
  return with_identity("master " + to_string(master.kind), [&]() -> Regressor {
    switch (master.kind) {
      case MasterKind::mlp: return {LearnerKind::mlp, p, fit_mlp(meta, y, spec.arch, spec.mlp)};
      case MasterKind::linear: return {LearnerKind::linear, p, fit_linear(meta, y, 0.0)};
      case MasterKind::ridge:
        return {LearnerKind::ridge, p, fit_linear(meta, y, spec.ridge_alpha)};
    }
    throw std::invalid_argument("unknown master kind");
  });
}

std::vector<double> StackedModel::level0(std::span<const double> x) const {
  if (x.size() != n_features) throw DataError("stack: feature count mismatch");
  std::vector<double> z(subs.size());
  for (std::size_t m = 0; m < subs.size(); ++m) z[m] = subs[m].predict_row(x);
  return z;
}

double StackedModel::predict_row(std::span<const double> x) const {
  return master.predict_row(level0(x));
}

std::vector<double> predict_meta(const StackedModel& model, const Matrix& x) {
  if (x.cols() != model.n_features) throw DataError("stack: feature count mismatch");
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.predict_row(x.row(i));
  return out;
}

StackedModel fit_meta(const Dataset& train, const std::vector<LearnerSpec>& specs,
                      const MasterSpec& master, const OofScheme& scheme, std::uint64_t seed) {
  const Matrix meta = build_meta_features(train, specs, scheme, seed);
  StackedModel model;
  model.master = fit_master(meta, train.y(), master, seed);
  model.subs = fit_sub_learners(train, specs, seed);
  model.master_kind = master.kind;
  model.oof = scheme;
  model.n_features = train.n_features();
  return model;
}

nlohmann::json StackedModel::to_json() const {
  nlohmann::json subs_j = nlohmann::json::array();
  for (const auto& s : subs) subs_j.push_back(s.to_json());
  return {{"subs", subs_j},
          {"master", master.to_json()},
          {"master_kind", to_string(master_kind)},
          {"oof", {{"n_folds", oof.n_folds}, {"mode", to_string(oof.mode)}}},
          {"n_features", n_features}};
}

StackedModel StackedModel::from_json(const nlohmann::json& j) {
  StackedModel m;
  for (const auto& s : j.at("subs")) m.subs.push_back(Regressor::from_json(s));
  m.master = Regressor::from_json(j.at("master"));
  m.master_kind = parse_master_kind(j.at("master_kind").get<std::string>());
  m.oof.n_folds = j.at("oof").at("n_folds").get<int>();
  m.oof.mode = parse_oof_mode(j.at("oof").at("mode").get<std::string>());
  m.n_features = j.at("n_features").get<std::size_t>();
  return m;
}

std::vector<LearnerSpec> default_stack() {
  LearnerSpec gbdt = LearnerSpec::of(LearnerKind::gbdt);
  gbdt.boost.n_estimators = 100;
  gbdt.boost.learning_rate = 0.12;
  gbdt.boost.max_leaves = 31;
  gbdt.boost.max_depth = 8;
  gbdt.boost.l2_lambda = 1.0;
  gbdt.boost.min_samples_leaf = 20;

  LearnerSpec ordered = LearnerSpec::of(LearnerKind::ordered_boost);
  ordered.boost.n_estimators = 100;
  ordered.boost.learning_rate = 0.2;
  ordered.boost.max_depth = 6;
  ordered.boost.l2_lambda = 3.0;

  LearnerSpec rf = LearnerSpec::of(LearnerKind::random_forest);
  rf.forest.n_estimators = 30;
  rf.forest.max_depth = 12;
  rf.forest.min_samples_split = 4;
  rf.forest.min_samples_leaf = 2;
  rf.forest.max_features = 0.352;
  rf.forest.max_bins = 255;

  LearnerSpec et = LearnerSpec::of(LearnerKind::extra_trees);
  et.forest.n_estimators = 30;
  et.forest.max_depth = 14;
  et.forest.min_samples_split = 2;
  et.forest.min_samples_leaf = 1;
  et.forest.max_features = 0.33;
  et.forest.max_bins = 255;
  return {gbdt, ordered, rf, et};
}

}  // namespace stackcast
