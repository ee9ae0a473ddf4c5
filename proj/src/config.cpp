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


#include "stackcast/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "stackcast/error.hpp"
#include "stackcast/report.hpp"

namespace stackcast {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical)); }

std::vector<LearnerSpec> StackConfig::stack_specs() const {
  std::vector<LearnerSpec> out;
  for (LearnerKind k : learners) out.push_back(params.at(k));
  return out;
}

LearnerSpec StackConfig::single_spec() const { return params.at(parse_learner_kind(model)); }

namespace {

using Values = std::vector<std::string>;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  s = trim(std::move(s));
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

Values parse_override_value(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') {
    Values out;
    const std::string inner = trim(v.substr(1, v.size() - 2));
    if (inner.empty()) return out;
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(unquote(item));
    return out;
  }
  return {unquote(v)};
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Values> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  const Values* take(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return nullptr;
    taken_.insert(key);
    return &it->second;
  }

  std::string scalar(const std::string& key, const Values& v) const {
    if (v.size() != 1) throw ConfigError("config key '" + key + "': expected a single value");
    return v.front();
  }

  void str(const std::string& key, std::string& out) {
    if (const Values* v = take(key)) out = scalar(key, *v);
  }

  void list(const std::string& key, std::vector<std::string>& out) {
    if (const Values* v = take(key)) out = *v;
  }

  void real(const std::string& key, double& out) {
    if (const Values* v = take(key)) out = to_real(key, scalar(key, *v));
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const Values* v = take(key)) out = to_int<Int>(key, scalar(key, *v));
  }

  void boolean(const std::string& key, bool& out) {
    if (const Values* v = take(key)) {
      const std::string s = scalar(key, *v);
      if (s == "true" || s == "1") {
        out = true;
      } else if (s == "false" || s == "0") {
        out = false;
      } else {
        throw ConfigError("config key '" + key + "': expected true or false, got '" + s + "'");
      }
    }
  }

  void int_list(const std::string& key, std::vector<int>& out) {
    if (const Values* v = take(key)) {
      out.clear();
      for (const auto& s : *v) out.push_back(to_int<int>(key, s));
    }
  }

  template <typename Parse, typename T>
  void parsed(const std::string& key, T& out, Parse parse) {
    if (const Values* v = take(key)) {
      const std::string s = scalar(key, *v);
      try {
        out = parse(s);
      } catch (const ConfigError& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
      }
    }
  }

  /// Keys under `prefix` not consumed yet, with the prefix removed.
  std::vector<std::pair<std::string, Values>> take_prefix(const std::string& prefix) {
    std::vector<std::pair<std::string, Values>> out;
    for (const auto& [k, v] : kv_) {
      if (k.rfind(prefix, 0) == 0 && !taken_.count(k)) {
        out.emplace_back(k.substr(prefix.size()), v);
        taken_.insert(k);
      }
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : kv_) {
      if (!taken_.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
  }

  static double to_real(const std::string& key, const std::string& s) {
    try {
      return parse_real(s);
    } catch (const std::invalid_argument&) {
      throw ConfigError("config key '" + key + "': expected a number, got '" + s + "'");
    }
  }

  template <typename Int>
  static Int to_int(const std::string& key, const std::string& s) {
    Int v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw ConfigError("config key '" + key + "': expected an integer, got '" + s + "'");
    }
    return v;
  }

 private:
  std::map<std::string, Values> kv_;
  std::set<std::string> taken_;
};

void read_boost(Reader& r, const std::string& p, BoostParams& b, bool ordered) {
  r.integer(p + "n_estimators", b.n_estimators);
  r.real(p + "learning_rate", b.learning_rate);
  r.integer(p + "max_depth", b.max_depth);
  r.integer(p + "max_leaves", b.max_leaves);
  r.real(p + "subsample", b.subsample);
  r.real(p + "feature_fraction", b.feature_fraction);
  r.real(p + "l2_lambda", b.l2_lambda);
  r.real(p + "min_split_gain", b.min_split_gain);
  r.integer(p + "min_samples_leaf", b.min_samples_leaf);
  r.real(p + "goss_top_fraction", b.goss_top_fraction);
  r.real(p + "goss_rand_fraction", b.goss_rand_fraction);
  r.integer(p + "max_bins", b.max_bins);
  r.parsed(p + "grow_policy", b.grow_policy, parse_grow_policy);
  if (ordered) {
    r.parsed(p + "mode", b.mode, parse_boost_mode);
    r.integer(p + "n_permutations", b.n_permutations);
    r.real(p + "ts_prior_weight", b.ts_prior_weight);
  }
}

void read_forest(Reader& r, const std::string& p, ForestParams& f) {
  r.integer(p + "n_estimators", f.n_estimators);
  r.integer(p + "max_depth", f.max_depth);
  r.integer(p + "min_samples_split", f.min_samples_split);
  r.integer(p + "min_samples_leaf", f.min_samples_leaf);
  r.real(p + "max_features", f.max_features);
  r.integer(p + "max_bins", f.max_bins);
}

void read_mlp(Reader& r, const std::string& p, MlpArch& arch, MlpTrainConfig& m) {
  r.int_list(p + "hidden", arch.hidden_sizes);
  r.real(p + "learning_rate", m.learning_rate);
  r.integer(p + "epochs", m.max_epochs);
  r.integer(p + "batch_size", m.batch_size);
  r.real(p + "l2_alpha", m.l2_alpha);
}

std::map<std::string, Values> flatten(const std::string& text) {
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::map<std::string, Values> kv;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key;
    for (const auto& p : item.parents) key += p + ".";
    key += item.name;
    kv[key] = item.inputs;
  }
  return kv;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  auto kv = flatten(text);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + o + "': expected section.key=value");
    }
    kv[trim(o.substr(0, eq))] = parse_override_value(o.substr(eq + 1));
  }

  RunConfig c;
  {
    std::ostringstream canon;
    for (const auto& [k, v] : kv) {
      canon << k << '=';
      for (std::size_t i = 0; i < v.size(); ++i) canon << (i ? "," : "") << v[i];
      canon << '\n';
    }
    c.canonical = canon.str();
  }
  for (LearnerKind k : {LearnerKind::cart, LearnerKind::random_forest, LearnerKind::extra_trees,
                        LearnerKind::gbdt, LearnerKind::ordered_boost, LearnerKind::mlp,
                        LearnerKind::linear, LearnerKind::ridge}) {
    c.stack.params[k] = LearnerSpec::of(k);
  }
  for (const auto& s : default_stack()) c.stack.params[s.kind] = s;

  Reader r(std::move(kv));
  r.integer("seed", c.seed);
  r.str("out", c.out);

  r.str("data.path", c.data.path);
  r.str("data.preset", c.data.preset);
  r.str("data.target", c.data.target);
  r.str("data.time_index", c.data.time_index);
  r.list("data.categorical", c.data.categorical);
  r.list("data.binary", c.data.binary);
  r.list("data.ignore", c.data.ignore);
  if (c.data.preset != "ed" && c.data.preset != "none") {
    throw ConfigError("config key 'data.preset': expected 'ed' or 'none', got '" + c.data.preset + "'");
  }

  r.int_list("lags.delays", c.lags.delays);
  for (std::size_t i = 0; i < c.lags.delays.size(); ++i) {
    if (c.lags.delays[i] < 1 || (i > 0 && c.lags.delays[i] <= c.lags.delays[i - 1])) {
      throw ConfigError("config key 'lags.delays': delays must be >= 1 and strictly increasing");
    }
  }
  r.real("split.test_fraction", c.test_fraction);
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
    throw ConfigError("config key 'split.test_fraction': must lie in (0, 1)");
  }

  // [stack]
  r.str("stack.model", c.stack.model);
  if (const auto* v = r.take("stack.learners")) {
    c.stack.learners.clear();
    try {
      for (const auto& s : *v) c.stack.learners.push_back(parse_learner_kind(s));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config key 'stack.learners': ") + e.what());
    }
  }
  r.parsed("stack.master", c.stack.master.kind, parse_master_kind);
  r.integer("stack.oof_folds", c.stack.oof.n_folds);
  r.parsed("stack.oof_mode", c.stack.oof.mode, parse_oof_mode);
  read_boost(r, "stack.gbdt.", c.stack.params[LearnerKind::gbdt].boost, false);
  read_boost(r, "stack.ordered_boost.", c.stack.params[LearnerKind::ordered_boost].boost, true);
  read_forest(r, "stack.random_forest.", c.stack.params[LearnerKind::random_forest].forest);
  read_forest(r, "stack.extra_trees.", c.stack.params[LearnerKind::extra_trees].forest);
  {
    auto& cart = c.stack.params[LearnerKind::cart].cart;
    r.integer("stack.cart.max_depth", cart.max_depth);
    r.integer("stack.cart.min_samples_split", cart.min_samples_split);
    r.integer("stack.cart.min_samples_leaf", cart.min_samples_leaf);
  }
  {
    auto& m = c.stack.params[LearnerKind::mlp];
    read_mlp(r, "stack.mlp.", m.arch, m.mlp);
  }
  r.real("stack.ridge.alpha", c.stack.params[LearnerKind::ridge].ridge_alpha);
  read_mlp(r, "stack.master.", c.stack.master.arch, c.stack.master.mlp);
  r.real("stack.master.ridge_alpha", c.stack.master.ridge_alpha);
  if (c.stack.oof.n_folds < 2) throw ConfigError("config key 'stack.oof_folds': must be >= 2");
  if (c.stack.is_stack()) {
    try {
      validate_stack(c.stack.stack_specs());
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config key 'stack.learners': ") + e.what());
    }
  } else {
    try {
      parse_learner_kind(c.stack.model);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config key 'stack.model': ") + e.what());
    }
  }
  for (const auto& [kind, spec] : c.stack.params) {
    try {
      spec.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("config section 'stack." + to_string(kind) + "': " + e.what());
    }
  }
  try {
    c.stack.master.learner_spec().validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config section 'stack.master': ") + e.what());
  }

  // [tuner]
  r.str("tuner.method", c.tuner.method);
  if (c.tuner.method != "dno" && c.tuner.method != "grid") {
    throw ConfigError("config key 'tuner.method': expected 'dno' or 'grid', got '" + c.tuner.method + "'");
  }
  r.parsed("tuner.learner", c.tuner.learner, parse_learner_kind);
  c.tuner.dno.max_evaluations = 50;
  r.integer("tuner.population", c.tuner.dno.population);
  r.real("tuner.zeta", c.tuner.dno.zeta);
  r.real("tuner.crossover", c.tuner.dno.crossover);
  r.integer("tuner.max_iter", c.tuner.dno.max_iter);
  if (r.has("tuner.stagnation")) {
    double lam = 0.0;
    r.real("tuner.stagnation", lam);
    c.tuner.dno.stagnation = lam;
  }
  r.integer("tuner.nm_max_iter", c.tuner.dno.nm_max_iter);
  r.boolean("tuner.use_nm", c.tuner.dno.use_nm);
  r.parsed("tuner.strategy", c.tuner.dno.strategy, parse_de_strategy);
  r.integer("tuner.max_evaluations", c.tuner.dno.max_evaluations);
  r.integer("tuner.holdout_blocks", c.tuner.holdout_blocks);
  r.str("tuner.grid_x", c.tuner.grid_x);
  r.str("tuner.grid_y", c.tuner.grid_y);
  r.integer("tuner.grid_nx", c.tuner.grid_nx);
  r.integer("tuner.grid_ny", c.tuner.grid_ny);
  try {
    c.tuner.dno.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config section 'tuner': ") + e.what());
  }
  if (c.tuner.holdout_blocks < 2) throw ConfigError("config key 'tuner.holdout_blocks': must be >= 2");

  // [rfe]
  r.parsed("rfe.learner", c.rfe.learner, parse_learner_kind);
  r.integer("rfe.target_k", c.rfe.target_k);
  r.integer("rfe.step", c.rfe.step);
  r.real("rfe.valid_fraction", c.rfe.valid_fraction);
  if (c.rfe.target_k < 1) throw ConfigError("config key 'rfe.target_k': must be >= 1");
  if (c.rfe.step < 1) throw ConfigError("config key 'rfe.step': must be >= 1");
  if (!(c.rfe.valid_fraction > 0.0 && c.rfe.valid_fraction < 1.0)) {
    throw ConfigError("config key 'rfe.valid_fraction': must lie in (0, 1)");
  }

  // [ablate]
  r.str("ablate.preset", c.ablate.preset);
  if (c.ablate.preset != "ed" && c.ablate.preset != "none") {
    throw ConfigError("config key 'ablate.preset': expected 'ed' or 'none', got '" + c.ablate.preset + "'");
  }
  for (auto& [name, features] : r.take_prefix("ablate.groups.")) {
    if (name.find('.') != std::string::npos) throw ConfigError("unknown config key 'ablate.groups." + name + "'");
    c.ablate.groups.push_back({name, features});
  }

  // [explain]
  r.integer("explain.rows", c.explain.rows);
  r.integer("explain.background", c.explain.background);
  r.integer("explain.samples", c.explain.samples);
  r.parsed("explain.mode", c.explain.mode, parse_shap_mode);
  if (c.explain.rows < 1 || c.explain.background < 1 || c.explain.samples < 1) {
    throw ConfigError("config section 'explain': rows, background and samples must be >= 1");
  }

  r.reject_unknown();
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file '" + path.string() + "' not found");
  return parse_config(read_text(path), overrides);
}

std::vector<ColumnSchema> resolve_schema(const DataConfig& data) {
  if (data.preset == "ed") return ed_schema();
  if (data.path.empty()) throw ConfigError("config key 'data.path': required");
  const auto header = read_csv_header(data.path);
  auto in = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  for (const auto* list : {&data.categorical, &data.binary, &data.ignore}) {
    for (const auto& name : *list) {
      if (!in(header, name)) throw ConfigError("config: column '" + name + "' not in the CSV header");
    }
  }
  if (!in(header, data.target)) throw ConfigError("config key 'data.target': column '" + data.target + "' not in the CSV header");
  if (!data.time_index.empty() && !in(header, data.time_index)) {
    throw ConfigError("config key 'data.time_index': column '" + data.time_index + "' not in the CSV header");
  }
  std::vector<ColumnSchema> schema;
  for (const auto& name : header) {
    ColumnSchema s{name, ColumnKind::numeric, ColumnRole::feature};
    if (name == data.target) {
      s.role = ColumnRole::target;
    } else if (name == data.time_index) {
      s.role = ColumnRole::time_index;
    } else if (in(data.ignore, name)) {
      s.role = ColumnRole::ignored;
    }
    if (in(data.categorical, name)) s.kind = ColumnKind::categorical;
    if (in(data.binary, name)) s.kind = ColumnKind::binary;
    schema.push_back(s);
  }
  validate_schema(schema);
  return schema;
}

}  // namespace stackcast
