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


// stackcast: command-line front end for the stacked forecaster.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stackcast/artifact.hpp"
#include "stackcast/config.hpp"
#include "stackcast/error.hpp"
#include "stackcast/explain.hpp"
#include "stackcast/metrics.hpp"
#include "stackcast/random.hpp"
#include "stackcast/report.hpp"
#include "stackcast/selection.hpp"
#include "stackcast/synth.hpp"
#include "stackcast/tuner.hpp"

namespace fs = std::filesystem;
using namespace stackcast;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> set;
  std::int64_t seed = -1;
  std::string out;

  RunConfig load() const {
    RunConfig c = config.empty() ? parse_config("", set) : load_config(config, set);
    if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
    if (!out.empty()) c.out = out;
    return c;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Run configuration file");
  app->add_option("--set", c.set, "Override a config key: section.key=value");
  app->add_option("--seed", c.seed, "Master seed")->check(CLI::NonNegativeNumber);
  app->add_option("--out", c.out, "Output directory");
}

struct Data {
  std::vector<ColumnSchema> schema;
  Dataset full;  // after lagging
  Dataset train;
  Dataset test;
};

Dataset lagged(const Dataset& raw, const LagSpec& lags) {
  try {
    return build_lagged(raw, lags);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

Data load_data(const RunConfig& c, const CodeMaps* codes = nullptr) {
  if (c.data.path.empty()) throw ConfigError("config key 'data.path': required");
  Data d;
  d.schema = resolve_schema(c.data);
  d.full = lagged(load_csv(c.data.path, d.schema, codes), c.lags);
  try {
    std::tie(d.train, d.test) = temporal_split(d.full, c.test_fraction);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return d;
}

std::variant<Regressor, StackedModel> fit_model(const RunConfig& c, const Dataset& train,
                                                std::uint64_t seed) {
  if (c.stack.is_stack()) {
    return fit_meta(train, c.stack.stack_specs(), c.stack.master, c.stack.oof, seed);
  }
  return fit_learner(train, c.stack.single_spec().with_seed(seed));
}

std::vector<double> predict_model(const std::variant<Regressor, StackedModel>& m, const Matrix& x) {
  return std::visit(
      [&](const auto& model) {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = model.predict_row(x.row(r));
        return out;
      },
      m);
}

void write_metrics_row(CsvTable& t, const std::string& label, const std::vector<double>& values) {
  std::vector<std::string> cells{label};
  for (double v : values) cells.push_back(format_real(v));
  t.add_row(std::move(cells));
}

std::vector<double> metric_values(const MetricReport& m) {
  std::vector<double> v;
  for (const auto& [name, value] : m.items()) v.push_back(value);
  return v;
}

// ---- commands ----------------------------------------------------------------

struct GenFlags {
  int days = 10000;
  std::uint64_t seed = 1;
  std::string out = "data";
  double noise = 8.0;
  std::string start_date = "1999-01-01";
};

int cmd_gen_data(const GenFlags& f) {
  SynthConfig s;
  s.n_days = f.days;
  s.seed = f.seed;
  s.noise_amplitude = f.noise;
  s.start_date = f.start_date;
  s.validate();
  const fs::path path = fs::path(f.out) / "synthetic_ed.csv";
  write_csv(synth_generate(s), path);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_train(const Common& flags) {
  const RunConfig c = flags.load();
  const Data d = load_data(c);
  ModelArtifact a;
  a.kind = c.stack.is_stack() ? "stack" : c.stack.model;
  a.schema = d.schema;
  a.schema_fingerprint = schema_fingerprint(d.schema);
  a.seed = c.seed;
  a.config_hash = c.hash();
  a.feature_names = d.full.feature_names();
  a.codes = code_maps(d.full);
  a.lags = c.lags;
  a.model = fit_model(c, d.train, c.seed);
  const fs::path out(c.out);
  save_artifact(a, out / "model.json");

  const auto pred = predict_model(a.model, d.test.x());
  CsvTable t({"split", "n_rows", "r", "mae", "rmse"});
  const MetricReport m = compute_all(d.test.y(), pred);
  t.add_row({"test", std::to_string(d.test.n_rows()), format_real(m.r.value_or(NAN)),
             format_real(m.mae), format_real(m.rmse)});
  t.write(out / "train_summary.csv");
  std::cout << "wrote " << (out / "model.json").string() << "\n";
  return 0;
}

int cmd_predict(const Common& flags, const std::string& model_path, const std::string& data_path) {
  const RunConfig c = flags.load();
  const ModelArtifact a = load_artifact(model_path);
  const fs::path input = data_path.empty() ? fs::path(c.data.path) : fs::path(data_path);
  if (input.empty()) throw ConfigError("predict: no input data (--data or data.path)");
  const Dataset d = lagged(load_csv(input, a.schema, &a.codes), a.lags);
  if (d.feature_names() != a.feature_names) throw DataError("predict: input features do not match the model");
  const auto pred = a.predict(d.x());
  CsvTable t({"date", "actual", "predicted"});
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    t.add_row({d.has_time() ? format_iso_date(d.time()[r]) : std::to_string(r), format_real(d.y()[r]),
               format_real(pred[r])});
  }
  const fs::path path = fs::path(c.out) / "predictions.csv";
  t.write(path);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_evaluate(const Common& flags, int repeats) {
  if (repeats < 1) throw ConfigError("evaluate: --repeats must be >= 1");
  const RunConfig c = flags.load();
  const Data d = load_data(c);
  std::vector<std::string> header{"run"};
  for (const auto& n : metric_names()) header.push_back(n);
  CsvTable t(header);
  std::vector<std::vector<double>> runs;
  for (int k = 0; k < repeats; ++k) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
    const auto model = fit_model(c, d.train, seed);
    runs.push_back(metric_values(compute_all(d.test.y(), predict_model(model, d.test.x()))));
    write_metrics_row(t, "seed_" + std::to_string(seed), runs.back());
  }
  const std::size_t nm = runs.front().size();
  std::vector<double> mean(nm), sd(nm), lo(nm), hi(nm);
  for (std::size_t j = 0; j < nm; ++j) {
    double s = 0.0;
    lo[j] = hi[j] = runs[0][j];
    for (const auto& r : runs) {
      s += r[j];
      lo[j] = std::min(lo[j], r[j]);
      hi[j] = std::max(hi[j], r[j]);
    }
    mean[j] = s / static_cast<double>(runs.size());
    double ss = 0.0;
    for (const auto& r : runs) ss += (r[j] - mean[j]) * (r[j] - mean[j]);
    sd[j] = runs.size() > 1 ? std::sqrt(ss / static_cast<double>(runs.size() - 1)) : 0.0;
  }
  write_metrics_row(t, "Mean", mean);
  write_metrics_row(t, "STD", sd);
  write_metrics_row(t, "Min", lo);
  write_metrics_row(t, "Max", hi);
  const fs::path path = fs::path(c.out) / "metrics.csv";
  t.write(path);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

ParamRecord named(const std::vector<ParamDef>& defs, std::span<const double> values) {
  ParamRecord rec;
  for (std::size_t j = 0; j < defs.size(); ++j) rec.emplace_back(defs[j].name, values[j]);
  return rec;
}

int cmd_tune(const Common& flags) {
  const RunConfig c = flags.load();
  const Data d = load_data(c);
  const LearnerSpec base = c.stack.params.at(c.tuner.learner).with_seed(c.seed);
  const auto defs = search_space(c.tuner.learner);
  const fs::path out(c.out);
  auto objective_for = [&](const std::vector<ParamDef>& space) {
    return [&, space](std::span<const double> v) {
      return holdout_r(d.train, apply_params(base, named(space, v)), c.tuner.holdout_blocks);
    };
  };

  auto test_r = [&](const LearnerSpec& spec) {
    return pearson_r(fit_learner(d.train, spec).predict(d.test.x()), d.test.y());
  };

  if (c.tuner.method == "grid") {
    auto find = [&](const std::string& name) {
      for (const auto& p : defs) {
        if (p.name == name) return p;
      }
      throw ConfigError("config key 'tuner.grid_x/grid_y': no parameter '" + name + "' for learner '" +
                        to_string(c.tuner.learner) + "'");
    };
    const ParamDef px = find(c.tuner.grid_x), py = find(c.tuner.grid_y);
    const GridSurface s = grid_search(objective_for({px, py}), px, py, c.tuner.grid_nx, c.tuner.grid_ny);
    write_text(out / "grid_surface.csv", s.to_csv());
    std::cout << "wrote " << (out / "grid_surface.csv").string() << "\n";
    return 0;
  }

  DnoConfig dc = c.tuner.dno;
  dc.seed = mix_seed(c.seed, 0x7e7e);
  const DnoResult res = dno_optimize(objective_for(defs), defs, dc);
  write_dno_trace(res.trace, out / "tune_trace.csv");
  {
    std::vector<std::string> header{"index"};
    for (const auto& p : defs) header.push_back(p.name);
    header.push_back("fitness");
    CsvTable t(header);
    for (std::size_t i = 0; i < res.evaluated.size(); ++i) {
      std::vector<std::string> cells{std::to_string(i)};
      for (double v : res.evaluated[i].values) cells.push_back(format_real(v));
      cells.push_back(format_real(res.evaluated[i].fitness));
      t.add_row(std::move(cells));
    }
    t.write(out / "tune_evaluations.csv");
  }
  const LearnerSpec tuned = apply_params(base, named(defs, res.best));
  CsvTable best({"parameter", "value"});
  for (const auto& [name, v] : named(defs, res.best)) best.add_row({name, format_real(v)});
  best.add_row({"holdout_r", format_real(res.best_fitness)});
  best.add_row({"default_test_r", format_real(test_r(base))});
  best.add_row({"tuned_test_r", format_real(test_r(tuned))});
  best.write(out / "best_params.csv");
  std::cout << "wrote " << (out / "best_params.csv").string() << "\n";
  return 0;
}

int cmd_select(const Common& flags) {
  const RunConfig c = flags.load();
  const Data d = load_data(c);
  const std::size_t n = d.train.n_rows();
  const std::size_t n_valid = static_cast<std::size_t>(std::ceil(c.rfe.valid_fraction * static_cast<double>(n)));
  if (n_valid < 2 || n_valid + 2 > n) throw DataError("select: training split too small for a validation tail");
  const Dataset fit = d.train.slice(0, n - n_valid);
  const Dataset valid = d.train.slice(n - n_valid, n);
  if (c.rfe.target_k > fit.n_features()) {
    throw ConfigError("config key 'rfe.target_k': exceeds the feature count " + std::to_string(fit.n_features()));
  }
  const LearnerSpec spec = c.stack.params.at(c.rfe.learner).with_seed(c.seed);
  const RfeResult r = rfe(fit, valid, spec, c.rfe.target_k, c.rfe.step);
  const fs::path out(c.out);
  write_text(out / "rfe_curve.csv", r.curve_csv());
  write_text(out / "rfe_ranking.csv", r.ranking_csv(fit.feature_names()));
  std::cout << "wrote " << (out / "rfe_curve.csv").string() << "\n";
  return 0;
}

int cmd_ablate(const Common& flags) {
  const RunConfig c = flags.load();
  const Data d = load_data(c);
  std::vector<FeatureGroup> groups;
  if (c.ablate.preset == "ed") groups = ed_feature_groups();
  groups.insert(groups.end(), c.ablate.groups.begin(), c.ablate.groups.end());
  if (groups.empty()) throw ConfigError("config section 'ablate': no groups");
  const auto sets = resolve_groups(d.full, groups);
  AblationReport rep;
  if (c.stack.is_stack()) {
    rep = ablate_groups(d.train, d.test, sets, c.stack.stack_specs(), c.stack.master, c.stack.oof, c.seed);
  } else {
    const LearnerSpec spec = c.stack.single_spec().with_seed(c.seed);
    rep = ablate_groups(d.train, d.test, sets, [&](const Dataset& tr, const Dataset& te) {
      return pearson_r(fit_learner(tr, spec).predict(te.x()), te.y());
    });
  }
  const fs::path path = fs::path(c.out) / "ablation.csv";
  write_text(path, rep.to_csv());
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_explain(const Common& flags, const std::string& model_path) {
  const RunConfig c = flags.load();
  const ModelArtifact a = load_artifact(model_path);
  const Data d = load_data(c, &a.codes);
  if (d.full.feature_names() != a.feature_names) throw DataError("explain: data features do not match the model");
  const std::size_t n_rows = std::min(c.explain.rows, d.test.n_rows());
  std::vector<std::size_t> idx(n_rows);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const Matrix rows = d.test.x().take_rows(idx);
  const Matrix background = background_rows(d.train.x(), c.explain.background, mix_seed(c.seed, 0xb6));
  const ModelFn fn = [&a](std::span<const double> x) { return a.predict_row(x); };
  const ShapSummary s = shap_summary(fn, rows, background, c.explain.mode, c.explain.samples,
                                     mix_seed(c.seed, 0x5a4));
  const auto names = a.feature_names;
  const fs::path out(c.out);
  write_text(out / "shap_summary.csv", s.summary_csv(names));
  write_text(out / "shap_matrix.csv", s.matrix_csv(names));
  for (std::size_t r = 0; r < n_rows; ++r) {
    ShapReport rep;
    rep.values.assign(s.attributions.row(r).begin(), s.attributions.row(r).end());
    rep.features.assign(rows.row(r).begin(), rows.row(r).end());
    rep.base_value = s.base_values[r];
    rep.prediction = s.predictions[r];
    write_text(out / ("waterfall_" + std::to_string(r) + ".csv"), rep.waterfall_csv(names));
  }
  std::cout << "wrote " << (out / "shap_summary.csv").string() << "\n";
  return 0;
}

int fail(const std::string& msg, ExitCode code) {
  std::cerr << "stackcast: error: " << msg << "\n";
  return static_cast<int>(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stacked ensemble forecaster for daily emergency-department attendance"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic ED dataset");
  gen_cmd->add_option("--days", gen.days, "Number of days")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--out", gen.out, "Output directory");
  gen_cmd->add_option("--noise", gen.noise, "Noise amplitude")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--start-date", gen.start_date, "First day (YYYY-MM-DD)");

  Common train, predict, evaluate, tune, select, ablate, explain;
  auto* train_cmd = app.add_subcommand("train", "Fit the configured model and save it");
  add_common(train_cmd, train);

  std::string model_path, data_path;
  auto* predict_cmd = app.add_subcommand("predict", "Predict with a saved model");
  add_common(predict_cmd, predict);
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--data", data_path, "Input CSV (defaults to data.path)");

  int repeats = 1;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Test-split metrics over seeded reruns");
  add_common(evaluate_cmd, evaluate);
  evaluate_cmd->add_option("--repeats", repeats, "Number of seeded reruns");

  auto* tune_cmd = app.add_subcommand("tune", "Hyperparameter search");
  add_common(tune_cmd, tune);
  auto* select_cmd = app.add_subcommand("select", "Recursive feature elimination");
  add_common(select_cmd, select);
  auto* ablate_cmd = app.add_subcommand("ablate", "Feature-group ablation");
  add_common(ablate_cmd, ablate);

  std::string explain_model;
  auto* explain_cmd = app.add_subcommand("explain", "Shapley attributions for test rows");
  add_common(explain_cmd, explain);
  explain_cmd->add_option("--model", explain_model, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(e.what(), ExitCode::config);
  }

  try {
    if (*gen_cmd) return cmd_gen_data(gen);
    if (*train_cmd) return cmd_train(train);
    if (*predict_cmd) return cmd_predict(predict, model_path, data_path);
    if (*evaluate_cmd) return cmd_evaluate(evaluate, repeats);
    if (*tune_cmd) return cmd_tune(tune);
    if (*select_cmd) return cmd_select(select);
    if (*ablate_cmd) return cmd_ablate(ablate);
    if (*explain_cmd) return cmd_explain(explain, explain_model);
  } catch (const ConfigError& e) {
    return fail(e.what(), ExitCode::config);
  } catch (const DataError& e) {
    return fail(e.what(), ExitCode::data);
  } catch (const NumericError& e) {
    return fail(e.what(), ExitCode::numeric);
  } catch (const std::exception& e) {
    return fail(e.what(), static_cast<ExitCode>(1));
  }
  return 0;
}
