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


#include "stackcast/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "stackcast/error.hpp"
#include "stackcast/meta.hpp"
#include "stackcast/metrics.hpp"
#include "stackcast/random.hpp"
#include "stackcast/report.hpp"

namespace stackcast {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_same_size(std::size_t a, std::size_t b, const char* who) {
  if (a != b) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

void ParamDef::validate() const {
  if (name.empty()) throw ConfigError("param: empty name");
  if (!(std::isfinite(lower) && std::isfinite(upper)) || !(lower < upper)) {
    throw ConfigError("param '" + name + "': need finite lower < upper");
  }
  if (scale == ParamScale::log && !(lower > 0.0)) {
    throw ConfigError("param '" + name + "': log scale needs positive bounds");
  }
}

double ParamDef::internal_lower() const {
  return scale == ParamScale::log ? std::log(lower) : lower;
}

double ParamDef::internal_upper() const {
  return scale == ParamScale::log ? std::log(upper) : upper;
}

std::vector<double> natural_values(std::span<const ParamDef> defs,
                                   std::span<const double> internal) {
  require_same_size(defs.size(), internal.size(), "encode_params");
  std::vector<double> out(defs.size());
  for (std::size_t j = 0; j < defs.size(); ++j) {
    const ParamDef& d = defs[j];
    double v = d.scale == ParamScale::log ? std::exp(internal[j]) : internal[j];
    if (d.kind == ParamKind::integer) v = std::round(v);
    out[j] = std::clamp(v, d.lower, d.upper);
  }
  return out;
}

ParamRecord encode_params(std::span<const ParamDef> defs, std::span<const double> internal) {
  const auto values = natural_values(defs, internal);
  ParamRecord rec;
  rec.reserve(defs.size());
  for (std::size_t j = 0; j < defs.size(); ++j) rec.emplace_back(defs[j].name, values[j]);
  return rec;
}

std::vector<double> decode_params(std::span<const ParamDef> defs, const ParamRecord& record) {
  std::vector<double> out(defs.size());
  for (std::size_t j = 0; j < defs.size(); ++j) {
    const ParamDef& d = defs[j];
    auto it = std::find_if(record.begin(), record.end(),
                           [&](const auto& kv) { return kv.first == d.name; });
    if (it == record.end()) throw ConfigError("param record: missing '" + d.name + "'");
    const double v = it->second;
    if (!(v >= d.lower && v <= d.upper)) {
      throw ConfigError("param '" + d.name + "': value " + format_real(v) + " outside [" +
                        format_real(d.lower) + ", " + format_real(d.upper) + "]");
    }
    out[j] = d.scale == ParamScale::log ? std::log(v) : v;
  }
  return out;
}

std::vector<double> clip_to_bounds(std::span<const double> v, std::span<const double> lower,
                                   std::span<const double> upper) {
  require_same_size(v.size(), lower.size(), "clip_to_bounds");
  require_same_size(v.size(), upper.size(), "clip_to_bounds");
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::clamp(out[j], lower[j], upper[j]);
  return out;
}

std::vector<double> de_mutate(std::span<const double> p1, std::span<const double> p2,
                              std::span<const double> p3, std::span<const double> best,
                              double zeta) {
  require_same_size(p1.size(), best.size(), "de_mutate");
  require_same_size(p2.size(), best.size(), "de_mutate");
  require_same_size(p3.size(), best.size(), "de_mutate");
  std::vector<double> out(best.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = best[j] + zeta * (p1[j] - p2[j]) + zeta * (p3[j] - best[j]);
  }
  return out;
}

std::vector<double> de_best_1(std::span<const double> p1, std::span<const double> p2,
                              std::span<const double> best, double zeta) {
  require_same_size(p1.size(), best.size(), "de_best_1");
  require_same_size(p2.size(), best.size(), "de_best_1");
  std::vector<double> out(best.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = best[j] + zeta * (p1[j] - p2[j]);
  return out;
}

std::vector<double> binomial_crossover(std::span<const double> target,
                                       std::span<const double> mutant, double cr,
                                       std::size_t forced_index, std::uint64_t seed) {
  require_same_size(target.size(), mutant.size(), "binomial_crossover");
  if (forced_index >= target.size()) {
    throw std::invalid_argument("binomial_crossover: forced index out of range");
  }
  Rng rng(seed);
  std::vector<double> out(target.begin(), target.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double u = rng.uniform();
    if (u < cr || j == forced_index) out[j] = mutant[j];
  }
  return out;
}

// ---- Nelder-Mead ----------------------------------------------------------

NmResult nelder_mead(const Objective& objective, std::span<const double> start,
                     const NmConfig& config) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start");
  const bool bounded = !config.lower.empty();
  if (bounded) {
    require_same_size(config.lower.size(), n, "nelder_mead");
    require_same_size(config.upper.size(), n, "nelder_mead");
  }
  auto clip = [&](std::vector<double>& x) {
    if (!bounded) return;
    for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], config.lower[j], config.upper[j]);
  };

  NmResult result;
  result.values.assign(start.begin(), start.end());
  bool exhausted = false;
  // Minimizes the negated objective; non-finite values rank last.
  auto cost = [&](const std::vector<double>& x) {
    if (config.max_evaluations > 0 && result.evaluations >= config.max_evaluations) {
      exhausted = true;
      return std::numeric_limits<double>::infinity();
    }
    ++result.evaluations;
    const double f = objective(x);
    if (!std::isfinite(f)) return std::numeric_limits<double>::infinity();
    if (f > result.fitness) {
      result.fitness = f;
      result.values = x;
    }
    return -f;
  };

  {
    ++result.evaluations;
    const double f0 = objective(result.values);
    if (!std::isfinite(f0)) throw NumericError("nelder_mead: objective not finite at start");
    result.fitness = f0;
  }

  std::vector<std::vector<double>> simplex(n + 1, result.values);
  std::vector<double> g(n + 1, -result.fitness);
  for (std::size_t j = 0; j < n; ++j) {
    auto& v = simplex[j + 1];
    double step = bounded ? config.step_fraction * (config.upper[j] - config.lower[j])
                          : config.step_fraction * std::max(1.0, std::abs(v[j]));
    if (bounded && v[j] + step > config.upper[j]) step = -step;
    v[j] += step;
    clip(v);
    g[j + 1] = cost(v);
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n);
  auto toward = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = from[j] + t * (to[j] - from[j]);
    clip(x);
    return x;
  };

  for (int it = 0; it < config.max_iter && !exhausted; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
    {
      std::vector<std::vector<double>> s(n + 1);
      std::vector<double> gs(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        s[i] = std::move(simplex[order[i]]);
        gs[i] = g[order[i]];
      }
      simplex = std::move(s);
      g = std::move(gs);
    }
    double diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) d2 += (simplex[i][j] - simplex[0][j]) * (simplex[i][j] - simplex[0][j]);
      diameter = std::max(diameter, std::sqrt(d2));
    }
    if (diameter < config.tol) break;
    result.iterations = it + 1;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    const auto& worst = simplex[n];
    auto xr = toward(centroid, worst, -1.0);
    const double gr = cost(xr);
    if (gr < g[0]) {
      auto xe = toward(centroid, worst, -2.0);
      const double ge = cost(xe);
      if (ge < gr) {
        simplex[n] = std::move(xe);
        g[n] = ge;
      } else {
        simplex[n] = std::move(xr);
        g[n] = gr;
      }
      continue;
    }
    if (gr < g[n - 1]) {
      simplex[n] = std::move(xr);
      g[n] = gr;
      continue;
    }
    bool shrink;
    if (gr < g[n]) {
      auto xc = toward(centroid, xr, 0.5);
      const double gc = cost(xc);
      shrink = !(gc <= gr);
      if (!shrink) {
        simplex[n] = std::move(xc);
        g[n] = gc;
      }
    } else {
      auto xc = toward(centroid, worst, 0.5);
      const double gc = cost(xc);
      shrink = !(gc < g[n]);
      if (!shrink) {
        simplex[n] = std::move(xc);
        g[n] = gc;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= n && !exhausted; ++i) {
        simplex[i] = toward(simplex[0], simplex[i], 0.5);
        g[i] = cost(simplex[i]);
      }
    }
  }
  return result;
}

// ---- DNO ------------------------------------------------------------------

std::string to_string(DeStrategy s) { return s == DeStrategy::algorithm1 ? "algorithm1" : "best_1"; }

DeStrategy parse_de_strategy(const std::string& s) {
  if (s == "algorithm1") return DeStrategy::algorithm1;
  if (s == "best_1") return DeStrategy::best_1;
  throw ConfigError("unknown DE strategy '" + s + "'");
}

void DnoConfig::validate() const {
  if (population < 4) throw ConfigError("tuner: population must be >= 4");
  if (!(zeta > 0.0 && zeta <= 2.0)) throw ConfigError("tuner: zeta must lie in (0, 2]");
  if (!(crossover >= 0.0 && crossover <= 1.0)) throw ConfigError("tuner: crossover must lie in [0, 1]");
  if (max_iter < 0) throw ConfigError("tuner: max_iter must be >= 0");
  if (stagnation && !(*stagnation > 0.0)) throw ConfigError("tuner: stagnation must be > 0");
  if (nm_max_iter < 0) throw ConfigError("tuner: nm_max_iter must be >= 0");
}

namespace {

struct BudgetExhausted {};

class Evaluator {
 public:
  Evaluator(const Objective& objective, std::span<const ParamDef> defs, long budget,
            DnoResult& result)
      : objective_(objective), defs_(defs), budget_(budget), result_(result) {}

  bool exhausted() const { return budget_ > 0 && count_ >= budget_; }

  double operator()(std::span<const double> internal) {
    if (exhausted()) throw BudgetExhausted{};
    ++count_;
    auto natural = natural_values(defs_, internal);
    double f = objective_(natural);
    if (!std::isfinite(f)) f = kNegInf;
    if (f > result_.best_fitness || result_.best.empty()) {
      result_.best_fitness = f;
      result_.best = natural;
    }
    result_.evaluated.push_back({std::move(natural), f});
    return f;
  }

 private:
  const Objective& objective_;
  std::span<const ParamDef> defs_;
  long budget_;
  long count_ = 0;
  DnoResult& result_;
};

DnoTraceRow summarize(int iteration, const std::vector<double>& fitness, double best_ever,
                      bool nm) {
  DnoTraceRow row;
  row.iteration = iteration;
  row.best_fitness = best_ever;
  row.nm_triggered = nm;
  double sum = 0.0;
  int finite = 0;
  for (double f : fitness) {
    if (std::isfinite(f)) {
      sum += f;
      ++finite;
    } else {
      ++row.n_nonfinite;
    }
  }
  row.mean_fitness = finite > 0 ? sum / finite : kNegInf;
  return row;
}

std::size_t argmax(const std::vector<double>& v) {
  std::size_t b = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[b]) b = i;
  }
  return b;
}

}  // namespace

DnoResult dno_optimize(const Objective& objective, std::span<const ParamDef> defs,
                       const DnoConfig& config) {
  config.validate();
  if (defs.empty()) throw ConfigError("tuner: empty search space");
  for (const auto& d : defs) d.validate();
  const std::size_t dim = defs.size();
  std::vector<double> lower(dim), upper(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    lower[j] = defs[j].internal_lower();
    upper[j] = defs[j].internal_upper();
  }

  DnoResult result;
  result.best_fitness = kNegInf;
  Evaluator eval(objective, defs, config.max_evaluations, result);
  Rng rng(config.seed);
  const auto np = static_cast<std::size_t>(config.population);

  std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
  std::vector<double> fit(np, kNegInf);
  try {
    for (auto& x : pop) {
      for (std::size_t j = 0; j < dim; ++j) x[j] = rng.uniform(lower[j], upper[j]);
    }
    for (std::size_t i = 0; i < np; ++i) fit[i] = eval(pop[i]);
    result.trace.push_back(summarize(0, fit, result.best_fitness, false));

    std::vector<std::size_t> others(np - 1);
    for (int it = 1; it <= config.max_iter; ++it) {
      const std::size_t b = argmax(fit);
      const double prev_best = fit[b];
      std::vector<std::vector<double>> trials(np);
      for (std::size_t i = 0; i < np; ++i) {
        std::size_t k = 0;
        for (std::size_t c = 0; c < np; ++c) {
          if (c != b) others[k++] = c;
        }
        for (std::size_t q = 0; q < 3; ++q) {
          std::swap(others[q], others[q + rng.below(others.size() - q)]);
        }
        const std::size_t r1 = others[0], r2 = others[1], r3 = others[2];
        if (r1 == r2 || r1 == r3 || r2 == r3 || r1 == b || r2 == b || r3 == b) {
          throw std::logic_error("dno: mutation indices not distinct");
        }
        auto mutant = config.strategy == DeStrategy::algorithm1
                          ? de_mutate(pop[r1], pop[r2], pop[r3], pop[b], config.zeta)
                          : de_best_1(pop[r1], pop[r2], pop[b], config.zeta);
        mutant = clip_to_bounds(mutant, lower, upper);
        const std::size_t sn = rng.below(dim);
        trials[i] = binomial_crossover(pop[i], mutant, config.crossover, sn, rng.next());
      }
      // Evaluate every trial first, then replace in index order.
      std::vector<double> trial_fit(np, kNegInf);
      std::size_t done = 0;
      try {
        for (; done < np; ++done) trial_fit[done] = eval(trials[done]);
      } catch (const BudgetExhausted&) {
      }
      for (std::size_t i = 0; i < done; ++i) {
        if (trial_fit[i] > fit[i]) {
          pop[i] = std::move(trials[i]);
          fit[i] = trial_fit[i];
        }
      }
      if (done < np) {
        result.trace.push_back(summarize(it, fit, result.best_fitness, false));
        break;
      }

      bool nm = false;
      const std::size_t nb = argmax(fit);
      const double delta = fit[nb] - prev_best;
      const double lambda = config.stagnation.value_or(1e-6 * std::abs(fit[nb]) + 1e-9);
      if (config.use_nm && config.nm_max_iter > 0 && std::isfinite(fit[nb]) && delta < lambda) {
        nm = true;
        NmConfig nc;
        nc.max_iter = config.nm_max_iter;
        nc.lower = lower;
        nc.upper = upper;
        bool out_of_budget = false;
        auto local = [&](std::span<const double> x) {
          try {
            return eval(x);
          } catch (const BudgetExhausted&) {
            out_of_budget = true;
            return kNegInf;
          }
        };
        if (!eval.exhausted()) {
          const NmResult r = nelder_mead(local, pop[nb], nc);
          if (r.fitness > fit[nb]) {
            pop[nb] = r.values;
            fit[nb] = r.fitness;
          }
        }
        if (out_of_budget || eval.exhausted()) {
          result.trace.push_back(summarize(it, fit, result.best_fitness, nm));
          break;
        }
      }
      result.trace.push_back(summarize(it, fit, result.best_fitness, nm));
    }
  } catch (const BudgetExhausted&) {
    result.trace.push_back(summarize(static_cast<int>(result.trace.size()), fit,
                                     result.best_fitness, false));
  }
  return result;
}

void write_dno_trace(const std::vector<DnoTraceRow>& trace, const std::filesystem::path& path) {
  CsvTable t({"iteration", "best_fitness", "mean_fitness", "nm_triggered", "n_nonfinite"});
  for (const auto& r : trace) {
    t.add_row({std::to_string(r.iteration), format_real(r.best_fitness), format_real(r.mean_fitness),
               r.nm_triggered ? "1" : "0", std::to_string(r.n_nonfinite)});
  }
  t.write(path);
}

// ---- grid search -----------------------------------------------------------

namespace {

std::vector<double> grid_axis(const ParamDef& d, int n) {
  std::vector<double> internal(static_cast<std::size_t>(n));
  const double lo = d.internal_lower(), hi = d.internal_upper();
  for (int i = 0; i < n; ++i) internal[i] = lo + (hi - lo) * i / (n - 1);
  std::vector<double> out(internal.size());
  const ParamDef one[] = {d};
  for (std::size_t i = 0; i < internal.size(); ++i) {
    out[i] = natural_values(one, std::span<const double>(&internal[i], 1))[0];
  }
  return out;
}

}  // namespace

GridSurface grid_search(const Objective& objective, const ParamDef& x_param,
                        const ParamDef& y_param, int nx, int ny) {
  x_param.validate();
  y_param.validate();
  if (nx < 2 || ny < 2) throw ConfigError("grid_search: resolution must be >= 2 per axis");
  GridSurface s{x_param, y_param, grid_axis(x_param, nx), grid_axis(y_param, ny),
                Matrix(static_cast<std::size_t>(ny), static_cast<std::size_t>(nx))};
  for (std::size_t r = 0; r < s.y_values.size(); ++r) {
    for (std::size_t c = 0; c < s.x_values.size(); ++c) {
      const double point[] = {s.x_values[c], s.y_values[r]};
      s.fitness(r, c) = objective(point);
    }
  }
  return s;
}

std::string GridSurface::to_csv() const {
  CsvTable t({x_param.name, y_param.name, "fitness"});
  for (std::size_t r = 0; r < y_values.size(); ++r) {
    for (std::size_t c = 0; c < x_values.size(); ++c) {
      t.add_row({format_real(x_values[c]), format_real(y_values[r]), format_real(fitness(r, c))});
    }
  }
  return t.str();
}

// ---- learner spaces ----------------------------------------------------------

std::vector<ParamDef> search_space(LearnerKind kind) {
  using K = ParamKind;
  using S = ParamScale;
  switch (kind) {
    case LearnerKind::gbdt:
      return {{"n_estimators", K::integer, 50, 400, S::linear},
              {"max_depth", K::integer, 2, 12, S::linear},
              {"learning_rate", K::real, 0.01, 0.4, S::log},
              {"subsample", K::real, 0.1, 1.0, S::linear},
              {"max_leaves", K::integer, 4, 128, S::linear}};
    case LearnerKind::ordered_boost:
      return {{"n_estimators", K::integer, 50, 600, S::linear},
              {"max_depth", K::integer, 2, 10, S::linear},
              {"learning_rate", K::real, 0.01, 0.4, S::log},
              {"subsample", K::real, 0.1, 1.0, S::linear},
              {"l2_lambda", K::real, 0.0, 100.0, S::linear}};
    case LearnerKind::random_forest:
    case LearnerKind::extra_trees:
      return {{"n_estimators", K::integer, 10, 400, S::linear},
              {"max_depth", K::integer, 2, 16, S::linear},
              {"min_samples_split", K::integer, 2, 12, S::linear},
              {"min_samples_leaf", K::integer, 1, 5, S::linear},
              {"max_features", K::real, 0.1, 1.0, S::linear}};
    default:
      throw ConfigError("tuner: no search space for learner '" + to_string(kind) + "'");
  }
}

LearnerSpec apply_params(const LearnerSpec& base, const ParamRecord& record) {
  LearnerSpec s = base;
  const bool boost = s.kind == LearnerKind::gbdt || s.kind == LearnerKind::ordered_boost;
  const bool forest = s.kind == LearnerKind::random_forest || s.kind == LearnerKind::extra_trees;
  if (!boost && !forest) throw ConfigError("tuner: cannot tune learner '" + to_string(s.kind) + "'");
  for (const auto& [name, v] : record) {
    const int iv = static_cast<int>(std::lround(v));
    bool known = true;
    if (boost) {
      if (name == "n_estimators") s.boost.n_estimators = iv;
      else if (name == "max_depth") s.boost.max_depth = iv;
      else if (name == "learning_rate") s.boost.learning_rate = v;
      else if (name == "subsample") s.boost.subsample = v;
      else if (name == "max_leaves") s.boost.max_leaves = iv;
      else if (name == "l2_lambda") s.boost.l2_lambda = v;
      else if (name == "min_samples_leaf") s.boost.min_samples_leaf = iv;
      else if (name == "feature_fraction") s.boost.feature_fraction = v;
      else known = false;
    } else {
      if (name == "n_estimators") s.forest.n_estimators = iv;
      else if (name == "max_depth") s.forest.max_depth = iv;
      else if (name == "min_samples_split") s.forest.min_samples_split = iv;
      else if (name == "min_samples_leaf") s.forest.min_samples_leaf = iv;
      else if (name == "max_features") s.forest.max_features = v;
      else known = false;
    }
    if (!known) {
      throw ConfigError("tuner: unknown parameter '" + name + "' for learner '" + to_string(s.kind) + "'");
    }
  }
  return s;
}

double holdout_r(const Dataset& train, const LearnerSpec& spec, int n_blocks) {
  if (n_blocks < 2) throw ConfigError("holdout_r: n_blocks must be >= 2");
  const std::size_t n = train.n_rows();
  const std::size_t begin = oof_block(n, n_blocks, n_blocks - 1).first;
  if (begin < 2 || n - begin < 2) throw DataError("holdout_r: too few rows for a holdout block");
  const Dataset fit = train.slice(0, begin);
  const Dataset valid = train.slice(begin, n);
  const Regressor model = fit_learner(fit, spec);
  const auto pred = model.predict(valid.x());
  try {
    return pearson_r(pred, valid.y());
  } catch (const NumericError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace stackcast
