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


#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stackcast/learner.hpp"

namespace stackcast {

enum class ParamKind { integer, real };
enum class ParamScale { linear, log };

/// One bounded hyperparameter. Log-scale parameters are searched in log space.
struct ParamDef {
  std::string name;
  ParamKind kind = ParamKind::real;
  double lower = 0.0;
  double upper = 1.0;
  ParamScale scale = ParamScale::linear;

  void validate() const;
  /// Bounds in the search (internal) coordinates.
  double internal_lower() const;
  double internal_upper() const;
};

/// Named hyperparameter values in natural units, in definition order.
using ParamRecord = std::vector<std::pair<std::string, double>>;

/// Internal coordinates -> natural values (exp for log scale, integers
/// rounded to nearest, then clamped into bounds).
ParamRecord encode_params(std::span<const ParamDef> defs, std::span<const double> internal);
/// Natural values -> internal coordinates. Throws ConfigError on a missing
/// name or an out-of-bounds value.
std::vector<double> decode_params(std::span<const ParamDef> defs, const ParamRecord& record);
/// encode_params without the names.
std::vector<double> natural_values(std::span<const ParamDef> defs, std::span<const double> internal);

std::vector<double> clip_to_bounds(std::span<const double> v, std::span<const double> lower,
                                   std::span<const double> upper);

/// Best-anchored double difference: best + zeta (p1 - p2) + zeta (p3 - best).
std::vector<double> de_mutate(std::span<const double> p1, std::span<const double> p2,
                              std::span<const double> p3, std::span<const double> best,
                              double zeta);
/// DE/best/1: best + zeta (p1 - p2).
std::vector<double> de_best_1(std::span<const double> p1, std::span<const double> p2,
                              std::span<const double> best, double zeta);

/// Component j comes from the mutant when u_j < cr or j == forced_index.
std::vector<double> binomial_crossover(std::span<const double> target,
                                       std::span<const double> mutant, double cr,
                                       std::size_t forced_index, std::uint64_t seed);

/// Fitness to maximize.
using Objective = std::function<double(std::span<const double>)>;

struct NmConfig {
  int max_iter = 200;
  std::vector<double> lower;  // empty: unbounded
  std::vector<double> upper;
  double tol = 1e-8;          // simplex diameter
  double step_fraction = 0.05;
  long max_evaluations = 0;   // <= 0: unlimited
};

struct NmResult {
  std::vector<double> values;
  double fitness = 0.0;
  int iterations = 0;
  long evaluations = 0;
};

/// Maximize with the Nelder-Mead simplex (reflection 1, expansion 2,
/// contraction 0.5, shrink 0.5). Returns the best point seen; the start is
/// kept unless some point is strictly better.
NmResult nelder_mead(const Objective& objective, std::span<const double> start,
                     const NmConfig& config = {});

enum class DeStrategy { algorithm1, best_1 };

std::string to_string(DeStrategy s);
DeStrategy parse_de_strategy(const std::string& s);

struct DnoConfig {
  int population = 15;   // N_p
  double zeta = 0.5;
  double crossover = 0.5;
  int max_iter = 100;
  std::optional<double> stagnation;  // Lambda; default 1e-6 |best| + 1e-9
  std::uint64_t seed = 0;
  int nm_max_iter = 50;
  bool use_nm = true;
  DeStrategy strategy = DeStrategy::algorithm1;
  long max_evaluations = 0;  // <= 0: unlimited

  void validate() const;
};

struct DnoTraceRow {
  int iteration = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;  // over finite members
  bool nm_triggered = false;
  int n_nonfinite = 0;
};

struct EvaluatedPoint {
  std::vector<double> values;  // natural units
  double fitness = 0.0;        // -inf when the objective was not finite
};

struct DnoResult {
  std::vector<double> best;  // natural units
  double best_fitness = 0.0;
  std::vector<DnoTraceRow> trace;
  std::vector<EvaluatedPoint> evaluated;
};

/// Differential evolution with Nelder-Mead refinement whenever the
/// population best improves by less than the stagnation threshold.
/// The objective receives natural values.
DnoResult dno_optimize(const Objective& objective, std::span<const ParamDef> defs,
                       const DnoConfig& config);

void write_dno_trace(const std::vector<DnoTraceRow>& trace, const std::filesystem::path& path);

struct GridSurface {
  ParamDef x_param;  // varies along columns
  ParamDef y_param;  // varies along rows
  std::vector<double> x_values;
  std::vector<double> y_values;
  Matrix fitness;    // y_values.size() x x_values.size()

  std::string to_csv() const;
};

/// Evaluate every point of an nx by ny grid, evenly spaced in internal
/// coordinates. The objective receives (x, y) in natural units.
GridSurface grid_search(const Objective& objective, const ParamDef& x_param,
                        const ParamDef& y_param, int nx, int ny);

/// Default search space for a learner kind (the tree learners).
std::vector<ParamDef> search_space(LearnerKind kind);

/// Copy of `base` with the named parameters replaced.
LearnerSpec apply_params(const LearnerSpec& base, const ParamRecord& record);

/// Fit on all but the last 1/n_blocks of `train`, return the test R on that
/// last block. NaN when R is undefined.
double holdout_r(const Dataset& train, const LearnerSpec& spec, int n_blocks = 5);

}  // namespace stackcast
