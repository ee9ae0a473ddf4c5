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


#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "stackcast/artifact.hpp"
#include "stackcast/config.hpp"
#include "stackcast/error.hpp"
#include "stackcast/report.hpp"
#include "stackcast/synth.hpp"

using namespace stackcast;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "stackcast_test_config";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config("");
  CHECK(c.seed == 1);
  CHECK(c.lags.delays == LagSpec::defaults().delays);
  CHECK(c.test_fraction == 0.2);
  CHECK(c.stack.is_stack());
  CHECK(c.stack.stack_specs().size() == 4);
  CHECK(c.tuner.dno.population == 15);
  CHECK(c.tuner.dno.zeta == 0.5);
  CHECK(c.tuner.dno.crossover == 0.5);
  CHECK(c.tuner.dno.max_iter == 100);
}

TEST_CASE("sections, lists and overrides") {
  const std::string text = R"(seed = 9
out = "runs/a"
[data]
path = "x.csv"
[lags]
delays = [1, 7, 28]
[split]
test_fraction = 0.25
[stack]
learners = ["gbdt", "extra_trees"]
master = "ridge"
[stack.gbdt]
n_estimators = 42
learning_rate = 0.05
[tuner]
zeta = 0.8
[ablate.groups]
weather = ["max_temp", "min_temp"]
)";
  const auto c = parse_config(text, {"stack.gbdt.n_estimators=17", "lags.delays=[2,3]"});
  CHECK(c.seed == 9);
  CHECK(c.out == "runs/a");
  CHECK(c.data.path == "x.csv");
  CHECK(c.lags.delays == std::vector<int>{2, 3});
  CHECK(c.test_fraction == 0.25);
  const auto specs = c.stack.stack_specs();
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].kind == LearnerKind::gbdt);
  CHECK(specs[0].boost.n_estimators == 17);
  CHECK(specs[0].boost.learning_rate == 0.05);
  CHECK(c.stack.master.kind == MasterKind::ridge);
  CHECK(c.tuner.dno.zeta == 0.8);
  REQUIRE(c.ablate.groups.size() == 1);
  CHECK(c.ablate.groups[0].features == std::vector<std::string>{"max_temp", "min_temp"});

  CHECK(parse_config(text).hash() == parse_config(text).hash());
  CHECK(parse_config(text).hash() != c.hash());
}

TEST_CASE("unknown keys and bad values name the key") {
  CHECK(error_of("sede = 3").find("sede") != std::string::npos);
  CHECK(error_of("[stack.gbdt]\nn_estimator = 3").find("stack.gbdt.n_estimator") != std::string::npos);
  CHECK(error_of("[tuner]\nzeta = fast").find("tuner.zeta") != std::string::npos);
  CHECK(error_of("[split]\ntest_fraction = 1.5").find("split.test_fraction") != std::string::npos);
  CHECK(error_of("", {"tuner.populaton=5"}).find("tuner.populaton") != std::string::npos);
  CHECK(error_of("[lags]\ndelays = [3, 2]").find("lags.delays") != std::string::npos);
  CHECK(error_of("[stack]\nlearners = [\"gbdt\", \"gbdt\"]").find("stack.learners") != std::string::npos);
  CHECK_FALSE(error_of("[tuner]\npopulation = 2").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/run.toml"), std::exception);
}

TEST_CASE("hashing helpers") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("artifacts round trip and fail closed") {
  SynthConfig sc;
  sc.n_days = 400;
  const auto raw = synth_generate(sc);
  const LagSpec lags{{1, 7}};
  const auto d = build_lagged(raw, lags);

  auto spec = LearnerSpec::of(LearnerKind::gbdt);
  spec.boost.n_estimators = 10;
  ModelArtifact a;
  a.kind = "gbdt";
  a.schema = ed_schema();
  a.schema_fingerprint = schema_fingerprint(a.schema);
  a.seed = 3;
  a.config_hash = parse_config("").hash();
  a.feature_names = d.feature_names();
  a.codes = code_maps(d);
  a.lags = lags;
  a.model = fit_learner(d, spec);

  const auto path = scratch("model.json");
  save_artifact(a, path);
  const auto b = load_artifact(path);
  CHECK(b.predict(d.x()) == a.predict(d.x()));
  CHECK(b.feature_names == a.feature_names);
  CHECK(b.lags.delays == a.lags.delays);
  CHECK(b.seed == 3);

  auto text = read_text(path);
  auto j = nlohmann::json::parse(text);
  j["format_version"] = kArtifactFormatVersion + 1;
  write_text(scratch("future.json"), j.dump());
  CHECK_THROWS_AS(load_artifact(scratch("future.json")), DataError);

  j = nlohmann::json::parse(text);
  j["schema_fingerprint"] = "0000000000000000";
  write_text(scratch("tampered.json"), j.dump());
  CHECK_THROWS_AS(load_artifact(scratch("tampered.json")), DataError);

  write_text(scratch("garbage.json"), "{not json");
  CHECK_THROWS_AS(load_artifact(scratch("garbage.json")), DataError);
  CHECK_THROWS_AS(load_artifact(scratch("missing.json")), DataError);
}

TEST_CASE("real formatting is exact") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e17, 5e-324}) {
    CHECK(parse_real(format_real(v)) == v);
  }
}
