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


#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "stackcast/error.hpp"
#include "stackcast/learner.hpp"

using namespace stackcast;

TEST_CASE("every learner kind round-trips through json bit for bit") {
  const auto d = fixture::random_regression(
      150, 3, 2, [](const auto& r) { return r[0] * 3 - r[1] + 0.1 / (0.3 + r[2]); }, 0.05);
  for (LearnerKind k : {LearnerKind::cart, LearnerKind::random_forest, LearnerKind::extra_trees,
                        LearnerKind::gbdt, LearnerKind::ordered_boost, LearnerKind::mlp,
                        LearnerKind::linear, LearnerKind::ridge}) {
    CAPTURE(to_string(k));
    auto spec = LearnerSpec::of(k);
    spec.forest.n_estimators = 4;
    spec.boost.n_estimators = 15;
    spec.arch = MlpArch{{6}};
    spec.mlp.max_epochs = 3;
    const auto model = fit_learner(d, spec.with_seed(11));
    CHECK(model.kind() == k);
    CHECK(parse_learner_kind(to_string(k)) == k);
    const auto back = Regressor::from_json(nlohmann::json::parse(model.to_json().dump()));
    CHECK(back.predict(d.x()) == model.predict(d.x()));
    CHECK(model.predict(d.x()) == fit_learner(d, spec.with_seed(11)).predict(d.x()));
    if (k == LearnerKind::mlp) {
      CHECK_FALSE(model.importance().has_value());
    } else {
      CHECK(model.importance().has_value());
    }
  }
  CHECK_THROWS_AS(parse_learner_kind("svm"), ConfigError);
}
