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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "stackcast/error.hpp"
#include "stackcast/linear.hpp"

using namespace stackcast;

TEST_CASE("exact recovery") {
  Rng rng(1);
  Matrix x(30, 3);
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = 2 * x(i, 0);
  }
  const auto m = fit_linear(x, y, 0.0);
  CHECK(m.weights[0] == doctest::Approx(2).epsilon(1e-12));
  CHECK(std::fabs(m.weights[1]) < 1e-12);
  CHECK(std::fabs(m.weights[2]) < 1e-12);
  CHECK(std::fabs(m.intercept) < 1e-12);
}

TEST_CASE("shrinkage limit") {
  Rng rng(2);
  Matrix x(40, 2);
  std::vector<double> y(40);
  double mean = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    y[i] = 4 + x(i, 0) - 3 * x(i, 1) + rng.normal(0, 0.1);
    mean += y[i] / 40;
  }
  const auto m = fit_linear(x, y, 1e12);
  CHECK(std::fabs(m.weights[0]) < 1e-8);
  CHECK(std::fabs(m.weights[1]) < 1e-8);
  CHECK(m.intercept == doctest::Approx(mean).epsilon(1e-6));
}

TEST_CASE("two-row identity design") {
  // With an unpenalized intercept the centered design [[.5,-.5],[-.5,.5]]
  // has rank 1, so the unregularized system is singular.
  const Matrix x(2, 2, std::vector<double>{1, 0, 0, 1});
  const std::vector<double> y{3, 5};
  CHECK_THROWS_AS(fit_linear(x, y, 0.0), NumericError);

  // Ridge: centered normal equations (Xc'Xc + l2 I) w = Xc'yc by hand with
  // l2 = 1: [[1.5,-.5],[-.5,1.5]] w = [-1, 1] gives w = (-0.5, 0.5).
  const auto m = fit_linear(x, y, 1.0);
  CHECK(m.weights[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(m.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.intercept == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("prediction and json") {
  LinearModel m{{0.5, 0.5}, 1.0};
  CHECK(m.predict_row(std::vector<double>{2, 4}) == 4);
  const auto back = LinearModel::from_json(nlohmann::json::parse(m.to_json().dump()));
  CHECK(back.weights == m.weights);
  CHECK(back.intercept == m.intercept);
}
