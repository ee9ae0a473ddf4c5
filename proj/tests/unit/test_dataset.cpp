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
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "stackcast/dataset.hpp"
#include "stackcast/error.hpp"
#include "stackcast/synth.hpp"

using namespace stackcast;

namespace {

std::vector<ColumnSchema> simple_schema() {
  return {{"date", ColumnKind::numeric, ColumnRole::time_index},
          {"a", ColumnKind::numeric, ColumnRole::feature},
          {"y", ColumnKind::numeric, ColumnRole::target}};
}

Dataset series(const std::vector<double>& y) {
  std::vector<std::vector<double>> rows(y.size(), std::vector<double>{0.0});
  return fixture::numeric(rows, y);
}

}  // namespace

TEST_CASE("csv ingestion") {
  const auto d = parse_csv("date,a,y\n2020-01-01,1.5,10\n2020-01-02,2,11\n2020-01-03,3,12\n",
                           simple_schema());
  CHECK(d.n_rows() == 3);
  CHECK(d.n_features() == 1);
  CHECK(d.x()(0, 0) == 1.5);
  CHECK(d.y()[2] == 12);
  CHECK(d.time()[1] - d.time()[0] == 1);
  CHECK(format_iso_date(d.time()[0]) == "2020-01-01");

  try {
    parse_csv("date,a,y\n2020-01-01,abc,10\n", simple_schema());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("abc") != std::string::npos);
    CHECK(msg.find("'a'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("date,a,y\n2020-01-01,,10\n", simple_schema()), DataError);
  CHECK_THROWS_AS(parse_csv("date,y\n2020-01-01,10\n", simple_schema()), DataError);
  CHECK_THROWS_AS(parse_csv("date,a,y\n2020-01-02,1,10\n2020-01-01,1,10\n", simple_schema()),
                  DataError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", simple_schema()), DataError);
}

TEST_CASE("categorical codes follow first appearance") {
  std::vector<ColumnSchema> s{{"c", ColumnKind::categorical, ColumnRole::feature},
                              {"y", ColumnKind::numeric, ColumnRole::target}};
  const auto d = parse_csv("c,y\nA,1\nB,2\nA,3\n", s);
  CHECK(d.x().column(0) == std::vector<double>{0, 1, 0});
  CHECK(d.features()[0].categories == std::vector<std::string>{"A", "B"});

  // Known codes are kept; new labels are appended.
  const CodeMaps known{{"c", {"B", "A"}}};
  const auto e = parse_csv("c,y\nA,1\nC,2\n", s, &known);
  CHECK(e.x().column(0) == std::vector<double>{1, 2});
}

TEST_CASE("schema validation") {
  std::vector<ColumnSchema> two_targets{{"a", ColumnKind::numeric, ColumnRole::target},
                                        {"b", ColumnKind::numeric, ColumnRole::target}};
  CHECK_THROWS_AS(validate_schema(two_targets), ConfigError);
  std::vector<ColumnSchema> dup{{"a", ColumnKind::numeric, ColumnRole::feature},
                                {"a", ColumnKind::numeric, ColumnRole::target}};
  CHECK_THROWS_AS(validate_schema(dup), ConfigError);
}

TEST_CASE("csv round trip") {
  const auto d = parse_csv("date,a,y\n2020-01-01,0.1,10\n2020-01-02,0.30000000000000004,11\n",
                           simple_schema());
  const auto again = parse_csv(to_csv(d), simple_schema());
  CHECK(again == d);
}

TEST_CASE("lag construction") {
  const auto one = build_lagged(series({10, 20, 30, 40}), LagSpec{{1}});
  REQUIRE(one.n_rows() == 3);
  CHECK(one.x().column(1) == std::vector<double>{10, 20, 30});
  CHECK(one.y() == std::vector<double>{20, 30, 40});

  const auto two = build_lagged(series({10, 20, 30, 40}), LagSpec{{1, 2}});
  REQUIRE(two.n_rows() == 2);
  CHECK(two.x().column(1) == std::vector<double>{20, 30});
  CHECK(two.x().column(2) == std::vector<double>{10, 20});
  CHECK(two.y() == std::vector<double>{30, 40});

  const auto base = series({10, 20, 30, 40});
  CHECK(build_lagged(base, LagSpec{{}}) == base);
  CHECK_THROWS(build_lagged(base, LagSpec{{4}}));
}

TEST_CASE("lags never look ahead") {
  SynthConfig cfg;
  cfg.n_days = 800;
  const auto d = synth_generate(cfg);
  const auto lagged = build_lagged(d, LagSpec::defaults());
  const std::size_t first_lag = d.n_features();
  for (std::size_t r = 0; r < lagged.n_rows(); ++r) {
    const auto t = lagged.time()[r];
    for (std::size_t k = 0; k < LagSpec::defaults().delays.size(); ++k) {
      const auto src = t - LagSpec::defaults().delays[k] - d.time()[0];
      REQUIRE(src >= 0);
      CHECK(src < t - d.time()[0]);
      CHECK(lagged.x()(r, first_lag + k) == d.y()[static_cast<std::size_t>(src)]);
    }
  }
}

TEST_CASE("temporal split") {
  std::vector<double> y(8);
  for (int i = 0; i < 8; ++i) y[i] = i;
  const auto [train, test] = temporal_split(series(y), 0.25);
  CHECK(train.n_rows() == 6);
  CHECK(test.y() == std::vector<double>{6, 7});
  CHECK(train.time().back() < test.time().front());

  const auto [tr3, te3] = temporal_split(series({1, 2, 3}), 0.5);
  CHECK(tr3.n_rows() == 1);
  CHECK(te3.n_rows() == 2);
  CHECK_THROWS(temporal_split(series(y), 0.0));
  CHECK_THROWS(temporal_split(series(y), 1.0));
}

TEST_CASE("quantile binning") {
  const auto d = fixture::numeric({{1, 7}, {2, 7}, {3, 7}, {4, 7}}, {0, 0, 0, 0});
  const auto b = bin_features(d, 2);
  REQUIRE(b.bin_edges[0].size() == 1);
  CHECK(b.bin_edges[0][0] == 2.5);
  CHECK(b.codes[0] == std::vector<std::uint16_t>{0, 0, 1, 1});
  CHECK(b.bin_edges[1].empty());
  CHECK(b.codes[1] == std::vector<std::uint16_t>{0, 0, 0, 0});

  const auto exact = bin_features(d, 16);
  CHECK(exact.n_bins(0) == 4);
  CHECK(exact.codes[0] == std::vector<std::uint16_t>{0, 1, 2, 3});
}

TEST_CASE("every bin code decodes to an interval holding its value") {
  const auto d = fixture::random_regression(500, 4, 9, [](const auto&) { return 0.0; });
  for (int bins : {2, 7, 32, 255}) {
    const auto b = bin_features(d, bins);
    for (std::size_t f = 0; f < d.n_features(); ++f) {
      CHECK(b.n_bins(f) <= static_cast<std::size_t>(bins));
      for (std::size_t i = 1; i < b.bin_edges[f].size(); ++i) {
        CHECK(b.bin_edges[f][i] > b.bin_edges[f][i - 1]);
      }
      for (std::size_t r = 0; r < d.n_rows(); ++r) {
        const auto [lo, hi] = b.bin_interval(f, b.codes[f][r]);
        CHECK(lo <= d.x()(r, f));
        CHECK(d.x()(r, f) < hi);
      }
    }
  }
}

TEST_CASE("synthetic generator") {
  SynthConfig cfg;
  cfg.n_days = 730;
  cfg.seed = 7;
  CHECK(synth_generate(cfg) == synth_generate(cfg));
  CHECK(to_csv(synth_generate(cfg)) == to_csv(synth_generate(cfg)));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.seed = seed;
    const auto d = synth_generate(cfg);
    for (const auto& range : ed_column_ranges()) {
      const auto j = d.feature_index(range.name);
      REQUIRE(j.has_value());
      for (std::size_t r = 0; r < d.n_rows(); ++r) {
        CHECK(d.x()(r, *j) >= range.lo);
        CHECK(d.x()(r, *j) <= range.hi);
      }
    }
    const auto mt = *d.feature_index("max_temp");
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      CHECK(d.x()(r, mt) >= 3.6);
      CHECK(d.x()(r, mt) <= 43.65);
    }
  }

  cfg.noise_amplitude = 0.0;
  const auto d = synth_generate(cfg);
  for (std::size_t r = 0; r < d.n_rows(); ++r) CHECK(d.y()[r] == synth_ground_truth(cfg, d, r));
}

TEST_CASE("synthetic csv loads back through the preset schema") {
  SynthConfig cfg;
  cfg.n_days = 60;
  const auto d = synth_generate(cfg);
  CHECK(parse_csv(to_csv(d), ed_schema()) == d);
}
