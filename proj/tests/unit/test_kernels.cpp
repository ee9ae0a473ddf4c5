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
#include "stackcast/kernels.hpp"
#include "stackcast/random.hpp"

using namespace stackcast;
using kernels::Isa;

namespace {

std::vector<double> noise(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal(0, 3);
  return v;
}

// Vector variants reassociate sums; compare relative to the summed magnitude.
void close(double got, double want, double scale) { CHECK(std::fabs(got - want) <= 1e-13 * (scale + 1)); }

}  // namespace

TEST_CASE("scalar is always available and active selection works") {
  const auto isas = kernels::available_isas();
  REQUIRE_FALSE(isas.empty());
  CHECK(isas.front() == Isa::scalar);
  for (Isa isa : isas) {
    kernels::select(isa);
    CHECK(kernels::active().isa == isa);
  }
  kernels::select(Isa::scalar);
  if (!kernels::available(Isa::neon)) CHECK_THROWS(kernels::table(Isa::neon));
}

TEST_CASE("every variant matches the scalar reference") {
  const auto& ref = kernels::table(Isa::scalar);
  Rng rng(1);
  for (Isa isa : kernels::available_isas()) {
    const auto& k = kernels::table(isa);
    for (std::size_t n : {0, 1, 3, 4, 7, 8, 15, 16, 17, 33, 100, 1001}) {
      const auto a = noise(n, rng), b = noise(n, rng);
      double mag = 0;
      for (std::size_t i = 0; i < n; ++i) mag += std::fabs(a[i] * b[i]) + std::fabs(a[i]) + a[i] * a[i] + b[i] * b[i];
      close(k.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), mag);
      close(k.sum(a.data(), n), ref.sum(a.data(), n), mag);
      close(k.sum_sq_diff(a.data(), b.data(), n), ref.sum_sq_diff(a.data(), b.data(), n), 4 * mag);
      close(k.sum_abs_diff(a.data(), b.data(), n), ref.sum_abs_diff(a.data(), b.data(), n), 4 * mag);

      auto y1 = b, y2 = b;
      k.axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) close(y1[i], y2[i], std::fabs(b[i]) + std::fabs(a[i]));

      auto r1 = a, r2 = a;
      k.relu(r1.data(), n);
      ref.relu(r2.data(), n);
      CHECK(r1 == r2);
    }
    for (std::size_t rows : {1, 5, 20}) {
      for (std::size_t cols : {1, 3, 8, 13, 77}) {
        const auto w = noise(rows * cols, rng), x = noise(cols, rng), bias = noise(rows, rng);
        std::vector<double> o1(rows), o2(rows);
        k.gemv(w.data(), x.data(), bias.data(), o1.data(), rows, cols);
        ref.gemv(w.data(), x.data(), bias.data(), o2.data(), rows, cols);
        for (std::size_t r = 0; r < rows; ++r) close(o1[r], o2[r], 10.0 * static_cast<double>(cols));
      }
    }
    const std::size_t n = 37;
    auto p1 = noise(n, rng), g = noise(n, rng);
    auto m1 = noise(n, rng), v1 = noise(n, rng);
    for (double& v : v1) v = std::fabs(v);
    auto p2 = p1, m2 = m1, v2 = v1;
    const kernels::AdamCoeffs c{1e-3, 0.9, 0.999, 1e-8, 1 - 0.9, 1 - 0.999};
    k.adam_step(p1.data(), g.data(), m1.data(), v1.data(), n, c);
    ref.adam_step(p2.data(), g.data(), m2.data(), v2.data(), n, c);
    for (std::size_t i = 0; i < n; ++i) {
      close(p1[i], p2[i], std::fabs(p2[i]));
      close(m1[i], m2[i], std::fabs(m2[i]));
      close(v1[i], v2[i], std::fabs(v2[i]));
    }
  }
}
