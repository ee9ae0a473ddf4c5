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

// Data-parallel inner loops used by the dense learners and the metrics.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The variant is
// chosen once at startup from the CPU's feature bits; STACKCAST_SIMD=scalar|avx2|neon
// overrides the choice. Vector variants reassociate sums, so they agree with the
// scalar reference to rounding, not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace stackcast::kernels {

enum class Isa { scalar, avx2, neon };

struct AdamCoeffs {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // sum of (a - b)^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  // sum of |a - b|
  double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);
  // y = W x + bias, W row-major rows x cols
  void (*gemv)(const double* w, const double* x, const double* bias, double* y, std::size_t rows,
               std::size_t cols);
  // x = max(x, 0)
  void (*relu)(double* x, std::size_t n);
  void (*adam_step)(double* param, const double* grad, double* m, double* v, std::size_t n,
                    const AdamCoeffs& c);
};

const KernelTable& scalar_table() noexcept;
#if defined(STACKCAST_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(STACKCAST_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif

/// Kernels selected for this process.
const KernelTable& active() noexcept;

/// True when `isa` is compiled in and supported by the running CPU.
bool available(Isa isa) noexcept;
std::vector<Isa> available_isas();

/// Table for a specific instruction set; throws std::invalid_argument if unavailable.
const KernelTable& table(Isa isa);

/// Force the active table (tests, benchmarks). Throws if unavailable.
void select(Isa isa);

std::string_view name(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return active().sum_sq_diff(a.data(), b.data(), a.size());
}
inline double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active().sum_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace stackcast::kernels
