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

// aarch64 only; NEON is part of the base ISA there, so no runtime check is needed.

#include <arm_neon.h>

#include <cmath>

#include "stackcast/kernels.hpp"

namespace stackcast::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_diff_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double sum_abs_diff_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void gemv_neon(const double* w, const double* x, const double* bias, double* y,
               std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = bias[r] + dot_neon(w + r * cols, x, cols);
}

void relu_neon(double* x, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmaxq_f64(vld1q_f64(x + i), zero));
  for (; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void adam_neon(double* p, const double* g, double* m, double* v, std::size_t n,
               const AdamCoeffs& c) {
  const float64x2_t b1 = vdupq_n_f64(c.beta1);
  const float64x2_t b2 = vdupq_n_f64(c.beta2);
  const float64x2_t omb1 = vdupq_n_f64(1.0 - c.beta1);
  const float64x2_t omb2 = vdupq_n_f64(1.0 - c.beta2);
  const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(c.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(c.learning_rate);
  const float64x2_t eps = vdupq_n_f64(c.epsilon);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    const float64x2_t mi = vfmaq_f64(vmulq_f64(omb1, gi), b1, vld1q_f64(m + i));
    const float64x2_t vi = vfmaq_f64(vmulq_f64(omb2, vmulq_f64(gi, gi)), b2, vld1q_f64(v + i));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t mhat = vdivq_f64(mi, bc1);
    const float64x2_t vhat = vdivq_f64(vi, bc2);
    const float64x2_t step = vdivq_f64(vmulq_f64(lr, mhat), vaddq_f64(vsqrtq_f64(vhat), eps));
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    const double mhat = m[i] / c.bias_correction1;
    const double vhat = v[i] / c.bias_correction2;
    p[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
  }
}

constexpr KernelTable kNeon{Isa::neon,       dot_neon,  axpy_neon, sum_neon,
                            sum_sq_diff_neon, sum_abs_diff_neon, gemv_neon,
                            relu_neon,        adam_neon};

}  // namespace

const KernelTable& neon_table() noexcept { return kNeon; }

}  // namespace stackcast::kernels
