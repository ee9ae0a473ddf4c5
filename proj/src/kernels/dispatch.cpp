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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "stackcast/kernels.hpp"

namespace stackcast::kernels {
namespace {

bool cpu_supports(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(STACKCAST_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(STACKCAST_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* lookup(Isa isa) noexcept {
  if (!cpu_supports(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar:
      return &scalar_table();
    case Isa::avx2:
#if defined(STACKCAST_HAVE_AVX2)
      return &avx2_table();
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(STACKCAST_HAVE_NEON)
      return &neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("STACKCAST_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == name(isa)) {
        if (const KernelTable* t = lookup(isa)) return t;
      }
    }
  }
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (const KernelTable* t = lookup(isa)) return t;
  }
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool available(Isa isa) noexcept { return lookup(isa) != nullptr; }

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (available(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& table(Isa isa) {
  const KernelTable* t = lookup(isa);
  if (t == nullptr) {
    throw std::invalid_argument("kernels: instruction set '" + std::string(name(isa)) +
                                "' is not available on this machine");
  }
  return *t;
}

void select(Isa isa) { current().store(&table(isa), std::memory_order_release); }

std::string_view name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace stackcast::kernels
