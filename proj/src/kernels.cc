// Copyright 2026 The pikl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pikl/kernels.h"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

namespace pikl::kernels {
namespace {

Isa detect() {
  if (const char* env = std::getenv("PIKL_SIMD")) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return avx2_available() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool avx2_available() {
#if defined(PIKL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

bool set_isa(Isa isa) {
  if (isa == Isa::kAvx2 && !avx2_available()) return false;
  selected().store(isa, std::memory_order_relaxed);
  return true;
}

#ifdef PIKL_HAVE_AVX2
#define PIKL_DISPATCH(fn, ...)                             \
  (active_isa() == Isa::kAvx2 ? avx2::fn(__VA_ARGS__)      \
                              : scalar::fn(__VA_ARGS__))
#else
#define PIKL_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return PIKL_DISPATCH(dot, a.data(), b.data(), a.size());
}

double sum(std::span<const double> x) {
  return PIKL_DISPATCH(sum, x.data(), x.size());
}

double max_value(std::span<const double> x) {
  return PIKL_DISPATCH(max_value, x.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  PIKL_DISPATCH(axpy, alpha, x.data(), y.data(), x.size());
}

void axpby(double alpha, std::span<const double> x, double beta,
           std::span<const double> y, std::span<double> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  PIKL_DISPATCH(axpby, alpha, x.data(), beta, y.data(), out.data(), x.size());
}

void gemv(std::span<const double> m, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  assert(m.size() == rows * cols && x.size() == cols && y.size() == rows);
  PIKL_DISPATCH(gemv, m.data(), rows, cols, x.data(), y.data());
}

#undef PIKL_DISPATCH

}  // namespace pikl::kernels
