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

#ifndef PIKL_KERNELS_H_
#define PIKL_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision kernels used by the solvers' inner loops.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds, an
// AVX2 variant. The variant is chosen once at first use from CPUID; setting
// PIKL_SIMD=scalar in the environment (or calling set_isa) pins the scalar
// path. The two paths agree up to floating-point reassociation in reductions.

namespace pikl::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// True when the AVX2 variant was compiled in and the CPU reports AVX2.
bool avx2_available();

Isa active_isa();

// Returns false (and leaves the selection unchanged) if `isa` is unavailable.
bool set_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
double max_value(std::span<const double> x);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// out = alpha * x + beta * y
void axpby(double alpha, std::span<const double> x, double beta,
           std::span<const double> y, std::span<double> out);

// y = M x, with M stored row-major as rows x cols.
void gemv(std::span<const double> m, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);

// Per-ISA entry points. These are exposed for equivalence tests; library code
// goes through the dispatching functions above.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpby(double alpha, const double* x, double beta, const double* y,
           double* out, std::size_t n);
void gemv(const double* m, std::size_t rows, std::size_t cols,
          const double* x, double* y);
}  // namespace scalar

#ifdef PIKL_HAVE_AVX2
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpby(double alpha, const double* x, double beta, const double* y,
           double* out, std::size_t n);
void gemv(const double* m, std::size_t rows, std::size_t cols,
          const double* x, double* y);
}  // namespace avx2
#endif

}  // namespace pikl::kernels

#endif  // PIKL_KERNELS_H_
