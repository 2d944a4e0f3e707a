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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "pikl/kernels.h"
#include "pikl/rng.h"

namespace pikl::kernels {
namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-10.0, 10.0);
  return v;
}

// Reductions may reassociate; compare relative to the magnitude summed.
void check_close(double a, double b, double scale) {
  CHECK(std::abs(a - b) <= 1e-13 * (1.0 + scale));
}

TEST_CASE("scalar kernels on hand-computed inputs") {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {2, 0, -1, 0.5, 1};
  CHECK(scalar::dot(a.data(), b.data(), 5) == doctest::Approx(1 * 2 - 3 + 2 + 5));
  CHECK(scalar::sum(a.data(), 5) == 15.0);
  CHECK(scalar::max_value(b.data(), 5) == 2.0);
  std::vector<double> y = b;
  scalar::axpy(2.0, a.data(), y.data(), 5);
  CHECK(y == std::vector<double>{4, 4, 5, 8.5, 11});
  std::vector<double> out(5);
  scalar::axpby(1.0, a.data(), -1.0, b.data(), out.data(), 5);
  CHECK(out == std::vector<double>{-1, 2, 4, 3.5, 4});
  // [[1 2] [3 4] [5 6]] * (1, -1)
  const std::vector<double> m = {1, 2, 3, 4, 5, 6};
  const std::vector<double> x = {1, -1};
  std::vector<double> mv(3);
  scalar::gemv(m.data(), 3, 2, x.data(), mv.data());
  CHECK(mv == std::vector<double>{-1, -1, -1});
}

TEST_CASE("empty inputs") {
  CHECK(scalar::dot(nullptr, nullptr, 0) == 0.0);
  CHECK(scalar::sum(nullptr, 0) == 0.0);
  CHECK(std::isinf(scalar::max_value(nullptr, 0)));
}

#ifdef PIKL_HAVE_AVX2
TEST_CASE("avx2 kernels match the scalar reference") {
  if (!avx2_available()) {
    MESSAGE("AVX2 not available on this CPU; skipping");
    return;
  }
  Rng rng(42);
  for (std::size_t n = 0; n <= 70; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = random_vector(n, rng);
      const auto b = random_vector(n, rng);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
      check_close(avx2::dot(a.data(), b.data(), n), scalar::dot(a.data(), b.data(), n),
                  scale);
      double abs_sum = 0.0;
      for (double x : a) abs_sum += std::abs(x);
      check_close(avx2::sum(a.data(), n), scalar::sum(a.data(), n), abs_sum);
      if (n > 0) CHECK(avx2::max_value(a.data(), n) == scalar::max_value(a.data(), n));

      // Element-wise kernels have no reassociation.
      std::vector<double> y1 = b, y2 = b;
      avx2::axpy(0.37, a.data(), y1.data(), n);
      scalar::axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i], std::abs(y2[i]));
      std::vector<double> o1(n), o2(n);
      avx2::axpby(-1.5, a.data(), 0.25, b.data(), o1.data(), n);
      scalar::axpby(-1.5, a.data(), 0.25, b.data(), o2.data(), n);
      for (std::size_t i = 0; i < n; ++i) check_close(o1[i], o2[i], std::abs(o2[i]));
    }
  }
  for (std::size_t rows : {1, 3, 7, 66}) {
    for (std::size_t cols : {1, 2, 5, 8, 13, 66}) {
      const auto m = random_vector(rows * cols, rng);
      const auto x = random_vector(cols, rng);
      std::vector<double> y1(rows), y2(rows);
      avx2::gemv(m.data(), rows, cols, x.data(), y1.data());
      scalar::gemv(m.data(), rows, cols, x.data(), y2.data());
      for (std::size_t r = 0; r < rows; ++r) check_close(y1[r], y2[r], 100.0 * cols);
    }
  }
}
#endif

TEST_CASE("dispatch can pin the scalar path") {
  const Isa before = active_isa();
  REQUIRE(set_isa(Isa::kScalar));
  CHECK(active_isa() == Isa::kScalar);
  const std::vector<double> a = {1, 2, 3};
  CHECK(dot(a, a) == 14.0);
  if (avx2_available()) {
    CHECK(set_isa(Isa::kAvx2));
    CHECK(dot(a, a) == 14.0);
  } else {
    CHECK_FALSE(set_isa(Isa::kAvx2));
  }
  set_isa(before);
}

}  // namespace
}  // namespace pikl::kernels
