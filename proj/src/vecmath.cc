// Copyright 2026 The bmld Authors. All Rights Reserved.
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


#include "vecmath.h"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#if defined(BMLD_HAVE_LIBMVEC)
#include <immintrin.h>

extern "C" {
__m256d _ZGVdN4vv_atan2(__m256d, __m256d);
__m256d _ZGVdN4vv_pow(__m256d, __m256d);
}
#endif

namespace bmld::internal {
namespace {

#if defined(BMLD_HAVE_LIBMVEC)
bool DetectAvx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}

const bool kUseAvx2 = DetectAvx2();

__attribute__((target("avx2"))) size_t Atan2Avx2(const double* y,
                                                 const double* x, double* out,
                                                 size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _ZGVdN4vv_atan2(_mm256_loadu_pd(y + i),
                                              _mm256_loadu_pd(x + i)));
  }
  return i;
}

__attribute__((target("avx2"))) size_t PowAvx2(double* x, double exponent,
                                               size_t n) {
  const __m256d e = _mm256_set1_pd(exponent);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d positive = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
    // Non-positive lanes are evaluated at 1 and then zeroed.
    const __m256d safe = _mm256_blendv_pd(one, v, positive);
    _mm256_storeu_pd(x + i,
                     _mm256_and_pd(_ZGVdN4vv_pow(safe, e), positive));
  }
  return i;
}
#else
constexpr bool kUseAvx2 = false;
#endif

}  // namespace

void Atan2(std::span<const double> y, std::span<const double> x,
           std::span<double> out) {
  if (y.size() != x.size() || out.size() != x.size()) {
    throw std::invalid_argument("Atan2: span sizes differ");
  }
  size_t i = 0;
#if defined(BMLD_HAVE_LIBMVEC)
  if (kUseAvx2) i = Atan2Avx2(y.data(), x.data(), out.data(), x.size());
#endif
  for (; i < x.size(); ++i) out[i] = std::atan2(y[i], x[i]);
}

void HalfWavePowInPlace(std::span<double> x, double exponent) {
  size_t i = 0;
#if defined(BMLD_HAVE_LIBMVEC)
  if (kUseAvx2) i = PowAvx2(x.data(), exponent, x.size());
#endif
  for (; i < x.size(); ++i) x[i] = x[i] > 0.0 ? std::pow(x[i], exponent) : 0.0;
}

bool VectorMathEnabled() { return kUseAvx2; }

}  // namespace bmld::internal
