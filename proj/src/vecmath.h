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


// Batched transcendental kernels for the interval hot loop. On x86-64 glibc
// builds with libmvec these dispatch to the AVX2 vector variants at run time;
// otherwise they fall back to the scalar libm calls. Both paths are accurate
// to a few ulp, but are not bitwise identical to each other, so every stage
// that must agree exactly (fused vs. composed interval evaluation) goes
// through these functions.

#ifndef BMLD_SRC_VECMATH_H_
#define BMLD_SRC_VECMATH_H_

#include <span>

namespace bmld::internal {

// out[i] = atan2(y[i], x[i]). The spans must have equal length.
void Atan2(std::span<const double> y, std::span<const double> x,
           std::span<double> out);

// x[i] = x[i] > 0 ? pow(x[i], exponent) : 0.
void HalfWavePowInPlace(std::span<double> x, double exponent);

// True when the vector path is in use (for diagnostics only).
bool VectorMathEnabled();

}  // namespace bmld::internal

#endif  // BMLD_SRC_VECMATH_H_
