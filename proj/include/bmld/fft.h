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

#ifndef BMLD_FFT_H_
#define BMLD_FFT_H_

#include <complex>
#include <span>

#include "bmld/signal.h"

namespace bmld {

// Thin FFTW wrappers. Plans are cached per size; execution is thread-safe.

// Forward real-to-complex transform; returns n/2 + 1 bins, unnormalized.
ComplexBuffer ForwardReal(std::span<const double> x);

// Inverse of ForwardReal for a length-n signal, including the 1/n factor.
RealBuffer InverseReal(const ComplexBuffer& bins, size_t n);

// Full-length complex transforms. InverseComplex includes the 1/n factor.
ComplexBuffer ForwardComplex(std::span<const std::complex<double>> x);
ComplexBuffer InverseComplex(std::span<const std::complex<double>> x);

}  // namespace bmld

#endif  // BMLD_FFT_H_
