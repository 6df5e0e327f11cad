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

#include "bmld/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <new>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace bmld {
namespace {

enum class Kind { kR2C, kC2R, kForward, kBackward };

// fftw_malloc'd scratch, so every plan can assume SIMD alignment. Grows on
// demand and is reused, which avoids faulting in fresh pages on every call.
template <typename T>
struct FftwBuffer {
  FftwBuffer() = default;
  explicit FftwBuffer(size_t n) { Reserve(n); }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  T* Reserve(size_t n) {
    if (n > capacity) {
      fftw_free(data);
      data = static_cast<T*>(fftw_malloc(sizeof(T) * n));
      if (data == nullptr) {
        capacity = 0;
        throw std::bad_alloc();
      }
      capacity = n;
    }
    return data;
  }
  T* data = nullptr;
  size_t capacity = 0;
};

using RealScratch = FftwBuffer<double>;
using ComplexScratch = FftwBuffer<fftw_complex>;

// Plan creation in FFTW is not thread-safe; execution with the new-array
// interface is, given arrays with the planning alignment.
fftw_plan GetPlan(Kind kind, size_t n) {
  static std::mutex mu;
  static std::map<std::pair<Kind, size_t>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(kind, n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int size = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE;
  fftw_plan plan = nullptr;
  switch (kind) {
    case Kind::kR2C: {
      RealScratch in(n);
      ComplexScratch out(n / 2 + 1);
      plan = fftw_plan_dft_r2c_1d(size, in.data, out.data, flags);
      break;
    }
    case Kind::kC2R: {
      ComplexScratch in(n / 2 + 1);
      RealScratch out(n);
      plan = fftw_plan_dft_c2r_1d(size, in.data, out.data, flags);
      break;
    }
    case Kind::kForward:
    case Kind::kBackward: {
      ComplexScratch in(n), out(n);
      plan = fftw_plan_dft_1d(
          size, in.data, out.data,
          kind == Kind::kForward ? FFTW_FORWARD : FFTW_BACKWARD, flags);
      break;
    }
  }
  if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
  cache.emplace(key, plan);
  return plan;
}

// Per-thread working arrays for plan execution.
struct Scratch {
  FftwBuffer<double> real;
  FftwBuffer<fftw_complex> in, out;
};

Scratch& ThreadScratch() {
  thread_local Scratch scratch;
  return scratch;
}

}  // namespace

ComplexBuffer ForwardReal(std::span<const double> x) {
  if (x.empty()) return {};
  const size_t n = x.size();
  const fftw_plan plan = GetPlan(Kind::kR2C, n);
  Scratch& s = ThreadScratch();
  double* in = s.real.Reserve(n);
  fftw_complex* out = s.out.Reserve(n / 2 + 1);
  std::copy(x.begin(), x.end(), in);
  fftw_execute_dft_r2c(plan, in, out);
  ComplexBuffer result(n / 2 + 1);
  for (size_t k = 0; k < result.size(); ++k) {
    result[k] = {out[k][0], out[k][1]};
  }
  return result;
}

RealBuffer InverseReal(const ComplexBuffer& bins, size_t n) {
  if (n == 0) return {};
  if (bins.size() != n / 2 + 1) {
    throw std::invalid_argument("InverseReal: expected n/2+1 bins");
  }
  const fftw_plan plan = GetPlan(Kind::kC2R, n);
  Scratch& s = ThreadScratch();
  fftw_complex* in = s.in.Reserve(n / 2 + 1);
  double* out = s.real.Reserve(n);
  // c2r destroys its input, hence the copy even for a const source.
  for (size_t k = 0; k < bins.size(); ++k) {
    in[k][0] = bins[k].real();
    in[k][1] = bins[k].imag();
  }
  fftw_execute_dft_c2r(plan, in, out);
  const double scale = 1.0 / static_cast<double>(n);
  RealBuffer result(out, out + n);
  for (double& v : result) v *= scale;
  return result;
}

namespace {

ComplexBuffer RunComplex(Kind kind, std::span<const std::complex<double>> x) {
  const size_t n = x.size();
  if (n == 0) return {};
  const fftw_plan plan = GetPlan(kind, n);
  Scratch& s = ThreadScratch();
  fftw_complex* in = s.in.Reserve(n);
  fftw_complex* out = s.out.Reserve(n);
  for (size_t i = 0; i < n; ++i) {
    in[i][0] = x[i].real();
    in[i][1] = x[i].imag();
  }
  fftw_execute_dft(plan, in, out);
  ComplexBuffer result(n);
  for (size_t i = 0; i < n; ++i) result[i] = {out[i][0], out[i][1]};
  return result;
}

}  // namespace

ComplexBuffer ForwardComplex(std::span<const std::complex<double>> x) {
  return RunComplex(Kind::kForward, x);
}

ComplexBuffer InverseComplex(std::span<const std::complex<double>> x) {
  ComplexBuffer out = RunComplex(Kind::kBackward, x);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace bmld
