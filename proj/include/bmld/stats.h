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

#ifndef BMLD_STATS_H_
#define BMLD_STATS_H_

#include <span>

namespace bmld {

double Mean(std::span<const double> x);
// Sample standard deviation (n - 1); 0 for a single value.
double StdDev(std::span<const double> x);
double StdError(std::span<const double> x);
// Linear-interpolation quantile (type 7), q in [0, 1].
double Quantile(std::span<const double> x, double q);
double Median(std::span<const double> x);
double InterquartileRange(std::span<const double> x);
// Throws std::invalid_argument when the sizes differ or are zero.
double Rmse(std::span<const double> a, std::span<const double> b);
// Least-squares slope of y on x.
double LinearSlope(std::span<const double> x, std::span<const double> y);

struct Summary {
  int n = 0;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double sem = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;

  double iqr() const { return q75 - q25; }
};

Summary Summarize(std::span<const double> x);

}  // namespace bmld

#endif  // BMLD_STATS_H_
