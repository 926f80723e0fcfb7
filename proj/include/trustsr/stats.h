// Copyright 2026 The TrustSR Authors
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

#ifndef TRUSTSR_STATS_H_
#define TRUSTSR_STATS_H_

#include <span>
#include <string>
#include <vector>

namespace trustsr {

// I_x(a, b) via the modified Lentz continued fraction, a, b > 0, x in [0,1].
double RegularizedIncompleteBeta(double x, double a, double b);

enum class Tails { kTwoSided, kGreater, kLess };

// P-value of a Student-t statistic with `dof` degrees of freedom.
double StudentTPValue(double t, double dof, Tails tails = Tails::kTwoSided);

enum class TTestKind { kTwoSampleEqualVar, kOneSample };

struct TTestResult {
  double t_statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  TTestKind kind = TTestKind::kTwoSampleEqualVar;
};

// Pooled-variance two-sample t-test. Both samples constant with equal means
// gives t = 0, p = 1; constant with different means throws kZeroVariance.
TTestResult TTestTwoSample(std::span<const double> a, std::span<const double> b,
                           Tails tails = Tails::kTwoSided);

// t = (mean - mu0) / (s / sqrt(n)), dof = n - 1.
TTestResult TTestOneSample(std::span<const double> a, double mu0,
                           Tails tails = Tails::kTwoSided);

// Sample Pearson correlation. Throws kLengthMismatch, kTooFewSamples,
// kZeroVariance.
double Pearson(std::span<const double> x, std::span<const double> y);

// Kendall tau-a between a predicted ordering and the true ordering of the
// same ids. Ids absent from `truth` throw kJoinError.
double KendallTau(const std::vector<std::string>& predicted,
                  const std::vector<std::string>& truth);

std::string TTestKindName(TTestKind kind);

}  // namespace trustsr

#endif  // TRUSTSR_STATS_H_
