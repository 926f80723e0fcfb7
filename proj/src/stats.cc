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

#include "trustsr/stats.h"

#include <cmath>
#include <limits>
#include <map>

#include "trustsr/error.h"

namespace trustsr {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 10000;

// Continued fraction for I_x(a,b), converges for x < (a+1)/(a+b+2).
double BetaContinuedFraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

struct Moments {
  double mean = 0.0;
  double ss = 0.0;  // sum of squared deviations
};

Moments ComputeMoments(std::span<const double> v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.ss += (x - m.mean) * (x - m.mean);
  return m;
}

}  // namespace

double RegularizedIncompleteBeta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::kBadSpec, "incomplete beta: argument out of domain");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(x, a, b) / a;
  }
  return 1.0 - front * BetaContinuedFraction(1.0 - x, b, a) / b;
}

double StudentTPValue(double t, double dof, Tails tails) {
  if (!(dof > 0.0)) {
    throw Error(ErrorCode::kBadSpec, "degrees of freedom must be positive");
  }
  // Two-sided tail mass P(|T| > |t|).
  const double two_sided =
      t == 0.0 ? 1.0
               : RegularizedIncompleteBeta(dof / (dof + t * t), dof / 2.0, 0.5);
  switch (tails) {
    case Tails::kTwoSided:
      return two_sided;
    case Tails::kGreater:
      return t >= 0.0 ? two_sided / 2.0 : 1.0 - two_sided / 2.0;
    case Tails::kLess:
      return t <= 0.0 ? two_sided / 2.0 : 1.0 - two_sided / 2.0;
  }
  return two_sided;
}

TTestResult TTestTwoSample(std::span<const double> a, std::span<const double> b,
                           Tails tails) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "two-sample t-test needs at least 2 values per sample");
  }
  const Moments ma = ComputeMoments(a);
  const Moments mb = ComputeMoments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const int dof = static_cast<int>(a.size() + b.size() - 2);
  TTestResult r;
  r.kind = TTestKind::kTwoSampleEqualVar;
  r.degrees_of_freedom = dof;
  const double diff = ma.mean - mb.mean;
  const double pooled = (ma.ss + mb.ss) / dof;
  if (diff == 0.0) {
    r.t_statistic = 0.0;
    r.p_value = tails == Tails::kTwoSided ? 1.0 : 0.5;
    return r;
  }
  if (pooled == 0.0) {
    throw Error(ErrorCode::kZeroVariance,
                "both samples are constant with different means");
  }
  r.t_statistic = diff / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  r.p_value = StudentTPValue(r.t_statistic, dof, tails);
  return r;
}

TTestResult TTestOneSample(std::span<const double> a, double mu0, Tails tails) {
  if (a.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "one-sample t-test needs at least 2 values");
  }
  const Moments m = ComputeMoments(a);
  const double n = static_cast<double>(a.size());
  TTestResult r;
  r.kind = TTestKind::kOneSample;
  r.degrees_of_freedom = static_cast<int>(a.size()) - 1;
  const double diff = m.mean - mu0;
  if (diff == 0.0) {
    r.t_statistic = 0.0;
    r.p_value = tails == Tails::kTwoSided ? 1.0 : 0.5;
    return r;
  }
  if (m.ss == 0.0) {
    throw Error(ErrorCode::kZeroVariance,
                "constant sample differs from the hypothesized mean");
  }
  const double sd = std::sqrt(m.ss / (n - 1.0));
  r.t_statistic = diff / (sd / std::sqrt(n));
  r.p_value = StudentTPValue(r.t_statistic, r.degrees_of_freedom, tails);
  return r;
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "pearson: lengths " + std::to_string(x.size()) + " and " +
                    std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "pearson needs at least 2 pairs");
  }
  const Moments mx = ComputeMoments(x);
  const Moments my = ComputeMoments(y);
  if (mx.ss == 0.0 || my.ss == 0.0) {
    throw Error(ErrorCode::kZeroVariance, "pearson: constant input");
  }
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx.mean) * (y[i] - my.mean);
  }
  const double r = sxy / std::sqrt(mx.ss * my.ss);
  return std::clamp(r, -1.0, 1.0);
}

double KendallTau(const std::vector<std::string>& predicted,
                  const std::vector<std::string>& truth) {
  std::map<std::string, int> truth_rank;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth_rank[truth[i]] = static_cast<int>(i);
  }
  std::vector<int> ranks;
  for (const std::string& id : predicted) {
    auto it = truth_rank.find(id);
    if (it == truth_rank.end()) {
      throw Error(ErrorCode::kJoinError, "kendall: unknown id '" + id + "'");
    }
    ranks.push_back(it->second);
  }
  if (ranks.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "kendall needs at least 2 items");
  }
  long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    for (std::size_t j = i + 1; j < ranks.size(); ++j) {
      if (ranks[i] < ranks[j]) ++concordant;
      if (ranks[i] > ranks[j]) ++discordant;
    }
  }
  const double pairs = ranks.size() * (ranks.size() - 1) / 2.0;
  return (concordant - discordant) / pairs;
}

std::string TTestKindName(TTestKind kind) {
  return kind == TTestKind::kOneSample ? "OneSample" : "TwoSampleEqualVar";
}

}  // namespace trustsr
