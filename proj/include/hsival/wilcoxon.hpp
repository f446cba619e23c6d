#pragma once

// Two-tailed Wilcoxon signed-rank test for paired samples.
//
// Zero differences are dropped and tied magnitudes receive average ranks.
// W = min(W+, W-). For up to 20 non-zero differences the p-value is exact: the
// null distribution of W+ over all 2^n sign patterns is counted on doubled
// (hence integral) ranks. Larger samples use the normal approximation with
// tie and continuity corrections and a fourth-cumulant (Edgeworth) term.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "hsival/error.hpp"

namespace hsival {

struct SignedRanks {
  std::vector<double> ranks;     // average ranks of |d_i|, zeros removed
  std::vector<bool> positive;    // sign of each d_i
  std::vector<std::size_t> ties; // sizes of tie groups
  double w_plus = 0.0;
  double w_minus = 0.0;
};

inline SignedRanks signed_ranks(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("paired samples differ in length");
  if (x.empty()) throw ValidationError("paired samples are empty");
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (const double v = x[i] - y[i]; v != 0.0) d.push_back(v);
  if (d.empty()) throw ValidationError("degenerate comparison: all paired differences are zero");

  std::vector<std::size_t> order(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

  SignedRanks out;
  out.ranks.assign(d.size(), 0.0);
  out.positive.assign(d.size(), false);
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double avg = double(i + j + 2) / 2.0; // ranks i+1 .. j+1
    for (std::size_t m = i; m <= j; ++m) out.ranks[order[m]] = avg;
    out.ties.push_back(j - i + 1);
    i = j + 1;
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.positive[i] = d[i] > 0.0;
    (out.positive[i] ? out.w_plus : out.w_minus) += out.ranks[i];
  }
  return out;
}

/// Exact P(min(W+, W-) <= w) under the null, by counting sign patterns.
inline double wilcoxon_exact_p(std::span<const double> ranks, double w) {
  std::vector<std::int64_t> doubled;
  std::int64_t total = 0;
  for (double r : ranks) {
    doubled.push_back(std::llround(2.0 * r));
    total += doubled.back();
  }
  // count[s] = number of sign patterns whose doubled W+ equals s
  std::vector<double> count(std::size_t(total) + 1, 0.0);
  count[0] = 1.0;
  std::int64_t reach = 0;
  for (std::int64_t r : doubled) {
    for (std::int64_t s = reach; s >= 0; --s)
      if (count[std::size_t(s)] != 0.0) count[std::size_t(s + r)] += count[std::size_t(s)];
    reach += r;
  }
  const std::int64_t limit = std::llround(2.0 * w);
  double tail = 0.0;
  for (std::int64_t s = 0; s <= std::min(limit, total); ++s) tail += count[std::size_t(s)];
  const double p = 2.0 * tail / std::ldexp(1.0, int(ranks.size()));
  return std::min(1.0, p);
}

/// Normal approximation with tie and continuity corrections, plus the
/// Edgeworth kurtosis term of the signed-rank sum. The variance sum(r^2)/4
/// over average ranks equals the usual tie-corrected variance.
inline double wilcoxon_normal_p(std::span<const double> ranks, double w) {
  double mean = 0.0, var = 0.0, kappa4 = 0.0;
  for (double r : ranks) {
    mean += r / 2.0;
    var += r * r / 4.0;
    kappa4 -= r * r * r * r / 8.0;
  }
  if (var <= 0.0) return 1.0;
  const double z = (std::abs(w - mean) - 0.5) / std::sqrt(var);
  if (z <= 0.0) return 1.0;
  const double density = std::exp(-z * z / 2.0) / std::sqrt(2.0 * std::numbers::pi);
  const double plain = 0.5 * std::erfc(z / std::sqrt(2.0));
  const double c = kappa4 / (24.0 * var * var);
  // Past z_max the correction term dominates the shrinking tail and can flip its sign.
  const double z_max = std::sqrt(3.0 + std::sqrt(6.0 + 1.0 / std::abs(c)));
  double tail = plain;
  if (c != 0.0 && z < z_max) {
    const double corrected = plain + density * c * (z * z * z - 3.0 * z);
    if (corrected > 0.0) tail = corrected;
  }
  return std::min(2.0 * tail, 1.0);
}

struct WilcoxonResult {
  double statistic = 0.0; // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::size_t n = 0; // non-zero differences
  double p_value = 1.0;
  bool exact = true;
};

inline constexpr std::size_t wilcoxon_exact_limit = 20;

inline WilcoxonResult wilcoxon_signed_rank_two_tailed(std::span<const double> x, std::span<const double> y) {
  const SignedRanks sr = signed_ranks(x, y);
  WilcoxonResult r;
  r.w_plus = sr.w_plus;
  r.w_minus = sr.w_minus;
  r.statistic = std::min(sr.w_plus, sr.w_minus);
  r.n = sr.ranks.size();
  r.exact = r.n <= wilcoxon_exact_limit;
  r.p_value = r.exact ? wilcoxon_exact_p(sr.ranks, r.statistic) : wilcoxon_normal_p(sr.ranks, r.statistic);
  return r;
}

} // namespace hsival
