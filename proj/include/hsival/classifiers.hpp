#pragma once

// Deterministic proxy classifiers: nearest class centroid (meant for spectral
// features) and k-nearest neighbours (meant for spectral-spatial features).
// Results do not depend on the order training samples are supplied in.

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hsival/core.hpp"
#include "hsival/features.hpp"

namespace hsival {

struct Sample {
  Coord where;
  ClassId label = 0;
  FeatureVector features;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

/// Per-dimension min-max scaling fitted on training samples only.
class MinMaxScaler {
public:
  static MinMaxScaler fit(std::span<const Sample> training) {
    if (training.empty()) throw ValidationError("cannot fit a scaler on an empty training set");
    const std::size_t dim = training.front().features.size();
    MinMaxScaler s;
    s.lo_.assign(dim, 0.0);
    s.inv_range_.assign(dim, 1.0);
    for (std::size_t j = 0; j < dim; ++j) {
      double lo = training.front().features[j], hi = lo;
      for (const auto& t : training) {
        lo = std::min(lo, t.features[j]);
        hi = std::max(hi, t.features[j]);
      }
      s.lo_[j] = lo;
      s.inv_range_[j] = hi > lo ? 1.0 / (hi - lo) : 1.0;
    }
    return s;
  }

  void apply(FeatureVector& f) const {
    if (f.size() != lo_.size()) throw ValidationError("feature dimension does not match the scaler");
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = (f[j] - lo_[j]) * inv_range_[j];
  }

private:
  std::vector<double> lo_, inv_range_;
};

namespace detail {

inline std::vector<Sample> canonical(std::span<const Sample> training) {
  std::vector<Sample> s(training.begin(), training.end());
  std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) {
    return std::tie(a.where, a.label) < std::tie(b.where, b.label);
  });
  return s;
}

inline void check_dims(std::span<const Sample> training) {
  for (const auto& t : training) {
    if (t.features.size() != training.front().features.size())
      throw ValidationError("training samples have inconsistent feature dimensions");
    if (t.label <= 0) throw ValidationError("training sample without a class label");
  }
}

} // namespace detail

class NearestCentroid {
public:
  static NearestCentroid train(std::span<const Sample> training) {
    if (training.empty()) throw ValidationError("nearest-centroid training set is empty");
    detail::check_dims(training);
    std::map<ClassId, std::pair<FeatureVector, std::size_t>> acc;
    for (const auto& t : detail::canonical(training)) {
      auto& [sum, n] = acc[t.label];
      if (sum.empty()) sum.assign(t.features.size(), 0.0);
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += t.features[j];
      ++n;
    }
    NearestCentroid m;
    for (auto& [k, a] : acc) {
      for (double& v : a.first) v /= double(a.second);
      m.centroids_.emplace_back(k, std::move(a.first));
    }
    return m;
  }

  /// Ascending class id; ties go to the first (smallest) class.
  ClassId predict(std::span<const double> feature) const {
    ClassId best = 0;
    double best_d = 0.0;
    for (const auto& [k, c] : centroids_) {
      const double d = squared_distance(c, feature);
      if (best == 0 || d < best_d) {
        best = k;
        best_d = d;
      }
    }
    return best;
  }

  const std::vector<std::pair<ClassId, FeatureVector>>& centroids() const { return centroids_; }

private:
  std::vector<std::pair<ClassId, FeatureVector>> centroids_;
};

/// Majority vote of the k nearest samples. Distance ties are ordered by
/// (row, col) of the training pixel; vote ties go to the smallest class id.
inline ClassId predict_knn(std::span<const Sample> training, std::span<const double> query, std::int32_t k) {
  if (k < 1 || k % 2 == 0) throw ValidationError("k must be a positive odd number, got " + std::to_string(k));
  if (std::size_t(k) > training.size())
    throw ValidationError("k = " + std::to_string(k) + " exceeds the " + std::to_string(training.size()) +
                          " training samples");
  using Key = std::tuple<double, Coord, std::size_t>;
  std::vector<Key> keys;
  keys.reserve(training.size());
  for (std::size_t i = 0; i < training.size(); ++i)
    keys.emplace_back(squared_distance(training[i].features, query), training[i].where, i);
  std::nth_element(keys.begin(), keys.begin() + (k - 1), keys.end());
  std::map<ClassId, std::int32_t> votes;
  for (std::int32_t i = 0; i < k; ++i) ++votes[training[std::get<2>(keys[std::size_t(i)])].label];
  ClassId best = 0;
  std::int32_t best_votes = -1;
  for (const auto& [cls, v] : votes)
    if (v > best_votes) {
      best = cls;
      best_votes = v;
    }
  return best;
}

class KnnClassifier {
public:
  KnnClassifier(std::vector<Sample> training, std::int32_t k) : training_(std::move(training)), k_(k) {
    detail::check_dims(training_);
    if (k_ < 1 || k_ % 2 == 0) throw ValidationError("k must be a positive odd number");
    if (std::size_t(k_) > training_.size()) throw ValidationError("k exceeds the number of training samples");
  }

  ClassId predict(std::span<const double> query) const { return predict_knn(training_, query, k_); }

private:
  std::vector<Sample> training_;
  std::int32_t k_;
};

} // namespace hsival
