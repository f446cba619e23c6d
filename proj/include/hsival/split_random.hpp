#pragma once

// Literature-standard random pixel splits: balanced (same count per class) and
// imbalanced (uniform draw from the pooled labeled set), Monte-Carlo repeated.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hsival/core.hpp"
#include "hsival/random.hpp"
#include "hsival/splits.hpp"

namespace hsival {

namespace detail {

inline SplitAssignment finish_assignment(const LabelMap& labels, std::int32_t run, std::vector<Coord> training) {
  SplitAssignment s;
  s.run = run;
  std::sort(training.begin(), training.end());
  const Dims d = labels.dims();
  std::vector<std::uint8_t> is_train(d.pixel_count(), 0);
  for (Coord c : training) is_train[d.index(c)] = 1;
  for (std::size_t i = 0; i < is_train.size(); ++i)
    if (labels.labels()[i] != 0 && !is_train[i]) s.test_pixels.push_back(d.coord(i));
  s.training_pixels = std::move(training);
  s.train_counts = fold_class_histogram(labels, s.training_pixels);
  s.test_counts = fold_class_histogram(labels, s.test_pixels);
  return s;
}

} // namespace detail

inline SplitAssignment generate_random_split(const LabelMap& labels, const RandomSplitConfig& config,
                                             std::int32_t run) {
  if (config.runs < 1) throw ValidationError("runs must be >= 1");
  if (run < 0) throw ValidationError("run index must be >= 0");
  Rng rng(derive_seed(config.seed, stream::random_run, std::uint64_t(run)));

  if (config.mode == BalanceMode::balanced) {
    const std::size_t n = config.per_class_training_pixels;
    if (n < 1) throw ValidationError("per-class training count must be >= 1");
    std::map<ClassId, std::vector<Coord>> by_class;
    for (Coord c : labels.labeled_pixels()) by_class[labels.at(c)].push_back(c);
    for (const auto& [k, pool] : by_class)
      if (pool.size() < n)
        throw ValidationError("class " + std::to_string(k) + " has " + std::to_string(pool.size()) +
                              " labeled pixels, fewer than the " + std::to_string(n) + " requested");
    std::vector<Coord> training;
    for (auto& [k, pool] : by_class) {
      auto drawn = sample_without_replacement(std::move(pool), n, rng);
      training.insert(training.end(), drawn.begin(), drawn.end());
    }
    return detail::finish_assignment(labels, run, std::move(training));
  }

  const std::size_t total = config.total_training_pixels;
  if (total < 1) throw ValidationError("total training count must be >= 1");
  auto pool = labels.labeled_pixels();
  if (total > pool.size())
    throw ValidationError("requested " + std::to_string(total) + " training pixels but only " +
                          std::to_string(pool.size()) + " are labeled");
  return detail::finish_assignment(labels, run, sample_without_replacement(std::move(pool), total, rng));
}

inline std::vector<SplitAssignment> monte_carlo_splits(const LabelMap& labels, const RandomSplitConfig& config) {
  if (config.runs < 1) throw ValidationError("runs must be >= 1");
  std::vector<SplitAssignment> out;
  out.reserve(std::size_t(config.runs));
  for (std::int32_t r = 0; r < config.runs; ++r) out.push_back(generate_random_split(labels, config, r));
  return out;
}

struct ValidationCarve {
  std::vector<Coord> training;   // T \ V, row-major
  std::vector<Coord> validation; // V, row-major
};

/// Draws V uniformly from `training`; |V| = round(fraction * |T|) clamped to [1, |T| - 1].
inline ValidationCarve carve_validation(std::span<const Coord> training, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("validation fraction must lie in (0, 1)");
  if (training.size() < 2) throw ValidationError("carving a validation set needs at least 2 training pixels");
  const auto n = double(training.size());
  auto size = std::size_t(std::floor(fraction * n + 0.5));
  size = std::clamp<std::size_t>(size, 1, training.size() - 1);

  std::vector<Coord> pool(training.begin(), training.end());
  std::sort(pool.begin(), pool.end());
  Rng rng(derive_seed(seed, stream::validation));
  ValidationCarve out;
  out.validation = sample_without_replacement(pool, size, rng);
  std::sort(out.validation.begin(), out.validation.end());
  std::set_difference(pool.begin(), pool.end(), out.validation.begin(), out.validation.end(),
                      std::back_inserter(out.training));
  return out;
}

inline ValidationCarve carve_validation(const SplitAssignment& split, double fraction, std::uint64_t seed) {
  return carve_validation(std::span<const Coord>(split.training_pixels), fraction, seed);
}

} // namespace hsival
