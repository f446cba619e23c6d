#pragma once

// Patch-based fold generation. Random non-overlapping rectangles are drawn
// until the fold holds at least the requested number of labeled training
// pixels; the rest of the labeled scene is the fold's test set. Occupancy is
// shared across folds, so patches of different folds never overlap either,
// and fold order is part of the deterministic contract.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "hsival/core.hpp"
#include "hsival/random.hpp"
#include "hsival/splits.hpp"

namespace hsival {

namespace detail {

inline void validate(const PatchSplitConfig& cfg, Dims d) {
  if (cfg.patch_width < 1 || cfg.patch_height < 1) throw ValidationError("patch dimensions must be >= 1");
  if (cfg.patch_width > d.width || cfg.patch_height > d.height)
    throw ValidationError("patch " + std::to_string(cfg.patch_width) + "x" + std::to_string(cfg.patch_height) +
                          " does not fit a " + std::to_string(d.width) + "x" + std::to_string(d.height) + " image");
  if (cfg.target_training_pixels < 1) throw ValidationError("training pixel budget must be >= 1");
  if (cfg.fold_count < 1) throw ValidationError("fold count must be >= 1");
  if (cfg.max_draw_attempts < 1) throw ValidationError("max_draw_attempts must be >= 1");
}

class Occupancy {
public:
  explicit Occupancy(Dims d) : dims_(d), cells_(d.pixel_count(), 0) {}

  bool free(const PatchRect& p) const {
    for (std::int32_t r = p.origin.row; r < p.row_end(); ++r)
      for (std::int32_t c = p.origin.col; c < p.col_end(); ++c)
        if (cells_[dims_.index({r, c})]) return false;
    return true;
  }
  void set(const PatchRect& p, bool value) {
    for (std::int32_t r = p.origin.row; r < p.row_end(); ++r)
      for (std::int32_t c = p.origin.col; c < p.col_end(); ++c) cells_[dims_.index({r, c})] = value;
  }

private:
  Dims dims_;
  std::vector<std::uint8_t> cells_;
};

inline std::size_t labeled_in(const LabelMap& labels, const PatchRect& p) {
  std::size_t n = 0;
  for (std::int32_t r = p.origin.row; r < p.row_end(); ++r)
    for (std::int32_t c = p.origin.col; c < p.col_end(); ++c) n += labels.at(r, c) != 0;
  return n;
}

/// Training = labeled pixels inside patches, test = remaining labeled pixels.
inline void assign_pixels(const LabelMap& labels, Fold& fold) {
  const Dims d = labels.dims();
  std::vector<std::uint8_t> inside(d.pixel_count(), 0);
  for (const auto& p : fold.patches)
    for (std::int32_t r = p.origin.row; r < p.row_end(); ++r)
      for (std::int32_t c = p.origin.col; c < p.col_end(); ++c) inside[d.index({r, c})] = 1;
  fold.training_pixels.clear();
  fold.test_pixels.clear();
  for (std::size_t i = 0; i < inside.size(); ++i) {
    if (labels.labels()[i] == 0) continue;
    (inside[i] ? fold.training_pixels : fold.test_pixels).push_back(d.coord(i));
  }
  fold.train_counts = fold_class_histogram(labels, fold.training_pixels);
  fold.test_counts = fold_class_histogram(labels, fold.test_pixels);
}

} // namespace detail

/// Classes with no training pixels but at least one test pixel.
inline std::set<ClassId> missing_classes(const Fold& fold, ClassId class_count) {
  std::set<ClassId> out;
  for (ClassId k = 1; k <= class_count; ++k) {
    auto tr = fold.train_counts.find(k);
    auto te = fold.test_counts.find(k);
    const std::size_t n_train = tr == fold.train_counts.end() ? 0 : tr->second;
    const std::size_t n_test = te == fold.test_counts.end() ? 0 : te->second;
    if (n_train == 0 && n_test > 0) out.insert(k);
  }
  return out;
}

inline FoldSet generate_patch_folds(const LabelMap& labels, const PatchSplitConfig& config) {
  const Dims d = labels.dims();
  detail::validate(config, d);
  const std::size_t labeled = labels.labeled_count();
  if (labeled < std::size_t(config.fold_count) * config.target_training_pixels)
    throw ValidationError("scene has " + std::to_string(labeled) + " labeled pixels, fewer than " +
                          std::to_string(config.fold_count) + " folds x " +
                          std::to_string(config.target_training_pixels) + " training pixels");

  std::set<ClassId> present;
  for (ClassId l : labels.labels())
    if (l != 0) present.insert(l);

  FoldSet out;
  out.config = config;
  out.dims = d;
  out.class_count = labels.class_count();

  detail::Occupancy occupancy(d);
  const std::uint64_t row_choices = std::uint64_t(d.height - config.patch_height + 1);
  const std::uint64_t col_choices = std::uint64_t(d.width - config.patch_width + 1);

  for (std::int32_t f = 0; f < config.fold_count; ++f) {
    Fold fold;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt >= config.max_draw_attempts)
        throw BudgetError("fold " + std::to_string(f) + ": no draw covered every class within " +
                          std::to_string(config.max_draw_attempts) + " attempts");
      Rng rng(derive_seed(config.seed, stream::patch_fold + (std::uint64_t(attempt) << 32), std::uint64_t(f)));
      fold = Fold{};
      fold.index = f;
      std::size_t count = 0;
      std::size_t rejections = 0;
      while (count < config.target_training_pixels) {
        PatchRect cand{{std::int32_t(rng.below(row_choices)), std::int32_t(rng.below(col_choices))},
                       config.patch_width,
                       config.patch_height};
        if (!occupancy.free(cand)) {
          if (++rejections >= config.max_draw_attempts) {
            for (const auto& p : fold.patches) occupancy.set(p, false);
            throw BudgetError("fold " + std::to_string(f) + ": " +
                              std::to_string(config.target_training_pixels - count) +
                              " training pixels still needed after " + std::to_string(rejections) +
                              " consecutive rejected patch draws");
          }
          continue;
        }
        rejections = 0;
        occupancy.set(cand, true);
        fold.patches.push_back(cand);
        count += detail::labeled_in(labels, cand);
      }
      detail::assign_pixels(labels, fold);
      if (config.allow_class_absence) break;
      const bool covers = std::all_of(present.begin(), present.end(),
                                      [&](ClassId k) { return fold.train_counts[k] > 0; });
      if (covers) break;
      for (const auto& p : fold.patches) occupancy.set(p, false);
    }
    out.folds.push_back(std::move(fold));
  }
  return out;
}

} // namespace hsival
