#pragma once

// Training/test assignments produced by the patch and random generators, plus
// a non-owning view used by the audit and evaluation code.

#include <cstdint>
#include <span>
#include <vector>

#include "hsival/core.hpp"

namespace hsival {

enum class SplitMode { patch, random };

inline const char* to_string(SplitMode m) { return m == SplitMode::patch ? "patch" : "random"; }

/// One patch-based fold. Training pixels are the labeled pixels inside the
/// fold's patches; every other labeled pixel is a test pixel.
struct Fold {
  std::int32_t index = 0;
  std::vector<PatchRect> patches;
  std::vector<Coord> training_pixels; // row-major
  std::vector<Coord> test_pixels;     // row-major
  ClassHistogram train_counts;
  ClassHistogram test_counts;
};

struct PatchSplitConfig {
  std::int32_t patch_width = 1;
  std::int32_t patch_height = 1;
  std::size_t target_training_pixels = 1;
  std::int32_t fold_count = 1;
  bool allow_class_absence = true;
  std::size_t max_draw_attempts = 10000;
  std::uint64_t seed = 0;

  friend bool operator==(const PatchSplitConfig&, const PatchSplitConfig&) = default;
};

struct FoldSet {
  std::vector<Fold> folds;
  PatchSplitConfig config;
  Dims dims;
  ClassId class_count = 0;
};

/// One Monte-Carlo random split.
struct SplitAssignment {
  std::int32_t run = 0;
  std::vector<Coord> training_pixels; // row-major
  std::vector<Coord> test_pixels;     // row-major
  ClassHistogram train_counts;
  ClassHistogram test_counts;
};

enum class BalanceMode { balanced, imbalanced };

inline const char* to_string(BalanceMode m) { return m == BalanceMode::balanced ? "balanced" : "imbalanced"; }

struct RandomSplitConfig {
  BalanceMode mode = BalanceMode::imbalanced;
  /// Balanced: pixels drawn from every class. Ignored otherwise.
  std::size_t per_class_training_pixels = 0;
  /// Imbalanced: pixels drawn from the pooled labeled set. Ignored otherwise.
  std::size_t total_training_pixels = 0;
  std::int32_t runs = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const RandomSplitConfig&, const RandomSplitConfig&) = default;
};

/// Borrowed view of either split kind. `patches` is empty for random splits.
struct SplitView {
  std::span<const Coord> training;
  std::span<const Coord> test;
  std::span<const PatchRect> patches;
  SplitMode mode = SplitMode::random;

  SplitView() = default;
  SplitView(std::span<const Coord> training, std::span<const Coord> test, std::span<const PatchRect> patches,
            SplitMode mode)
      : training(training), test(test), patches(patches), mode(mode) {}
  SplitView(const Fold& f) : training(f.training_pixels), test(f.test_pixels), patches(f.patches), mode(SplitMode::patch) {}
  SplitView(const SplitAssignment& s) : training(s.training_pixels), test(s.test_pixels), mode(SplitMode::random) {}
};

/// Checks T and Psi against `labels`: in bounds, labeled, disjoint, covering.
inline void validate_split(const SplitView& split, const LabelMap& labels) {
  const Dims d = labels.dims();
  std::vector<std::uint8_t> seen(d.pixel_count(), 0);
  auto mark = [&](std::span<const Coord> pixels, std::uint8_t tag, const char* what) {
    for (Coord c : pixels) {
      if (!d.contains(c)) throw ValidationError(std::string(what) + " pixel outside the label map");
      if (labels.at(c) == 0) throw ValidationError(std::string(what) + " pixel is unlabeled");
      auto& s = seen[d.index(c)];
      if (s != 0) throw ValidationError("training and test sets overlap or repeat a pixel");
      s = tag;
    }
  };
  mark(split.training, 1, "training");
  mark(split.test, 2, "test");
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (labels.labels()[i] != 0 && seen[i] == 0)
      throw ValidationError("labeled pixel assigned to neither training nor test");
  for (const auto& p : split.patches)
    if (!p.fits(d)) throw ValidationError("patch does not fit inside the raster");
}

} // namespace hsival
