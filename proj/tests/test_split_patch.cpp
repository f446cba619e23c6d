#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "hsival/hsival.hpp"

using namespace hsival;

namespace {

LabelMap uniform_map(std::int32_t h, std::int32_t w, ClassId k) {
  return LabelMap(h, w, std::vector<ClassId>(std::size_t(h) * w, k));
}

// Vertical stripes of classes 1..k, with an unlabeled border column on the right.
LabelMap striped_map(std::int32_t h, std::int32_t w, ClassId k) {
  std::vector<ClassId> v(std::size_t(h) * w);
  for (std::int32_t r = 0; r < h; ++r)
    for (std::int32_t c = 0; c < w; ++c) v[std::size_t(r) * w + c] = c == w - 1 ? 0 : 1 + ClassId(c * k / (w - 1));
  return LabelMap(h, w, std::move(v));
}

void expect_partition(const Fold& f, const LabelMap& labels) {
  EXPECT_NO_THROW(validate_split(SplitView(f), labels));
  EXPECT_EQ(f.training_pixels.size() + f.test_pixels.size(), labels.labeled_count());
  for (Coord c : f.training_pixels)
    EXPECT_TRUE(std::any_of(f.patches.begin(), f.patches.end(), [&](const PatchRect& p) { return p.contains(c); }));
  for (Coord c : f.test_pixels)
    EXPECT_TRUE(std::none_of(f.patches.begin(), f.patches.end(), [&](const PatchRect& p) { return p.contains(c); }));
}

std::size_t histogram_total(const ClassHistogram& h) {
  return std::accumulate(h.begin(), h.end(), std::size_t{0}, [](std::size_t s, const auto& kv) { return s + kv.second; });
}

} // namespace

TEST(PatchFolds, SingleClassTenByTen) {
  const auto labels = uniform_map(10, 10, 1);
  PatchSplitConfig cfg{.patch_width = 2, .patch_height = 2, .target_training_pixels = 4, .fold_count = 1, .seed = 11};
  const auto fs = generate_patch_folds(labels, cfg);
  ASSERT_EQ(fs.folds.size(), 1u);
  const auto& f = fs.folds[0];
  EXPECT_EQ(f.patches.size(), 1u);
  EXPECT_EQ(f.training_pixels.size(), 4u);
  EXPECT_EQ(f.test_pixels.size(), 96u);
  EXPECT_EQ(histogram_total(f.train_counts), 4u);
  EXPECT_EQ(f.train_counts.at(1), 4u);
  expect_partition(f, labels);
}

TEST(PatchFolds, IndianPinesPresetOnSyntheticGrid) {
  const auto preset = *find_preset("indian_pines");
  SynthConfig sc;
  sc.height = preset.scene.height;
  sc.width = preset.scene.width;
  sc.bands = 4;
  sc.class_count = preset.class_count;
  sc.region_seeds_per_class = 2;
  sc.unlabeled_fraction = 0.3;
  sc.seed = 5;
  const auto labels = generate_scene(sc).labels;
  const auto fs = generate_patch_folds(labels, preset.config(labels.labeled_count() / 20, 99));
  ASSERT_EQ(fs.folds.size(), 4u);
  std::vector<PatchRect> all;
  for (const auto& f : fs.folds) {
    EXPECT_GE(f.training_pixels.size(), labels.labeled_count() / 20);
    for (const auto& p : f.patches) {
      EXPECT_EQ(p.width, 7);
      EXPECT_EQ(p.height, 7);
    }
    all.insert(all.end(), f.patches.begin(), f.patches.end());
    expect_partition(f, labels);
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) EXPECT_FALSE(all[i].intersects(all[j]));
}

TEST(PatchFolds, LastPatchOvershootsBudgetOnlyOnce) {
  const auto labels = striped_map(40, 41, 3);
  PatchSplitConfig cfg{.patch_width = 3, .patch_height = 5, .target_training_pixels = 100, .fold_count = 3, .seed = 4};
  for (const auto& f : generate_patch_folds(labels, cfg).folds) {
    std::size_t before_last = 0;
    for (std::size_t i = 0; i + 1 < f.patches.size(); ++i) before_last += detail::labeled_in(labels, f.patches[i]);
    EXPECT_LT(before_last, 100u);
    EXPECT_GE(f.training_pixels.size(), 100u);
  }
}

TEST(PatchFolds, UnlabeledPatchesAreKeptButContributeNothing) {
  std::vector<ClassId> v(20 * 20, 0);
  for (std::int32_t r = 0; r < 20; ++r) v[std::size_t(r) * 20 + 19] = 1;
  const LabelMap labels(20, 20, v);
  PatchSplitConfig cfg{.patch_width = 2, .patch_height = 2, .target_training_pixels = 4, .fold_count = 1, .seed = 8};
  const auto fs = generate_patch_folds(labels, cfg);
  const auto& f = fs.folds[0];
  EXPECT_GE(f.training_pixels.size(), 4u);
  expect_partition(f, labels);
}

TEST(PatchFolds, Deterministic) {
  const auto labels = striped_map(30, 31, 4);
  PatchSplitConfig cfg{.patch_width = 4, .patch_height = 3, .target_training_pixels = 50, .fold_count = 4, .seed = 123};
  const auto a = generate_patch_folds(labels, cfg);
  const auto b = generate_patch_folds(labels, cfg);
  EXPECT_EQ(dump_manifest(make_manifest(a, labels, "x")), dump_manifest(make_manifest(b, labels, "x")));
  cfg.seed = 124;
  const auto c = generate_patch_folds(labels, cfg);
  EXPECT_NE(dump_manifest(make_manifest(a, labels, "x")), dump_manifest(make_manifest(c, labels, "x")));
}

TEST(PatchFolds, MissingClassInUntouchedCorner) {
  std::vector<ClassId> v(20 * 20, 1);
  for (std::int32_t r = 18; r < 20; ++r)
    for (std::int32_t c = 18; c < 20; ++c) v[std::size_t(r) * 20 + c] = 3;
  v[0] = 2;
  const LabelMap labels(20, 20, v);
  // Fold built by hand so no patch touches the corner.
  Fold f;
  f.patches = {PatchRect{{0, 0}, 4, 4}};
  detail::assign_pixels(labels, f);
  EXPECT_EQ(missing_classes(f, 3), (std::set<ClassId>{3}));
  f.patches.push_back(PatchRect{{16, 16}, 4, 4});
  detail::assign_pixels(labels, f);
  EXPECT_TRUE(missing_classes(f, 3).empty());
}

TEST(PatchFolds, BalancedModeRetriesUntilEveryClassIsTrained) {
  const auto labels = striped_map(24, 25, 3);
  PatchSplitConfig cfg{.patch_width = 3,
                       .patch_height = 3,
                       .target_training_pixels = 9,
                       .fold_count = 2,
                       .allow_class_absence = false,
                       .seed = 3};
  const auto fs = generate_patch_folds(labels, cfg);
  for (const auto& f : fs.folds) EXPECT_TRUE(missing_classes(f, 3).empty());
}

TEST(PatchFolds, UnreachableBudgetNamesFold) {
  const auto labels = uniform_map(10, 10, 1);
  PatchSplitConfig cfg{.patch_width = 5,
                       .patch_height = 5,
                       .target_training_pixels = 30,
                       .fold_count = 3,
                       .max_draw_attempts = 200,
                       .seed = 1};
  try {
    generate_patch_folds(labels, cfg);
    FAIL() << "expected a budget error";
  } catch (const BudgetError& e) {
    EXPECT_NE(std::string(e.what()).find("fold"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("still needed"), std::string::npos);
  }
}

TEST(PatchFolds, RejectsBadConfigs) {
  const auto labels = uniform_map(10, 10, 1);
  EXPECT_THROW(generate_patch_folds(labels, {.patch_width = 11, .patch_height = 1, .target_training_pixels = 1}),
               ValidationError);
  EXPECT_THROW(generate_patch_folds(labels, {.patch_width = 0, .patch_height = 1, .target_training_pixels = 1}),
               ValidationError);
  EXPECT_THROW(generate_patch_folds(labels, {.patch_width = 1, .patch_height = 1, .target_training_pixels = 0}),
               ValidationError);
  EXPECT_THROW(generate_patch_folds(labels, {.patch_width = 1, .patch_height = 1, .target_training_pixels = 60,
                                             .fold_count = 2}),
               ValidationError);
}

TEST(PatchFolds, PropertyDisjointCoverageBudget) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    SynthConfig sc;
    sc.height = 16 + std::int32_t(rng.below(20));
    sc.width = 16 + std::int32_t(rng.below(20));
    sc.bands = 4;
    sc.class_count = 2 + ClassId(rng.below(4));
    sc.unlabeled_fraction = rng.uniform(0.0, 0.4);
    sc.seed = rng.next();
    const auto labels = generate_scene(sc).labels;
    PatchSplitConfig cfg;
    cfg.patch_width = 1 + std::int32_t(rng.below(4));
    cfg.patch_height = 1 + std::int32_t(rng.below(4));
    cfg.fold_count = 1 + std::int32_t(rng.below(4));
    cfg.target_training_pixels = 1 + rng.below(labels.labeled_count() / std::size_t(4 * cfg.fold_count));
    cfg.seed = rng.next();
    const auto fs = generate_patch_folds(labels, cfg);
    std::vector<PatchRect> all;
    for (const auto& f : fs.folds) {
      expect_partition(f, labels);
      EXPECT_GE(f.training_pixels.size(), cfg.target_training_pixels);
      all.insert(all.end(), f.patches.begin(), f.patches.end());
    }
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j) ASSERT_FALSE(all[i].intersects(all[j]));
  }
}
