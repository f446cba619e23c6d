#include <gtest/gtest.h>

#include <cstdlib>

#include "hsival/hsival.hpp"

using namespace hsival;

namespace {

// Labels only at the given pixels (class 1), so T and Psi can be chosen freely.
LabelMap sparse_labels(Dims d, std::initializer_list<std::span<const Coord>> groups) {
  std::vector<ClassId> v(d.pixel_count(), 0);
  for (auto g : groups)
    for (Coord c : g) v[d.index(c)] = 1;
  return LabelMap(d.height, d.width, v);
}

std::vector<Coord> brute_force_leaks(std::span<const Coord> train, std::span<const Coord> test,
                                     const NeighborhoodSpec& w) {
  std::vector<Coord> out;
  for (Coord t : test)
    for (Coord p : train)
      if (std::abs(t.row - p.row) <= w.row_radius() && std::abs(t.col - p.col) <= w.col_radius()) {
        out.push_back(t);
        break;
      }
  return out;
}

const auto masked_extractor = [](const SpectralCube& c, Coord p, const NeighborhoodSpec& w, const VisibilityMask& m,
                                 Side s) { return extract_features(c, p, w, m, s); };
const auto unmasked_extractor = [](const SpectralCube& c, Coord p, const NeighborhoodSpec& w, const VisibilityMask&,
                                   Side) { return extract_features_unmasked(c, p, w); };

Scene small_scene(std::uint64_t seed, std::int32_t size = 32) {
  SynthConfig sc;
  sc.height = size;
  sc.width = size;
  sc.bands = 4;
  sc.class_count = 3;
  sc.seed = seed;
  return generate_scene(sc);
}

} // namespace

TEST(Leakage, SingleTrainingPixelWindowArithmetic) {
  const Dims d{20, 20};
  const std::vector<Coord> train{{5, 5}};
  const std::vector<Coord> near{{7, 7}}, far{{10, 10}};
  const auto w = NeighborhoodSpec::square(5);
  {
    const auto labels = sparse_labels(d, {train, near});
    const auto r = geometric_leakage(SplitView(train, near, {}, SplitMode::random), labels, w);
    EXPECT_EQ(r.leaked_test_pixels, near);
    EXPECT_DOUBLE_EQ(r.leaked_fraction, 1.0);
    EXPECT_EQ(r.training_pixels_touching_test, 1u);
  }
  {
    const auto labels = sparse_labels(d, {train, far});
    const auto r = geometric_leakage(SplitView(train, far, {}, SplitMode::random), labels, w);
    EXPECT_TRUE(r.leaked_test_pixels.empty());
    EXPECT_DOUBLE_EQ(r.leaked_fraction, 0.0);
  }
}

// Three training pixels, four test pixels: psi1..psi3 each have a training
// pixel in their window, psi4 is isolated.
TEST(Leakage, ThreeOfFourTestPixelsLeak) {
  const Dims d{20, 20};
  const std::vector<Coord> train{{5, 5}, {5, 10}, {10, 5}};
  const std::vector<Coord> test{{5, 11}, {6, 6}, {11, 5}, {15, 15}};
  const auto labels = sparse_labels(d, {train, test});
  const auto r = geometric_leakage(SplitView(train, test, {}, SplitMode::random), labels, NeighborhoodSpec::square(3));
  EXPECT_EQ(r.leaked_test_pixels, (std::vector<Coord>{{5, 11}, {6, 6}, {11, 5}}));
  EXPECT_DOUBLE_EQ(r.leaked_fraction, 0.75);
}

// Window-overlap reading of the same picture: three test windows overlap some
// training window, and only one test pixel sits inside a training window.
TEST(Leakage, OverlappingWindowsVersusContainedPixels) {
  const Dims d{20, 20};
  const std::vector<Coord> train{{5, 5}, {5, 12}, {12, 5}};
  const std::vector<Coord> test{{5, 7}, {6, 5}, {12, 7}, {17, 17}};
  const auto labels = sparse_labels(d, {train, test});
  const auto r = geometric_leakage(SplitView(train, test, {}, SplitMode::random), labels, NeighborhoodSpec::square(3));
  EXPECT_EQ(r.window_overlap_test_pixels, 3u);
  EXPECT_DOUBLE_EQ(r.window_overlap_fraction, 0.75);
  EXPECT_EQ(r.leaked_test_pixels, (std::vector<Coord>{{6, 5}}));
}

TEST(Leakage, MatchesBruteForceOracle) {
  Rng rng(2024);
  const std::int32_t sides[] = {3, 5, 7};
  for (int trial = 0; trial < 40; ++trial) {
    const Dims d{8 + std::int32_t(rng.below(25)), 8 + std::int32_t(rng.below(25))};
    std::vector<ClassId> v(d.pixel_count());
    for (auto& l : v) l = rng.uniform() < 0.2 ? 0 : 1 + ClassId(rng.below(3));
    const LabelMap labels(d.height, d.width, v);
    if (labels.labeled_count() < 2) continue;
    RandomSplitConfig cfg{.mode = BalanceMode::imbalanced,
                          .total_training_pixels = 1 + rng.below(labels.labeled_count() / 3 + 1),
                          .seed = rng.next()};
    const auto s = generate_random_split(labels, cfg, 0);
    const NeighborhoodSpec w(sides[rng.below(3)], sides[rng.below(3)]);
    const auto r = geometric_leakage(SplitView(s), labels, w);
    ASSERT_EQ(r.leaked_test_pixels, brute_force_leaks(s.training_pixels, s.test_pixels, w));
    ASSERT_EQ(r.training_pixels_touching_test, brute_force_leaks(s.test_pixels, s.training_pixels, w).size());
  }
}

TEST(Leakage, MonotoneInWindowSize) {
  const auto scene = small_scene(8);
  RandomSplitConfig cfg{.mode = BalanceMode::imbalanced, .total_training_pixels = 40, .seed = 1};
  const auto s = generate_random_split(scene.labels, cfg, 0);
  double prev = -1.0;
  for (std::int32_t side : {1, 3, 5, 7, 9}) {
    const auto r = geometric_leakage(SplitView(s), scene.labels, NeighborhoodSpec::square(side));
    EXPECT_GE(r.leaked_fraction, prev);
    prev = r.leaked_fraction;
  }
}

TEST(Leakage, SpectralOnlyWindowNeverLeaks) {
  const auto scene = small_scene(9);
  RandomSplitConfig cfg{.mode = BalanceMode::imbalanced, .total_training_pixels = 500, .seed = 1};
  const auto s = generate_random_split(scene.labels, cfg, 0);
  const auto r = geometric_leakage(SplitView(s), scene.labels, NeighborhoodSpec::square(1));
  EXPECT_EQ(r.leaked_fraction, 0.0);
  const auto mask = build_visibility(SplitView(s), scene.labels.dims());
  EXPECT_TRUE(perturbation_independence_check(scene.cube, SplitView(s), NeighborhoodSpec::square(1), mask,
                                              unmasked_extractor));
}

TEST(Leakage, MaskedAuditOfRandomSplitIsClean) {
  const auto scene = small_scene(10);
  RandomSplitConfig cfg{.mode = BalanceMode::imbalanced, .total_training_pixels = 100, .seed = 4};
  const auto s = generate_random_split(scene.labels, cfg, 0);
  const auto w = NeighborhoodSpec::square(5);
  EXPECT_GT(geometric_leakage(SplitView(s), scene.labels, w).leaked_fraction, 0.0);
  const auto mask = build_visibility(SplitView(s), scene.labels.dims());
  EXPECT_EQ(masked_leakage(SplitView(s), scene.labels, w, mask).leaked_fraction, 0.0);
}

TEST(Leakage, PatchFoldsAreCleanUnderMasking) {
  const auto scene = small_scene(11);
  PatchSplitConfig cfg{.patch_width = 5, .patch_height = 5, .target_training_pixels = 60, .fold_count = 3, .seed = 7};
  const auto fs = generate_patch_folds(scene.labels, cfg);
  for (const auto& f : fs.folds) {
    const SplitView view(f);
    const auto mask = build_visibility(view, scene.labels.dims());
    for (std::int32_t side : {1, 3, 5}) {
      const NeighborhoodSpec w = NeighborhoodSpec::square(side);
      const auto r = masked_leakage(view, scene.labels, w, mask);
      EXPECT_EQ(r.leaked_fraction, 0.0);
      EXPECT_EQ(r.training_pixels_touching_test, 0u);
      EXPECT_TRUE(perturbation_independence_check(scene.cube, view, w, mask, masked_extractor));
    }
    EXPECT_GT(geometric_leakage(view, scene.labels, NeighborhoodSpec::square(5)).leaked_fraction, 0.0);
  }
}

TEST(Leakage, UnmaskedExtractorFailsPerturbationOnAdjacentSplit) {
  const auto scene = small_scene(12, 16);
  const std::vector<Coord> all = scene.labels.labeled_pixels();
  std::vector<Coord> train, test;
  for (Coord c : all) (c.row == 8 && c.col == 8 ? train : test).push_back(c);
  const SplitView view(train, test, {}, SplitMode::random);
  const auto mask = build_visibility(view, scene.labels.dims());
  EXPECT_FALSE(perturbation_independence_check(scene.cube, view, NeighborhoodSpec::square(3), mask, unmasked_extractor));
  EXPECT_TRUE(perturbation_independence_check(scene.cube, view, NeighborhoodSpec::square(3), mask, masked_extractor));
}

TEST(Leakage, PerClassFractions) {
  const Dims d{10, 10};
  std::vector<ClassId> v(100, 0);
  v[d.index({0, 0})] = 1; // training
  v[d.index({0, 1})] = 1; // leaks
  v[d.index({9, 9})] = 1; // clean
  v[d.index({1, 1})] = 2; // leaks
  const LabelMap labels(10, 10, v);
  const std::vector<Coord> train{{0, 0}}, test{{0, 1}, {1, 1}, {9, 9}};
  const auto r = geometric_leakage(SplitView(train, test, {}, SplitMode::random), labels, NeighborhoodSpec::square(3));
  EXPECT_DOUBLE_EQ(r.per_class_leak_fraction.at(1), 0.5);
  EXPECT_DOUBLE_EQ(r.per_class_leak_fraction.at(2), 1.0);
}

TEST(Leakage, Errors) {
  const auto scene = small_scene(13, 8);
  RandomSplitConfig cfg{.mode = BalanceMode::imbalanced, .total_training_pixels = 5, .seed = 1};
  const auto s = generate_random_split(scene.labels, cfg, 0);
  EXPECT_THROW(geometric_leakage(SplitView(s), scene.labels, NeighborhoodSpec::square(9)), ValidationError);
  const VisibilityMask wrong(Dims{4, 4}, Visibility::test_visible);
  EXPECT_THROW(masked_leakage(SplitView(s), scene.labels, NeighborhoodSpec::square(3), wrong), ValidationError);
  // Overlapping T and Psi.
  std::vector<Coord> t{s.training_pixels.front()};
  std::vector<Coord> psi = s.test_pixels;
  psi.push_back(t.front());
  EXPECT_THROW(geometric_leakage(SplitView(s.training_pixels, psi, {}, SplitMode::random), scene.labels,
                                 NeighborhoodSpec::square(3)),
               ValidationError);
}

TEST(Visibility, PatchAndRandomCounts) {
  const auto scene = small_scene(14);
  PatchSplitConfig pc{.patch_width = 4, .patch_height = 3, .target_training_pixels = 30, .fold_count = 1, .seed = 2};
  const auto fs = generate_patch_folds(scene.labels, pc);
  const auto pm = build_visibility(SplitView(fs.folds[0]), scene.labels.dims());
  EXPECT_EQ(pm.count(Visibility::train_visible), fs.folds[0].patches.size() * 12);
  EXPECT_EQ(pm.count(Visibility::unassigned), 0u);

  RandomSplitConfig rc{.mode = BalanceMode::imbalanced, .total_training_pixels = 30, .seed = 2};
  const auto s = generate_random_split(scene.labels, rc, 0);
  const auto rm = build_visibility(SplitView(s), scene.labels.dims());
  EXPECT_EQ(rm.count(Visibility::train_visible), 30u);
  EXPECT_EQ(rm.count(Visibility::test_visible), scene.labels.dims().pixel_count() - 30);
}
