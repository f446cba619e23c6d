#include <gtest/gtest.h>

#include <cmath>
#include <queue>

#include "hsival/hsival.hpp"

using namespace hsival;

namespace {

// Number of 8-connected regions of each class.
std::map<ClassId, int> region_counts(const LabelMap& labels) {
  const Dims d = labels.dims();
  std::vector<std::uint8_t> seen(d.pixel_count(), 0);
  std::map<ClassId, int> out;
  for (std::size_t start = 0; start < seen.size(); ++start) {
    if (seen[start]) continue;
    const ClassId k = labels.labels()[start];
    ++out[k];
    std::queue<Coord> q;
    q.push(d.coord(start));
    seen[start] = 1;
    while (!q.empty()) {
      const Coord c = q.front();
      q.pop();
      for (std::int32_t dr = -1; dr <= 1; ++dr)
        for (std::int32_t dc = -1; dc <= 1; ++dc) {
          const Coord n{c.row + dr, c.col + dc};
          if (!d.contains(n) || seen[d.index(n)] || labels.at(n) != k) continue;
          seen[d.index(n)] = 1;
          q.push(n);
        }
    }
  }
  return out;
}

double mean_gap(double corr_sigma) {
  double gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig sc;
    sc.correlated_noise_sigma = corr_sigma;
    sc.seed = seed;
    const auto scene = generate_scene(sc);
    const std::size_t budget = scene.labels.labeled_count() / 20;
    PatchSplitConfig pc{.patch_width = 8, .patch_height = 8, .target_training_pixels = budget, .fold_count = 1,
                        .seed = seed};
    RandomSplitConfig rc{.mode = BalanceMode::imbalanced, .total_training_pixels = budget, .seed = seed};
    const auto fold = generate_patch_folds(scene.labels, pc).folds[0];
    const auto run = generate_random_split(scene.labels, rc, 0);
    const EvalSettings es;
    gap += evaluate_split(scene.cube, scene.labels, SplitView(run), es).test.overall_accuracy -
           evaluate_split(scene.cube, scene.labels, SplitView(fold), es).test.overall_accuracy;
  }
  return gap / 5.0;
}

} // namespace

TEST(Synth, NoiselessPixelsEqualTheirSignature) {
  SynthConfig sc;
  sc.correlated_noise_sigma = 0.0;
  sc.iid_noise_sigma = 0.0;
  sc.seed = 3;
  const auto scene = generate_scene(sc);
  const auto sig = detail::class_signatures(sc);
  for (std::int32_t r = 0; r < sc.height; ++r)
    for (std::int32_t c = 0; c < sc.width; ++c) {
      const auto s = scene.cube.spectrum({r, c});
      const auto& expected = sig[std::size_t(scene.labels.at(r, c) - 1)];
      ASSERT_TRUE(std::equal(s.begin(), s.end(), expected.begin()));
    }
}

TEST(Synth, SignatureSeparationIsMeanPairwiseDistance) {
  SynthConfig sc;
  sc.signature_separation = 2.5;
  sc.class_count = 5;
  sc.seed = 8;
  const auto sig = detail::class_signatures(sc);
  double dist = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < sig.size(); ++i)
    for (std::size_t j = i + 1; j < sig.size(); ++j, ++pairs) {
      double s2 = 0.0;
      for (std::size_t b = 0; b < sig[i].size(); ++b) s2 += (sig[i][b] - sig[j][b]) * (sig[i][b] - sig[j][b]);
      dist += std::sqrt(s2);
    }
  EXPECT_NEAR(dist / pairs, 2.5, 1e-12);
}

TEST(Synth, DeterministicPerSeed) {
  SynthConfig sc;
  sc.seed = 42;
  const auto a = generate_scene(sc);
  const auto b = generate_scene(sc);
  EXPECT_EQ(a.cube.values(), b.cube.values());
  EXPECT_EQ(a.labels.labels(), b.labels.labels());
  sc.seed = 43;
  const auto c = generate_scene(sc);
  EXPECT_NE(a.cube.values(), c.cube.values());
}

TEST(Synth, DefaultSceneHasEveryClass) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig sc;
    sc.seed = seed;
    const auto scene = generate_scene(sc);
    const auto h = fold_class_histogram(scene.labels, scene.labels.labeled_pixels());
    ASSERT_EQ(h.size(), 4u);
    for (const auto& [k, n] : h) EXPECT_GE(n, 100u) << "seed " << seed << " class " << k;
  }
}

TEST(Synth, RegionsAreContiguous) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig sc;
    sc.seed = seed;
    const auto scene = generate_scene(sc);
    for (const auto& [k, n] : region_counts(scene.labels)) EXPECT_LE(n, sc.region_seeds_per_class) << "class " << k;
  }
}

TEST(Synth, UnlabeledFraction) {
  SynthConfig sc;
  sc.unlabeled_fraction = 0.25;
  sc.seed = 1;
  const auto scene = generate_scene(sc);
  EXPECT_EQ(scene.labels.labeled_count(), 64u * 64u * 3u / 4u);
}

TEST(Synth, RejectsInvalidConfig) {
  SynthConfig sc;
  sc.class_count = 1;
  EXPECT_THROW(generate_scene(sc), ValidationError);
  sc = {};
  sc.height = 7;
  EXPECT_THROW(generate_scene(sc), ValidationError);
  sc = {};
  sc.bands = 3;
  EXPECT_THROW(generate_scene(sc), ValidationError);
  sc = {};
  sc.iid_noise_sigma = -0.1;
  EXPECT_THROW(generate_scene(sc), ValidationError);
}

TEST(Autocorrelation, IidNoiseIsUncorrelated) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SynthConfig sc;
    sc.correlated_noise_sigma = 0.0;
    sc.iid_noise_sigma = 1.0;
    sc.signature_separation = 0.0;
    sc.seed = seed;
    const auto a = scene_autocorrelation(generate_scene(sc).cube, 1);
    EXPECT_LT(std::abs(a.mean), 0.05);
    EXPECT_FALSE(a.degenerate_band);
  }
}

TEST(Autocorrelation, BlurredNoiseIsCorrelated) {
  SynthConfig sc;
  sc.correlated_noise_sigma = 1.0;
  sc.iid_noise_sigma = 0.0;
  sc.signature_separation = 0.0;
  sc.correlation_radius = 4;
  sc.seed = 2;
  const auto cube = generate_scene(sc).cube;
  EXPECT_GT(scene_autocorrelation(cube, 1).mean, 0.5);
  EXPECT_DOUBLE_EQ(scene_autocorrelation(cube, 0).mean, 1.0);
  EXPECT_THROW(scene_autocorrelation(cube, 64), ValidationError);
}

TEST(Autocorrelation, ConstantBandFlagged) {
  SynthConfig sc;
  sc.correlated_noise_sigma = 0.0;
  sc.iid_noise_sigma = 0.0;
  sc.signature_separation = 0.0;
  const auto a = scene_autocorrelation(generate_scene(sc).cube, 1);
  EXPECT_TRUE(a.degenerate_band);
  EXPECT_EQ(a.mean, 0.0);
}

TEST(Synth, GapGrowsWithCorrelatedNoise) {
  const double low = mean_gap(0.0), mid = mean_gap(0.3), high = mean_gap(0.6);
  EXPECT_LT(low, mid);
  EXPECT_LT(mid, high);
}
