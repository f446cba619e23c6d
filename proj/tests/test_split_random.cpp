#include <gtest/gtest.h>

#include <algorithm>

#include "hsival/hsival.hpp"

using namespace hsival;

namespace {

// Left half class 1, right half class 2: 10 x 20 = 100 pixels per class.
LabelMap two_class_map() {
  std::vector<ClassId> v(10 * 20);
  for (std::int32_t r = 0; r < 10; ++r)
    for (std::int32_t c = 0; c < 20; ++c) v[std::size_t(r) * 20 + c] = c < 10 ? 1 : 2;
  return LabelMap(10, 20, v);
}

} // namespace

TEST(RandomSplit, BalancedTenPerClass) {
  const auto labels = two_class_map();
  RandomSplitConfig cfg{.mode = BalanceMode::balanced, .per_class_training_pixels = 10, .runs = 1, .seed = 2};
  const auto s = generate_random_split(labels, cfg, 0);
  EXPECT_EQ(s.training_pixels.size(), 20u);
  EXPECT_EQ(s.test_pixels.size(), 180u);
  EXPECT_EQ(s.train_counts.at(1), 10u);
  EXPECT_EQ(s.train_counts.at(2), 10u);
  EXPECT_NO_THROW(validate_split(SplitView(s), labels));
}

TEST(RandomSplit, ImbalancedCountsMatchEnumeration) {
  const auto labels = two_class_map();
  RandomSplitConfig cfg{.mode = BalanceMode::imbalanced, .total_training_pixels = 20, .runs = 1, .seed = 9};
  const auto s = generate_random_split(labels, cfg, 0);
  ASSERT_EQ(s.training_pixels.size(), 20u);
  EXPECT_TRUE(std::is_sorted(s.training_pixels.begin(), s.training_pixels.end()));
  std::size_t ones = 0;
  for (Coord c : s.training_pixels) ones += c.col < 10;
  EXPECT_EQ(s.train_counts.at(1), ones);
  EXPECT_EQ(s.train_counts.at(2), 20 - ones);
  EXPECT_EQ(s.test_counts.at(1), 100 - ones);
  EXPECT_NO_THROW(validate_split(SplitView(s), labels));
}

TEST(RandomSplit, InsufficientSupportNamesClass) {
  const auto labels = two_class_map();
  RandomSplitConfig cfg{.mode = BalanceMode::balanced, .per_class_training_pixels = 101, .runs = 1, .seed = 0};
  try {
    generate_random_split(labels, cfg, 0);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("class 1"), std::string::npos);
  }
  RandomSplitConfig ib{.mode = BalanceMode::imbalanced, .total_training_pixels = 201, .runs = 1, .seed = 0};
  EXPECT_THROW(generate_random_split(labels, ib, 0), ValidationError);
}

TEST(RandomSplit, MonteCarloRunsAreDeterministicAndDistinct) {
  const auto labels = two_class_map();
  RandomSplitConfig cfg{.mode = BalanceMode::imbalanced, .total_training_pixels = 30, .runs = 25, .seed = 41};
  const auto a = monte_carlo_splits(labels, cfg);
  const auto b = monte_carlo_splits(labels, cfg);
  ASSERT_EQ(a.size(), 25u);
  EXPECT_EQ(dump_manifest(make_manifest(a, cfg, labels, "x")), dump_manifest(make_manifest(b, cfg, labels, "x")));
  EXPECT_NE(a[0].training_pixels, a[1].training_pixels);
  cfg.runs = 1;
  const auto single = monte_carlo_splits(labels, cfg);
  EXPECT_EQ(single[0].training_pixels, generate_random_split(labels, cfg, 0).training_pixels);
  EXPECT_EQ(single[0].training_pixels, a[0].training_pixels);
}

TEST(RandomSplit, SelectionIsRoughlyUniform) {
  const auto labels = two_class_map();
  RandomSplitConfig cfg{.mode = BalanceMode::imbalanced, .total_training_pixels = 20, .runs = 2000, .seed = 5};
  std::vector<double> hits(200, 0.0);
  for (const auto& s : monte_carlo_splits(labels, cfg))
    for (Coord c : s.training_pixels) hits[std::size_t(c.row) * 20 + c.col] += 1.0;
  // Each pixel is drawn with probability 0.1: expected 200 per cell.
  double chi2 = 0.0;
  for (double h : hits) chi2 += (h - 200.0) * (h - 200.0) / 200.0;
  // 199 degrees of freedom; the 0.999 quantile is about 270.
  EXPECT_LT(chi2, 270.0);
}

TEST(RandomSplit, BalancedSkipsAbsentClasses) {
  std::vector<ClassId> v(100, 1);
  for (std::size_t i = 50; i < 100; ++i) v[i] = 3;
  const LabelMap labels(10, 10, v);
  RandomSplitConfig cfg{.mode = BalanceMode::balanced, .per_class_training_pixels = 5, .runs = 1, .seed = 1};
  const auto s = generate_random_split(labels, cfg, 0);
  EXPECT_EQ(s.training_pixels.size(), 10u);
  EXPECT_EQ(s.train_counts.at(2), 0u);
}

TEST(ValidationCarve, HundredToTenAndNinety) {
  std::vector<Coord> t;
  for (std::int32_t i = 0; i < 100; ++i) t.push_back({i / 10, i % 10});
  const auto v = carve_validation(t, 0.1, 3);
  EXPECT_EQ(v.validation.size(), 10u);
  EXPECT_EQ(v.training.size(), 90u);
  std::vector<Coord> both;
  std::set_intersection(v.training.begin(), v.training.end(), v.validation.begin(), v.validation.end(),
                        std::back_inserter(both));
  EXPECT_TRUE(both.empty());
  const auto again = carve_validation(t, 0.1, 3);
  EXPECT_EQ(again.validation, v.validation);
}

TEST(ValidationCarve, ClampsToKeepTraining) {
  std::vector<Coord> t;
  for (std::int32_t i = 0; i < 10; ++i) t.push_back({0, i});
  const auto v = carve_validation(t, 0.999, 1);
  EXPECT_EQ(v.training.size(), 1u);
  EXPECT_EQ(v.validation.size(), 9u);
  const auto tiny = carve_validation(t, 0.001, 1);
  EXPECT_EQ(tiny.validation.size(), 1u);
}

TEST(ValidationCarve, RejectsBadInput) {
  std::vector<Coord> one{{0, 0}};
  EXPECT_THROW(carve_validation(one, 0.5, 1), ValidationError);
  std::vector<Coord> two{{0, 0}, {0, 1}};
  EXPECT_THROW(carve_validation(two, 0.0, 1), ValidationError);
  EXPECT_THROW(carve_validation(two, 1.0, 1), ValidationError);
}

TEST(RandomSplit, PropertyPartition) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    SynthConfig sc;
    sc.height = 8 + std::int32_t(rng.below(24));
    sc.width = 8 + std::int32_t(rng.below(24));
    sc.bands = 4;
    sc.class_count = 2 + ClassId(rng.below(4));
    sc.unlabeled_fraction = rng.uniform(0.0, 0.5);
    sc.seed = rng.next();
    const auto labels = generate_scene(sc).labels;
    RandomSplitConfig cfg;
    cfg.seed = rng.next();
    if (trial % 2 == 0) {
      cfg.mode = BalanceMode::imbalanced;
      cfg.total_training_pixels = 1 + rng.below(labels.labeled_count() - 1);
    } else {
      std::size_t smallest = labels.labeled_count();
      for (const auto& [k, n] : fold_class_histogram(labels, labels.labeled_pixels()))
        if (n > 0) smallest = std::min(smallest, n);
      cfg.mode = BalanceMode::balanced;
      cfg.per_class_training_pixels = 1 + rng.below(smallest);
    }
    const auto s = generate_random_split(labels, cfg, std::int32_t(trial));
    EXPECT_NO_THROW(validate_split(SplitView(s), labels));
    if (cfg.mode == BalanceMode::balanced) {
      for (const auto& [k, n] : s.train_counts) {
        if (n + s.test_counts.at(k) > 0) {
          EXPECT_EQ(n, cfg.per_class_training_pixels);
        }
      }
    }
  }
}
