#pragma once

// Training-test leakage accounting for window-based features.
//
// A test pixel leaks when its feature window contains a training pixel. The
// geometric audit ignores any masking (what a naive extractor sees); the
// masked audit recomputes leakage with test windows restricted to
// TestVisible pixels and must come out empty for a consistent mask.

#include <bit>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hsival/core.hpp"
#include "hsival/splits.hpp"
#include "hsival/visibility.hpp"

namespace hsival {

enum class LeakageMode { geometric, masked };

inline const char* to_string(LeakageMode m) { return m == LeakageMode::geometric ? "geometric" : "masked"; }

struct LeakageReport {
  LeakageMode mode = LeakageMode::geometric;
  NeighborhoodSpec window;
  std::size_t test_pixel_count = 0;
  std::vector<Coord> leaked_test_pixels; // row-major
  double leaked_fraction = 0.0;
  /// Only classes with test support appear.
  std::map<ClassId, double> per_class_leak_fraction;
  /// Training pixels whose window contains a test pixel (the reverse direction).
  std::size_t training_pixels_touching_test = 0;
  /// Test pixels whose window shares at least one pixel with some training
  /// pixel's window. Geometric mode only; zero in masked mode.
  std::size_t window_overlap_test_pixels = 0;
  double window_overlap_fraction = 0.0;
};

namespace detail {

/// Rectangular (separable) dilation of a binary grid: out[p] is set iff some
/// set cell lies within `row_radius` rows and `col_radius` columns of p.
inline std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& grid, Dims d, std::int32_t row_radius,
                                        std::int32_t col_radius) {
  std::vector<std::uint8_t> horiz(grid.size(), 0), out(grid.size(), 0);
  std::vector<std::int32_t> prefix(std::size_t(std::max(d.height, d.width)) + 1);
  for (std::int32_t r = 0; r < d.height; ++r) {
    prefix[0] = 0;
    for (std::int32_t c = 0; c < d.width; ++c) prefix[c + 1] = prefix[c] + grid[d.index({r, c})];
    for (std::int32_t c = 0; c < d.width; ++c) {
      const std::int32_t lo = std::max(0, c - col_radius), hi = std::min(d.width - 1, c + col_radius);
      horiz[d.index({r, c})] = prefix[hi + 1] - prefix[lo] > 0;
    }
  }
  for (std::int32_t c = 0; c < d.width; ++c) {
    prefix[0] = 0;
    for (std::int32_t r = 0; r < d.height; ++r) prefix[r + 1] = prefix[r] + horiz[d.index({r, c})];
    for (std::int32_t r = 0; r < d.height; ++r) {
      const std::int32_t lo = std::max(0, r - row_radius), hi = std::min(d.height - 1, r + row_radius);
      out[d.index({r, c})] = prefix[hi + 1] - prefix[lo] > 0;
    }
  }
  return out;
}

inline std::vector<std::uint8_t> indicator(std::span<const Coord> pixels, Dims d) {
  std::vector<std::uint8_t> g(d.pixel_count(), 0);
  for (Coord c : pixels) g[d.index(c)] = 1;
  return g;
}

inline void check_window(const NeighborhoodSpec& window, Dims d) {
  if (window.width() > d.width || window.height() > d.height)
    throw ValidationError("window " + window.to_string() + " is larger than the " + std::to_string(d.width) + "x" +
                          std::to_string(d.height) + " image");
}

inline void finish_report(LeakageReport& rep, const LabelMap& labels, std::span<const Coord> test) {
  rep.test_pixel_count = test.size();
  rep.leaked_fraction = test.empty() ? 0.0 : double(rep.leaked_test_pixels.size()) / double(test.size());
  rep.window_overlap_fraction = test.empty() ? 0.0 : double(rep.window_overlap_test_pixels) / double(test.size());
  std::map<ClassId, std::size_t> support, leaked;
  for (Coord c : test) ++support[labels.at(c)];
  for (Coord c : rep.leaked_test_pixels) ++leaked[labels.at(c)];
  for (const auto& [k, n] : support) rep.per_class_leak_fraction[k] = double(leaked[k]) / double(n);
}

} // namespace detail

inline LeakageReport geometric_leakage(const SplitView& split, const LabelMap& labels, const NeighborhoodSpec& window) {
  const Dims d = labels.dims();
  detail::check_window(window, d);
  validate_split(split, labels);

  LeakageReport rep;
  rep.mode = LeakageMode::geometric;
  rep.window = window;
  const auto train = detail::indicator(split.training, d);
  const auto near_train = detail::dilate(train, d, window.row_radius(), window.col_radius());
  const auto near_train_window = detail::dilate(train, d, 2 * window.row_radius(), 2 * window.col_radius());
  for (Coord c : split.test) {
    if (near_train[d.index(c)]) rep.leaked_test_pixels.push_back(c);
    rep.window_overlap_test_pixels += near_train_window[d.index(c)];
  }
  const auto near_test = detail::dilate(detail::indicator(split.test, d), d, window.row_radius(), window.col_radius());
  for (Coord c : split.training) rep.training_pixels_touching_test += near_test[d.index(c)];
  detail::finish_report(rep, labels, split.test);
  return rep;
}

/// Leakage as seen by a mask-respecting extractor: test windows only read
/// TestVisible pixels, training windows only TrainVisible ones. Any nonzero
/// count means the mask disagrees with the split.
inline LeakageReport masked_leakage(const SplitView& split, const LabelMap& labels, const NeighborhoodSpec& window,
                                    const VisibilityMask& mask) {
  const Dims d = labels.dims();
  if (!(mask.dims() == d)) throw ValidationError("visibility mask dimensions do not match the label map");
  detail::check_window(window, d);
  validate_split(split, labels);

  LeakageReport rep;
  rep.mode = LeakageMode::masked;
  rep.window = window;
  const auto is_train = detail::indicator(split.training, d);
  const auto is_test = detail::indicator(split.test, d);
  for (Coord t : split.test) {
    bool leaked = mask.at(t) != Visibility::test_visible;
    for (Coord q : neighborhood(t, window, d)) {
      if (leaked) break;
      leaked = mask.at(q) == Visibility::test_visible && is_train[d.index(q)];
    }
    if (leaked) rep.leaked_test_pixels.push_back(t);
  }
  for (Coord t : split.training) {
    bool touches = mask.at(t) != Visibility::train_visible;
    for (Coord q : neighborhood(t, window, d)) {
      if (touches) break;
      touches = mask.at(q) == Visibility::train_visible && is_test[d.index(q)];
    }
    rep.training_pixels_touching_test += touches;
  }
  detail::finish_report(rep, labels, split.test);
  return rep;
}

/// Dynamic leakage test: overwrite every TrainVisible spectrum and require all
/// test feature vectors to stay bit-identical, then the same with TestVisible
/// spectra against training features. `extract(cube, pixel, window, mask, side)`
/// must return a contiguous range of doubles.
template <typename Extractor>
bool perturbation_independence_check(const SpectralCube& cube, const SplitView& split, const NeighborhoodSpec& window,
                                     const VisibilityMask& mask, Extractor&& extract) {
  auto features = [&](const SpectralCube& c, std::span<const Coord> pixels, Side side) {
    std::vector<std::uint64_t> bits;
    for (Coord p : pixels)
      for (double v : extract(c, p, window, mask, side)) bits.push_back(std::bit_cast<std::uint64_t>(v));
    return bits;
  };
  auto perturbed = [&](Visibility target) {
    SpectralCube out = cube;
    const Dims d = cube.dims();
    for (std::size_t i = 0; i < d.pixel_count(); ++i) {
      const Coord c = d.coord(i);
      if (mask.at(c) != target) continue;
      auto s = out.spectrum(c);
      for (std::size_t b = 0; b < s.size(); ++b) s[b] = -s[b] * 3.0 + 1000.0 + double(i % 97) + double(b);
    }
    return out;
  };
  const auto test_before = features(cube, split.test, Side::test);
  const auto train_before = features(cube, split.training, Side::train);
  if (features(perturbed(Visibility::train_visible), split.test, Side::test) != test_before) return false;
  return features(perturbed(Visibility::test_visible), split.training, Side::train) == train_before;
}

} // namespace hsival
