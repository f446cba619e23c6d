#pragma once

// Per-pixel feature vectors. A 1x1 window yields the raw spectrum (B values);
// larger windows append the mean spectrum of the window (2B values).

#include <span>
#include <vector>

#include "hsival/core.hpp"
#include "hsival/visibility.hpp"

namespace hsival {

using FeatureVector = std::vector<double>;

namespace detail {

template <typename Include>
FeatureVector spectral_spatial(const SpectralCube& cube, Coord pixel, const NeighborhoodSpec& window, Include include) {
  if (!cube.dims().contains(pixel)) throw ValidationError("feature pixel outside the cube");
  const auto spec = cube.spectrum(pixel);
  FeatureVector f(spec.begin(), spec.end());
  if (window.spectral_only()) return f;

  const std::size_t bands = spec.size();
  std::vector<double> sum(bands, 0.0);
  std::size_t n = 0;
  for (Coord q : neighborhood(pixel, window, cube.dims())) {
    if (!include(q)) continue;
    const auto s = cube.spectrum(q);
    for (std::size_t b = 0; b < bands; ++b) sum[b] += s[b];
    ++n;
  }
  if (n == 0) {
    f.insert(f.end(), spec.begin(), spec.end());
    return f;
  }
  for (double v : sum) f.push_back(v / double(n));
  return f;
}

} // namespace detail

/// Mask-respecting extraction: the window mean only reads pixels whose state
/// matches `side`. Falls back to the centre spectrum when nothing is visible.
inline FeatureVector extract_features(const SpectralCube& cube, Coord pixel, const NeighborhoodSpec& window,
                                      const VisibilityMask& mask, Side side) {
  if (!(mask.dims() == cube.dims())) throw ValidationError("visibility mask dimensions do not match the cube");
  const Visibility want = visible_state(side);
  return detail::spectral_spatial(cube, pixel, window, [&](Coord q) { return mask.at(q) == want; });
}

/// Extraction over the whole in-bounds window, as done with plain random splits.
inline FeatureVector extract_features_unmasked(const SpectralCube& cube, Coord pixel, const NeighborhoodSpec& window) {
  return detail::spectral_spatial(cube, pixel, window, [](Coord) { return true; });
}

} // namespace hsival
