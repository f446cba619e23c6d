#pragma once

// Synthetic hyperspectral scenes: Voronoi class regions, smooth class
// signatures, spatially correlated noise (box-blurred white noise) and iid
// noise. Everything is a pure function of the configuration and its seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "hsival/core.hpp"
#include "hsival/random.hpp"

namespace hsival {

struct SynthConfig {
  std::int32_t height = 64;
  std::int32_t width = 64;
  std::int32_t bands = 16;
  ClassId class_count = 4;
  std::int32_t region_seeds_per_class = 3;
  /// Mean pairwise Euclidean distance between class signatures.
  double signature_separation = 1.0;
  double iid_noise_sigma = 0.05;
  double correlated_noise_sigma = 0.3;
  /// Number of 3x3 box-blur passes applied to the correlated noise field.
  std::int32_t correlation_radius = 3;
  /// Fraction of pixels relabeled 0.
  double unlabeled_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (class_count < 2) throw ValidationError("synthetic scenes need at least 2 classes");
    if (height < 8 || width < 8) throw ValidationError("synthetic scenes must be at least 8x8");
    if (bands < 4) throw ValidationError("synthetic scenes need at least 4 bands");
    if (region_seeds_per_class < 1) throw ValidationError("region_seeds_per_class must be >= 1");
    if (!(signature_separation >= 0.0)) throw ValidationError("signature_separation must be >= 0");
    if (!(iid_noise_sigma >= 0.0) || !(correlated_noise_sigma >= 0.0))
      throw ValidationError("noise sigmas must be >= 0");
    if (correlation_radius < 0) throw ValidationError("correlation_radius must be >= 0");
    if (!(unlabeled_fraction >= 0.0 && unlabeled_fraction < 1.0))
      throw ValidationError("unlabeled_fraction must lie in [0, 1)");
  }
};

struct Scene {
  SpectralCube cube;
  LabelMap labels;
};

namespace detail {

/// Nearest site by squared Euclidean distance, ties to the lower site index.
inline std::vector<ClassId> voronoi_labels(const SynthConfig& cfg) {
  const std::int32_t n_sites = cfg.class_count * cfg.region_seeds_per_class;
  Rng rng(derive_seed(cfg.seed, stream::synth_sites));
  std::vector<Coord> sites;
  for (std::int32_t i = 0; i < n_sites; ++i)
    sites.push_back({std::int32_t(rng.below(std::uint64_t(cfg.height))), std::int32_t(rng.below(std::uint64_t(cfg.width)))});
  std::vector<ClassId> labels(std::size_t(cfg.height) * cfg.width);
  for (std::int32_t r = 0; r < cfg.height; ++r)
    for (std::int32_t c = 0; c < cfg.width; ++c) {
      std::int64_t best_d = -1;
      std::int32_t best = 0;
      for (std::int32_t i = 0; i < n_sites; ++i) {
        const std::int64_t dr = r - sites[i].row, dc = c - sites[i].col;
        const std::int64_t d = dr * dr + dc * dc;
        if (best_d < 0 || d < best_d) {
          best_d = d;
          best = i;
        }
      }
      labels[std::size_t(r) * cfg.width + c] = best % cfg.class_count + 1;
    }
  return labels;
}

/// Class signatures: a few low-frequency cosines per class, rescaled so the
/// mean pairwise distance equals the configured separation.
inline std::vector<std::vector<double>> class_signatures(const SynthConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, stream::synth_signature));
  const std::size_t k = std::size_t(cfg.class_count), b = std::size_t(cfg.bands);
  std::vector<std::vector<double>> sig(k, std::vector<double>(b, 0.0));
  for (auto& s : sig)
    for (int j = 1; j <= 3; ++j) {
      const double amp = rng.uniform(-1.0, 1.0) / j;
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t band = 0; band < b; ++band)
        s[band] += amp * std::cos(std::numbers::pi * j * double(band) / double(b - 1) + phase);
    }
  std::vector<double> mean(b, 0.0);
  for (const auto& s : sig)
    for (std::size_t band = 0; band < b; ++band) mean[band] += s[band] / double(k);
  double dist = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j, ++pairs) {
      double s2 = 0.0;
      for (std::size_t band = 0; band < b; ++band) s2 += (sig[i][band] - sig[j][band]) * (sig[i][band] - sig[j][band]);
      dist += std::sqrt(s2);
    }
  dist /= double(pairs);
  const double scale = dist > 0.0 ? cfg.signature_separation / dist : 0.0;
  for (auto& s : sig)
    for (std::size_t band = 0; band < b; ++band) s[band] = 0.5 + (s[band] - mean[band]) * scale;
  return sig;
}

inline void box_blur3(std::vector<double>& f, std::int32_t h, std::int32_t w) {
  std::vector<double> tmp(f.size());
  auto clampi = [](std::int32_t v, std::int32_t hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
  for (std::int32_t r = 0; r < h; ++r)
    for (std::int32_t c = 0; c < w; ++c)
      tmp[std::size_t(r) * w + c] = (f[std::size_t(r) * w + clampi(c - 1, w - 1)] + f[std::size_t(r) * w + c] +
                                     f[std::size_t(r) * w + clampi(c + 1, w - 1)]) / 3.0;
  for (std::int32_t r = 0; r < h; ++r)
    for (std::int32_t c = 0; c < w; ++c)
      f[std::size_t(r) * w + c] = (tmp[std::size_t(clampi(r - 1, h - 1)) * w + c] + tmp[std::size_t(r) * w + c] +
                                   tmp[std::size_t(clampi(r + 1, h - 1)) * w + c]) / 3.0;
}

/// Unit-variance correlated noise field for one band.
inline std::vector<double> correlated_field(const SynthConfig& cfg, std::int32_t band) {
  Rng rng(derive_seed(cfg.seed, stream::synth_noise, std::uint64_t(band)));
  std::vector<double> f(std::size_t(cfg.height) * cfg.width);
  for (double& v : f) v = rng.normal();
  for (std::int32_t pass = 0; pass < cfg.correlation_radius; ++pass) box_blur3(f, cfg.height, cfg.width);
  double mean = 0.0, var = 0.0;
  for (double v : f) mean += v;
  mean /= double(f.size());
  for (double v : f) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / double(f.size()));
  for (double& v : f) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return f;
}

} // namespace detail

inline Scene generate_scene(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<ClassId> labels = detail::voronoi_labels(cfg);
  const auto signatures = detail::class_signatures(cfg);
  const std::size_t n = labels.size();
  const std::size_t bands = std::size_t(cfg.bands);

  std::vector<double> values(n * bands, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < bands; ++b) values[i * bands + b] = signatures[std::size_t(labels[i] - 1)][b];

  if (cfg.correlated_noise_sigma > 0.0)
    for (std::int32_t b = 0; b < cfg.bands; ++b) {
      const auto field = detail::correlated_field(cfg, b);
      for (std::size_t i = 0; i < n; ++i) values[i * bands + std::size_t(b)] += cfg.correlated_noise_sigma * field[i];
    }
  if (cfg.iid_noise_sigma > 0.0) {
    Rng rng(derive_seed(cfg.seed, stream::synth_iid));
    for (double& v : values) v += cfg.iid_noise_sigma * rng.normal();
  }
  if (cfg.unlabeled_fraction > 0.0) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(derive_seed(cfg.seed, stream::synth_unlabeled));
    const auto drop = std::size_t(std::floor(cfg.unlabeled_fraction * double(n) + 0.5));
    for (std::size_t i : sample_without_replacement(std::move(idx), drop, rng)) labels[i] = 0;
  }
  return {SpectralCube(cfg.height, cfg.width, cfg.bands, std::move(values)),
          LabelMap(cfg.height, cfg.width, std::move(labels))};
}

struct Autocorrelation {
  double mean = 0.0;             // averaged over bands
  std::vector<double> per_band;  // 0 for constant bands
  bool degenerate_band = false;  // some band had zero variance
};

/// Pearson correlation between each pixel and its neighbours `lag` pixels to
/// the right and below, pooled, per band.
inline Autocorrelation scene_autocorrelation(const SpectralCube& cube, std::int32_t lag) {
  if (lag < 0 || lag >= std::min(cube.height(), cube.width()))
    throw ValidationError("lag must lie in [0, min(height, width))");
  Autocorrelation out;
  for (std::int32_t b = 0; b < cube.bands(); ++b) {
    std::vector<double> xs, ys;
    for (std::int32_t r = 0; r < cube.height(); ++r)
      for (std::int32_t c = 0; c < cube.width(); ++c) {
        if (c + lag < cube.width()) {
          xs.push_back(cube.at(r, c, b));
          ys.push_back(cube.at(r, c + lag, b));
        }
        if (r + lag < cube.height()) {
          xs.push_back(cube.at(r, c, b));
          ys.push_back(cube.at(r + lag, c, b));
        }
      }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= double(xs.size());
    my /= double(ys.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    double r = 0.0;
    if (sxx <= 0.0 || syy <= 0.0)
      out.degenerate_band = true;
    else
      r = lag == 0 ? 1.0 : std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    out.per_band.push_back(r);
    out.mean += r / double(cube.bands());
  }
  return out;
}

} // namespace hsival
