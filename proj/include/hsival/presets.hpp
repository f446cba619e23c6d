#pragma once

// Fold configurations of the three public benchmark scenes. Pixel dimensions
// are authoritative; the published relative sizes are kept only for reference
// because they do not all agree with the pixel sizes under one axis convention.

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "hsival/core.hpp"
#include "hsival/splits.hpp"

namespace hsival {

struct ScenePreset {
  std::string_view name;
  Dims scene;                 // rows x cols
  std::int32_t patch_width;   // columns
  std::int32_t patch_height;  // rows
  std::int32_t fold_count;
  ClassId class_count;
  double reported_t_w_percent;
  double reported_t_h_percent;

  PatchFractions fractions() const { return fractions_from_dims(patch_width, patch_height, scene.width, scene.height); }

  /// Patch configuration; the training budget is scene-specific and must be supplied.
  PatchSplitConfig config(std::size_t target_training_pixels, std::uint64_t seed) const {
    PatchSplitConfig c;
    c.patch_width = patch_width;
    c.patch_height = patch_height;
    c.fold_count = fold_count;
    c.target_training_pixels = target_training_pixels;
    c.seed = seed;
    return c;
  }
};

inline constexpr std::array<ScenePreset, 3> scene_presets{{
    {"indian_pines", {145, 145}, 7, 7, 4, 16, 4.8, 4.8},
    {"salinas", {512, 217}, 22, 10, 5, 16, 4.6, 4.2},
    {"pavia_university", {610, 340}, 30, 17, 5, 9, 5.0, 4.9},
}};

inline std::optional<ScenePreset> find_preset(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) {
    return ch == '-' ? '_' : char(std::tolower(ch));
  });
  if (key == "pavia") key = "pavia_university";
  for (const auto& p : scene_presets)
    if (p.name == key) return p;
  return std::nullopt;
}

} // namespace hsival
