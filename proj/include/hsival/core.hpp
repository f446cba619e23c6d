#pragma once

// Raster data model shared by every module: spectral cubes, label maps,
// pixel coordinates, patch rectangles and neighborhood windows.
//
// Conventions: "width" is the column count, "height" is the row count, rows
// scan top to bottom. Label 0 marks an unlabeled pixel; classes are 1..K.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsival/error.hpp"

namespace hsival {

using ClassId = std::int32_t;
using ClassHistogram = std::map<ClassId, std::size_t>;

struct Coord {
  std::int32_t row = 0;
  std::int32_t col = 0;

  friend auto operator<=>(const Coord&, const Coord&) = default;
};

struct Dims {
  std::int32_t height = 0;
  std::int32_t width = 0;

  std::size_t pixel_count() const { return std::size_t(height) * std::size_t(width); }
  bool contains(Coord c) const { return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width; }
  std::size_t index(Coord c) const { return std::size_t(c.row) * std::size_t(width) + std::size_t(c.col); }
  Coord coord(std::size_t idx) const {
    return {std::int32_t(idx / std::size_t(width)), std::int32_t(idx % std::size_t(width))};
  }

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Axis-aligned rectangle anchored at its top-left pixel.
struct PatchRect {
  Coord origin;
  std::int32_t width = 1;
  std::int32_t height = 1;

  std::int32_t row_end() const { return origin.row + height; }
  std::int32_t col_end() const { return origin.col + width; }
  std::size_t area() const { return std::size_t(width) * std::size_t(height); }

  bool contains(Coord c) const {
    return c.row >= origin.row && c.row < row_end() && c.col >= origin.col && c.col < col_end();
  }
  bool intersects(const PatchRect& o) const {
    return origin.row < o.row_end() && o.origin.row < row_end() && origin.col < o.col_end() &&
           o.origin.col < col_end();
  }
  bool fits(Dims d) const {
    return width >= 1 && height >= 1 && origin.row >= 0 && origin.col >= 0 && row_end() <= d.height &&
           col_end() <= d.width;
  }

  friend bool operator==(const PatchRect&, const PatchRect&) = default;
};

/// Odd-sized rectangular feature window centred on a pixel. 1x1 means spectral-only.
class NeighborhoodSpec {
public:
  NeighborhoodSpec() = default;
  NeighborhoodSpec(std::int32_t width, std::int32_t height) : width_(width), height_(height) {
    if (width < 1 || height < 1 || width % 2 == 0 || height % 2 == 0)
      throw ValidationError("neighborhood dimensions must be odd and >= 1, got " + std::to_string(width) +
                            "x" + std::to_string(height));
  }
  static NeighborhoodSpec square(std::int32_t side) { return {side, side}; }

  std::int32_t width() const { return width_; }
  std::int32_t height() const { return height_; }
  std::int32_t col_radius() const { return (width_ - 1) / 2; }
  std::int32_t row_radius() const { return (height_ - 1) / 2; }
  std::size_t area() const { return std::size_t(width_) * std::size_t(height_); }
  bool spectral_only() const { return width_ == 1 && height_ == 1; }

  std::string to_string() const { return std::to_string(width_) + "x" + std::to_string(height_); }

  friend bool operator==(const NeighborhoodSpec&, const NeighborhoodSpec&) = default;

private:
  std::int32_t width_ = 1;
  std::int32_t height_ = 1;
};

/// Parses "WxH" or a single odd number "N" (meaning NxN).
inline NeighborhoodSpec parse_window(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw ValidationError("bad window '" + text + "'");
    return std::stoi(s);
  };
  auto x = text.find_first_of("xX");
  if (x == std::string::npos) return NeighborhoodSpec::square(to_int(text));
  return {to_int(text.substr(0, x)), to_int(text.substr(x + 1))};
}

/// H x W x B reflectance values stored row-major with the band index fastest.
class SpectralCube {
public:
  SpectralCube() = default;
  SpectralCube(std::int32_t height, std::int32_t width, std::int32_t bands)
      : SpectralCube(height, width, bands, std::vector<double>(std::size_t(height) * width * bands, 0.0)) {}
  SpectralCube(std::int32_t height, std::int32_t width, std::int32_t bands, std::vector<double> values)
      : dims_{height, width}, bands_(bands), values_(std::move(values)) {
    if (height < 1 || width < 1 || bands < 1)
      throw ValidationError("cube dimensions must be >= 1");
    if (values_.size() != std::size_t(height) * width * bands)
      throw ValidationError("cube value count does not match its dimensions");
    for (double v : values_)
      if (!std::isfinite(v)) throw ValidationError("cube contains a non-finite value");
  }

  Dims dims() const { return dims_; }
  std::int32_t height() const { return dims_.height; }
  std::int32_t width() const { return dims_.width; }
  std::int32_t bands() const { return bands_; }

  double at(std::int32_t row, std::int32_t col, std::int32_t band) const {
    return values_[offset(row, col) + std::size_t(band)];
  }
  double& at(std::int32_t row, std::int32_t col, std::int32_t band) {
    return values_[offset(row, col) + std::size_t(band)];
  }
  std::span<const double> spectrum(Coord c) const {
    return {values_.data() + offset(c.row, c.col), std::size_t(bands_)};
  }
  std::span<double> spectrum(Coord c) { return {values_.data() + offset(c.row, c.col), std::size_t(bands_)}; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const SpectralCube&, const SpectralCube&) = default;

private:
  std::size_t offset(std::int32_t row, std::int32_t col) const {
    return (std::size_t(row) * std::size_t(dims_.width) + std::size_t(col)) * std::size_t(bands_);
  }

  Dims dims_{};
  std::int32_t bands_ = 0;
  std::vector<double> values_;
};

/// Per-pixel class ids; 0 is unlabeled.
class LabelMap {
public:
  LabelMap() = default;
  LabelMap(std::int32_t height, std::int32_t width) : LabelMap(height, width, std::vector<ClassId>(std::size_t(height) * width, 0)) {}
  LabelMap(std::int32_t height, std::int32_t width, std::vector<ClassId> labels)
      : dims_{height, width}, labels_(std::move(labels)) {
    if (height < 1 || width < 1) throw ValidationError("label map dimensions must be >= 1");
    if (labels_.size() != dims_.pixel_count())
      throw ValidationError("label count does not match label map dimensions");
    for (ClassId l : labels_) {
      if (l < 0) throw ValidationError("negative class label " + std::to_string(l));
      class_count_ = std::max(class_count_, l);
    }
  }

  Dims dims() const { return dims_; }
  std::int32_t height() const { return dims_.height; }
  std::int32_t width() const { return dims_.width; }
  /// Largest class id present (K).
  ClassId class_count() const { return class_count_; }

  ClassId at(Coord c) const { return labels_[dims_.index(c)]; }
  ClassId at(std::int32_t row, std::int32_t col) const { return at(Coord{row, col}); }
  const std::vector<ClassId>& labels() const { return labels_; }

  /// Labeled pixels in row-major order.
  std::vector<Coord> labeled_pixels() const {
    std::vector<Coord> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] != 0) out.push_back(dims_.coord(i));
    return out;
  }
  std::size_t labeled_count() const {
    return std::size_t(std::count_if(labels_.begin(), labels_.end(), [](ClassId l) { return l != 0; }));
  }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
  Dims dims_{};
  std::vector<ClassId> labels_;
  ClassId class_count_ = 0;
};

/// All in-bounds pixels of the window centred on `center`, in row-major order.
inline std::vector<Coord> neighborhood(Coord center, const NeighborhoodSpec& spec, Dims raster) {
  if (!raster.contains(center))
    throw ValidationError("neighborhood center (" + std::to_string(center.row) + "," + std::to_string(center.col) +
                          ") is outside the raster");
  const std::int32_t r0 = std::max(0, center.row - spec.row_radius());
  const std::int32_t r1 = std::min(raster.height - 1, center.row + spec.row_radius());
  const std::int32_t c0 = std::max(0, center.col - spec.col_radius());
  const std::int32_t c1 = std::min(raster.width - 1, center.col + spec.col_radius());
  std::vector<Coord> out;
  out.reserve(std::size_t(r1 - r0 + 1) * std::size_t(c1 - c0 + 1));
  for (std::int32_t r = r0; r <= r1; ++r)
    for (std::int32_t c = c0; c <= c1; ++c) out.push_back({r, c});
  return out;
}

struct PatchDims {
  std::int32_t width = 1;
  std::int32_t height = 1;
  friend bool operator==(const PatchDims&, const PatchDims&) = default;
};

struct PatchFractions {
  double width = 1.0;
  double height = 1.0;
};

/// Patch size relative to the image, rounded half-up with a floor of one pixel.
inline PatchDims patch_dims_from_fractions(double t_w, double t_h, std::int32_t image_width,
                                           std::int32_t image_height) {
  if (!(t_w > 0.0 && t_w <= 1.0) || !(t_h > 0.0 && t_h <= 1.0))
    throw ValidationError("patch fractions must lie in (0, 1]");
  if (image_width < 1 || image_height < 1) throw ValidationError("image dimensions must be >= 1");
  auto half_up = [](double x) { return std::int32_t(std::floor(x + 0.5)); };
  return {std::max(1, std::min(image_width, half_up(t_w * image_width))),
          std::max(1, std::min(image_height, half_up(t_h * image_height)))};
}

inline PatchFractions fractions_from_dims(std::int32_t patch_width, std::int32_t patch_height,
                                          std::int32_t image_width, std::int32_t image_height) {
  if (patch_width < 1 || patch_height < 1 || image_width < 1 || image_height < 1)
    throw ValidationError("patch and image dimensions must be positive");
  if (patch_width > image_width || patch_height > image_height)
    throw ValidationError("patch " + std::to_string(patch_width) + "x" + std::to_string(patch_height) +
                          " exceeds image " + std::to_string(image_width) + "x" + std::to_string(image_height));
  return {double(patch_width) / image_width, double(patch_height) / image_height};
}

/// Per-class counts over `pixels`; every class 1..K appears, possibly with 0.
inline ClassHistogram fold_class_histogram(const LabelMap& labels, std::span<const Coord> pixels) {
  ClassHistogram h;
  for (ClassId k = 1; k <= labels.class_count(); ++k) h[k] = 0;
  for (Coord c : pixels) {
    if (!labels.dims().contains(c)) throw ValidationError("histogram pixel outside the label map");
    if (ClassId l = labels.at(c); l != 0) ++h[l];
  }
  return h;
}

/// 64-bit FNV-1a over dimensions and labels; ties manifests to the label map they were built from.
inline std::uint64_t label_digest(const LabelMap& labels) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(std::uint32_t(labels.height()));
  mix(std::uint32_t(labels.width()));
  for (ClassId l : labels.labels()) mix(std::uint32_t(l));
  return h;
}

} // namespace hsival
