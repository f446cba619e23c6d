#pragma once

// Binary PPM (P6) rendering of fold maps and leakage maps, one image pixel per
// raster cell.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsival/core.hpp"
#include "hsival/leakage.hpp"
#include "hsival/splits.hpp"

namespace hsival {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr std::array<Rgb, 16> class_palette{{
    {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},  {245, 130, 48},  {145, 30, 180},
    {70, 240, 240},  {240, 50, 230},  {210, 245, 60}, {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
    {170, 110, 40},  {255, 250, 200}, {128, 0, 0},    {170, 255, 195},
}};
inline constexpr Rgb unlabeled_color{128, 128, 128};
inline constexpr Rgb black{0, 0, 0};
inline constexpr Rgb white{255, 255, 255};

inline Rgb class_color(ClassId k) { return k == 0 ? unlabeled_color : class_palette[std::size_t(k - 1) % class_palette.size()]; }

class Image {
public:
  Image() = default;
  Image(std::int32_t width, std::int32_t height) : width_(width), height_(height), rgb_(std::size_t(width) * height * 3, 0) {}

  std::int32_t width() const { return width_; }
  std::int32_t height() const { return height_; }
  Rgb at(std::int32_t row, std::int32_t col) const {
    const std::size_t i = (std::size_t(row) * width_ + col) * 3;
    return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
  }
  void set(std::int32_t row, std::int32_t col, Rgb c) {
    const std::size_t i = (std::size_t(row) * width_ + col) * 3;
    rgb_[i] = c.r;
    rgb_[i + 1] = c.g;
    rgb_[i + 2] = c.b;
  }
  std::size_t count(Rgb c) const {
    std::size_t n = 0;
    for (std::int32_t r = 0; r < height_; ++r)
      for (std::int32_t col = 0; col < width_; ++col) n += at(r, col) == c;
    return n;
  }
  const std::vector<std::uint8_t>& bytes() const { return rgb_; }
  std::vector<std::uint8_t>& bytes() { return rgb_; }

  friend bool operator==(const Image&, const Image&) = default;

private:
  std::int32_t width_ = 0, height_ = 0;
  std::vector<std::uint8_t> rgb_;
};

struct FoldMapStyle {
  Rgb overlay = black;
};

/// Ground truth in palette colors with training regions painted over in the
/// overlay color: whole patches for patch folds, training pixels otherwise.
inline Image render_fold_map(const LabelMap& labels, const SplitView& split, const FoldMapStyle& style = {}) {
  Image img(labels.width(), labels.height());
  for (std::int32_t r = 0; r < labels.height(); ++r)
    for (std::int32_t c = 0; c < labels.width(); ++c) img.set(r, c, class_color(labels.at(r, c)));
  if (split.mode == SplitMode::patch) {
    for (const auto& p : split.patches) {
      if (!p.fits(labels.dims())) throw ValidationError("patch does not fit inside the raster");
      for (std::int32_t r = p.origin.row; r < p.row_end(); ++r)
        for (std::int32_t c = p.origin.col; c < p.col_end(); ++c) img.set(r, c, style.overlay);
    }
  } else {
    for (Coord c : split.training) img.set(c.row, c.col, style.overlay);
  }
  return img;
}

struct LeakMapStyle {
  Rgb training = black;
  Rgb leaked = {255, 0, 0};
  Rgb clean = {0, 170, 0};
  Rgb background = unlabeled_color;
};

/// Training pixels, leaked test pixels and clean test pixels in three colors.
inline Image render_leak_map(const LabelMap& labels, const SplitView& split, const LeakageReport& report,
                             const LeakMapStyle& style = {}) {
  Image img(labels.width(), labels.height());
  for (std::int32_t r = 0; r < labels.height(); ++r)
    for (std::int32_t c = 0; c < labels.width(); ++c) img.set(r, c, style.background);
  for (Coord c : split.test) img.set(c.row, c.col, style.clean);
  for (Coord c : report.leaked_test_pixels) img.set(c.row, c.col, style.leaked);
  for (Coord c : split.training) img.set(c.row, c.col, style.training);
  return img;
}

inline std::string encode_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.bytes().data()), img.bytes().size());
  return out;
}

/// Parses the P6 files written by encode_ppm (single whitespace separators, maxval 255, no comments).
inline Image decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto token = [&]() {
    std::string t;
    while (pos < bytes.size() && bytes[pos] != ' ' && bytes[pos] != '\n') t.push_back(char(bytes[pos++]));
    if (pos >= bytes.size()) throw ParseError("truncated PPM header", pos);
    ++pos;
    return t;
  };
  if (token() != "P6") throw ParseError("not a binary PPM (P6) file", 0);
  auto number = [&]() {
    const std::size_t at = pos;
    const std::string t = token();
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) throw ParseError("bad PPM header field", at);
    return std::stoi(t);
  };
  const int w = number(), h = number(), maxval = number();
  if (maxval != 255) throw ParseError("only maxval 255 is supported", pos);
  if (w < 1 || h < 1) throw ParseError("bad PPM dimensions", pos);
  Image img(w, h);
  if (bytes.size() - pos != img.bytes().size()) throw ParseError("PPM pixel data has the wrong length", pos);
  std::copy(bytes.begin() + std::ptrdiff_t(pos), bytes.end(), img.bytes().begin());
  return img;
}

} // namespace hsival
