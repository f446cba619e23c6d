#pragma once

#include <cstdint>
#include <vector>

#include "hsival/core.hpp"
#include "hsival/splits.hpp"

namespace hsival {

enum class Visibility : std::uint8_t { unassigned = 0, train_visible = 1, test_visible = 2 };

/// Which side of a split a feature is being extracted for.
enum class Side { train, test };

inline Visibility visible_state(Side s) { return s == Side::train ? Visibility::train_visible : Visibility::test_visible; }

/// Per-pixel visibility under removal semantics: pixels removed into training
/// patches are invisible at test time, and vice versa.
class VisibilityMask {
public:
  VisibilityMask() = default;
  explicit VisibilityMask(Dims d, Visibility fill = Visibility::unassigned) : dims_(d), states_(d.pixel_count(), fill) {}

  Dims dims() const { return dims_; }
  Visibility at(Coord c) const { return states_[dims_.index(c)]; }
  void set(Coord c, Visibility v) { states_[dims_.index(c)] = v; }
  std::size_t count(Visibility v) const {
    std::size_t n = 0;
    for (auto s : states_) n += s == v;
    return n;
  }

  friend bool operator==(const VisibilityMask&, const VisibilityMask&) = default;

private:
  Dims dims_{};
  std::vector<Visibility> states_;
};

/// Patch splits: whole patch rectangles are TrainVisible, labeled or not.
/// Random splits: exactly the training pixels are TrainVisible.
/// Everything else is TestVisible context.
inline VisibilityMask build_visibility(const SplitView& split, Dims dims) {
  VisibilityMask mask(dims, Visibility::test_visible);
  if (split.mode == SplitMode::patch) {
    for (const auto& p : split.patches) {
      if (!p.fits(dims)) throw ValidationError("patch does not fit inside the raster");
      for (std::int32_t r = p.origin.row; r < p.row_end(); ++r)
        for (std::int32_t c = p.origin.col; c < p.col_end(); ++c) mask.set({r, c}, Visibility::train_visible);
    }
    for (Coord c : split.training)
      if (mask.at(c) != Visibility::train_visible) throw ValidationError("patch training pixel outside its patches");
  } else {
    for (Coord c : split.training) {
      if (!dims.contains(c)) throw ValidationError("training pixel outside the raster");
      mask.set(c, Visibility::train_visible);
    }
  }
  return mask;
}

} // namespace hsival
