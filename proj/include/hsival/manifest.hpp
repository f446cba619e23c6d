#pragma once

// JSON fold/split manifests.
//
// A manifest records the scene it was built from (dimensions, class count,
// labeled-pixel count and a digest of the label map), the generator
// configuration including the seed, and for every fold or run its geometry
// (patch rectangles, or sorted training pixel lists for random splits) plus
// per-class training/test counts. Loading checks the manifest's internal
// consistency; materializing against a label map recomputes every count and
// rejects any disagreement.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hsival/core.hpp"
#include "hsival/npy.hpp"
#include "hsival/split_patch.hpp"
#include "hsival/split_random.hpp"
#include "hsival/splits.hpp"

namespace hsival {

inline constexpr int manifest_schema_version = 1;

struct ManifestEntry {
  std::int32_t index = 0; // fold index or run index
  std::vector<PatchRect> patches;      // patch mode
  std::vector<Coord> training_pixels;  // random mode, row-major
  std::size_t training_pixel_count = 0;
  std::size_t test_pixel_count = 0;
  ClassHistogram train_counts;
  ClassHistogram test_counts;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  int schema_version = manifest_schema_version;
  std::string dataset;
  SplitMode mode = SplitMode::patch;
  Dims dims;
  ClassId class_count = 0;
  std::size_t labeled_pixels = 0;
  std::uint64_t label_digest = 0;
  std::optional<PatchSplitConfig> patch_config;
  std::optional<RandomSplitConfig> random_config;
  std::vector<ManifestEntry> entries;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

namespace detail {

inline void describe_scene(Manifest& m, const LabelMap& labels, const std::string& dataset) {
  m.dataset = dataset;
  m.dims = labels.dims();
  m.class_count = labels.class_count();
  m.labeled_pixels = labels.labeled_count();
  m.label_digest = label_digest(labels);
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline nlohmann::json histogram_json(const ClassHistogram& h) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, n] : h) j[std::to_string(k)] = n;
  return j;
}

inline std::size_t histogram_total(const ClassHistogram& h) {
  std::size_t s = 0;
  for (const auto& [k, n] : h) s += n;
  return s;
}

[[noreturn]] inline void schema_error(const std::string& what) { throw ValidationError("manifest: " + what); }

inline const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    schema_error(std::string("field '") + key + "' has the wrong type");
  }
}

inline ClassHistogram histogram_from(const nlohmann::json& j, const char* key, ClassId class_count) {
  const auto& h = field(j, key);
  if (!h.is_object()) schema_error(std::string("'") + key + "' must be an object");
  ClassHistogram out;
  for (auto it = h.begin(); it != h.end(); ++it) {
    ClassId k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(it.key(), &used);
      if (used != it.key().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      schema_error("class key '" + it.key() + "' is not an integer");
    }
    if (k < 1 || k > class_count) schema_error("class key " + it.key() + " outside 1..class_count");
    if (!it.value().is_number_unsigned()) schema_error("class count must be a non-negative integer");
    out[k] = it.value().get<std::size_t>();
  }
  return out;
}

} // namespace detail

inline Manifest make_manifest(const FoldSet& folds, const LabelMap& labels, const std::string& dataset) {
  if (!(folds.dims == labels.dims())) throw ValidationError("fold set and label map dimensions differ");
  Manifest m;
  detail::describe_scene(m, labels, dataset);
  m.mode = SplitMode::patch;
  m.patch_config = folds.config;
  for (const auto& f : folds.folds)
    m.entries.push_back({f.index, f.patches, {}, f.training_pixels.size(), f.test_pixels.size(), f.train_counts, f.test_counts});
  return m;
}

inline Manifest make_manifest(const std::vector<SplitAssignment>& runs, const RandomSplitConfig& config,
                              const LabelMap& labels, const std::string& dataset) {
  Manifest m;
  detail::describe_scene(m, labels, dataset);
  m.mode = SplitMode::random;
  m.random_config = config;
  for (const auto& s : runs)
    m.entries.push_back({s.run, {}, s.training_pixels, s.training_pixels.size(), s.test_pixels.size(), s.train_counts, s.test_counts});
  return m;
}

inline nlohmann::json to_json(const Manifest& m) {
  using nlohmann::json;
  json j;
  j["schema_version"] = m.schema_version;
  j["dataset"] = m.dataset;
  j["mode"] = to_string(m.mode);
  j["scene"] = {{"height", m.dims.height},
                {"width", m.dims.width},
                {"class_count", m.class_count},
                {"labeled_pixels", m.labeled_pixels},
                {"label_digest", detail::hex64(m.label_digest)}};
  if (m.patch_config) {
    const auto& c = *m.patch_config;
    j["config"] = {{"patch_width", c.patch_width},
                   {"patch_height", c.patch_height},
                   {"target_training_pixels", c.target_training_pixels},
                   {"fold_count", c.fold_count},
                   {"allow_class_absence", c.allow_class_absence},
                   {"max_draw_attempts", c.max_draw_attempts},
                   {"seed", c.seed}};
  } else if (m.random_config) {
    const auto& c = *m.random_config;
    j["config"] = {{"balance", to_string(c.mode)},
                   {"per_class_training_pixels", c.per_class_training_pixels},
                   {"total_training_pixels", c.total_training_pixels},
                   {"runs", c.runs},
                   {"seed", c.seed}};
  }
  json entries = json::array();
  for (const auto& e : m.entries) {
    json je;
    je[m.mode == SplitMode::patch ? "index" : "run"] = e.index;
    if (m.mode == SplitMode::patch) {
      json patches = json::array();
      for (const auto& p : e.patches)
        patches.push_back({{"row", p.origin.row}, {"col", p.origin.col}, {"width", p.width}, {"height", p.height}});
      je["patches"] = std::move(patches);
    } else {
      json pixels = json::array();
      for (Coord c : e.training_pixels) pixels.push_back({c.row, c.col});
      je["training_pixels"] = std::move(pixels);
    }
    je["training_pixel_count"] = e.training_pixel_count;
    je["test_pixel_count"] = e.test_pixel_count;
    je["train_counts"] = detail::histogram_json(e.train_counts);
    je["test_counts"] = detail::histogram_json(e.test_counts);
    entries.push_back(std::move(je));
  }
  j[m.mode == SplitMode::patch ? "folds" : "runs"] = std::move(entries);
  return j;
}

/// Parses and checks internal consistency (geometry in bounds, patches
/// disjoint, pixel lists canonical, counts summing to the stated totals).
inline Manifest manifest_from_json(const nlohmann::json& j) {
  using detail::get;
  using detail::schema_error;
  Manifest m;
  if (!j.is_object()) schema_error("top level must be an object");
  m.schema_version = get<int>(j, "schema_version");
  if (m.schema_version != manifest_schema_version)
    schema_error("unsupported schema_version " + std::to_string(m.schema_version));
  m.dataset = get<std::string>(j, "dataset");
  const auto mode = get<std::string>(j, "mode");
  if (mode == "patch")
    m.mode = SplitMode::patch;
  else if (mode == "random")
    m.mode = SplitMode::random;
  else
    schema_error("mode must be \"patch\" or \"random\"");

  const auto& scene = detail::field(j, "scene");
  m.dims = {get<std::int32_t>(scene, "height"), get<std::int32_t>(scene, "width")};
  if (m.dims.height < 1 || m.dims.width < 1) schema_error("scene dimensions must be >= 1");
  m.class_count = get<ClassId>(scene, "class_count");
  m.labeled_pixels = get<std::size_t>(scene, "labeled_pixels");
  const auto digest = get<std::string>(scene, "label_digest");
  try {
    std::size_t used = 0;
    m.label_digest = std::stoull(digest, &used, 16);
    if (used != digest.size() || digest.size() != 16) throw std::invalid_argument("digest");
  } catch (const std::exception&) {
    schema_error("label_digest must be 16 hex digits");
  }

  const auto& cfg = detail::field(j, "config");
  if (m.mode == SplitMode::patch) {
    PatchSplitConfig c;
    c.patch_width = get<std::int32_t>(cfg, "patch_width");
    c.patch_height = get<std::int32_t>(cfg, "patch_height");
    c.target_training_pixels = get<std::size_t>(cfg, "target_training_pixels");
    c.fold_count = get<std::int32_t>(cfg, "fold_count");
    c.allow_class_absence = get<bool>(cfg, "allow_class_absence");
    c.max_draw_attempts = get<std::size_t>(cfg, "max_draw_attempts");
    c.seed = get<std::uint64_t>(cfg, "seed");
    m.patch_config = c;
  } else {
    RandomSplitConfig c;
    const auto balance = get<std::string>(cfg, "balance");
    if (balance == "balanced")
      c.mode = BalanceMode::balanced;
    else if (balance == "imbalanced")
      c.mode = BalanceMode::imbalanced;
    else
      schema_error("balance must be \"balanced\" or \"imbalanced\"");
    c.per_class_training_pixels = get<std::size_t>(cfg, "per_class_training_pixels");
    c.total_training_pixels = get<std::size_t>(cfg, "total_training_pixels");
    c.runs = get<std::int32_t>(cfg, "runs");
    c.seed = get<std::uint64_t>(cfg, "seed");
    m.random_config = c;
  }

  const auto& list = detail::field(j, m.mode == SplitMode::patch ? "folds" : "runs");
  if (!list.is_array()) schema_error("fold/run list must be an array");
  std::vector<PatchRect> all_patches;
  for (const auto& je : list) {
    ManifestEntry e;
    e.index = get<std::int32_t>(je, m.mode == SplitMode::patch ? "index" : "run");
    if (m.mode == SplitMode::patch) {
      const auto& patches = detail::field(je, "patches");
      if (!patches.is_array()) schema_error("patches must be an array");
      for (const auto& jp : patches) {
        PatchRect p{{get<std::int32_t>(jp, "row"), get<std::int32_t>(jp, "col")},
                    get<std::int32_t>(jp, "width"),
                    get<std::int32_t>(jp, "height")};
        if (!p.fits(m.dims)) schema_error("fold " + std::to_string(e.index) + " has a patch outside the scene");
        for (const auto& q : all_patches)
          if (p.intersects(q)) schema_error("fold " + std::to_string(e.index) + " has overlapping patches");
        all_patches.push_back(p);
        e.patches.push_back(p);
      }
    } else {
      const auto& pixels = detail::field(je, "training_pixels");
      if (!pixels.is_array()) schema_error("training_pixels must be an array");
      for (const auto& jc : pixels) {
        if (!jc.is_array() || jc.size() != 2 || !jc[0].is_number_integer() || !jc[1].is_number_integer())
          schema_error("training pixels must be [row, col] pairs");
        const Coord c{jc[0].get<std::int32_t>(), jc[1].get<std::int32_t>()};
        if (!m.dims.contains(c)) schema_error("training pixel outside the scene");
        if (!e.training_pixels.empty() && !(e.training_pixels.back() < c))
          schema_error("training pixels must be sorted and unique");
        e.training_pixels.push_back(c);
      }
    }
    e.training_pixel_count = get<std::size_t>(je, "training_pixel_count");
    e.test_pixel_count = get<std::size_t>(je, "test_pixel_count");
    e.train_counts = detail::histogram_from(je, "train_counts", m.class_count);
    e.test_counts = detail::histogram_from(je, "test_counts", m.class_count);
    const std::string who = (m.mode == SplitMode::patch ? "fold " : "run ") + std::to_string(e.index);
    if (detail::histogram_total(e.train_counts) != e.training_pixel_count)
      schema_error(who + ": train_counts do not sum to training_pixel_count");
    if (detail::histogram_total(e.test_counts) != e.test_pixel_count)
      schema_error(who + ": test_counts do not sum to test_pixel_count");
    if (m.mode == SplitMode::random && e.training_pixels.size() != e.training_pixel_count)
      schema_error(who + ": training pixel list length differs from training_pixel_count");
    if (e.training_pixel_count + e.test_pixel_count != m.labeled_pixels)
      schema_error(who + ": training + test counts differ from the scene's labeled pixels");
    m.entries.push_back(std::move(e));
  }
  return m;
}

inline std::string dump_manifest(const Manifest& m) { return to_json(m).dump(2) + "\n"; }

inline Manifest parse_manifest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), e.byte);
  }
  return manifest_from_json(j);
}

inline void write_manifest(const Manifest& m, const std::string& path) { npy::write_file(path, dump_manifest(m)); }

inline Manifest read_manifest(const std::string& path) {
  const auto bytes = npy::read_file(path);
  return parse_manifest(std::string(bytes.begin(), bytes.end()));
}

namespace detail {

inline void check_scene(const Manifest& m, const LabelMap& labels) {
  if (!(m.dims == labels.dims())) throw ValidationError("manifest scene dimensions differ from the label map");
  if (label_digest(labels) != m.label_digest) throw ValidationError("manifest was built from a different label map");
}

inline void check_counts(const ManifestEntry& e, const ClassHistogram& train, const ClassHistogram& test,
                         const std::string& who) {
  auto same = [](const ClassHistogram& stored, const ClassHistogram& actual) {
    for (const auto& [k, n] : actual) {
      auto it = stored.find(k);
      if ((it == stored.end() ? 0 : it->second) != n) return false;
    }
    for (const auto& [k, n] : stored)
      if (!actual.contains(k) && n != 0) return false;
    return true;
  };
  if (!same(e.train_counts, train) || !same(e.test_counts, test))
    throw ValidationError("manifest " + who + ": stored class counts do not match the recomputed counts");
}

} // namespace detail

/// Rebuilds patch folds from a manifest and verifies every stored count.
inline FoldSet materialize_folds(const Manifest& m, const LabelMap& labels) {
  if (m.mode != SplitMode::patch || !m.patch_config) throw ValidationError("manifest does not describe patch folds");
  detail::check_scene(m, labels);
  FoldSet fs;
  fs.config = *m.patch_config;
  fs.dims = m.dims;
  fs.class_count = labels.class_count();
  for (const auto& e : m.entries) {
    Fold f;
    f.index = e.index;
    f.patches = e.patches;
    detail::assign_pixels(labels, f);
    detail::check_counts(e, f.train_counts, f.test_counts, "fold " + std::to_string(e.index));
    fs.folds.push_back(std::move(f));
  }
  return fs;
}

inline std::vector<SplitAssignment> materialize_runs(const Manifest& m, const LabelMap& labels) {
  if (m.mode != SplitMode::random) throw ValidationError("manifest does not describe random splits");
  detail::check_scene(m, labels);
  std::vector<SplitAssignment> out;
  for (const auto& e : m.entries) {
    for (Coord c : e.training_pixels)
      if (labels.at(c) == 0) throw ValidationError("manifest run " + std::to_string(e.index) + " trains on an unlabeled pixel");
    auto s = detail::finish_assignment(labels, e.index, e.training_pixels);
    detail::check_counts(e, s.train_counts, s.test_counts, "run " + std::to_string(e.index));
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace hsival
