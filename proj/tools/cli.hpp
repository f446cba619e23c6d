#pragma once

// Subcommand front end: synth, split-patch, split-random, audit, eval,
// compare, render. Exit codes: 0 success, 1 usage error, 2 data or
// validation error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "hsival/hsival.hpp"

namespace hsival::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string dataset_name(const std::string& given, const std::string& labels_path) {
  return given.empty() ? std::filesystem::path(labels_path).stem().string() : given;
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    npy::write_file(path, text);
}

inline Rgb parse_color(const std::string& name) {
  if (name == "black") return black;
  if (name == "white") return white;
  throw UsageError("overlay color must be 'black' or 'white'");
}

struct SplitBundle {
  std::vector<Fold> folds;
  std::vector<SplitAssignment> runs;
  std::vector<SplitView> views;
  std::vector<std::int32_t> indices;
};

inline SplitBundle load_splits(const Manifest& m, const LabelMap& labels) {
  SplitBundle b;
  if (m.mode == SplitMode::patch) {
    b.folds = materialize_folds(m, labels).folds;
    for (const auto& f : b.folds) {
      b.views.emplace_back(f);
      b.indices.push_back(f.index);
    }
  } else {
    b.runs = materialize_runs(m, labels);
    for (const auto& r : b.runs) {
      b.views.emplace_back(r);
      b.indices.push_back(r.run);
    }
  }
  return b;
}

inline std::vector<EvalReport> reports_from_eval_file(const std::string& path) {
  const auto bytes = npy::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON", e.byte);
  }
  if (!j.contains("runs") || !j["runs"].is_array()) throw ValidationError("'" + path + "' is not an eval report");
  std::vector<EvalReport> out;
  for (const auto& r : j["runs"]) {
    if (!r.contains("report")) throw ValidationError("'" + path + "' has a run without a report");
    out.push_back(eval_report_from_json(r["report"]));
  }
  if (out.empty()) throw ValidationError("'" + path + "' contains no runs");
  return out;
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Leak-free fold generation, leakage audits and proxy evaluation for hyperspectral scenes", "hsival"};
  app.require_subcommand(1);

  // synth
  SynthConfig synth;
  std::optional<std::uint64_t> seed;
  std::string cube_path, labels_path, dtype = "f8";
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic scene as a pair of NPY files");
  c_synth->add_option("--seed", seed, "Random seed (required)");
  c_synth->add_option("--height", synth.height, "Rows")->capture_default_str();
  c_synth->add_option("--width", synth.width, "Columns")->capture_default_str();
  c_synth->add_option("--bands", synth.bands, "Spectral bands")->capture_default_str();
  c_synth->add_option("--classes", synth.class_count, "Class count K")->capture_default_str();
  c_synth->add_option("--sites-per-class", synth.region_seeds_per_class, "Voronoi sites per class")->capture_default_str();
  c_synth->add_option("--separation", synth.signature_separation, "Mean inter-class signature distance")->capture_default_str();
  c_synth->add_option("--iid-sigma", synth.iid_noise_sigma, "Per-pixel noise sigma")->capture_default_str();
  c_synth->add_option("--corr-sigma", synth.correlated_noise_sigma, "Correlated noise sigma")->capture_default_str();
  c_synth->add_option("--corr-passes", synth.correlation_radius, "3x3 box-blur passes for correlated noise")->capture_default_str();
  c_synth->add_option("--unlabeled-fraction", synth.unlabeled_fraction, "Fraction of pixels relabeled 0")->capture_default_str();
  c_synth->add_option("--cube", cube_path, "Output cube NPY")->required();
  c_synth->add_option("--labels", labels_path, "Output label NPY")->required();
  c_synth->add_option("--dtype", dtype, "Cube dtype")->check(CLI::IsMember({"f4", "f8"}))->capture_default_str();

  // split-patch
  std::string preset_name, out_path, dataset, manifest_path;
  std::optional<std::int32_t> patch_w, patch_h, folds;
  std::optional<double> t_w, t_h;
  std::size_t train_pixels = 0, max_attempts = 10000;
  bool balanced_patch = false;
  auto* c_patch = app.add_subcommand("split-patch", "Generate non-overlapping patch-based folds");
  c_patch->add_option("--labels", labels_path, "Label map NPY")->required();
  c_patch->add_option("--seed", seed, "Random seed (required)");
  c_patch->add_option("--preset", preset_name, "indian_pines | salinas | pavia_university");
  c_patch->add_option("--patch-width", patch_w, "Patch width in pixels");
  c_patch->add_option("--patch-height", patch_h, "Patch height in pixels");
  c_patch->add_option("--tw", t_w, "Patch width as a fraction of the image width");
  c_patch->add_option("--th", t_h, "Patch height as a fraction of the image height");
  c_patch->add_option("--train-pixels", train_pixels, "Labeled training pixels per fold")->required();
  c_patch->add_option("--folds", folds, "Number of folds");
  c_patch->add_flag("--balanced", balanced_patch, "Redraw folds until every class has a training pixel");
  c_patch->add_option("--max-attempts", max_attempts, "Consecutive rejection cap")->capture_default_str();
  c_patch->add_option("--dataset", dataset, "Dataset id recorded in the manifest");
  c_patch->add_option("--out", out_path, "Output manifest JSON")->required();

  // split-random
  std::string balance = "imbalanced";
  std::size_t per_class = 0, total = 0;
  std::int32_t runs = 1;
  auto* c_random = app.add_subcommand("split-random", "Generate Monte-Carlo random pixel splits");
  c_random->add_option("--labels", labels_path, "Label map NPY")->required();
  c_random->add_option("--seed", seed, "Random seed (required)");
  c_random->add_option("--balance", balance, "balanced | imbalanced")->check(CLI::IsMember({"balanced", "imbalanced"}))->capture_default_str();
  c_random->add_option("--per-class", per_class, "Training pixels per class (balanced)");
  c_random->add_option("--total", total, "Training pixels in total (imbalanced)");
  c_random->add_option("--runs", runs, "Monte-Carlo repetitions")->capture_default_str();
  c_random->add_option("--dataset", dataset, "Dataset id recorded in the manifest");
  c_random->add_option("--out", out_path, "Output manifest JSON")->required();

  // audit
  std::string window_text = "5x5", audit_mode = "both";
  bool with_pixels = false;
  auto* c_audit = app.add_subcommand("audit", "Measure training-test leakage of every fold or run");
  c_audit->add_option("--labels", labels_path, "Label map NPY")->required();
  c_audit->add_option("--manifest", manifest_path, "Split manifest JSON")->required();
  c_audit->add_option("--window", window_text, "Feature window, e.g. 5x5")->capture_default_str();
  c_audit->add_option("--mode", audit_mode, "geometric | masked | both")->check(CLI::IsMember({"geometric", "masked", "both"}))->capture_default_str();
  c_audit->add_flag("--pixels", with_pixels, "Include leaked pixel coordinates");
  c_audit->add_option("--out", out_path, "Output JSON (stdout if omitted)");

  // eval
  std::string classifier = "knn", context = "auto", name;
  std::int32_t k = 5;
  std::optional<double> validation_fraction;
  bool table = false;
  auto* c_eval = app.add_subcommand("eval", "Train and score a proxy classifier on every fold or run");
  c_eval->add_option("--cube", cube_path, "Spectral cube NPY")->required();
  c_eval->add_option("--labels", labels_path, "Label map NPY")->required();
  c_eval->add_option("--manifest", manifest_path, "Split manifest JSON")->required();
  c_eval->add_option("--classifier", classifier, "knn | centroid")->check(CLI::IsMember({"knn", "centroid"}))->capture_default_str();
  c_eval->add_option("--window", window_text, "Feature window, e.g. 5x5 (1x1 = spectral only)")->capture_default_str();
  c_eval->add_option("--k", k, "Neighbours for knn (odd)")->capture_default_str();
  c_eval->add_option("--context", context, "auto | masked | full")->check(CLI::IsMember({"auto", "masked", "full"}))->capture_default_str();
  c_eval->add_option("--validation-fraction", validation_fraction, "Hold out this fraction of T as V");
  c_eval->add_option("--seed", seed, "Seed for carving V (required with --validation-fraction)");
  c_eval->add_option("--name", name, "Row label for --table");
  c_eval->add_flag("--table", table, "Print an accuracy table to stdout");
  c_eval->add_option("--out", out_path, "Output JSON (stdout if omitted)");

  // compare
  std::string a_path, b_path;
  auto* c_compare = app.add_subcommand("compare", "Mean OA/AA gap and Wilcoxon tests between two eval outputs");
  c_compare->add_option("--a", a_path, "Eval output of strategy A")->required();
  c_compare->add_option("--b", b_path, "Eval output of strategy B")->required();
  c_compare->add_option("--out", out_path, "Output JSON (stdout if omitted)");

  // render
  std::int32_t index = 0;
  std::string overlay = "black";
  std::optional<std::string> leak_window;
  auto* c_render = app.add_subcommand("render", "Render a fold or run as a binary PPM");
  c_render->add_option("--labels", labels_path, "Label map NPY")->required();
  c_render->add_option("--manifest", manifest_path, "Split manifest JSON")->required();
  c_render->add_option("--index", index, "Fold or run index")->capture_default_str();
  c_render->add_option("--overlay", overlay, "black | white")->capture_default_str();
  c_render->add_option("--leak-window", leak_window, "Render a leakage map for this window instead");
  c_render->add_option("--out", out_path, "Output PPM")->required();

  std::vector<const char*> argv{"hsival"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_usage;
  }

  auto require_seed = [&](const char* why) {
    if (!seed) throw UsageError(std::string("--seed is required ") + why);
    return *seed;
  };

  try {
    if (c_synth->parsed()) {
      synth.seed = require_seed("for synth");
      const Scene scene = generate_scene(synth);
      write_npy(scene.cube, cube_path, dtype == "f4" ? npy::DType::f4 : npy::DType::f8);
      write_npy(scene.labels, labels_path);
      out << "wrote " << scene.cube.height() << "x" << scene.cube.width() << "x" << scene.cube.bands() << " cube, "
          << scene.labels.labeled_count() << " labeled pixels\n";
    } else if (c_patch->parsed()) {
      PatchSplitConfig cfg;
      cfg.seed = require_seed("for split-patch");
      const LabelMap labels = read_labels(labels_path);
      std::optional<ScenePreset> preset;
      if (!preset_name.empty()) {
        preset = find_preset(preset_name);
        if (!preset) throw UsageError("unknown preset '" + preset_name + "'");
      }
      if (patch_w.has_value() != patch_h.has_value() || t_w.has_value() != t_h.has_value())
        throw UsageError("give patch width and height together");
      if (patch_w) {
        cfg.patch_width = *patch_w;
        cfg.patch_height = *patch_h;
      } else if (t_w) {
        const auto dims = patch_dims_from_fractions(*t_w, *t_h, labels.width(), labels.height());
        cfg.patch_width = dims.width;
        cfg.patch_height = dims.height;
      } else if (preset) {
        cfg.patch_width = preset->patch_width;
        cfg.patch_height = preset->patch_height;
      } else {
        throw UsageError("patch size needed: --patch-width/--patch-height, --tw/--th or --preset");
      }
      cfg.fold_count = folds ? *folds : (preset ? preset->fold_count : 1);
      cfg.target_training_pixels = train_pixels;
      cfg.allow_class_absence = !balanced_patch;
      cfg.max_draw_attempts = max_attempts;
      const FoldSet fs = generate_patch_folds(labels, cfg);
      write_manifest(make_manifest(fs, labels, detail::dataset_name(dataset, labels_path)), out_path);
      out << "wrote " << fs.folds.size() << " folds of " << cfg.patch_width << "x" << cfg.patch_height << " patches\n";
    } else if (c_random->parsed()) {
      RandomSplitConfig cfg;
      cfg.seed = require_seed("for split-random");
      cfg.mode = balance == "balanced" ? BalanceMode::balanced : BalanceMode::imbalanced;
      cfg.per_class_training_pixels = per_class;
      cfg.total_training_pixels = total;
      cfg.runs = runs;
      if (cfg.mode == BalanceMode::balanced && per_class == 0) throw UsageError("--per-class is required for balanced splits");
      if (cfg.mode == BalanceMode::imbalanced && total == 0) throw UsageError("--total is required for imbalanced splits");
      const LabelMap labels = read_labels(labels_path);
      const auto splits = monte_carlo_splits(labels, cfg);
      write_manifest(make_manifest(splits, cfg, labels, detail::dataset_name(dataset, labels_path)), out_path);
      out << "wrote " << splits.size() << " " << to_string(cfg.mode) << " runs\n";
    } else if (c_audit->parsed()) {
      const NeighborhoodSpec window = parse_window(window_text);
      const LabelMap labels = read_labels(labels_path);
      const Manifest m = read_manifest(manifest_path);
      const auto bundle = detail::load_splits(m, labels);
      nlohmann::json j;
      j["dataset"] = m.dataset;
      j["split_mode"] = to_string(m.mode);
      j["window"] = window.to_string();
      nlohmann::json entries = nlohmann::json::array();
      double geo_sum = 0.0, masked_max = 0.0;
      for (std::size_t i = 0; i < bundle.views.size(); ++i) {
        nlohmann::json e;
        e["index"] = bundle.indices[i];
        if (audit_mode != "masked") {
          const auto r = geometric_leakage(bundle.views[i], labels, window);
          geo_sum += r.leaked_fraction;
          e["geometric"] = to_json(r, with_pixels);
        }
        if (audit_mode != "geometric") {
          const auto mask = build_visibility(bundle.views[i], labels.dims());
          const auto r = masked_leakage(bundle.views[i], labels, window, mask);
          masked_max = std::max(masked_max, r.leaked_fraction);
          e["masked"] = to_json(r, with_pixels);
        }
        entries.push_back(std::move(e));
      }
      j["entries"] = std::move(entries);
      if (audit_mode != "masked") j["mean_geometric_leaked_fraction"] = geo_sum / double(bundle.views.size());
      if (audit_mode != "geometric") j["max_masked_leaked_fraction"] = masked_max;
      detail::emit(j.dump(2) + "\n", out_path, out);
    } else if (c_eval->parsed()) {
      EvalSettings settings;
      settings.classifier = classifier == "knn" ? ClassifierKind::knn : ClassifierKind::nearest_centroid;
      settings.window = parse_window(window_text);
      settings.k = k;
      settings.context = context == "masked" ? ContextPolicy::masked
                         : context == "full" ? ContextPolicy::full
                                             : ContextPolicy::automatic;
      if (validation_fraction) {
        settings.validation_fraction = validation_fraction;
        settings.seed = require_seed("when --validation-fraction is given");
      }
      const SpectralCube cube = read_cube(cube_path);
      const LabelMap labels = read_labels(labels_path);
      const Manifest m = read_manifest(manifest_path);
      const auto bundle = detail::load_splits(m, labels);
      nlohmann::json j;
      j["dataset"] = m.dataset;
      j["split_mode"] = to_string(m.mode);
      j["classifier"] = to_string(settings.classifier);
      if (settings.classifier == ClassifierKind::knn) j["k"] = settings.k;
      j["window"] = settings.window.to_string();
      j["context"] = to_string(resolve(settings.context, m.mode));
      if (validation_fraction) j["validation_fraction"] = *validation_fraction;
      nlohmann::json jr = nlohmann::json::array();
      std::vector<TableRow> rows;
      std::vector<EvalReport> reports;
      const std::string algo = name.empty() ? std::string(to_string(settings.classifier)) + "(" +
                                                  (m.mode == SplitMode::patch ? "P" : "R") + ")"
                                            : name;
      for (std::size_t i = 0; i < bundle.views.size(); ++i) {
        const auto ev = evaluate_split(cube, labels, bundle.views[i], settings);
        nlohmann::json e;
        e["index"] = bundle.indices[i];
        e["training_samples"] = ev.training_samples;
        e["report"] = to_json(ev.test);
        if (ev.validation_accuracy) e["validation_accuracy"] = *ev.validation_accuracy;
        jr.push_back(std::move(e));
        rows.push_back({algo, std::to_string(bundle.indices[i] + 1), ev.test});
        reports.push_back(ev.test);
      }
      j["runs"] = std::move(jr);
      const GapReport self = gap_analysis(reports, reports);
      j["mean_overall_accuracy"] = self.mean_oa_a;
      j["mean_average_accuracy"] = self.mean_aa_a;
      if (table) {
        EvalReport avg = reports.front();
        avg.overall_accuracy = self.mean_oa_a;
        avg.average_accuracy = self.mean_aa_a;
        for (auto& [cls, acc] : avg.per_class_accuracy) {
          double s = 0.0;
          std::size_t n = 0;
          for (const auto& r : reports)
            if (auto it = r.per_class_accuracy.find(cls); it != r.per_class_accuracy.end()) {
              s += it->second;
              ++n;
            }
          acc = s / double(n);
        }
        rows.push_back({algo, "Avg", avg});
        out << format_table(rows);
      }
      if (!out_path.empty() || !table) detail::emit(j.dump(2) + "\n", out_path, out);
    } else if (c_compare->parsed()) {
      const auto a = detail::reports_from_eval_file(a_path);
      const auto b = detail::reports_from_eval_file(b_path);
      nlohmann::json j;
      j["gap"] = to_json(gap_analysis(a, b));
      for (const char* metric : {"aa", "oa"}) {
        const std::string key = std::string("wilcoxon_") + metric;
        if (a.size() != b.size()) {
          j[key] = nullptr;
          j[key + "_note"] = "unpaired: run counts differ";
          continue;
        }
        std::vector<double> x, y;
        for (std::size_t i = 0; i < a.size(); ++i) {
          x.push_back(metric[0] == 'a' ? a[i].average_accuracy : a[i].overall_accuracy);
          y.push_back(metric[0] == 'a' ? b[i].average_accuracy : b[i].overall_accuracy);
        }
        try {
          j[key] = to_json(wilcoxon_signed_rank_two_tailed(x, y));
        } catch (const ValidationError& e) {
          j[key] = nullptr;
          j[key + "_note"] = e.what();
        }
      }
      detail::emit(j.dump(2) + "\n", out_path, out);
    } else if (c_render->parsed()) {
      const Rgb color = detail::parse_color(overlay);
      const LabelMap labels = read_labels(labels_path);
      const Manifest m = read_manifest(manifest_path);
      const auto bundle = detail::load_splits(m, labels);
      const auto it = std::find(bundle.indices.begin(), bundle.indices.end(), index);
      if (it == bundle.indices.end()) throw ValidationError("manifest has no fold or run " + std::to_string(index));
      const SplitView& view = bundle.views[std::size_t(it - bundle.indices.begin())];
      Image img;
      if (leak_window) {
        const auto report = geometric_leakage(view, labels, parse_window(*leak_window));
        LeakMapStyle style;
        style.training = color;
        img = render_leak_map(labels, view, report, style);
      } else {
        img = render_fold_map(labels, view, {color});
      }
      npy::write_file(out_path, encode_ppm(img));
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  }
  return exit_ok;
}

} // namespace hsival::cli
