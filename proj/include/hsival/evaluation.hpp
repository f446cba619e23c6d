#pragma once

// End-to-end evaluation of one split: extract features, scale on training
// data, train a proxy classifier, predict every test pixel, score.

#include <optional>
#include <string>
#include <vector>

#include "hsival/classifiers.hpp"
#include "hsival/features.hpp"
#include "hsival/metrics.hpp"
#include "hsival/split_random.hpp"
#include "hsival/splits.hpp"
#include "hsival/visibility.hpp"

namespace hsival {

enum class ClassifierKind { nearest_centroid, knn };

/// masked: removal semantics (each side sees only its own visible pixels).
/// full: windows read every in-bounds pixel, as with naive random splits.
/// automatic: masked for patch splits, full for random splits.
enum class ContextPolicy { automatic, masked, full };

inline const char* to_string(ClassifierKind k) { return k == ClassifierKind::knn ? "knn" : "centroid"; }
inline const char* to_string(ContextPolicy p) {
  switch (p) {
  case ContextPolicy::masked: return "masked";
  case ContextPolicy::full: return "full";
  default: return "auto";
  }
}

struct EvalSettings {
  ClassifierKind classifier = ClassifierKind::knn;
  NeighborhoodSpec window = NeighborhoodSpec::square(5);
  std::int32_t k = 5;
  ContextPolicy context = ContextPolicy::automatic;
  /// When set, V = a random subset of T of this fraction is held out of training.
  std::optional<double> validation_fraction;
  std::uint64_t seed = 0;
};

struct SplitEvaluation {
  EvalReport test;
  std::optional<double> validation_accuracy; // percent, when V was carved
  std::size_t training_samples = 0;
};

inline ContextPolicy resolve(ContextPolicy p, SplitMode mode) {
  if (p != ContextPolicy::automatic) return p;
  return mode == SplitMode::patch ? ContextPolicy::masked : ContextPolicy::full;
}

inline SplitEvaluation evaluate_split(const SpectralCube& cube, const LabelMap& labels, const SplitView& split,
                                      const EvalSettings& settings) {
  if (!(cube.dims() == labels.dims())) throw ValidationError("cube and label map dimensions differ");
  validate_split(split, labels);
  const ContextPolicy context = resolve(settings.context, split.mode);
  const VisibilityMask mask = build_visibility(split, labels.dims());
  auto features = [&](Coord c, Side side) {
    return context == ContextPolicy::masked ? extract_features(cube, c, settings.window, mask, side)
                                            : extract_features_unmasked(cube, c, settings.window);
  };

  std::vector<Coord> fit_pixels(split.training.begin(), split.training.end());
  std::vector<Coord> validation;
  if (settings.validation_fraction) {
    auto carve = carve_validation(split.training, *settings.validation_fraction, settings.seed);
    fit_pixels = std::move(carve.training);
    validation = std::move(carve.validation);
  }
  if (fit_pixels.empty()) throw ValidationError("split has no training pixels");

  std::vector<Sample> training;
  training.reserve(fit_pixels.size());
  for (Coord c : fit_pixels) training.push_back({c, labels.at(c), features(c, Side::train)});
  const MinMaxScaler scaler = MinMaxScaler::fit(training);
  for (auto& s : training) scaler.apply(s.features);

  std::optional<NearestCentroid> centroid;
  std::optional<KnnClassifier> knn;
  if (settings.classifier == ClassifierKind::nearest_centroid)
    centroid = NearestCentroid::train(training);
  else
    knn.emplace(training, settings.k);
  auto classify = [&](FeatureVector f) {
    scaler.apply(f);
    return centroid ? centroid->predict(f) : knn->predict(f);
  };

  SplitEvaluation out;
  out.training_samples = training.size();
  std::vector<Prediction> predictions;
  predictions.reserve(split.test.size());
  for (Coord c : split.test) predictions.push_back({c, classify(features(c, Side::test))});
  out.test = evaluate(predictions, labels, split.test);

  if (!validation.empty()) {
    std::size_t correct = 0;
    for (Coord c : validation) correct += classify(features(c, Side::train)) == labels.at(c);
    out.validation_accuracy = 100.0 * double(correct) / double(validation.size());
  }
  return out;
}

} // namespace hsival
