#pragma once

// Segmentation metrics: confusion matrix, per-class accuracy, OA, AA, and the
// mean OA/AA gap between two validation strategies.

#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hsival/core.hpp"

namespace hsival {

/// K x K counts, rows = true class, columns = predicted class (classes 1..K).
class ConfusionMatrix {
public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(ClassId class_count) : k_(class_count), counts_(std::size_t(class_count) * class_count, 0) {
    if (class_count < 1) throw ValidationError("confusion matrix needs at least one class");
  }

  ClassId class_count() const { return k_; }

  void add(ClassId truth, ClassId predicted, std::size_t n = 1) {
    if (truth < 1 || truth > k_ || predicted < 1 || predicted > k_)
      throw ValidationError("class id outside 1.." + std::to_string(k_));
    counts_[slot(truth, predicted)] += n;
  }
  std::size_t at(ClassId truth, ClassId predicted) const { return counts_[slot(truth, predicted)]; }

  std::size_t row_sum(ClassId truth) const {
    std::size_t s = 0;
    for (ClassId p = 1; p <= k_; ++p) s += at(truth, p);
    return s;
  }
  std::size_t trace() const {
    std::size_t s = 0;
    for (ClassId k = 1; k <= k_; ++k) s += at(k, k);
    return s;
  }
  std::size_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
  std::size_t slot(ClassId t, ClassId p) const { return std::size_t(t - 1) * std::size_t(k_) + std::size_t(p - 1); }

  ClassId k_ = 0;
  std::vector<std::size_t> counts_;
};

/// Accuracies are percentages at full precision.
struct EvalReport {
  ConfusionMatrix confusion;
  std::map<ClassId, double> per_class_accuracy; // classes with test support only
  double overall_accuracy = 0.0;
  double average_accuracy = 0.0;
  std::set<ClassId> classes_absent_from_test;
};

inline EvalReport evaluate(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw ValidationError("cannot evaluate an empty confusion matrix");
  EvalReport r;
  r.confusion = cm;
  r.overall_accuracy = 100.0 * double(cm.trace()) / double(total);
  double sum = 0.0;
  for (ClassId k = 1; k <= cm.class_count(); ++k) {
    const std::size_t support = cm.row_sum(k);
    if (support == 0) {
      r.classes_absent_from_test.insert(k);
      continue;
    }
    const double acc = 100.0 * double(cm.at(k, k)) / double(support);
    r.per_class_accuracy[k] = acc;
    sum += acc;
  }
  r.average_accuracy = sum / double(r.per_class_accuracy.size());
  return r;
}

struct Prediction {
  Coord where;
  ClassId predicted = 0;
};

/// Predictions must cover the test set exactly (same pixels, each once).
inline EvalReport evaluate(std::span<const Prediction> predictions, const LabelMap& truth,
                           std::span<const Coord> test_pixels) {
  if (predictions.size() != test_pixels.size())
    throw ValidationError("predictions cover " + std::to_string(predictions.size()) + " pixels but the test set has " +
                          std::to_string(test_pixels.size()));
  const Dims d = truth.dims();
  std::vector<std::uint8_t> expected(d.pixel_count(), 0);
  for (Coord c : test_pixels) {
    if (!d.contains(c)) throw ValidationError("test pixel outside the label map");
    expected[d.index(c)] = 1;
  }
  ConfusionMatrix cm(std::max<ClassId>(1, truth.class_count()));
  for (const auto& p : predictions) {
    if (!d.contains(p.where) || expected[d.index(p.where)] != 1)
      throw ValidationError("prediction for a pixel that is not in the test set (or predicted twice)");
    expected[d.index(p.where)] = 2;
    cm.add(truth.at(p.where), p.predicted);
  }
  return evaluate(cm);
}

struct GapReport {
  std::size_t runs_a = 0, runs_b = 0;
  double mean_oa_a = 0.0, mean_oa_b = 0.0;
  double mean_aa_a = 0.0, mean_aa_b = 0.0;
  double oa_gap = 0.0; // percentage points, a - b
  double aa_gap = 0.0;
};

inline GapReport gap_analysis(std::span<const EvalReport> a, std::span<const EvalReport> b) {
  if (a.empty() || b.empty()) throw ValidationError("gap analysis needs at least one report on each side");
  auto mean = [](std::span<const EvalReport> rs, double EvalReport::*field) {
    double s = 0.0;
    for (const auto& r : rs) s += r.*field;
    return s / double(rs.size());
  };
  GapReport g;
  g.runs_a = a.size();
  g.runs_b = b.size();
  g.mean_oa_a = mean(a, &EvalReport::overall_accuracy);
  g.mean_oa_b = mean(b, &EvalReport::overall_accuracy);
  g.mean_aa_a = mean(a, &EvalReport::average_accuracy);
  g.mean_aa_b = mean(b, &EvalReport::average_accuracy);
  g.oa_gap = g.mean_oa_a - g.mean_oa_b;
  g.aa_gap = g.mean_aa_a - g.mean_aa_b;
  return g;
}

inline std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct TableRow {
  std::string algorithm;
  std::string fold;
  EvalReport report;
};

/// Aligned text table: Algorithm, Fold, C1..CK, OA, AA. Classes without test
/// support print as "-".
inline std::string format_table(std::span<const TableRow> rows) {
  ClassId k = 0;
  for (const auto& r : rows) k = std::max(k, r.report.confusion.class_count());
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Algorithm", "Fold"};
  for (ClassId c = 1; c <= k; ++c) header.push_back("C" + std::to_string(c));
  header.push_back("OA");
  header.push_back("AA");
  cells.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line{r.algorithm, r.fold};
    for (ClassId c = 1; c <= k; ++c) {
      auto it = r.report.per_class_accuracy.find(c);
      line.push_back(it == r.report.per_class_accuracy.end() ? "-" : format_percent(it->second));
    }
    line.push_back(format_percent(r.report.overall_accuracy));
    line.push_back(format_percent(r.report.average_accuracy));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::ostringstream os;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) os << "  ";
      if (i < 2)
        os << line[i] << std::string(width[i] - line[i].size(), ' ');
      else
        os << std::string(width[i] - line[i].size(), ' ') << line[i];
    }
    os << '\n';
  }
  return os.str();
}

} // namespace hsival
