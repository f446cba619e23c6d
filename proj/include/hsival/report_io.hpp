#pragma once

// JSON forms of leakage, evaluation, gap and Wilcoxon reports.

#include <string>

#include <nlohmann/json.hpp>

#include "hsival/leakage.hpp"
#include "hsival/metrics.hpp"
#include "hsival/wilcoxon.hpp"

namespace hsival {

inline nlohmann::json to_json(const LeakageReport& r, bool include_pixels = true) {
  nlohmann::json j;
  j["mode"] = to_string(r.mode);
  j["window"] = r.window.to_string();
  j["test_pixel_count"] = r.test_pixel_count;
  j["leaked_test_pixel_count"] = r.leaked_test_pixels.size();
  j["leaked_fraction"] = r.leaked_fraction;
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [k, v] : r.per_class_leak_fraction) per_class[std::to_string(k)] = v;
  j["per_class_leak_fraction"] = std::move(per_class);
  j["training_pixels_touching_test"] = r.training_pixels_touching_test;
  j["window_overlap_test_pixels"] = r.window_overlap_test_pixels;
  j["window_overlap_fraction"] = r.window_overlap_fraction;
  if (include_pixels) {
    nlohmann::json px = nlohmann::json::array();
    for (Coord c : r.leaked_test_pixels) px.push_back({c.row, c.col});
    j["leaked_test_pixels"] = std::move(px);
  }
  return j;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  nlohmann::json cm = nlohmann::json::array();
  for (ClassId t = 1; t <= r.confusion.class_count(); ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (ClassId p = 1; p <= r.confusion.class_count(); ++p) row.push_back(r.confusion.at(t, p));
    cm.push_back(std::move(row));
  }
  j["confusion"] = std::move(cm);
  nlohmann::json pc = nlohmann::json::object();
  for (const auto& [k, v] : r.per_class_accuracy) pc[std::to_string(k)] = v;
  j["per_class_accuracy"] = std::move(pc);
  j["overall_accuracy"] = r.overall_accuracy;
  j["average_accuracy"] = r.average_accuracy;
  j["classes_absent_from_test"] = r.classes_absent_from_test;
  return j;
}

/// Rebuilds a report from its confusion matrix and checks the stored
/// accuracies agree with it.
inline EvalReport eval_report_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("confusion") || !j["confusion"].is_array())
    throw ValidationError("evaluation report lacks a confusion matrix");
  const auto& cm_json = j["confusion"];
  const auto k = ClassId(cm_json.size());
  ConfusionMatrix cm(k);
  for (ClassId t = 1; t <= k; ++t) {
    const auto& row = cm_json[std::size_t(t - 1)];
    if (!row.is_array() || ClassId(row.size()) != k) throw ValidationError("confusion matrix is not square");
    for (ClassId p = 1; p <= k; ++p) {
      if (!row[std::size_t(p - 1)].is_number_unsigned()) throw ValidationError("confusion entries must be counts");
      cm.add(t, p, row[std::size_t(p - 1)].get<std::size_t>());
    }
  }
  EvalReport r = evaluate(cm);
  for (const char* key : {"overall_accuracy", "average_accuracy"}) {
    if (!j.contains(key) || !j[key].is_number()) throw ValidationError(std::string("evaluation report lacks ") + key);
    const double stored = j[key].get<double>();
    const double actual = std::string(key) == "overall_accuracy" ? r.overall_accuracy : r.average_accuracy;
    if (std::abs(stored - actual) > 1e-9) throw ValidationError(std::string("evaluation report ") + key + " disagrees with its confusion matrix");
  }
  return r;
}

inline nlohmann::json to_json(const GapReport& g) {
  return {{"runs_a", g.runs_a},       {"runs_b", g.runs_b},       {"mean_oa_a", g.mean_oa_a},
          {"mean_oa_b", g.mean_oa_b}, {"mean_aa_a", g.mean_aa_a}, {"mean_aa_b", g.mean_aa_b},
          {"oa_gap", g.oa_gap},       {"aa_gap", g.aa_gap}};
}

inline nlohmann::json to_json(const WilcoxonResult& w) {
  return {{"statistic", w.statistic}, {"w_plus", w.w_plus}, {"w_minus", w.w_minus},
          {"n", w.n},                 {"p_value", w.p_value}, {"exact", w.exact}};
}

} // namespace hsival
