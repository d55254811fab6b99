// Copyright 2026 The Blurkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// COCO-style detection evaluation.
//
// Per category, predictions are visited in descending score order (ties
// keep input order) and each is greedily matched to the unmatched ground
// truth box in the same image with the highest IoU at or above the
// threshold (ties go to the lower GT index). AP is the 101-point
// interpolated area under the precision/recall curve.

#ifndef BLURKIT_EVALMAP_H_
#define BLURKIT_EVALMAP_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "blurkit/labels_coco.h"

namespace blurkit {

double Iou(const BoundingBox& a, const BoundingBox& b);

struct ClassEvalResult {
  std::optional<double> ap;  // nullopt when there is no ground truth
  size_t num_gts = 0;
  size_t num_preds = 0;
  size_t matched = 0;
};

// `preds` and `gts` must belong to a single category. Predictions without
// a score are treated as score 0.
ClassEvalResult EvaluateClass(std::span<const Annotation> preds,
                              std::span<const Annotation> gts, double iou_thr);

inline std::optional<double> EvaluateClassAp(std::span<const Annotation> preds,
                                             std::span<const Annotation> gts,
                                             double iou_thr) {
  return EvaluateClass(preds, gts, iou_thr).ap;
}

enum class LabelRegime { kStandard, kExpanded };

struct EvalConfig {
  std::vector<double> iou_thresholds = {0.5};
  LabelRegime regime = LabelRegime::kStandard;
  double score_threshold = 0.0;
  bool clip_expanded = false;

  // 0.50:0.95 in steps of 0.05.
  static std::vector<double> CocoThresholds();
  // Throws InvalidArgument unless thresholds are in (0, 1] and ascending.
  void Validate() const;
};

struct EvalReport {
  std::vector<double> iou_thresholds;
  // category -> AP at each threshold; categories without GT are absent.
  std::map<int64_t, std::vector<double>> per_class_ap;
  std::vector<double> map_at;  // parallel to iou_thresholds
  double map_mean = 0.0;       // averaged over thresholds then classes
  size_t num_gts = 0;
  size_t num_preds = 0;
  size_t matched = 0;          // at the first threshold

  nlohmann::json ToJson() const;
  std::string ToCsv() const;
};

// In the expanded regime the ground truth is first expanded with
// `extents_by_image`; a missing map or a missing image raises
// InvalidArgument.
EvalReport EvaluateMap(const std::vector<Annotation>& preds, const Dataset& gt,
                       const EvalConfig& config,
                       const std::map<int64_t, Extents>* extents_by_image = nullptr);

struct SweepCellResult {
  double map50 = 0.0;
  size_t n_images = 0;
};

struct SweepCell {
  double p = 0.0;
  double e = 0.0;
  std::optional<SweepCellResult> result;  // empty when the cell failed
};

using SweepEvalFn = std::function<SweepCellResult(double p, double e)>;

// Evaluates every (p, e) pair, p-major. Exceptions from `eval_fn` leave
// the cell empty.
std::vector<SweepCell> SweepGrid(const SweepEvalFn& eval_fn,
                                 std::span<const double> p_values,
                                 std::span<const double> e_values);

// Columns: p,e,map50,n_images.
std::string SweepToCsv(std::span<const SweepCell> cells);

}  // namespace blurkit

#endif  // BLURKIT_EVALMAP_H_
