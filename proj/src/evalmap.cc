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

#include "blurkit/evalmap.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "blurkit/error.h"

namespace blurkit {

namespace {

constexpr int kRecallPoints = 101;

std::string FormatReal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string FormatFixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double Iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double iy = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

ClassEvalResult EvaluateClass(std::span<const Annotation> preds,
                              std::span<const Annotation> gts, double iou_thr) {
  ClassEvalResult res;
  res.num_gts = gts.size();
  res.num_preds = preds.size();

  std::vector<size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return preds[a].score.value_or(0.0) > preds[b].score.value_or(0.0);
  });

  std::map<int64_t, std::vector<size_t>> gts_by_image;
  for (size_t g = 0; g < gts.size(); ++g) gts_by_image[gts[g].image_id].push_back(g);
  std::vector<bool> taken(gts.size(), false);

  std::vector<bool> is_tp(order.size(), false);
  for (size_t rank = 0; rank < order.size(); ++rank) {
    const Annotation& p = preds[order[rank]];
    const auto it = gts_by_image.find(p.image_id);
    if (it == gts_by_image.end()) continue;
    double best = -1.0;
    size_t best_g = 0;
    for (size_t g : it->second) {
      if (taken[g]) continue;
      const double iou = Iou(p.bbox, gts[g].bbox);
      if (iou >= iou_thr && iou > best) {
        best = iou;
        best_g = g;
      }
    }
    if (best >= 0.0) {
      taken[best_g] = true;
      is_tp[rank] = true;
      ++res.matched;
    }
  }

  if (gts.empty()) return res;

  const size_t n = order.size();
  std::vector<double> precision(n), recall(n);
  size_t tp = 0;
  for (size_t i = 0; i < n; ++i) {
    if (is_tp[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(gts.size());
  }
  // Precision envelope: best precision at this recall or beyond.
  for (size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double sum = 0.0;
  for (int k = 0; k < kRecallPoints; ++k) {
    const double r = k / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<size_t>(it - recall.begin())];
  }
  res.ap = sum / kRecallPoints;
  return res;
}

std::vector<double> EvalConfig::CocoThresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

void EvalConfig::Validate() const {
  if (iou_thresholds.empty()) throw InvalidArgument("no IoU thresholds given");
  for (size_t i = 0; i < iou_thresholds.size(); ++i) {
    const double t = iou_thresholds[i];
    if (!(t > 0.0 && t <= 1.0)) {
      throw InvalidArgument("IoU thresholds must lie in (0, 1]");
    }
    if (i > 0 && !(t > iou_thresholds[i - 1])) {
      throw InvalidArgument("IoU thresholds must be strictly ascending");
    }
  }
}

EvalReport EvaluateMap(const std::vector<Annotation>& preds, const Dataset& gt,
                       const EvalConfig& config,
                       const std::map<int64_t, Extents>* extents_by_image) {
  config.Validate();
  Dataset truth;
  if (config.regime == LabelRegime::kExpanded) {
    if (extents_by_image == nullptr) {
      throw InvalidArgument("expanded-label evaluation needs blur extents");
    }
    truth = TransformAnnotations(gt, *extents_by_image, config.clip_expanded);
  } else {
    truth = gt;
  }

  std::set<int64_t> image_ids;
  for (const ImageInfo& im : gt.images) image_ids.insert(im.id);

  std::map<int64_t, std::vector<Annotation>> preds_by_cat, gts_by_cat;
  size_t kept_preds = 0;
  for (const Annotation& p : preds) {
    if (!image_ids.contains(p.image_id)) {
      throw InvalidArgument("prediction references unknown image id " +
                            std::to_string(p.image_id));
    }
    if (p.score.value_or(0.0) < config.score_threshold) continue;
    preds_by_cat[p.category_id].push_back(p);
    ++kept_preds;
  }
  for (const Annotation& g : truth.annotations) gts_by_cat[g.category_id].push_back(g);

  EvalReport report;
  report.iou_thresholds = config.iou_thresholds;
  report.num_gts = truth.annotations.size();
  report.num_preds = kept_preds;
  report.map_at.assign(config.iou_thresholds.size(), 0.0);

  static const std::vector<Annotation> kNone;
  for (const auto& [cat, cat_gts] : gts_by_cat) {
    const auto pit = preds_by_cat.find(cat);
    const std::vector<Annotation>& cat_preds =
        pit == preds_by_cat.end() ? kNone : pit->second;
    std::vector<double> aps;
    for (size_t t = 0; t < config.iou_thresholds.size(); ++t) {
      const ClassEvalResult r =
          EvaluateClass(cat_preds, cat_gts, config.iou_thresholds[t]);
      aps.push_back(r.ap.value_or(0.0));
      if (t == 0) report.matched += r.matched;
    }
    report.per_class_ap[cat] = std::move(aps);
  }

  if (!report.per_class_ap.empty()) {
    for (size_t t = 0; t < report.map_at.size(); ++t) {
      double s = 0.0;
      for (const auto& [cat, aps] : report.per_class_ap) s += aps[t];
      report.map_at[t] = s / static_cast<double>(report.per_class_ap.size());
    }
    report.map_mean = std::accumulate(report.map_at.begin(), report.map_at.end(), 0.0) /
                      static_cast<double>(report.map_at.size());
  }
  return report;
}

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [cat, aps] : per_class_ap) per_class[std::to_string(cat)] = aps;
  return {{"iou_thresholds", iou_thresholds},
          {"map_at", map_at},
          {"map_mean", map_mean},
          {"per_class_ap", per_class},
          {"counts", {{"gts", num_gts}, {"preds", num_preds}, {"matched", matched}}}};
}

std::string EvalReport::ToCsv() const {
  std::ostringstream out;
  out << "category,iou,ap\n";
  for (const auto& [cat, aps] : per_class_ap) {
    for (size_t t = 0; t < aps.size(); ++t) {
      out << cat << ',' << FormatReal(iou_thresholds[t]) << ',' << FormatFixed(aps[t])
          << '\n';
    }
  }
  for (size_t t = 0; t < map_at.size(); ++t) {
    out << "all," << FormatReal(iou_thresholds[t]) << ',' << FormatFixed(map_at[t])
        << '\n';
  }
  return out.str();
}

std::vector<SweepCell> SweepGrid(const SweepEvalFn& eval_fn,
                                 std::span<const double> p_values,
                                 std::span<const double> e_values) {
  std::vector<SweepCell> cells;
  cells.reserve(p_values.size() * e_values.size());
  for (double p : p_values) {
    for (double e : e_values) {
      SweepCell cell{p, e, std::nullopt};
      try {
        cell.result = eval_fn(p, e);
      } catch (const std::exception&) {
        cell.result.reset();
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

std::string SweepToCsv(std::span<const SweepCell> cells) {
  std::ostringstream out;
  out << "p,e,map50,n_images\n";
  for (const SweepCell& c : cells) {
    out << FormatReal(c.p) << ',' << FormatReal(c.e) << ',';
    if (c.result) out << FormatFixed(c.result->map50) << ',' << c.result->n_images;
    else out << ',';
    out << '\n';
  }
  return out.str();
}

}  // namespace blurkit
