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

#include "blurkit/labels_coco.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "blurkit/error.h"

namespace blurkit {

namespace {

using nlohmann::json;

BoundingBox BoxFromJson(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError("bbox must be an array [x, y, w, h]");
  }
  BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                j[3].get<double>()};
  if (!(b.w > 0.0) || !(b.h > 0.0)) {
    throw ParseError("bbox width and height must be positive");
  }
  return b;
}

json BoxToJson(const BoundingBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

Annotation AnnotationFromJson(const json& a) {
  Annotation ann;
  if (a.contains("id")) ann.id = a.at("id").get<int64_t>();
  ann.image_id = a.at("image_id").get<int64_t>();
  ann.category_id = a.at("category_id").get<int64_t>();
  if (ann.image_id < 0 || ann.category_id < 0) {
    throw ParseError("annotation ids must be nonnegative");
  }
  ann.bbox = BoxFromJson(a.at("bbox"));
  if (a.contains("score")) ann.score = a.at("score").get<double>();
  return ann;
}

json AnnotationToJson(const Annotation& a) {
  json j;
  if (a.id) j["id"] = *a.id;
  j["image_id"] = a.image_id;
  j["category_id"] = a.category_id;
  j["bbox"] = BoxToJson(a.bbox);
  if (a.score) j["score"] = *a.score;
  return j;
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("failed to open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << "\n";
  if (!out) throw Error("failed to write " + path.string());
}

}  // namespace

const ImageInfo* Dataset::FindImage(int64_t id) const {
  for (const ImageInfo& im : images) {
    if (im.id == id) return &im;
  }
  return nullptr;
}

Dataset DatasetFromJson(const json& j) {
  Dataset ds;
  try {
    for (const json& im : j.at("images")) {
      ImageInfo info;
      info.id = im.at("id").get<int64_t>();
      info.file_name = im.value("file_name", "");
      info.width = im.value("width", 0);
      info.height = im.value("height", 0);
      if (info.id < 0) throw ParseError("image ids must be nonnegative");
      ds.images.push_back(std::move(info));
    }
    for (const json& c : j.at("categories")) {
      ds.categories.push_back(
          {c.at("id").get<int64_t>(), c.value("name", "")});
    }
    for (const json& a : j.at("annotations")) {
      ds.annotations.push_back(AnnotationFromJson(a));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid annotation file: ") + e.what());
  }

  std::set<int64_t> image_ids, category_ids;
  for (const ImageInfo& im : ds.images) {
    if (!image_ids.insert(im.id).second) {
      throw ParseError("duplicate image id " + std::to_string(im.id));
    }
  }
  for (const Category& c : ds.categories) category_ids.insert(c.id);
  for (const Annotation& a : ds.annotations) {
    if (!image_ids.contains(a.image_id)) {
      throw ParseError("annotation references missing image id " +
                       std::to_string(a.image_id));
    }
    if (!category_ids.contains(a.category_id)) {
      throw ParseError("annotation references missing category id " +
                       std::to_string(a.category_id));
    }
  }
  return ds;
}

json DatasetToJson(const Dataset& ds) {
  json images = json::array();
  for (const ImageInfo& im : ds.images) {
    images.push_back({{"id", im.id},
                      {"file_name", im.file_name},
                      {"width", im.width},
                      {"height", im.height}});
  }
  json anns = json::array();
  for (const Annotation& a : ds.annotations) anns.push_back(AnnotationToJson(a));
  json cats = json::array();
  for (const Category& c : ds.categories) {
    cats.push_back({{"id", c.id}, {"name", c.name}});
  }
  return {{"images", images}, {"annotations", anns}, {"categories", cats}};
}

Dataset LoadAnnotations(const std::filesystem::path& path) {
  return DatasetFromJson(ReadJsonFile(path));
}

void SaveAnnotations(const Dataset& ds, const std::filesystem::path& path) {
  WriteJsonFile(DatasetToJson(ds), path);
}

std::vector<Annotation> PredictionsFromJson(const json& j) {
  if (!j.is_array()) throw ParseError("predictions must be a JSON array");
  std::vector<Annotation> preds;
  preds.reserve(j.size());
  try {
    for (const json& p : j) {
      Annotation a = AnnotationFromJson(p);
      if (!a.score) throw ParseError("prediction is missing a score");
      preds.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid predictions: ") + e.what());
  }
  return preds;
}

json PredictionsToJson(const std::vector<Annotation>& preds) {
  json out = json::array();
  for (const Annotation& a : preds) out.push_back(AnnotationToJson(a));
  return out;
}

std::vector<Annotation> LoadPredictions(const std::filesystem::path& path) {
  return PredictionsFromJson(ReadJsonFile(path));
}

void SavePredictions(const std::vector<Annotation>& preds,
                     const std::filesystem::path& path) {
  WriteJsonFile(PredictionsToJson(preds), path);
}

std::optional<BoundingBox> ClipBox(const BoundingBox& b, int width, int height) {
  const double x0 = std::max(b.x, 0.0);
  const double y0 = std::max(b.y, 0.0);
  const double x1 = std::min(b.x + b.w, static_cast<double>(width));
  const double y1 = std::min(b.y + b.h, static_cast<double>(height));
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  return BoundingBox{x0, y0, x1 - x0, y1 - y0};
}

Dataset TransformAnnotations(const Dataset& ds,
                             const std::map<int64_t, Extents>& extents_by_image,
                             bool clip) {
  Dataset out;
  out.images = ds.images;
  out.categories = ds.categories;
  out.annotations.reserve(ds.annotations.size());
  for (const Annotation& a : ds.annotations) {
    const auto it = extents_by_image.find(a.image_id);
    if (it == extents_by_image.end()) {
      throw InvalidArgument("no blur extents for image id " +
                            std::to_string(a.image_id));
    }
    Annotation expanded = a;
    expanded.bbox = ExpandBox(a.bbox, it->second);
    if (clip) {
      const ImageInfo* im = ds.FindImage(a.image_id);
      if (im == nullptr || im->width <= 0 || im->height <= 0) {
        throw InvalidArgument("clipping needs image dimensions for image id " +
                              std::to_string(a.image_id));
      }
      const auto clipped = ClipBox(expanded.bbox, im->width, im->height);
      if (!clipped) continue;
      expanded.bbox = *clipped;
    }
    out.annotations.push_back(std::move(expanded));
  }
  return out;
}

}  // namespace blurkit
