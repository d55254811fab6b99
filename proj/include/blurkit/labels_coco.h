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

// COCO-subset detection annotations and blur-consistent box expansion.

#ifndef BLURKIT_LABELS_COCO_H_
#define BLURKIT_LABELS_COCO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "blurkit/kernel_gen.h"

namespace blurkit {

// Top-left corner plus width/height, in pixels.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const BoundingBox&) const = default;
};

struct Annotation {
  std::optional<int64_t> id;
  int64_t image_id = 0;
  int64_t category_id = 0;
  BoundingBox bbox;
  std::optional<double> score;

  bool operator==(const Annotation&) const = default;
};

struct ImageInfo {
  int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;

  bool operator==(const ImageInfo&) const = default;
};

struct Category {
  int64_t id = 0;
  std::string name;

  bool operator==(const Category&) const = default;
};

struct Dataset {
  std::vector<ImageInfo> images;
  std::vector<Annotation> annotations;
  std::vector<Category> categories;

  bool operator==(const Dataset&) const = default;

  const ImageInfo* FindImage(int64_t id) const;
};

// Parses the `images`, `annotations` and `categories` arrays. Throws
// ParseError on malformed JSON, non-positive box sizes or annotations
// whose image/category ids do not resolve.
Dataset DatasetFromJson(const nlohmann::json& j);
nlohmann::json DatasetToJson(const Dataset& ds);

Dataset LoadAnnotations(const std::filesystem::path& path);
void SaveAnnotations(const Dataset& ds, const std::filesystem::path& path);

// COCO results format: [{image_id, category_id, bbox, score}, ...].
std::vector<Annotation> PredictionsFromJson(const nlohmann::json& j);
nlohmann::json PredictionsToJson(const std::vector<Annotation>& preds);
std::vector<Annotation> LoadPredictions(const std::filesystem::path& path);
void SavePredictions(const std::vector<Annotation>& preds,
                     const std::filesystem::path& path);

// Grows the box by the kernel's reach on each side.
constexpr BoundingBox ExpandBox(const BoundingBox& b, const Extents& e) {
  const double left = e.x_minus < 0 ? -e.x_minus : e.x_minus;
  const double right = e.x_plus < 0 ? -e.x_plus : e.x_plus;
  const double top = e.y_minus < 0 ? -e.y_minus : e.y_minus;
  const double bottom = e.y_plus < 0 ? -e.y_plus : e.y_plus;
  return {b.x - left, b.y - top, b.w + left + right, b.h + top + bottom};
}

// Intersection with [0, width) x [0, height); nullopt if empty.
std::optional<BoundingBox> ClipBox(const BoundingBox& b, int width, int height);

// Expands every box with its image's extents. With `clip`, boxes are cut
// to the image rectangle and dropped if nothing remains. Throws
// InvalidArgument if an annotated image has no extents.
Dataset TransformAnnotations(const Dataset& ds,
                             const std::map<int64_t, Extents>& extents_by_image,
                             bool clip = false);

}  // namespace blurkit

#endif  // BLURKIT_LABELS_COCO_H_
