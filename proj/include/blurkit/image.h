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

#ifndef BLURKIT_IMAGE_H_
#define BLURKIT_IMAGE_H_

#include <span>
#include <vector>

#include "blurkit/error.h"

namespace blurkit {

// Float image with interleaved channels (RGBRGB...), row-major, values
// nominally in [0, 1].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, float fill = 0.0f)
      : width_(width),
        height_(height),
        channels_(channels),
        pixels_(static_cast<size_t>(width) * height * channels, fill) {
    if (width < 1 || height < 1) {
      throw InvalidArgument("image dimensions must be positive");
    }
    if (channels != 1 && channels != 3) {
      throw InvalidArgument("images must have 1 or 3 channels");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  size_t row_stride() const { return static_cast<size_t>(width_) * channels_; }

  std::span<const float> pixels() const { return pixels_; }
  std::span<float> mutable_pixels() { return pixels_; }

  std::span<const float> row(int y) const {
    return std::span<const float>(pixels_).subspan(y * row_stride(),
                                                   row_stride());
  }
  std::span<float> mutable_row(int y) {
    return std::span<float>(pixels_).subspan(y * row_stride(), row_stride());
  }

  float at(int x, int y, int c) const {
    return pixels_[y * row_stride() + static_cast<size_t>(x) * channels_ + c];
  }
  float& at(int x, int y, int c) {
    return pixels_[y * row_stride() + static_cast<size_t>(x) * channels_ + c];
  }

  bool operator==(const ImageBuffer&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> pixels_;
};

}  // namespace blurkit

#endif  // BLURKIT_IMAGE_H_
