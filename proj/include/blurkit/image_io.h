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

// PNG and JPEG codecs. 8-bit samples map to [0, 1] floats on read and are
// rounded back on write; PNG round trips are lossless. Grayscale files load
// as one channel, everything else as RGB (alpha is dropped).

#ifndef BLURKIT_IMAGE_IO_H_
#define BLURKIT_IMAGE_IO_H_

#include <filesystem>

#include "blurkit/image.h"

namespace blurkit {

ImageBuffer ReadImage(const std::filesystem::path& path);

// Format picked from the extension (.png, .jpg, .jpeg).
void WriteImage(const ImageBuffer& image, const std::filesystem::path& path,
                int jpeg_quality = 95);

ImageBuffer ReadPng(const std::filesystem::path& path);
void WritePng(const ImageBuffer& image, const std::filesystem::path& path);
ImageBuffer ReadJpeg(const std::filesystem::path& path);
void WriteJpeg(const ImageBuffer& image, const std::filesystem::path& path,
               int quality);

}  // namespace blurkit

#endif  // BLURKIT_IMAGE_IO_H_
