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

#include "blurkit/image_io.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

namespace blurkit {

namespace {

uint8_t ToByte(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<uint8_t>(std::lround(c * 255.0f));
}

std::string LowerExtension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void JpegErrorExit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

}  // namespace

ImageBuffer ReadPng(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw Error("failed to read PNG " + path.string() + ": " + png.message);
  }
  const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int channels = gray ? 1 : 3;
  std::vector<uint8_t> bytes(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, bytes.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error("failed to decode PNG " + path.string() + ": " + msg);
  }
  ImageBuffer img(static_cast<int>(png.width), static_cast<int>(png.height),
                  channels);
  std::span<float> px = img.mutable_pixels();
  for (size_t i = 0; i < px.size(); ++i) px[i] = bytes[i] / 255.0f;
  return img;
}

void WritePng(const ImageBuffer& image, const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<uint8_t> bytes(image.pixels().size());
  std::transform(image.pixels().begin(), image.pixels().end(), bytes.begin(),
                 ToByte);
  if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0,
                               nullptr)) {
    throw Error("failed to write PNG " + path.string() + ": " + png.message);
  }
}

ImageBuffer ReadJpeg(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error("failed to open " + path.string());

  // Buffers live outside the setjmp region so a longjmp skips no
  // destructors.
  std::vector<uint8_t> row;
  std::vector<float> pixels;
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error("failed to decode JPEG " + path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file.get());
  jpeg_read_header(&cinfo, TRUE);
  const bool gray = cinfo.jpeg_color_space == JCS_GRAYSCALE;
  cinfo.out_color_space = gray ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);

  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  const int channels = cinfo.output_components;
  row.resize(static_cast<size_t>(w) * channels);
  pixels.reserve(static_cast<size_t>(w) * h * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW rows[1] = {row.data()};
    jpeg_read_scanlines(&cinfo, rows, 1);
    for (uint8_t b : row) pixels.push_back(b / 255.0f);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);

  ImageBuffer img(w, h, channels);
  std::copy(pixels.begin(), pixels.end(), img.mutable_pixels().begin());
  return img;
}

void WriteJpeg(const ImageBuffer& image, const std::filesystem::path& path,
               int quality) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error("failed to open " + path.string() + " for writing");

  std::vector<uint8_t> row(image.row_stride());
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    throw Error("failed to encode JPEG " + path.string() + ": " + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, file.get());
  cinfo.image_width = static_cast<JDIMENSION>(image.width());
  cinfo.image_height = static_cast<JDIMENSION>(image.height());
  cinfo.input_components = image.channels();
  cinfo.in_color_space = image.channels() == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, std::clamp(quality, 1, 100), TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  for (int y = 0; y < image.height(); ++y) {
    const auto src = image.row(y);
    std::transform(src.begin(), src.end(), row.begin(), ToByte);
    JSAMPROW rows[1] = {row.data()};
    jpeg_write_scanlines(&cinfo, rows, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

ImageBuffer ReadImage(const std::filesystem::path& path) {
  const std::string ext = LowerExtension(path);
  if (ext == ".png") return ReadPng(path);
  if (ext == ".jpg" || ext == ".jpeg") return ReadJpeg(path);
  throw InvalidArgument("unsupported image format: " + path.string());
}

void WriteImage(const ImageBuffer& image, const std::filesystem::path& path,
                int jpeg_quality) {
  const std::string ext = LowerExtension(path);
  if (ext == ".png") return WritePng(image, path);
  if (ext == ".jpg" || ext == ".jpeg") {
    return WriteJpeg(image, path, jpeg_quality);
  }
  throw InvalidArgument("unsupported image format: " + path.string());
}

}  // namespace blurkit
