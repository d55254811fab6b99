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

#include "blurkit/blur_apply.h"

#include <algorithm>

#include "blurkit/error.h"
#include "blurkit/parallel.h"

namespace blurkit {

SparseKernel SparsifyKernel(const BlurKernel& kernel, double threshold) {
  if (threshold < 0.0) throw InvalidArgument("threshold must be >= 0");
  const int ax = (kernel.width() - 1) / 2;
  const int ay = (kernel.height() - 1) / 2;
  SparseKernel sk;
  sk.meta = kernel.meta;
  double total = 0.0;
  for (int y = 0; y < kernel.height(); ++y) {
    for (int x = 0; x < kernel.width(); ++x) {
      const double w = kernel.at(x, y);
      if (w > threshold) {
        sk.taps.push_back({x - ax, y - ay, w});
        total += w;
      }
    }
  }
  if (sk.taps.empty()) throw InvalidArgument("kernel has no taps above threshold");
  for (Tap& t : sk.taps) t.w /= total;
  return sk;
}

ImageBuffer ConvolveReflect(const ImageBuffer& image, const SparseKernel& kernel,
                            int jobs) {
  const int w = image.width();
  const int h = image.height();
  const int c = image.channels();
  ImageBuffer out(w, h, c);

  ParallelFor(static_cast<size_t>(h), jobs, [&](size_t y_begin, size_t y_end) {
    std::vector<double> acc(image.row_stride());
    for (size_t yy = y_begin; yy < y_end; ++yy) {
      const int y = static_cast<int>(yy);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (const Tap& tap : kernel.taps) {
        const std::span<const float> src = image.row(ReflectIndex(y - tap.dy, h));
        // Columns whose source x - dx lands inside the row need no mirroring.
        const int lo = std::clamp(tap.dx, 0, w);
        const int hi = std::clamp(w + tap.dx, 0, w);
        for (int x = 0; x < lo; ++x) {
          const float* s = &src[static_cast<size_t>(ReflectIndex(x - tap.dx, w)) * c];
          for (int k = 0; k < c; ++k) acc[static_cast<size_t>(x) * c + k] += tap.w * s[k];
        }
        if (lo < hi) {
          const float* s = src.data() + static_cast<ptrdiff_t>(lo - tap.dx) * c;
          double* a = acc.data() + static_cast<ptrdiff_t>(lo) * c;
          const size_t n = static_cast<size_t>(hi - lo) * c;
          for (size_t i = 0; i < n; ++i) a[i] += tap.w * s[i];
        }
        for (int x = std::max(hi, lo); x < w; ++x) {
          const float* s = &src[static_cast<size_t>(ReflectIndex(x - tap.dx, w)) * c];
          for (int k = 0; k < c; ++k) acc[static_cast<size_t>(x) * c + k] += tap.w * s[k];
        }
      }
      std::span<float> dst = out.mutable_row(y);
      for (size_t i = 0; i < acc.size(); ++i) dst[i] = static_cast<float>(acc[i]);
    }
  });
  return out;
}

ImageBuffer ConvolveDenseOracle(const ImageBuffer& image,
                                const BlurKernel& kernel) {
  const int ax = (kernel.width() - 1) / 2;
  const int ay = (kernel.height() - 1) / 2;
  ImageBuffer out(image.width(), image.height(), image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int ch = 0; ch < image.channels(); ++ch) {
        double sum = 0.0;
        for (int ky = 0; ky < kernel.height(); ++ky) {
          for (int kx = 0; kx < kernel.width(); ++kx) {
            const int sx = ReflectIndex(x - (kx - ax), image.width());
            const int sy = ReflectIndex(y - (ky - ay), image.height());
            sum += kernel.at(kx, ky) * image.at(sx, sy, ch);
          }
        }
        out.at(x, y, ch) = static_cast<float>(sum);
      }
    }
  }
  return out;
}

}  // namespace blurkit
