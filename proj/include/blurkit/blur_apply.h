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

// Applying blur kernels to images.
//
// Orientation: true convolution. A tap at offset (dx, dy) with weight w
// contributes w * in(x - dx, y - dy) to out(x, y), so content moves by
// (+dx, +dy). Offsets are measured from the kernel anchor
// ((W - 1) / 2, (H - 1) / 2) in integer division; for even sizes that is
// the upper-left of the four central pixels.
//
// Borders use mirror reflection without repeating the edge sample
// (... 2 1 0 1 2 ...), applied repeatedly for offsets deeper than the
// image.

#ifndef BLURKIT_BLUR_APPLY_H_
#define BLURKIT_BLUR_APPLY_H_

#include <vector>

#include "blurkit/image.h"
#include "blurkit/kernel_gen.h"

namespace blurkit {

struct Tap {
  int dx = 0;
  int dy = 0;
  double w = 0.0;
};

struct SparseKernel {
  std::vector<Tap> taps;  // row-major scan order of the source grid
  KernelMeta meta;
};

// Mirror index into [0, n). Periodic with period 2(n - 1); n == 1 maps to 0.
constexpr int ReflectIndex(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

// Keeps taps with weight > threshold and renormalizes them to unit sum.
// Throws InvalidArgument if no tap survives.
SparseKernel SparsifyKernel(const BlurKernel& kernel,
                            double threshold = kDefaultTapThreshold);

// Sparse direct convolution, row-partitioned over `jobs` threads. Output is
// independent of `jobs`.
ImageBuffer ConvolveReflect(const ImageBuffer& image, const SparseKernel& kernel,
                            int jobs = 1);

// Naive reference over every grid entry (including zeros). Small inputs
// only.
ImageBuffer ConvolveDenseOracle(const ImageBuffer& image,
                                const BlurKernel& kernel);

}  // namespace blurkit

#endif  // BLURKIT_BLUR_APPLY_H_
