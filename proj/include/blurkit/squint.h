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

// Kernel shape statistics and the per-axis "squint" resampling they drive.
//
// A kernel that smears mostly along one axis destroys more texture in that
// direction. Squinting undersamples the input along the blurred axis so
// the backbone sees a more isotropic texture; activations are resampled
// back with the reciprocal factors afterwards.

#ifndef BLURKIT_SQUINT_H_
#define BLURKIT_SQUINT_H_

#include "blurkit/image.h"
#include "blurkit/kernel_gen.h"

namespace blurkit {

struct AxisSpreads {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double cov_xx = 0.0;
  double cov_xy = 0.0;
  double cov_yy = 0.0;
  double s_x = 0.0;          // marginal standard deviations
  double s_y = 0.0;
  double theta = 0.0;        // major-axis angle in radians, (-pi/2, pi/2]
  double sigma_major = 0.0;  // principal standard deviations
  double sigma_minor = 0.0;

  // sigma_major / sigma_minor; infinite for a perfectly thin line.
  double Eccentricity() const;
};

// Weighted mean and covariance of tap positions. Throws InvalidArgument on
// an all-zero kernel.
AxisSpreads KernelSpreads(const BlurKernel& kernel);

struct SquintFactors {
  double f_x = 1.0;
  double f_y = 1.0;
};

inline constexpr double kSquintEpsilon = 0.5;
inline constexpr double kSquintMinFactor = 0.25;

// f_x = clamp(sqrt((s_y + eps) / (s_x + eps)), f_min, 1), symmetric for
// f_y, then both rescaled so the larger is exactly 1.
SquintFactors ComputeSquintFactors(const AxisSpreads& spreads);

// Bilinear resize to round(dim * f) (at least 1) with half-pixel centers.
ImageBuffer ResampleGrid(const ImageBuffer& grid, double f_x, double f_y);

// Bilinear resize back to the target size.
ImageBuffer UnsquintGrid(const ImageBuffer& grid, double f_x, double f_y,
                         int target_width, int target_height);

// Generic bilinear resize with half-pixel centers and edge clamping.
ImageBuffer ResizeBilinear(const ImageBuffer& grid, int width, int height);

}  // namespace blurkit

#endif  // BLURKIT_SQUINT_H_
