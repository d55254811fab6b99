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

#include "blurkit/squint.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blurkit/error.h"

namespace blurkit {

double AxisSpreads::Eccentricity() const {
  if (sigma_minor <= 0.0) {
    return sigma_major > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return sigma_major / sigma_minor;
}

AxisSpreads KernelSpreads(const BlurKernel& kernel) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (int y = 0; y < kernel.height(); ++y) {
    for (int x = 0; x < kernel.width(); ++x) {
      const double w = kernel.at(x, y);
      sw += w;
      sx += w * x;
      sy += w * y;
    }
  }
  if (sw <= 0.0) throw InvalidArgument("spreads of an all-zero kernel");

  AxisSpreads s;
  s.mean_x = sx / sw;
  s.mean_y = sy / sw;
  // Second pass on centered coordinates.
  double cxx = 0.0, cxy = 0.0, cyy = 0.0;
  for (int y = 0; y < kernel.height(); ++y) {
    const double dy = y - s.mean_y;
    for (int x = 0; x < kernel.width(); ++x) {
      const double w = kernel.at(x, y);
      if (w == 0.0) continue;
      const double dx = x - s.mean_x;
      cxx += w * dx * dx;
      cxy += w * dx * dy;
      cyy += w * dy * dy;
    }
  }
  s.cov_xx = cxx / sw;
  s.cov_xy = cxy / sw;
  s.cov_yy = cyy / sw;
  s.s_x = std::sqrt(s.cov_xx);
  s.s_y = std::sqrt(s.cov_yy);

  // Closed-form eigen-decomposition of the symmetric 2x2 covariance.
  const double half_trace = 0.5 * (s.cov_xx + s.cov_yy);
  const double half_diff = 0.5 * (s.cov_xx - s.cov_yy);
  const double radius = std::hypot(half_diff, s.cov_xy);
  s.sigma_major = std::sqrt(std::max(0.0, half_trace + radius));
  s.sigma_minor = std::sqrt(std::max(0.0, half_trace - radius));
  s.theta = 0.5 * std::atan2(2.0 * s.cov_xy, s.cov_xx - s.cov_yy);
  return s;
}

SquintFactors ComputeSquintFactors(const AxisSpreads& spreads) {
  if (!(spreads.s_x >= 0.0) || !(spreads.s_y >= 0.0)) {
    throw InvalidArgument("axis spreads must be nonnegative");
  }
  const double ax = spreads.s_x + kSquintEpsilon;
  const double ay = spreads.s_y + kSquintEpsilon;
  SquintFactors f;
  f.f_x = std::clamp(std::sqrt(ay / ax), kSquintMinFactor, 1.0);
  f.f_y = std::clamp(std::sqrt(ax / ay), kSquintMinFactor, 1.0);
  const double top = std::max(f.f_x, f.f_y);
  f.f_x /= top;
  f.f_y /= top;
  return f;
}

ImageBuffer ResizeBilinear(const ImageBuffer& grid, int width, int height) {
  if (width < 1 || height < 1) throw InvalidArgument("resize target is empty");
  if (width == grid.width() && height == grid.height()) return grid;

  const int c = grid.channels();
  ImageBuffer out(width, height, c);
  const double scale_x = static_cast<double>(grid.width()) / width;
  const double scale_y = static_cast<double>(grid.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double src_y = std::clamp((y + 0.5) * scale_y - 0.5, 0.0,
                                    static_cast<double>(grid.height() - 1));
    const int y0 = static_cast<int>(src_y);
    const int y1 = std::min(y0 + 1, grid.height() - 1);
    const double fy = src_y - y0;
    for (int x = 0; x < width; ++x) {
      const double src_x = std::clamp((x + 0.5) * scale_x - 0.5, 0.0,
                                      static_cast<double>(grid.width() - 1));
      const int x0 = static_cast<int>(src_x);
      const int x1 = std::min(x0 + 1, grid.width() - 1);
      const double fx = src_x - x0;
      for (int ch = 0; ch < c; ++ch) {
        const double top = (1 - fx) * grid.at(x0, y0, ch) + fx * grid.at(x1, y0, ch);
        const double bot = (1 - fx) * grid.at(x0, y1, ch) + fx * grid.at(x1, y1, ch);
        out.at(x, y, ch) = static_cast<float>((1 - fy) * top + fy * bot);
      }
    }
  }
  return out;
}

ImageBuffer ResampleGrid(const ImageBuffer& grid, double f_x, double f_y) {
  if (!(f_x > 0.0 && f_x <= 1.0) || !(f_y > 0.0 && f_y <= 1.0)) {
    throw InvalidArgument("squint factors must lie in (0, 1]");
  }
  const int w = std::max(1, static_cast<int>(std::lround(grid.width() * f_x)));
  const int h = std::max(1, static_cast<int>(std::lround(grid.height() * f_y)));
  return ResizeBilinear(grid, w, h);
}

ImageBuffer UnsquintGrid(const ImageBuffer& grid, double f_x, double f_y,
                         int target_width, int target_height) {
  if (!(f_x > 0.0 && f_x <= 1.0) || !(f_y > 0.0 && f_y <= 1.0)) {
    throw InvalidArgument("squint factors must lie in (0, 1]");
  }
  return ResizeBilinear(grid, target_width, target_height);
}

}  // namespace blurkit
