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

#include "blurkit/kernel_gen.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "blurkit/error.h"
#include "blurkit/random.h"

namespace blurkit {

namespace {

constexpr int kMaxContainmentReseeds = 8;

// Bilinear deposit of `mass` at continuous (x, y). Returns the mass that
// fell outside the grid.
double Splat(BlurKernel& k, double x, double y, double mass) {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double fx = x - fx0;
  const double fy = y - fy0;
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy,
                       fx * fy};
  const int dx[4] = {0, 1, 0, 1};
  const int dy[4] = {0, 0, 1, 1};
  double lost = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (w[i] == 0.0) continue;
    const int px = x0 + dx[i];
    const int py = y0 + dy[i];
    if (px < 0 || py < 0 || px >= k.width() || py >= k.height()) {
      lost += mass * w[i];
      continue;
    }
    k.at(px, py) += mass * w[i];
  }
  return lost;
}

struct Bounds {
  double min_x, max_x, min_y, max_y;
};

Bounds BoundsOf(const std::vector<Point2>& pts) {
  Bounds b{pts[0].x, pts[0].x, pts[0].y, pts[0].y};
  for (const Point2& p : pts) {
    b.min_x = std::min(b.min_x, p.x);
    b.max_x = std::max(b.max_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

// Integrates one candidate path starting at the origin. Returns false if a
// non-finite value appeared.
bool IntegratePath(const TrajectoryParams& params, uint64_t stream_seed,
                   Trajectory& out) {
  Rng rng(stream_seed);
  const DrawRanges& r = params.ranges;
  const int n = params.n_steps;
  const double anxiety = params.Anxiety();
  const double step_length = r.path_length / n;

  out.drawn.inertia = rng.Uniform(0.0, r.inertia_max);
  out.drawn.sigma = rng.Uniform(r.sigma_min, r.sigma_max) * step_length;
  out.drawn.jerk = rng.Uniform(0.0, r.jerk_max);

  const double heading = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  Point2 v{step_length * std::cos(heading), step_length * std::sin(heading)};
  out.v0 = v;

  Point2 x{0.0, 0.0};
  out.samples.assign(static_cast<size_t>(n), Point2{});
  out.samples[0] = x;
  for (int t = 1; t < n; ++t) {
    // Random acceleration with an inertial pull back toward the start.
    const double gx = rng.Normal() * out.drawn.sigma;
    const double gy = rng.Normal() * out.drawn.sigma;
    double dvx = anxiety * (gx - out.drawn.inertia * x.x);
    double dvy = anxiety * (gy - out.drawn.inertia * x.y);
    // Jerk: a kick of twice the current speed in a random direction.
    if (rng.Bernoulli(out.drawn.jerk)) {
      const double a = rng.Uniform(0.0, 2.0 * std::numbers::pi);
      const double speed = std::hypot(v.x, v.y);
      dvx += 2.0 * anxiety * speed * std::cos(a);
      dvy += 2.0 * anxiety * speed * std::sin(a);
    }
    v.x += dvx;
    v.y += dvy;
    x.x += v.x;
    x.y += v.y;
    if (!std::isfinite(x.x) || !std::isfinite(x.y)) return false;
    out.samples[static_cast<size_t>(t)] = x;
  }
  return true;
}

}  // namespace

PClass PClassFromIndex(int index) {
  if (index < 0 || index >= kNumPClasses) {
    throw InvalidArgument("P class index out of range: " +
                          std::to_string(index));
  }
  return static_cast<PClass>(index);
}

EClass EClassFromIndex(int index) {
  if (index < 0 || index >= kNumEClasses) {
    throw InvalidArgument("E class index out of range: " +
                          std::to_string(index));
  }
  return static_cast<EClass>(index);
}

std::string ToString(PClass p) { return "P" + std::to_string(Index(p) + 1); }
std::string ToString(EClass e) { return "E" + std::to_string(Index(e) + 1); }

void TrajectoryParams::Validate() const {
  if (n_steps < 2) throw InvalidArgument("trajectory needs n_steps >= 2");
  if (support < 3) throw InvalidArgument("kernel support must be >= 3");
  const double a = Anxiety();
  if (!std::isfinite(a) || a < 0.0) {
    throw InvalidArgument("anxiety must be finite and nonnegative");
  }
  if (!(ranges.path_length > 0.0) || ranges.inertia_max < 0.0 ||
      ranges.sigma_min < 0.0 || ranges.sigma_max < ranges.sigma_min ||
      ranges.jerk_max < 0.0 || ranges.jerk_max > 1.0) {
    throw InvalidArgument("invalid trajectory draw ranges");
  }
}

BlurKernel::BlurKernel(int width, int height)
    : width_(width),
      height_(height),
      weights_(static_cast<size_t>(width) * height, 0.0) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("kernel dimensions must be positive");
  }
}

BlurKernel::BlurKernel(int width, int height, std::vector<double> weights)
    : width_(width), height_(height), weights_(std::move(weights)) {
  if (width < 1 || height < 1 ||
      weights_.size() != static_cast<size_t>(width) * height) {
    throw InvalidArgument("kernel weights do not match dimensions");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("kernel weights must be finite and nonnegative");
    }
  }
}

double BlurKernel::Sum() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

Point2 BlurKernel::Barycenter() const {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const double w = at(x, y);
      sw += w;
      sx += w * x;
      sy += w * y;
    }
  }
  if (sw <= 0.0) throw InvalidArgument("barycenter of an all-zero kernel");
  return {sx / sw, sy / sw};
}

void BlurKernel::Normalize() {
  const double s = Sum();
  if (s <= 0.0) throw InvalidArgument("cannot normalize an all-zero kernel");
  for (double& w : weights_) w /= s;
}

Trajectory SampleTrajectory(const TrajectoryParams& params, uint64_t seed) {
  params.Validate();
  const double center = (params.support - 1) / 2.0;
  // Bilinear splatting touches floor(x) + 1, so keep one pixel of slack on
  // each side.
  const double limit = params.support - 3.0;

  Trajectory traj;
  for (int attempt = 0; attempt <= kMaxContainmentReseeds; ++attempt) {
    const uint64_t stream =
        attempt == 0 ? seed : DeriveSeed({seed, static_cast<uint64_t>(attempt)});
    traj = Trajectory{};
    if (!IntegratePath(params, stream, traj)) {
      std::ostringstream msg;
      msg << "trajectory generation failed: non-finite position (seed "
          << seed << ", attempt " << attempt << ")";
      throw Error(msg.str());
    }
    traj.seed = seed;
    traj.reseeds = attempt;
    const Bounds b = BoundsOf(traj.samples);
    const double extent = std::max(b.max_x - b.min_x, b.max_y - b.min_y);
    const bool fits = extent <= limit;
    if (fits || attempt == kMaxContainmentReseeds) {
      const double mid_x = 0.5 * (b.min_x + b.max_x);
      const double mid_y = 0.5 * (b.min_y + b.max_y);
      const double scale = fits ? 1.0 : limit / extent;
      traj.scale = scale;
      for (Point2& p : traj.samples) {
        p.x = center + (p.x - mid_x) * scale;
        p.y = center + (p.y - mid_y) * scale;
      }
      break;
    }
  }
  return traj;
}

int ExposureSampleCount(double exposure_fraction, int n_steps) {
  if (!(exposure_fraction > 0.0) || exposure_fraction > 1.0) {
    throw InvalidArgument("exposure fraction must lie in (0, 1]");
  }
  const long count = std::lround(exposure_fraction * n_steps);
  return static_cast<int>(std::clamp<long>(count, 1, n_steps));
}

BlurKernel RasterizeKernel(const Trajectory& trajectory,
                           double exposure_fraction, int support) {
  if (trajectory.samples.empty()) {
    throw InvalidArgument("cannot rasterize an empty trajectory");
  }
  if (support < 3) throw InvalidArgument("kernel support must be >= 3");
  const int n = static_cast<int>(trajectory.samples.size());
  const int used = ExposureSampleCount(exposure_fraction, n);

  BlurKernel k(support, support);
  const double mass = 1.0 / used;
  for (int i = 0; i < used; ++i) {
    const Point2& p = trajectory.samples[static_cast<size_t>(i)];
    if (Splat(k, p.x, p.y, mass) > 0.0) {
      throw Error("internal error: trajectory sample outside kernel support");
    }
  }
  k.Normalize();
  k.meta.seed = trajectory.seed;
  k.meta.centered = false;
  k.meta.barycenter = k.Barycenter();
  k.meta.extents = KernelExtents(k);
  return k;
}

BlurKernel RasterizeKernel(const Trajectory& trajectory, EClass e_class,
                           int support) {
  BlurKernel k = RasterizeKernel(trajectory, ExposureOf(e_class), support);
  k.meta.e_class = e_class;
  return k;
}

BlurKernel CenterKernel(const BlurKernel& kernel) {
  const Point2 target = kernel.Center();
  const Point2 start = kernel.Barycenter();
  if (std::abs(target.x - start.x) > kernel.width() / 4.0 ||
      std::abs(target.y - start.y) > kernel.height() / 4.0) {
    std::ostringstream msg;
    msg << "kernel barycenter (" << start.x << ", " << start.y
        << ") is too far from the center to shift";
    throw InvalidArgument(msg.str());
  }

  BlurKernel current = kernel;
  // A single bilinear shift is exact unless mass is clipped at the border;
  // a few extra passes correct the residual in that case.
  for (int pass = 0; pass < 4; ++pass) {
    const Point2 b = current.Barycenter();
    const double sx = target.x - b.x;
    const double sy = target.y - b.y;
    if (pass > 0 && std::abs(sx) < 1e-9 && std::abs(sy) < 1e-9) break;
    BlurKernel shifted(current.width(), current.height());
    double lost = 0.0;
    for (int y = 0; y < current.height(); ++y) {
      for (int x = 0; x < current.width(); ++x) {
        const double w = current.at(x, y);
        if (w == 0.0) continue;
        lost += Splat(shifted, x + sx, y + sy, w);
      }
    }
    shifted.Normalize();
    current = std::move(shifted);
    if (lost == 0.0) break;
  }

  current.meta = kernel.meta;
  current.meta.centered = true;
  current.meta.barycenter = current.Barycenter();
  current.meta.extents = KernelExtents(current);
  return current;
}

Extents KernelExtents(const BlurKernel& kernel, double threshold) {
  if (threshold < 0.0) throw InvalidArgument("threshold must be >= 0");
  const Point2 c = kernel.Center();
  bool any = false;
  double min_dx = 0.0, max_dx = 0.0, min_dy = 0.0, max_dy = 0.0;
  for (int y = 0; y < kernel.height(); ++y) {
    for (int x = 0; x < kernel.width(); ++x) {
      if (!(kernel.at(x, y) > threshold)) continue;
      const double dx = x - c.x;
      const double dy = y - c.y;
      if (!any) {
        min_dx = max_dx = dx;
        min_dy = max_dy = dy;
        any = true;
      } else {
        min_dx = std::min(min_dx, dx);
        max_dx = std::max(max_dx, dx);
        min_dy = std::min(min_dy, dy);
        max_dy = std::max(max_dy, dy);
      }
    }
  }
  if (!any) throw InvalidArgument("kernel has no taps above threshold");
  Extents e;
  e.x_minus = std::min(0, static_cast<int>(std::floor(min_dx)));
  e.x_plus = std::max(0, static_cast<int>(std::ceil(max_dx)));
  e.y_minus = std::min(0, static_cast<int>(std::floor(min_dy)));
  e.y_plus = std::max(0, static_cast<int>(std::ceil(max_dy)));
  return e;
}

BlurKernel DefocusKernel(const BlurKernel& kernel, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("defocus sigma must be finite and >= 0");
  }
  if (sigma == 0.0) return kernel;

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<size_t>(2 * radius + 1));
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double g = std::exp(-(i * i) / (2.0 * sigma * sigma));
    taps[static_cast<size_t>(i + radius)] = g;
    total += g;
  }
  for (double& t : taps) t /= total;

  const int w = kernel.width();
  const int h = kernel.height();
  // Separable pass, zero outside the support.
  BlurKernel rows(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int sx = x - i;
        if (sx < 0 || sx >= w) continue;
        acc += taps[static_cast<size_t>(i + radius)] * kernel.at(sx, y);
      }
      rows.at(x, y) = acc;
    }
  }
  BlurKernel out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int sy = y - i;
        if (sy < 0 || sy >= h) continue;
        acc += taps[static_cast<size_t>(i + radius)] * rows.at(x, sy);
      }
      out.at(x, y) = acc;
    }
  }
  out.Normalize();
  out.meta = kernel.meta;
  out.meta.barycenter = out.Barycenter();
  out.meta.extents = KernelExtents(out);
  return out;
}

BlurKernel GenerateCenteredKernel(const TrajectoryParams& params,
                                  double exposure_fraction, uint64_t seed) {
  const Trajectory traj = SampleTrajectory(params, seed);
  BlurKernel k = CenterKernel(
      RasterizeKernel(traj, exposure_fraction, params.support));
  if (!params.anxiety_override) k.meta.p_class = params.p_class;
  return k;
}

BlurKernel GenerateCenteredKernel(PClass p, EClass e, uint64_t seed) {
  TrajectoryParams params;
  params.p_class = p;
  BlurKernel k = GenerateCenteredKernel(params, ExposureOf(e), seed);
  k.meta.e_class = e;
  return k;
}

}  // namespace blurkit
