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

// Camera-shake trajectory simulation and blur kernel synthesis.
//
// A trajectory is a random 2D camera path driven by an anxiety-scaled
// acceleration with an inertial pull toward the start position and
// occasional jerks. Rasterizing a prefix of the path (the exposure) with
// bilinear splatting yields a point spread function, which is then
// recentered so its mass barycenter sits on the filter center.

#ifndef BLURKIT_KERNEL_GEN_H_
#define BLURKIT_KERNEL_GEN_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace blurkit {

enum class PClass : int { kP1 = 0, kP2 = 1, kP3 = 2 };
enum class EClass : int { kE1 = 0, kE2 = 1, kE3 = 2, kE4 = 3, kE5 = 4 };

inline constexpr int kNumPClasses = 3;
inline constexpr int kNumEClasses = 5;

// Anxiety per camera-motion class; smaller is more rectilinear.
inline constexpr std::array<double, kNumPClasses> kAnxietyValues = {
    0.005, 0.001, 0.00005};

// Fraction of the trajectory integrated for each exposure class.
inline constexpr std::array<double, kNumEClasses> kExposureFractions = {
    1.0 / 25.0, 1.0 / 10.0, 1.0 / 5.0, 1.0 / 2.0, 1.0};

inline constexpr int kDefaultTrajectorySteps = 96;
inline constexpr int kDefaultKernelSupport = 128;

// Absolute weight below which a normalized kernel tap counts as empty.
inline constexpr double kDefaultTapThreshold = 1e-8;

inline constexpr std::array<PClass, kNumPClasses> kAllPClasses = {
    PClass::kP1, PClass::kP2, PClass::kP3};
inline constexpr std::array<EClass, kNumEClasses> kAllEClasses = {
    EClass::kE1, EClass::kE2, EClass::kE3, EClass::kE4, EClass::kE5};

constexpr int Index(PClass p) { return static_cast<int>(p); }
constexpr int Index(EClass e) { return static_cast<int>(e); }
constexpr double AnxietyOf(PClass p) { return kAnxietyValues[Index(p)]; }
constexpr double ExposureOf(EClass e) { return kExposureFractions[Index(e)]; }

// 0-based index to class; throws InvalidArgument when out of range.
PClass PClassFromIndex(int index);
EClass EClassFromIndex(int index);

std::string ToString(PClass p);  // "P1".."P3"
std::string ToString(EClass e);  // "E1".."E5"

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Ranges of the per-trajectory uniform draws.
struct DrawRanges {
  double path_length = 64.0;   // nominal path length L in pixels
  double inertia_max = 0.02;   // I ~ U(0, inertia_max)
  double sigma_min = 0.25;     // sigma ~ U(sigma_min, sigma_max) * L / n
  double sigma_max = 1.0;
  double jerk_max = 0.2;       // per-step jerk probability j ~ U(0, jerk_max)
};

struct TrajectoryParams {
  PClass p_class = PClass::kP1;
  // Replaces the class anxiety, e.g. for continuous sweeps or P = 0.
  std::optional<double> anxiety_override;
  int n_steps = kDefaultTrajectorySteps;
  int support = kDefaultKernelSupport;
  DrawRanges ranges;

  double Anxiety() const {
    return anxiety_override ? *anxiety_override : AnxietyOf(p_class);
  }
  // Throws InvalidArgument on n_steps < 2, support < 3 or bad ranges.
  void Validate() const;
};

struct DrawnParams {
  double inertia = 0.0;
  double sigma = 0.0;
  double jerk = 0.0;
};

struct Trajectory {
  std::vector<Point2> samples;  // kernel-pixel coordinates
  Point2 v0;
  DrawnParams drawn;
  uint64_t seed = 0;            // requested seed
  int reseeds = 0;              // containment retries that were needed
  double scale = 1.0;           // < 1 when the path was shrunk to fit
};

// Signed integer offsets of the extreme above-threshold taps relative to
// the continuous kernel center, rounded outward.
struct Extents {
  int x_minus = 0;
  int x_plus = 0;
  int y_minus = 0;
  int y_plus = 0;

  bool operator==(const Extents&) const = default;
};

struct KernelMeta {
  std::optional<PClass> p_class;
  std::optional<EClass> e_class;
  uint64_t seed = 0;
  bool centered = false;
  Point2 barycenter;
  Extents extents;
};

// Row-major grid of nonnegative weights.
class BlurKernel {
 public:
  BlurKernel() = default;
  BlurKernel(int width, int height);
  BlurKernel(int width, int height, std::vector<double> weights);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }

  double at(int x, int y) const { return weights_[Offset(x, y)]; }
  double& at(int x, int y) { return weights_[Offset(x, y)]; }

  // Continuous center ((W-1)/2, (H-1)/2).
  Point2 Center() const {
    return {(width_ - 1) / 2.0, (height_ - 1) / 2.0};
  }
  double Sum() const;
  // Weighted mean tap position; throws InvalidArgument on an empty kernel.
  Point2 Barycenter() const;
  // Scales to unit sum; throws InvalidArgument on an empty kernel.
  void Normalize();

  KernelMeta meta;

 private:
  size_t Offset(int x, int y) const {
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> weights_;
};

Trajectory SampleTrajectory(const TrajectoryParams& params, uint64_t seed);

// Number of leading samples integrated for an exposure fraction.
int ExposureSampleCount(double exposure_fraction, int n_steps);

BlurKernel RasterizeKernel(const Trajectory& trajectory, double exposure_fraction,
                           int support);
BlurKernel RasterizeKernel(const Trajectory& trajectory, EClass e_class,
                           int support);

// Subpixel-shifts the kernel so its barycenter lands on Center(). Throws
// InvalidArgument if the required shift exceeds a quarter of the support.
BlurKernel CenterKernel(const BlurKernel& kernel);

Extents KernelExtents(const BlurKernel& kernel,
                      double threshold = kDefaultTapThreshold);

// Convolves the kernel with a truncated Gaussian (radius ceil(3 sigma)).
BlurKernel DefocusKernel(const BlurKernel& kernel, double sigma);

// Full recipe used by the corpus and dataset pipelines: sample, rasterize,
// center, then record extents in the metadata.
BlurKernel GenerateCenteredKernel(const TrajectoryParams& params,
                                  double exposure_fraction, uint64_t seed);
BlurKernel GenerateCenteredKernel(PClass p, EClass e, uint64_t seed);

}  // namespace blurkit

#endif  // BLURKIT_KERNEL_GEN_H_
