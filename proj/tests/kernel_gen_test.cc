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

#include <cmath>
#include <cstring>

#include "doctest.h"

#include "blurkit/error.h"
#include "test_util.h"

namespace blurkit {
namespace {

using testing::RandomKernel;
using testing::TrajectoryOf;

bool SameSamples(const Trajectory& a, const Trajectory& b) {
  if (a.samples.size() != b.samples.size()) return false;
  return std::memcmp(a.samples.data(), b.samples.data(),
                     a.samples.size() * sizeof(Point2)) == 0;
}

TEST_CASE("discretization constants") {
  CHECK(kAnxietyValues[0] == 0.005);
  CHECK(kAnxietyValues[1] == 0.001);
  CHECK(kAnxietyValues[2] == 0.00005);
  CHECK(kAnxietyValues[0] > kAnxietyValues[1]);
  CHECK(kAnxietyValues[1] > kAnxietyValues[2]);
  CHECK(kExposureFractions[0] == 1.0 / 25);
  CHECK(kExposureFractions[4] == 1.0);
  CHECK(kDefaultTrajectorySteps == 96);
  CHECK(kDefaultKernelSupport == 128);
  CHECK(ToString(PClass::kP3) == "P3");
  CHECK(ToString(EClass::kE1) == "E1");
  CHECK_THROWS_AS(PClassFromIndex(3), InvalidArgument);
  CHECK_THROWS_AS(EClassFromIndex(-1), InvalidArgument);
}

TEST_CASE("sample_trajectory is deterministic per seed") {
  TrajectoryParams params;
  params.p_class = PClass::kP2;
  const Trajectory a = SampleTrajectory(params, 42);
  const Trajectory b = SampleTrajectory(params, 42);
  CHECK(SameSamples(a, b));
  const Trajectory c = SampleTrajectory(params, 43);
  CHECK_FALSE(SameSamples(a, c));
}

TEST_CASE("default trajectory has 96 finite samples inside the support") {
  TrajectoryParams params;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Trajectory t = SampleTrajectory(params, seed);
    REQUIRE(t.samples.size() == 96);
    for (const Point2& p : t.samples) {
      CHECK(std::isfinite(p.x));
      CHECK(p.x >= 0.0);
      CHECK(p.x < params.support - 1);
      CHECK(p.y >= 0.0);
      CHECK(p.y < params.support - 1);
    }
  }
}

TEST_CASE("zero anxiety gives a straight constant-velocity path") {
  TrajectoryParams params;
  params.anxiety_override = 0.0;
  const Trajectory t = SampleTrajectory(params, 9);
  REQUIRE(t.scale == 1.0);
  for (size_t i = 1; i < t.samples.size(); ++i) {
    CHECK(t.samples[i].x - t.samples[i - 1].x == doctest::Approx(t.v0.x).epsilon(1e-9));
    CHECK(t.samples[i].y - t.samples[i - 1].y == doctest::Approx(t.v0.y).epsilon(1e-9));
  }
  CHECK(std::hypot(t.v0.x, t.v0.y) == doctest::Approx(64.0 / 96.0));
}

TEST_CASE("oversized paths are reseeded or rescaled to fit") {
  TrajectoryParams params;
  params.support = 16;  // a 64 px path cannot fit without shrinking
  params.anxiety_override = 0.0;
  const Trajectory t = SampleTrajectory(params, 3);
  CHECK(t.reseeds == 8);
  CHECK(t.scale < 1.0);
  for (const Point2& p : t.samples) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= params.support - 2);
    CHECK(p.y >= 0.0);
    CHECK(p.y <= params.support - 2);
  }
  // Deterministic, including the fallback.
  CHECK(SameSamples(t, SampleTrajectory(params, 3)));
}

TEST_CASE("invalid trajectory parameters") {
  TrajectoryParams params;
  params.n_steps = 1;
  CHECK_THROWS_AS(SampleTrajectory(params, 0), InvalidArgument);
  params = {};
  params.support = 2;
  CHECK_THROWS_AS(SampleTrajectory(params, 0), InvalidArgument);
  params = {};
  params.anxiety_override = -1.0;
  CHECK_THROWS_AS(SampleTrajectory(params, 0), InvalidArgument);
}

TEST_CASE("non-finite dynamics report the seed") {
  TrajectoryParams params;
  params.anxiety_override = 1e308;
  params.ranges.sigma_min = 1e300;
  params.ranges.sigma_max = 1e300;
  try {
    SampleTrajectory(params, 77);
    FAIL("expected a generation failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("seed 77") != std::string::npos);
  }
}

TEST_CASE("exposure sample counts") {
  CHECK(ExposureSampleCount(1.0 / 25, 96) == 4);
  CHECK(ExposureSampleCount(1.0 / 10, 96) == 10);
  CHECK(ExposureSampleCount(1.0 / 5, 96) == 19);
  CHECK(ExposureSampleCount(1.0 / 2, 96) == 48);
  CHECK(ExposureSampleCount(1.0, 96) == 96);
  CHECK(ExposureSampleCount(0.001, 96) == 1);
  CHECK_THROWS_AS(ExposureSampleCount(0.0, 96), InvalidArgument);
  CHECK_THROWS_AS(ExposureSampleCount(1.5, 96), InvalidArgument);
}

TEST_CASE("stationary trajectory rasterizes to a delta") {
  const Trajectory t = TrajectoryOf(std::vector<Point2>(96, Point2{40.0, 17.0}));
  const BlurKernel k = RasterizeKernel(t, EClass::kE5, 128);
  CHECK(k.at(40, 17) == 1.0);
  CHECK(k.Sum() == 1.0);
  CHECK_FALSE(k.meta.centered);
}

TEST_CASE("E1 uses exactly the first four samples") {
  std::vector<Point2> pts;
  for (int i = 0; i < 96; ++i) pts.push_back({10.0 + i, 20.0});
  const BlurKernel k = RasterizeKernel(TrajectoryOf(pts), EClass::kE1, 128);
  int taps = 0;
  for (double w : k.weights()) taps += w > 0.0 ? 1 : 0;
  CHECK(taps == 4);
  CHECK(k.at(13, 20) == doctest::Approx(0.25));
  CHECK(k.at(14, 20) == 0.0);
}

TEST_CASE("rasterized kernels are normalized") {
  for (PClass p : kAllPClasses) {
    TrajectoryParams params;
    params.p_class = p;
    const Trajectory t = SampleTrajectory(params, 5);
    for (EClass e : kAllEClasses) {
      const BlurKernel k = RasterizeKernel(t, e, 128);
      CHECK(std::abs(k.Sum() - 1.0) <= 1e-6);
      for (double w : k.weights()) CHECK(w >= 0.0);
    }
  }
}

TEST_CASE("rasterizing outside the support is an internal error") {
  const Trajectory t = TrajectoryOf({{200.0, 3.0}});
  CHECK_THROWS_AS(RasterizeKernel(t, 1.0, 128), Error);
}

TEST_CASE("exposure prefixes nest") {
  TrajectoryParams params;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const Trajectory t = SampleTrajectory(params, seed);
    for (int i = 0; i + 1 < kNumEClasses; ++i) {
      const BlurKernel a = RasterizeKernel(t, kAllEClasses[i], 128);
      const BlurKernel b = RasterizeKernel(t, kAllEClasses[i + 1], 128);
      for (size_t j = 0; j < a.weights().size(); ++j) {
        if (a.weights()[j] > 0.0) CHECK(b.weights()[j] > 0.0);
      }
    }
  }
}

TEST_CASE("centering a single off-center point") {
  const BlurKernel raw = RasterizeKernel(TrajectoryOf({{70.0, 63.5}}), 1.0, 128);
  const BlurKernel k = CenterKernel(raw);
  CHECK(k.meta.centered);
  CHECK(k.at(63, 63) == doctest::Approx(0.25));
  CHECK(k.at(64, 63) == doctest::Approx(0.25));
  CHECK(k.at(63, 64) == doctest::Approx(0.25));
  CHECK(k.at(64, 64) == doctest::Approx(0.25));
  CHECK(k.Sum() == doctest::Approx(1.0));
}

TEST_CASE("symmetric kernel is left in place by centering") {
  const BlurKernel raw =
      RasterizeKernel(TrajectoryOf({{58.5, 63.5}, {68.5, 63.5}}), 1.0, 128);
  const BlurKernel k = CenterKernel(raw);
  for (size_t i = 0; i < raw.weights().size(); ++i) {
    CHECK(k.weights()[i] == doctest::Approx(raw.weights()[i]).epsilon(1e-12));
  }
}

TEST_CASE("centered random kernels recompute to the center") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    TrajectoryParams params;
    params.p_class = kAllPClasses[seed % 3];
    const BlurKernel k = CenterKernel(
        RasterizeKernel(SampleTrajectory(params, seed), kAllEClasses[seed % 5], 128));
    // Independent barycenter recomputation.
    double sw = 0, sx = 0, sy = 0;
    for (int y = 0; y < k.height(); ++y) {
      for (int x = 0; x < k.width(); ++x) {
        sw += k.at(x, y);
        sx += k.at(x, y) * x;
        sy += k.at(x, y) * y;
      }
    }
    CHECK(std::abs(sx / sw - 63.5) <= 0.05);
    CHECK(std::abs(sy / sw - 63.5) <= 0.05);
    CHECK(std::abs(sw - 1.0) <= 1e-6);
  }
}

TEST_CASE("badly decentered kernel is rejected") {
  BlurKernel k(128, 128);
  k.at(5, 5) = 1.0;
  CHECK_THROWS_AS(CenterKernel(k), InvalidArgument);
}

TEST_CASE("extents of hand-placed taps") {
  BlurKernel delta(9, 9);
  delta.at(4, 4) = 1.0;
  CHECK(KernelExtents(delta) == Extents{0, 0, 0, 0});

  BlurKernel two(15, 15);  // center (7, 7)
  two.at(4, 7) = 0.5;
  two.at(12, 9) = 0.5;
  CHECK(KernelExtents(two) == Extents{-3, 5, 0, 2});

  // Even grid: the centered delta spans the four central pixels.
  const BlurKernel even = CenterKernel(RasterizeKernel(TrajectoryOf({{60.0, 60.0}}), 1.0, 128));
  CHECK(KernelExtents(even) == Extents{-1, 1, -1, 1});

  CHECK_THROWS_AS(KernelExtents(BlurKernel(5, 5)), InvalidArgument);
}

TEST_CASE("extents match an exhaustive tap scan") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const BlurKernel k = RandomKernel(rng, 5 + trial % 7, 4 + trial % 5, 0.2);
    const double cx = (k.width() - 1) / 2.0;
    const double cy = (k.height() - 1) / 2.0;
    int xm = 0, xp = 0, ym = 0, yp = 0;
    for (int y = 0; y < k.height(); ++y) {
      for (int x = 0; x < k.width(); ++x) {
        if (k.at(x, y) <= 1e-8) continue;
        xm = std::min(xm, static_cast<int>(std::floor(x - cx)));
        xp = std::max(xp, static_cast<int>(std::ceil(x - cx)));
        ym = std::min(ym, static_cast<int>(std::floor(y - cy)));
        yp = std::max(yp, static_cast<int>(std::ceil(y - cy)));
      }
    }
    CHECK(KernelExtents(k) == Extents{xm, xp, ym, yp});
  }
}

TEST_CASE("extents threshold excludes faint taps") {
  BlurKernel k(9, 9);
  k.at(4, 4) = 1.0;
  k.at(0, 0) = 1e-9;
  CHECK(KernelExtents(k) == Extents{0, 0, 0, 0});
  CHECK(KernelExtents(k, 0.0) == Extents{-4, 0, -4, 0});
}

TEST_CASE("defocus") {
  BlurKernel delta(15, 15);
  delta.at(7, 7) = 1.0;

  SUBCASE("sigma 0 is the identity") {
    const BlurKernel out = DefocusKernel(delta, 0.0);
    CHECK(std::equal(out.weights().begin(), out.weights().end(),
                     delta.weights().begin()));
  }
  SUBCASE("delta becomes a sampled Gaussian") {
    const BlurKernel out = DefocusKernel(delta, 1.0);
    double total = 0.0;
    for (int y = -3; y <= 3; ++y) {
      for (int x = -3; x <= 3; ++x) total += std::exp(-(x * x + y * y) / 2.0);
    }
    for (int y = 0; y < 15; ++y) {
      for (int x = 0; x < 15; ++x) {
        const int dx = x - 7, dy = y - 7;
        const double expect = (std::abs(dx) <= 3 && std::abs(dy) <= 3)
                                   ? std::exp(-(dx * dx + dy * dy) / 2.0) / total
                                   : 0.0;
        CHECK(std::abs(out.at(x, y) - expect) <= 1e-6);
      }
    }
  }
  SUBCASE("normalization and barycenter are preserved") {
    const BlurKernel k = GenerateCenteredKernel(PClass::kP1, EClass::kE3, 8);
    for (double sigma : {0.5, 1.0, 2.5}) {
      const BlurKernel out = DefocusKernel(k, sigma);
      CHECK(std::abs(out.Sum() - 1.0) <= 1e-6);
      const Point2 b = out.Barycenter();
      CHECK(std::abs(b.x - 63.5) <= 0.05);
      CHECK(std::abs(b.y - 63.5) <= 0.05);
      CHECK(out.meta.centered);
    }
  }
  CHECK_THROWS_AS(DefocusKernel(delta, -1.0), InvalidArgument);
}

TEST_CASE("generated kernels carry their metadata") {
  const BlurKernel k = GenerateCenteredKernel(PClass::kP2, EClass::kE4, 1234);
  CHECK(k.meta.p_class == PClass::kP2);
  CHECK(k.meta.e_class == EClass::kE4);
  CHECK(k.meta.seed == 1234);
  CHECK(k.meta.centered);
  CHECK(k.meta.extents == KernelExtents(k));
  CHECK(k.width() == 128);
  CHECK(k.height() == 128);
}

}  // namespace
}  // namespace blurkit
