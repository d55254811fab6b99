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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "blurkit/adapt_numerics.h"
#include "blurkit/blur_apply.h"
#include "blurkit/evalmap.h"
#include "blurkit/image_io.h"
#include "blurkit/kernel_gen.h"
#include "blurkit/kernel_io.h"
#include "blurkit/labels_coco.h"
#include "blurkit/pipeline.h"
#include "blurkit/squint.h"
#include "cli.h"
#include "evalmap_oracle.h"
#include "test_util.h"

namespace blurkit {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "blurkit");
  std::ostringstream out, err;
  return cli::RunCli(args, out, err);
}

std::map<std::string, std::vector<char>> BfkFiles(const fs::path& dir) {
  std::map<std::string, std::vector<char>> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".bfk") {
      files[e.path().filename().string()] = testing::ReadBytes(e.path());
    }
  }
  return files;
}

Outcome Determinism() {
  testing::TempDir tmp;
  auto gen = [&](const std::string& name, const std::string& jobs) {
    return Cli({"gen-kernels", "--count", "7", "--seed", "2024", "--jobs", jobs, "--out",
                (tmp / name).string()});
  };
  const auto start = Clock::now();
  if (gen("a", "1") != 0) return {false, "gen-kernels failed"};
  const double secs = Seconds(start);
  if (gen("b", "1") != 0 || gen("c", "8") != 0) return {false, "gen-kernels failed"};
  const auto a = BfkFiles(tmp / "a");
  const bool same = a == BfkFiles(tmp / "b") && a == BfkFiles(tmp / "c");
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu kernels, identical=%s, %.2f s", a.size(),
                same ? "yes" : "no", secs);
  return {same && a.size() == 105 && secs < 10.0, buf};
}

Outcome Constants() {
  const bool p = kAnxietyValues == std::array<double, 3>{0.005, 0.001, 0.00005};
  const bool e =
      kExposureFractions == std::array<double, 5>{1.0 / 25, 1.0 / 10, 1.0 / 5, 1.0 / 2, 1.0};
  const TrajectoryParams params;
  const bool defaults = params.n_steps == 96 && params.support == 128;
  const BlurKernel k = GenerateCenteredKernel(PClass::kP1, EClass::kE5, 1);
  const bool support = k.width() == 128 && k.height() == 128;
  testing::TempDir tmp;
  const int code = Cli({"gen-kernels", "--count", "2", "--out", (tmp / "k").string()});
  const size_t files = BfkFiles(tmp / "k").size();
  std::string detail = "bfk files at count 2: " + std::to_string(files);
  return {p && e && defaults && support && code == 0 && files == 30, detail};
}

Outcome Normalization() {
  int failures = 0;
  double worst_sum = 0.0, worst_bary = 0.0;
  for (int i = 0; i < 500; ++i) {
    const PClass p = kAllPClasses[i % 3];
    const EClass e = kAllEClasses[(i / 3) % 5];
    const BlurKernel k = GenerateCenteredKernel(p, e, DeriveSeed({77, static_cast<uint64_t>(i)}));
    double sum = 0.0, sx = 0.0, sy = 0.0;
    for (int y = 0; y < k.height(); ++y) {
      for (int x = 0; x < k.width(); ++x) {
        sum += k.at(x, y);
        sx += k.at(x, y) * x;
        sy += k.at(x, y) * y;
      }
    }
    const double ds = std::abs(sum - 1.0);
    const double db = std::hypot(sx / sum - (k.width() - 1) / 2.0, sy / sum - (k.height() - 1) / 2.0);
    worst_sum = std::max(worst_sum, ds);
    worst_bary = std::max(worst_bary, db);
    if (ds > 1e-6 || db > 0.05) ++failures;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "500 kernels, max |sum-1|=%.2e, max barycenter offset=%.2e px",
                worst_sum, worst_bary);
  return {failures == 0, buf};
}

struct Box {
  int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
};

Box SupportBox(const BlurKernel& k) {
  Box b;
  for (int y = 0; y < k.height(); ++y) {
    for (int x = 0; x < k.width(); ++x) {
      if (k.at(x, y) > 0.0) {
        b.x0 = std::min(b.x0, x);
        b.y0 = std::min(b.y0, y);
        b.x1 = std::max(b.x1, x);
        b.y1 = std::max(b.y1, y);
      }
    }
  }
  return b;
}

Outcome PrefixMonotonicity() {
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    TrajectoryParams params;
    params.p_class = kAllPClasses[i % 3];
    const Trajectory t = SampleTrajectory(params, DeriveSeed({31, static_cast<uint64_t>(i)}));
    std::vector<Box> boxes;
    for (EClass e : kAllEClasses) boxes.push_back(SupportBox(RasterizeKernel(t, e, params.support)));
    for (size_t a = 0; a < boxes.size(); ++a) {
      for (size_t b = a + 1; b < boxes.size(); ++b) {
        const bool inside = boxes[b].x0 <= boxes[a].x0 && boxes[b].y0 <= boxes[a].y0 &&
                            boxes[b].x1 >= boxes[a].x1 && boxes[b].y1 >= boxes[a].y1;
        if (!inside) ++failures;
      }
    }
  }
  return {failures == 0, "100 trajectories, violations=" + std::to_string(failures)};
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome Anisotropy() {
  std::vector<double> p1, p3;
  for (uint64_t s = 0; s < 200; ++s) {
    p1.push_back(KernelSpreads(GenerateCenteredKernel(PClass::kP1, EClass::kE5, s)).Eccentricity());
    p3.push_back(KernelSpreads(GenerateCenteredKernel(PClass::kP3, EClass::kE5, s)).Eccentricity());
  }
  const double m1 = Median(p1), m3 = Median(p3);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "median eccentricity P1=%.2f P3=%.2f", m1, m3);
  return {m3 > m1, buf};
}

float MaxAbsDiff(const ImageBuffer& a, const ImageBuffer& b) {
  float worst = 0.0f;
  for (size_t i = 0; i < a.pixels().size(); ++i) {
    worst = std::max(worst, std::abs(a.pixels()[i] - b.pixels()[i]));
  }
  return worst;
}

Outcome ConvolutionOracle() {
  Rng rng(55);
  float worst = 0.0f;
  for (int i = 0; i < 100; ++i) {
    const ImageBuffer img = testing::RandomImage(rng, 1 + static_cast<int>(rng.Below(32)),
                                                 1 + static_cast<int>(rng.Below(32)),
                                                 rng.Bernoulli(0.5) ? 3 : 1);
    const BlurKernel k = testing::RandomKernel(rng, 1 + static_cast<int>(rng.Below(15)),
                                               1 + static_cast<int>(rng.Below(15)));
    const ImageBuffer sparse = ConvolveReflect(img, SparsifyKernel(k), 1 + static_cast<int>(rng.Below(4)));
    worst = std::max(worst, MaxAbsDiff(sparse, ConvolveDenseOracle(img, k)));
  }
  bool identity = true;
  float constant_err = 0.0f;
  for (int i = 0; i < 10; ++i) {
    const ImageBuffer img = testing::RandomImage(rng, 20 + i, 17, 3);
    const int w = 1 + 2 * i;
    BlurKernel delta(w, w);
    delta.at((w - 1) / 2, (w - 1) / 2) = 1.0;
    identity &= ConvolveReflect(img, SparsifyKernel(delta)) == img;
    const ImageBuffer flat(20 + i, 17, 3, 0.37f);
    const ImageBuffer out =
        ConvolveReflect(flat, SparsifyKernel(testing::RandomKernel(rng, 15, 15)));
    constant_err = std::max(constant_err, MaxAbsDiff(out, flat));
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "oracle max-abs=%.2e, delta identity=%s, constant max-abs=%.2e",
                worst, identity ? "exact" : "broken", constant_err);
  return {worst <= 1e-5f && identity && constant_err <= 1e-6f, buf};
}

Outcome ExpansionFuzz() {
  Rng rng(66);
  int failures = 0;
  // Coordinates on a 1/8 grid keep every sum exact in double precision.
  auto grid = [&](double lo, double hi) { return std::round(rng.Uniform(lo, hi) * 8) / 8; };
  for (int i = 0; i < 10000; ++i) {
    const BoundingBox b{grid(-50, 500), grid(-50, 500), grid(0.125, 300), grid(0.125, 300)};
    const Extents e{-static_cast<int>(rng.Below(70)), static_cast<int>(rng.Below(70)),
                    -static_cast<int>(rng.Below(70)), static_cast<int>(rng.Below(70))};
    const BoundingBox x = ExpandBox(b, e);
    const bool contains = x.x <= b.x && x.y <= b.y && x.x + x.w >= b.x + b.w &&
                          x.y + x.h >= b.y + b.h;
    const bool margins = b.x - x.x == -e.x_minus && b.y - x.y == -e.y_minus &&
                         (x.x + x.w) - (b.x + b.w) == e.x_plus &&
                         (x.y + x.h) - (b.y + b.h) == e.y_plus;
    if (!contains || !margins) ++failures;
  }
  return {failures == 0, "10000 cases, failures=" + std::to_string(failures)};
}

Outcome StatsMerge() {
  const ChannelStats a = MergeBatchStats({{0.0}, {1.0}}, {{17.0}, {18.0}}, 16, 1);
  const ChannelStats avg = MergeBatchStats({{2.0}, {1.0}}, {{6.0}, {3.0}}, 5, 5);
  const bool examples = a.mu[0] == 1.0 && a.var[0] == 2.0 && avg.mu[0] == 4.0 && avg.var[0] == 2.0;
  Rng rng(88);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const size_t n = 1 + rng.Below(32);
    ChannelStats s, t;
    for (size_t c = 0; c < n; ++c) {
      s.mu.push_back(rng.Uniform(-100, 100));
      t.mu.push_back(rng.Uniform(-100, 100));
      s.var.push_back(rng.Uniform(0, 50));
      t.var.push_back(rng.Uniform(0, 50));
    }
    const ChannelStats m = MergeBatchStats(s, t, rng.Uniform(0.1, 1000), rng.Uniform(0.1, 1000));
    for (size_t c = 0; c < n; ++c) {
      if (m.mu[c] < std::min(s.mu[c], t.mu[c]) || m.mu[c] > std::max(s.mu[c], t.mu[c]) ||
          m.var[c] < std::min(s.var[c], t.var[c]) || m.var[c] > std::max(s.var[c], t.var[c])) {
        ++violations;
      }
    }
  }
  return {examples && violations == 0,
          std::string("examples ") + (examples ? "exact" : "wrong") +
              ", convexity violations=" + std::to_string(violations)};
}

Outcome MapHarness() {
  Dataset gt;
  gt.images = {{1, "a.png", 64, 64}, {2, "b.png", 64, 64}};
  gt.categories = {{1, "a"}, {2, "b"}};
  gt.annotations = {{1, 1, 1, {4, 4, 20, 20}, std::nullopt},
                    {2, 1, 2, {30, 30, 10, 12}, std::nullopt},
                    {3, 2, 1, {8, 2, 40, 30}, std::nullopt}};
  std::vector<Annotation> self = gt.annotations;
  for (Annotation& a : self) a.score = 1.0;
  const double self_map = EvaluateMap(self, gt, EvalConfig{}).map_at[0];
  const double empty_map = EvaluateMap({}, gt, EvalConfig{}).map_at[0];
  Rng rng(99);
  double worst = 0.0;
  bool presence = true;
  for (int i = 0; i < 50; ++i) {
    const testing::Scenario s = testing::RandomScenario(rng);
    const auto got = EvaluateClassAp(s.preds, s.gts, 0.5);
    const auto want = testing::OracleAp(s.preds, s.gts, 0.5);
    presence &= got.has_value() == want.has_value();
    if (got && want) worst = std::max(worst, std::abs(*got - *want));
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "self=%.4f empty=%.4f oracle max diff=%.2e", self_map,
                empty_map, worst);
  return {self_map == 1.0 && empty_map == 0.0 && presence && worst <= 1e-9, buf};
}

Outcome EndToEnd() {
  const auto start = Clock::now();
  testing::TempDir tmp;
  Dataset ds;
  ds.categories = {{1, "car"}, {2, "sign"}};
  Rng rng(1234);
  fs::create_directories(tmp / "images");
  for (int i = 1; i <= 10; ++i) {
    const std::string name = "frame_" + std::to_string(i) + ".png";
    ds.images.push_back({i, name, 160, 120});
    WritePng(testing::RandomImage(rng, 160, 120, 3), tmp / "images" / name);
    ds.annotations.push_back({2 * i, i, 1, {20.0 + i, 30, 40, 25}, std::nullopt});
    ds.annotations.push_back({2 * i + 1, i, 2, {100, 10.0 + i, 15, 30}, std::nullopt});
  }
  SaveAnnotations(ds, tmp / "gt.json");
  const fs::path out = tmp / "blurred";
  if (Cli({"blur-dataset", "--gt", (tmp / "gt.json").string(), "--images",
           (tmp / "images").string(), "--out", out.string(), "--policy", "generalist",
           "--seed", "42"}) != 0) {
    return {false, "blur-dataset failed"};
  }
  const BlurredDatasetManifest m = LoadBlurManifest(out / "manifest.json");
  int sharp = 0, blurred = 0;
  for (const ManifestEntry& e : m.entries) {
    if (!e.ok) return {false, "image " + std::to_string(e.image_id) + " failed: " + e.error};
    (e.blur_class.sharp ? sharp : blurred)++;
  }
  if (Cli({"expand-labels", "--gt", (tmp / "gt.json").string(), "--manifest",
           (out / "manifest.json").string(), "--out", (tmp / "expanded.json").string()}) != 0) {
    return {false, "expand-labels failed"};
  }
  std::vector<Annotation> preds = LoadAnnotations(tmp / "expanded.json").annotations;
  for (Annotation& a : preds) {
    a.id.reset();
    a.score = 1.0;
  }
  SavePredictions(preds, tmp / "pred.json");
  std::vector<std::string> args = {"blurkit",
                                   "evaluate",
                                   "--gt",
                                   (tmp / "gt.json").string(),
                                   "--pred",
                                   (tmp / "pred.json").string(),
                                   "--regime",
                                   "expanded",
                                   "--manifest",
                                   (out / "manifest.json").string()};
  std::ostringstream eval_out, eval_err;
  const int code = cli::RunCli(args, eval_out, eval_err);
  const bool perfect = code == 0 && eval_out.str().find("mAP@0.5: 1.0000") != std::string::npos;
  const double secs = Seconds(start);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "sharp=%d blurred=%d, evaluate: %s, %.2f s", sharp, blurred,
                perfect ? "1.0000" : "not 1.0", secs);
  return {sharp == 1 && blurred == 9 && perfect && secs < 60.0, buf};
}

Outcome Squint() {
  AxisSpreads iso;
  iso.s_x = iso.s_y = 3.5;
  const SquintFactors f = ComputeSquintFactors(iso);
  const bool isotropic = f.f_x == 1.0 && f.f_y == 1.0;

  ImageBuffer grad(64, 64, 1);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) grad.at(x, y, 0) = (x + y) / 126.0f;
  }
  float round_trip = 0.0f;
  for (const auto& [fx, fy] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {1.0, 0.5}, {0.75, 1.0}}) {
    round_trip = std::max(round_trip,
                          MaxAbsDiff(UnsquintGrid(ResampleGrid(grad, fx, fy), fx, fy, 64, 64), grad));
  }

  double worst_cov = 0.0;
  for (uint64_t s = 0; s < 20; ++s) {
    const BlurKernel k = GenerateCenteredKernel(kAllPClasses[s % 3], kAllEClasses[s % 5], s);
    long double w = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int y = 0; y < k.height(); ++y) {
      for (int x = 0; x < k.width(); ++x) {
        const long double v = k.at(x, y);
        w += v;
        sx += v * x;
        sy += v * y;
        sxx += v * x * x;
        sxy += v * x * y;
        syy += v * y * y;
      }
    }
    const long double mx = sx / w, my = sy / w;
    const AxisSpreads a = KernelSpreads(k);
    worst_cov = std::max({worst_cov, std::abs(a.cov_xx - static_cast<double>(sxx / w - mx * mx)),
                          std::abs(a.cov_xy - static_cast<double>(sxy / w - mx * my)),
                          std::abs(a.cov_yy - static_cast<double>(syy / w - my * my))});
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "isotropic=(%g,%g) round-trip max-abs=%.2e covariance max diff=%.2e",
                f.f_x, f.f_y, round_trip, worst_cov);
  return {isotropic && round_trip < 0.02f && worst_cov <= 1e-9, buf};
}

}  // namespace
}  // namespace blurkit

int main() {
  using blurkit::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"determinism", blurkit::Determinism},
      {"constants", blurkit::Constants},
      {"normalization and centering", blurkit::Normalization},
      {"exposure prefix monotonicity", blurkit::PrefixMonotonicity},
      {"anisotropy ordering", blurkit::Anisotropy},
      {"convolution oracle", blurkit::ConvolutionOracle},
      {"box expansion fuzz", blurkit::ExpansionFuzz},
      {"statistics merge", blurkit::StatsMerge},
      {"mAP harness", blurkit::MapHarness},
      {"end-to-end pipeline", blurkit::EndToEnd},
      {"squint", blurkit::Squint},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
