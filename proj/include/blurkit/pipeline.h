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

// Dataset-level blur augmentation: deterministic blur plans under a
// sharp/blurry mixing policy, plan execution, blur-estimator class labels
// and specialist routing.

#ifndef BLURKIT_PIPELINE_H_
#define BLURKIT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "blurkit/kernel_gen.h"
#include "blurkit/labels_coco.h"

namespace blurkit {

struct BlurClass {
  bool sharp = true;
  PClass p = PClass::kP1;  // meaningful only when !sharp
  EClass e = EClass::kE1;

  static BlurClass Sharp() { return {}; }
  static BlurClass Blurred(PClass p, EClass e) { return {false, p, e}; }

  bool operator==(const BlurClass& o) const {
    return sharp == o.sharp && (sharp || (p == o.p && e == o.e));
  }
};

std::string ToString(const BlurClass& bc);  // "sharp" or "P2E5"

enum class PolicyKind { kGeneralist, kLowExposure, kSpecialist };

struct MixPolicy {
  PolicyKind kind = PolicyKind::kGeneralist;
  double sharp_fraction = 0.10;
  std::vector<std::pair<PClass, EClass>> allowed;  // P-major, then E
  std::optional<PClass> specialist_p;
  bool high_exposure_only = false;

  // 10% sharp, every (P, E) pair.
  static MixPolicy Generalist();
  // 25% sharp, E1..E3 for every P.
  static MixPolicy LowExposure();
  // high_exposure_only: 0% sharp, (p, E4/E5). Otherwise the per-type
  // specialist mix: 10% sharp, every exposure of p.
  static MixPolicy Specialist(PClass p, bool high_exposure_only);

  std::string Name() const;
  nlohmann::json ToJson() const;
  static MixPolicy FromJson(const nlohmann::json& j);
};

struct PlanEntry {
  int64_t image_id = 0;
  BlurClass blur_class;
  uint64_t kernel_seed = 0;
};

struct BlurPlan {
  std::vector<PlanEntry> entries;  // sorted by image_id
  MixPolicy policy;
  uint64_t master_seed = 0;
};

// Shuffles image ids with the master seed, marks the first
// floor(sharp_fraction * N) sharp and deals the rest round-robin over the
// allowed (P, E) pairs. Throws InvalidArgument on an empty dataset.
BlurPlan BuildPlan(const Dataset& ds, const MixPolicy& policy,
                   uint64_t master_seed);

uint64_t ImageKernelSeed(uint64_t master_seed, int64_t image_id);

// The centered kernel a blurred plan entry uses.
BlurKernel KernelForEntry(const PlanEntry& entry);

struct ManifestEntry {
  int64_t image_id = 0;
  BlurClass blur_class;
  uint64_t kernel_seed = 0;
  Extents extents;             // zero for sharp images
  std::string kernel_file;     // relative to out_root; empty for sharp
  std::string image_file;      // relative to out_root
  bool ok = false;
  std::string error;
};

struct BlurredDatasetManifest {
  uint64_t master_seed = 0;
  MixPolicy policy;
  std::vector<ManifestEntry> entries;  // sorted by image_id

  nlohmann::json ToJson() const;
  static BlurredDatasetManifest FromJson(const nlohmann::json& j);
  // Extents of every successfully processed image.
  std::map<int64_t, Extents> ExtentsByImage() const;
};

BlurredDatasetManifest LoadBlurManifest(const std::filesystem::path& path);

struct ExecuteOptions {
  int jobs = 1;
  // Also write `annotations_expanded.json` next to the manifest.
  bool write_expanded = true;
  bool clip = false;
};

// Sharp entries are copied byte-for-byte; blurred entries are convolved
// with their kernel and written under out_root/images, kernels under
// out_root/kernels. Writes out_root/manifest.json. Per-image failures are
// recorded in the manifest.
BlurredDatasetManifest ExecutePlan(const BlurPlan& plan, const Dataset& ds,
                                   const std::filesystem::path& image_root,
                                   const std::filesystem::path& out_root,
                                   const ExecuteOptions& options = {});

// Per-image extents of centered kernels drawn at a continuous
// (anxiety, exposure) setting, seeded per image. Used by (P, E) sweeps.
std::map<int64_t, Extents> SyntheticExtents(const Dataset& ds, double anxiety,
                                            double exposure_fraction,
                                            uint64_t seed, int jobs = 1);

enum class EstimatorScheme { kSixteen, kFour };

int NumEstimatorClasses(EstimatorScheme scheme);

// Sixteen: sharp -> 0, (p, e) -> 1 + 5 p + e.
// Four: sharp or E1..E3 -> 0, (Pk, E4/E5) -> k.
int EstimatorClassOf(const BlurClass& bc, EstimatorScheme scheme);

using SpecialistRegistry = std::map<int, std::string>;

// Sixteen: 0 -> "standard_augmented", every class of Pk -> "pk_specialist".
// Four: 0 -> "low_exposure", k -> "pk_high_exposure".
SpecialistRegistry DefaultRegistry(EstimatorScheme scheme);

// Throws InvalidArgument if the index is outside the scheme or
// unregistered.
const std::string& RouteSpecialist(int class_index, EstimatorScheme scheme,
                                   const SpecialistRegistry& registry);

}  // namespace blurkit

#endif  // BLURKIT_PIPELINE_H_
