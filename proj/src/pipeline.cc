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

#include "blurkit/pipeline.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "blurkit/blur_apply.h"
#include "blurkit/error.h"
#include "blurkit/image_io.h"
#include "blurkit/kernel_io.h"
#include "blurkit/parallel.h"
#include "blurkit/random.h"

namespace blurkit {

namespace {

using nlohmann::json;

// Domain tag mixed into the shuffle stream so it never collides with the
// per-image kernel seeds derived from the same master seed.
constexpr uint64_t kShuffleTag = 0x73687566666c65ULL;

json BlurClassToJson(const BlurClass& bc) {
  if (bc.sharp) return "sharp";
  return {{"p", ToString(bc.p)}, {"e", ToString(bc.e)}};
}

BlurClass BlurClassFromJson(const json& j) {
  if (j.is_string() && j.get<std::string>() == "sharp") return BlurClass::Sharp();
  const std::string p = j.at("p").get<std::string>();
  const std::string e = j.at("e").get<std::string>();
  for (PClass pc : kAllPClasses) {
    for (EClass ec : kAllEClasses) {
      if (ToString(pc) == p && ToString(ec) == e) return BlurClass::Blurred(pc, ec);
    }
  }
  throw ParseError("unknown blur class " + p + "/" + e);
}

PClass PClassFromName(const std::string& s) {
  for (PClass p : kAllPClasses) {
    if (ToString(p) == s) return p;
  }
  throw ParseError("unknown p class " + s);
}

}  // namespace

std::string ToString(const BlurClass& bc) {
  return bc.sharp ? "sharp" : ToString(bc.p) + ToString(bc.e);
}

MixPolicy MixPolicy::Generalist() {
  MixPolicy m;
  m.kind = PolicyKind::kGeneralist;
  m.sharp_fraction = 0.10;
  for (PClass p : kAllPClasses) {
    for (EClass e : kAllEClasses) m.allowed.emplace_back(p, e);
  }
  return m;
}

MixPolicy MixPolicy::LowExposure() {
  MixPolicy m;
  m.kind = PolicyKind::kLowExposure;
  m.sharp_fraction = 0.25;
  for (PClass p : kAllPClasses) {
    for (EClass e : {EClass::kE1, EClass::kE2, EClass::kE3}) {
      m.allowed.emplace_back(p, e);
    }
  }
  return m;
}

MixPolicy MixPolicy::Specialist(PClass p, bool high_exposure_only) {
  MixPolicy m;
  m.kind = PolicyKind::kSpecialist;
  m.specialist_p = p;
  m.high_exposure_only = high_exposure_only;
  if (high_exposure_only) {
    m.sharp_fraction = 0.0;
    m.allowed = {{p, EClass::kE4}, {p, EClass::kE5}};
  } else {
    m.sharp_fraction = 0.10;
    for (EClass e : kAllEClasses) m.allowed.emplace_back(p, e);
  }
  return m;
}

std::string MixPolicy::Name() const {
  switch (kind) {
    case PolicyKind::kGeneralist:
      return "generalist";
    case PolicyKind::kLowExposure:
      return "low_exposure";
    case PolicyKind::kSpecialist:
      return "specialist";
  }
  return "unknown";
}

json MixPolicy::ToJson() const {
  json j{{"name", Name()}, {"sharp_fraction", sharp_fraction}};
  if (kind == PolicyKind::kSpecialist) {
    j["p_class"] = ToString(*specialist_p);
    j["high_exposure_only"] = high_exposure_only;
  }
  return j;
}

MixPolicy MixPolicy::FromJson(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  if (name == "generalist") return Generalist();
  if (name == "low_exposure") return LowExposure();
  if (name == "specialist") {
    return Specialist(PClassFromName(j.at("p_class").get<std::string>()),
                      j.at("high_exposure_only").get<bool>());
  }
  throw ParseError("unknown mixing policy " + name);
}

uint64_t ImageKernelSeed(uint64_t master_seed, int64_t image_id) {
  return DeriveSeed({master_seed, static_cast<uint64_t>(image_id)});
}

BlurPlan BuildPlan(const Dataset& ds, const MixPolicy& policy,
                   uint64_t master_seed) {
  if (ds.images.empty()) throw InvalidArgument("cannot plan an empty dataset");
  if (policy.allowed.empty() && policy.sharp_fraction < 1.0) {
    throw InvalidArgument("mixing policy allows no blur classes");
  }
  std::vector<int64_t> ids;
  ids.reserve(ds.images.size());
  for (const ImageInfo& im : ds.images) ids.push_back(im.id);
  std::sort(ids.begin(), ids.end());

  Rng rng(DeriveSeed({master_seed, kShuffleTag}));
  for (size_t i = ids.size() - 1; i > 0; --i) {
    std::swap(ids[i], ids[rng.Below(i + 1)]);
  }

  const size_t n = ids.size();
  const size_t n_sharp = std::min(
      n, static_cast<size_t>(std::floor(policy.sharp_fraction * n + 1e-9)));

  BlurPlan plan;
  plan.policy = policy;
  plan.master_seed = master_seed;
  plan.entries.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    PlanEntry e;
    e.image_id = ids[i];
    e.kernel_seed = ImageKernelSeed(master_seed, ids[i]);
    if (i >= n_sharp) {
      const auto& [p, ec] = policy.allowed[(i - n_sharp) % policy.allowed.size()];
      e.blur_class = BlurClass::Blurred(p, ec);
    }
    plan.entries.push_back(e);
  }
  std::sort(plan.entries.begin(), plan.entries.end(),
            [](const PlanEntry& a, const PlanEntry& b) {
              return a.image_id < b.image_id;
            });
  return plan;
}

BlurKernel KernelForEntry(const PlanEntry& entry) {
  if (entry.blur_class.sharp) {
    throw InvalidArgument("sharp plan entries have no kernel");
  }
  return GenerateCenteredKernel(entry.blur_class.p, entry.blur_class.e,
                                entry.kernel_seed);
}

json BlurredDatasetManifest::ToJson() const {
  json entries_json = json::array();
  for (const ManifestEntry& e : entries) {
    json j;
    j["image_id"] = e.image_id;
    j["blur_class"] = BlurClassToJson(e.blur_class);
    j["kernel_seed"] = e.kernel_seed;
    j["extents"] = ExtentsToJson(e.extents);
    j["kernel_file"] = e.kernel_file.empty() ? json(nullptr) : json(e.kernel_file);
    j["image_file"] = e.image_file;
    j["ok"] = e.ok;
    if (!e.ok) j["error"] = e.error;
    entries_json.push_back(std::move(j));
  }
  return {{"master_seed", master_seed},
          {"policy", policy.ToJson()},
          {"entries", entries_json}};
}

BlurredDatasetManifest BlurredDatasetManifest::FromJson(const json& j) {
  try {
    BlurredDatasetManifest m;
    m.master_seed = j.at("master_seed").get<uint64_t>();
    m.policy = MixPolicy::FromJson(j.at("policy"));
    for (const json& e : j.at("entries")) {
      ManifestEntry me;
      me.image_id = e.at("image_id").get<int64_t>();
      me.blur_class = BlurClassFromJson(e.at("blur_class"));
      me.kernel_seed = e.at("kernel_seed").get<uint64_t>();
      me.extents = ExtentsFromJson(e.at("extents"));
      if (e.contains("kernel_file") && !e.at("kernel_file").is_null()) {
        me.kernel_file = e.at("kernel_file").get<std::string>();
      }
      me.image_file = e.value("image_file", "");
      me.ok = e.value("ok", true);
      me.error = e.value("error", "");
      m.entries.push_back(std::move(me));
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid blur manifest: ") + e.what());
  }
}

std::map<int64_t, Extents> BlurredDatasetManifest::ExtentsByImage() const {
  std::map<int64_t, Extents> out;
  for (const ManifestEntry& e : entries) {
    if (e.ok) out[e.image_id] = e.extents;
  }
  return out;
}

BlurredDatasetManifest LoadBlurManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("failed to open " + path.string());
  try {
    return BlurredDatasetManifest::FromJson(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

BlurredDatasetManifest ExecutePlan(const BlurPlan& plan, const Dataset& ds,
                                   const std::filesystem::path& image_root,
                                   const std::filesystem::path& out_root,
                                   const ExecuteOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(out_root / "images");
  fs::create_directories(out_root / "kernels");

  BlurredDatasetManifest manifest;
  manifest.master_seed = plan.master_seed;
  manifest.policy = plan.policy;
  manifest.entries.resize(plan.entries.size());

  ParallelFor(plan.entries.size(), options.jobs, [&](size_t b, size_t end) {
    for (size_t i = b; i < end; ++i) {
      const PlanEntry& entry = plan.entries[i];
      ManifestEntry& me = manifest.entries[i];
      me.image_id = entry.image_id;
      me.blur_class = entry.blur_class;
      me.kernel_seed = entry.kernel_seed;
      try {
        const ImageInfo* info = ds.FindImage(entry.image_id);
        if (info == nullptr) {
          throw InvalidArgument("plan references unknown image id " +
                                std::to_string(entry.image_id));
        }
        const fs::path rel = fs::path("images") / info->file_name;
        fs::create_directories((out_root / rel).parent_path());
        me.image_file = rel.generic_string();
        if (entry.blur_class.sharp) {
          fs::copy_file(image_root / info->file_name, out_root / rel,
                        fs::copy_options::overwrite_existing);
        } else {
          const BlurKernel kernel = KernelForEntry(entry);
          const ImageBuffer src = ReadImage(image_root / info->file_name);
          const ImageBuffer blurred =
              ConvolveReflect(src, SparsifyKernel(kernel), 1);
          WriteImage(blurred, out_root / rel);
          const std::string stem = std::to_string(entry.image_id);
          WriteKernelWithSidecar(kernel, out_root / "kernels", stem);
          me.kernel_file = "kernels/" + stem + ".bfk";
          me.extents = kernel.meta.extents;
        }
        me.ok = true;
      } catch (const std::exception& ex) {
        me.ok = false;
        me.error = ex.what();
      }
    }
  });

  {
    std::ofstream out(out_root / "manifest.json", std::ios::trunc);
    out << manifest.ToJson().dump(2) << "\n";
    if (!out) throw Error("failed to write blur manifest");
  }
  if (options.write_expanded) {
    const std::map<int64_t, Extents> extents = manifest.ExtentsByImage();
    Dataset kept = ds;
    std::erase_if(kept.annotations, [&](const Annotation& a) {
      return !extents.contains(a.image_id);
    });
    SaveAnnotations(TransformAnnotations(kept, extents, options.clip),
                    out_root / "annotations_expanded.json");
  }
  return manifest;
}

std::map<int64_t, Extents> SyntheticExtents(const Dataset& ds, double anxiety,
                                            double exposure_fraction,
                                            uint64_t seed, int jobs) {
  TrajectoryParams params;
  params.anxiety_override = anxiety;
  std::vector<Extents> found(ds.images.size());
  ParallelFor(ds.images.size(), jobs, [&](size_t b, size_t end) {
    for (size_t i = b; i < end; ++i) {
      const BlurKernel k = GenerateCenteredKernel(
          params, exposure_fraction, ImageKernelSeed(seed, ds.images[i].id));
      found[i] = k.meta.extents;
    }
  });
  std::map<int64_t, Extents> out;
  for (size_t i = 0; i < ds.images.size(); ++i) out[ds.images[i].id] = found[i];
  return out;
}

int NumEstimatorClasses(EstimatorScheme scheme) {
  return scheme == EstimatorScheme::kSixteen ? 16 : 4;
}

int EstimatorClassOf(const BlurClass& bc, EstimatorScheme scheme) {
  if (bc.sharp) return 0;
  if (scheme == EstimatorScheme::kSixteen) {
    return 1 + Index(bc.p) * kNumEClasses + Index(bc.e);
  }
  if (bc.e == EClass::kE4 || bc.e == EClass::kE5) return 1 + Index(bc.p);
  return 0;
}

SpecialistRegistry DefaultRegistry(EstimatorScheme scheme) {
  SpecialistRegistry reg;
  if (scheme == EstimatorScheme::kSixteen) {
    reg[0] = "standard_augmented";
    for (PClass p : kAllPClasses) {
      const std::string name = "p" + std::to_string(Index(p) + 1) + "_specialist";
      for (EClass e : kAllEClasses) {
        reg[EstimatorClassOf(BlurClass::Blurred(p, e), scheme)] = name;
      }
    }
  } else {
    reg[0] = "low_exposure";
    for (PClass p : kAllPClasses) {
      reg[1 + Index(p)] = "p" + std::to_string(Index(p) + 1) + "_high_exposure";
    }
  }
  return reg;
}

const std::string& RouteSpecialist(int class_index, EstimatorScheme scheme,
                                   const SpecialistRegistry& registry) {
  if (class_index < 0 || class_index >= NumEstimatorClasses(scheme)) {
    throw InvalidArgument("estimator class " + std::to_string(class_index) +
                          " is outside the scheme");
  }
  const auto it = registry.find(class_index);
  if (it == registry.end()) {
    throw InvalidArgument("no specialist registered for estimator class " +
                          std::to_string(class_index));
  }
  return it->second;
}

}  // namespace blurkit
