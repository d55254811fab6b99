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

#include "blurkit/kernel_io.h"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "blurkit/error.h"
#include "blurkit/parallel.h"
#include "blurkit/random.h"

namespace blurkit {

namespace {

constexpr char kMagic[4] = {'B', 'F', 'K', '1'};
constexpr size_t kHeaderSize = 12;

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t GetU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

std::optional<PClass> PClassFromName(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  const std::string s = j.get<std::string>();
  for (PClass p : kAllPClasses) {
    if (ToString(p) == s) return p;
  }
  throw ParseError("unknown p_class: " + s);
}

std::optional<EClass> EClassFromName(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  const std::string s = j.get<std::string>();
  for (EClass e : kAllEClasses) {
    if (ToString(e) == s) return e;
  }
  throw ParseError("unknown e_class: " + s);
}

std::string CorpusStem(PClass p, EClass e, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "p%d_e%d_%06d", Index(p) + 1, Index(e) + 1,
                index);
  return buf;
}

}  // namespace

std::vector<uint8_t> EncodeBfk1(const BlurKernel& kernel) {
  std::vector<uint8_t> out;
  out.reserve(kHeaderSize + kernel.weights().size() * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  PutU32(out, static_cast<uint32_t>(kernel.width()));
  PutU32(out, static_cast<uint32_t>(kernel.height()));
  for (double w : kernel.weights()) {
    PutU32(out, std::bit_cast<uint32_t>(static_cast<float>(w)));
  }
  return out;
}

BlurKernel DecodeBfk1(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a BFK1 kernel file");
  }
  const uint32_t w = GetU32(bytes.data() + 4);
  const uint32_t h = GetU32(bytes.data() + 8);
  if (w == 0 || h == 0 || w > (1u << 15) || h > (1u << 15)) {
    throw ParseError("BFK1 kernel has invalid dimensions");
  }
  const size_t count = static_cast<size_t>(w) * h;
  if (bytes.size() != kHeaderSize + count * 4) {
    throw ParseError("BFK1 payload size does not match dimensions");
  }
  std::vector<double> weights(count);
  for (size_t i = 0; i < count; ++i) {
    weights[i] =
        std::bit_cast<float>(GetU32(bytes.data() + kHeaderSize + 4 * i));
  }
  try {
    return BlurKernel(static_cast<int>(w), static_cast<int>(h),
                      std::move(weights));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("BFK1: ") + e.what());
  }
}

void WriteBfk1(const BlurKernel& kernel, const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = EncodeBfk1(kernel);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed to write " + path.string());
}

BlurKernel ReadBfk1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("failed to open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return DecodeBfk1(bytes);
}

nlohmann::json ExtentsToJson(const Extents& e) {
  return nlohmann::json::array({e.x_minus, e.x_plus, e.y_minus, e.y_plus});
}

Extents ExtentsFromJson(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError("extents must be an array [x-, x+, y-, y+]");
  }
  Extents e{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(),
            j[3].get<int>()};
  if (e.x_minus > 0 || e.y_minus > 0 || e.x_plus < 0 || e.y_plus < 0) {
    throw ParseError("extents must satisfy x-, y- <= 0 <= x+, y+");
  }
  return e;
}

nlohmann::json KernelMetaToJson(const KernelMeta& meta) {
  nlohmann::json j;
  j["p_class"] = meta.p_class ? nlohmann::json(ToString(*meta.p_class))
                              : nlohmann::json(nullptr);
  j["e_class"] = meta.e_class ? nlohmann::json(ToString(*meta.e_class))
                              : nlohmann::json(nullptr);
  j["seed"] = meta.seed;
  j["centered"] = meta.centered;
  j["barycenter"] = {meta.barycenter.x, meta.barycenter.y};
  j["extents"] = ExtentsToJson(meta.extents);
  return j;
}

KernelMeta KernelMetaFromJson(const nlohmann::json& j) {
  try {
    KernelMeta meta;
    meta.p_class = PClassFromName(j.at("p_class"));
    meta.e_class = EClassFromName(j.at("e_class"));
    meta.seed = j.at("seed").get<uint64_t>();
    meta.centered = j.at("centered").get<bool>();
    const auto& b = j.at("barycenter");
    meta.barycenter = {b.at(0).get<double>(), b.at(1).get<double>()};
    meta.extents = ExtentsFromJson(j.at("extents"));
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid kernel metadata: ") + e.what());
  }
}

void WriteKernelWithSidecar(const BlurKernel& kernel,
                            const std::filesystem::path& dir,
                            const std::string& stem) {
  WriteBfk1(kernel, dir / (stem + ".bfk"));
  std::ofstream meta(dir / (stem + ".json"), std::ios::trunc);
  meta << KernelMetaToJson(kernel.meta).dump(2) << "\n";
  if (!meta) throw Error("failed to write metadata for " + stem);
}

uint64_t CorpusKernelSeed(uint64_t seed, PClass p, EClass e, int index) {
  return DeriveSeed({seed, static_cast<uint64_t>(Index(p)),
                     static_cast<uint64_t>(Index(e)),
                     static_cast<uint64_t>(index)});
}

nlohmann::json CorpusManifest::ToJson() const {
  nlohmann::json config;
  config["per_pair_count"] = spec.per_pair_count;
  config["seed"] = spec.seed;
  config["n_steps"] = kDefaultTrajectorySteps;
  config["support"] = kDefaultKernelSupport;
  config["anxiety"] = kAnxietyValues;
  config["exposure"] = kExposureFractions;
  nlohmann::json kernels = nlohmann::json::array();
  for (const CorpusEntry& e : entries) {
    nlohmann::json k;
    k["p_class"] = ToString(e.p_class);
    k["e_class"] = ToString(e.e_class);
    k["index"] = e.index;
    k["seed"] = e.seed;
    k["file"] = e.file;
    k["extents"] = ExtentsToJson(e.extents);
    k["ok"] = e.ok;
    if (!e.ok) k["error"] = e.error;
    kernels.push_back(std::move(k));
  }
  return {{"config", config}, {"complete", complete}, {"kernels", kernels}};
}

CorpusManifest GenerateCorpus(const CorpusSpec& spec) {
  if (spec.per_pair_count < 0) {
    throw InvalidArgument("per_pair_count must be >= 0");
  }
  CorpusManifest manifest;
  manifest.spec = spec;
  const std::vector<PClass> ps =
      spec.p_classes.empty()
          ? std::vector<PClass>(kAllPClasses.begin(), kAllPClasses.end())
          : spec.p_classes;
  const std::vector<EClass> es =
      spec.e_classes.empty()
          ? std::vector<EClass>(kAllEClasses.begin(), kAllEClasses.end())
          : spec.e_classes;

  for (PClass p : ps) {
    for (EClass e : es) {
      for (int i = 0; i < spec.per_pair_count; ++i) {
        CorpusEntry entry;
        entry.p_class = p;
        entry.e_class = e;
        entry.index = i;
        entry.seed = CorpusKernelSeed(spec.seed, p, e, i);
        entry.file = CorpusStem(p, e, i) + ".bfk";
        manifest.entries.push_back(std::move(entry));
      }
    }
  }

  std::filesystem::create_directories(spec.out_dir);
  ParallelFor(manifest.entries.size(), spec.jobs, [&](size_t b, size_t end) {
    for (size_t i = b; i < end; ++i) {
      CorpusEntry& entry = manifest.entries[i];
      try {
        const BlurKernel k =
            GenerateCenteredKernel(entry.p_class, entry.e_class, entry.seed);
        entry.extents = k.meta.extents;
        WriteKernelWithSidecar(k, spec.out_dir,
                               CorpusStem(entry.p_class, entry.e_class,
                                          entry.index));
        entry.ok = true;
      } catch (const std::exception& ex) {
        entry.ok = false;
        entry.error = ex.what();
      }
    }
  });

  for (const CorpusEntry& e : manifest.entries) {
    if (!e.ok) manifest.complete = false;
  }
  std::ofstream out(spec.out_dir / "manifest.json", std::ios::trunc);
  out << manifest.ToJson().dump(2) << "\n";
  if (!out) throw Error("failed to write corpus manifest");
  return manifest;
}

}  // namespace blurkit
