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

// Kernel serialization and corpus generation.
//
// BFK1 layout (all little-endian):
//   bytes 0..3   magic "BFK1"
//   u32          width
//   u32          height
//   f32[w*h]     weights, row-major
//
// Each kernel file has a JSON sidecar with the same stem:
//   {"p_class", "e_class", "seed", "centered", "barycenter": [x, y],
//    "extents": [x-, x+, y-, y+]}

#ifndef BLURKIT_KERNEL_IO_H_
#define BLURKIT_KERNEL_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "blurkit/kernel_gen.h"

namespace blurkit {

std::vector<uint8_t> EncodeBfk1(const BlurKernel& kernel);
// Throws ParseError on bad magic, truncated data or invalid weights.
BlurKernel DecodeBfk1(const std::vector<uint8_t>& bytes);

void WriteBfk1(const BlurKernel& kernel, const std::filesystem::path& path);
BlurKernel ReadBfk1(const std::filesystem::path& path);

nlohmann::json KernelMetaToJson(const KernelMeta& meta);
KernelMeta KernelMetaFromJson(const nlohmann::json& j);

nlohmann::json ExtentsToJson(const Extents& e);
Extents ExtentsFromJson(const nlohmann::json& j);

// Writes `<stem>.bfk` and `<stem>.json` under `dir`.
void WriteKernelWithSidecar(const BlurKernel& kernel,
                            const std::filesystem::path& dir,
                            const std::string& stem);

struct CorpusSpec {
  int per_pair_count = 0;
  uint64_t seed = 0;
  std::filesystem::path out_dir;
  // Empty means all classes.
  std::vector<PClass> p_classes;
  std::vector<EClass> e_classes;
  int jobs = 1;
};

struct CorpusEntry {
  PClass p_class = PClass::kP1;
  EClass e_class = EClass::kE1;
  int index = 0;
  uint64_t seed = 0;
  std::string file;   // relative to out_dir
  Extents extents;
  bool ok = false;
  std::string error;
};

struct CorpusManifest {
  CorpusSpec spec;
  std::vector<CorpusEntry> entries;
  bool complete = true;

  nlohmann::json ToJson() const;
};

// Seed of kernel `index` of pair (p, e); independent of generation order.
uint64_t CorpusKernelSeed(uint64_t seed, PClass p, EClass e, int index);

// Generates centered kernels for every selected (P, E) pair and writes
// them plus `manifest.json`. Per-file I/O failures are recorded in the
// manifest rather than thrown.
CorpusManifest GenerateCorpus(const CorpusSpec& spec);

}  // namespace blurkit

#endif  // BLURKIT_KERNEL_IO_H_
