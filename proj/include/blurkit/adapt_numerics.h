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

#ifndef BLURKIT_ADAPT_NUMERICS_H_
#define BLURKIT_ADAPT_NUMERICS_H_

#include <vector>

namespace blurkit {

// Per-channel normalization statistics.
struct ChannelStats {
  std::vector<double> mu;
  std::vector<double> var;
};

// Blends training ("source", weight N) and test-minibatch ("target",
// weight n) statistics:
//   mu  = n/(N+n) mu_t  + N/(N+n) mu_s
//   var = n/(N+n) var_t + N/(N+n) var_s
// Throws InvalidArgument on length mismatch or non-positive weights.
ChannelStats MergeBatchStats(const ChannelStats& source,
                             const ChannelStats& target, double source_weight,
                             double target_weight);

}  // namespace blurkit

#endif  // BLURKIT_ADAPT_NUMERICS_H_
