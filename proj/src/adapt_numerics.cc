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

#include "blurkit/adapt_numerics.h"

#include <cmath>

#include "blurkit/error.h"

namespace blurkit {

ChannelStats MergeBatchStats(const ChannelStats& source,
                             const ChannelStats& target, double source_weight,
                             double target_weight) {
  if (source.mu.size() != source.var.size() ||
      target.mu.size() != target.var.size() ||
      source.mu.size() != target.mu.size()) {
    throw InvalidArgument("channel statistics have mismatched lengths");
  }
  if (!(source_weight > 0.0) || !(target_weight > 0.0)) {
    throw InvalidArgument("statistic weights must be positive");
  }
  // std::lerp is monotone and exact at the endpoints, so merged values stay
  // between source and target.
  const double t = target_weight / (source_weight + target_weight);
  ChannelStats out;
  out.mu.resize(source.mu.size());
  out.var.resize(source.var.size());
  for (size_t i = 0; i < out.mu.size(); ++i) {
    if (source.var[i] < 0.0 || target.var[i] < 0.0) {
      throw InvalidArgument("variances must be nonnegative");
    }
    out.mu[i] = std::lerp(source.mu[i], target.mu[i], t);
    out.var[i] = std::lerp(source.var[i], target.var[i], t);
  }
  return out;
}

}  // namespace blurkit
