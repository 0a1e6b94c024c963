// Copyright 2026 The UniInst Engine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>

namespace uniinst {

/// Counter-based pseudo-random stream built on the splitmix64 finalizer.
/// A stream is keyed by a seed plus a path of integers (scene index,
/// entity index, purpose tag, ...), so independent entities draw from
/// independent streams and generation parallelizes without losing
/// reproducibility. Pure 64-bit integer arithmetic: output is identical
/// on every platform.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed,
                     std::initializer_list<std::uint64_t> path = {})
      : state_(mix(seed ^ kPhi)) {
    for (std::uint64_t key : path) {
      state_ = mix(state_ ^ (key + kPhi));
    }
  }

  std::uint64_t next_u64() {
    state_ += kPhi;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi] inclusive.
  int next_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  bool next_bool(double p_true) { return next_unit() < p_true; }

 private:
  static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace uniinst
