// Copyright 2026 The fourphoton Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FOURPHOTON_RNG_H_
#define FOURPHOTON_RNG_H_

#include <cstdint>
#include <random>

namespace fourphoton {

/// Emissions and protocol rounds are drawn in fixed-size blocks, each from its
/// own generator keyed by (seed, stream, block). Results therefore do not
/// depend on how blocks are scheduled across threads.
inline constexpr uint64_t kBlockSize = 4096;

/// Stream namespaces. Frames use their frame index directly.
inline constexpr uint64_t kProtocolStream = uint64_t{1} << 48;

std::mt19937_64 block_generator(uint64_t seed, uint64_t stream, uint64_t block);

inline double uniform01(std::mt19937_64 &rng) {
    return std::generate_canonical<double, 64>(rng);
}

}  // namespace fourphoton

#endif
