// Copyright 2026 The pmwpm Authors
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

#ifndef PMWPM_HASHING_H_
#define PMWPM_HASHING_H_

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace pmwpm {

/// SplitMix64 finalizer. Used to derive independent 64-bit seeds from
/// structured keys (master seed, shot index, ...).
constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Order-sensitive mix of several words into one seed.
constexpr uint64_t mix_seed(std::initializer_list<uint64_t> words) {
    uint64_t h = 0x6A09E667F3BCC909ULL;
    for (uint64_t w : words) {
        h = splitmix64(h ^ splitmix64(w));
    }
    return h;
}

/// 64-bit FNV-1a. Stable across platforms; binds tables to graphs.
constexpr uint64_t fnv1a64(std::string_view bytes, uint64_t h = 0xCBF29CE484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
constexpr double unit_interval(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace pmwpm

#endif  // PMWPM_HASHING_H_
