// Copyright 2026 The rmc Authors. All Rights Reserved.
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

#ifndef RMC_RANDOM_HPP_
#define RMC_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace rmc {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent stream seed for (base seed, counter, purpose). Streams depend
// only on these three values, never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter,
                                    std::string_view tag) {
  return mix64(mix64(mix64(base) ^ counter) ^ fnv1a(tag));
}

inline Rng make_rng(std::uint64_t base, std::uint64_t counter,
                    std::string_view tag) {
  return Rng(derive_seed(base, counter, tag));
}

}  // namespace rmc

#endif  // RMC_RANDOM_HPP_
