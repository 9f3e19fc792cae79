//
// Copyright 2026 The dfpricing Authors
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
//

#ifndef DFPRICING_RNG_H_
#define DFPRICING_RNG_H_

#include <cstdint>
#include <limits>
#include <string_view>

namespace dfpricing {

// SplitMix64 (Steele, Lea, Flood). Small state, cheap to seed, which makes it
// suitable for one independent stream per record.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Combines a seed with further keys into a well-mixed 64-bit seed.
inline std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t key) {
  SplitMix64 a(seed ^ (key * 0xd1b54a32d192ed03ULL));
  a();
  return a() ^ key;
}

inline std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t key1,
                             std::uint64_t key2) {
  return MixSeed(MixSeed(seed, key1), key2);
}

// FNV-1a; platform independent, unlike std::hash.
inline std::uint64_t HashLabel(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t SeedForLabel(std::uint64_t base_seed,
                                  std::string_view label) {
  return MixSeed(base_seed, HashLabel(label));
}

// Uniform double in [0, 1) from the top 53 bits.
template <typename Engine>
double UniformUnit(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace dfpricing

#endif  // DFPRICING_RNG_H_
