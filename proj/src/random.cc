// Copyright 2026 The dgof Authors
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

#include "dgof/random.h"

namespace dgof {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t parent, std::initializer_list<uint64_t> tags) {
  uint64_t h = SplitMix64(parent ^ 0x6a09e667f3bcc908ULL);
  for (uint64_t tag : tags) {
    h = SplitMix64(h ^ SplitMix64(tag + 0x3c6ef372fe94f82bULL));
  }
  return h;
}

uint64_t UniformBelow(Rng& rng, uint64_t bound) {
  // Lemire-style rejection keeps the result exactly uniform and independent
  // of the standard library's distribution implementation.
  const uint64_t limit = bound == 0 ? 0 : (~uint64_t{0} - bound + 1) % bound;
  while (true) {
    const uint64_t x = rng();
    if (x >= limit) return x % bound;
  }
}

double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dgof
