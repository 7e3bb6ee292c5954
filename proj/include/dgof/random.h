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

#ifndef DGOF_RANDOM_H_
#define DGOF_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dgof {

// All randomized code takes an explicit engine of this type.
using Rng = std::mt19937_64;

// The splitmix64 finalizer.
uint64_t SplitMix64(uint64_t x);

// Derives a child seed from a parent seed and a path of integer tags. Distinct
// tag paths give statistically independent streams.
uint64_t DeriveSeed(uint64_t parent, std::initializer_list<uint64_t> tags);

inline Rng MakeRng(uint64_t seed) { return Rng(seed); }

// Uniform integer in [0, bound). Requires bound > 0.
uint64_t UniformBelow(Rng& rng, uint64_t bound);

// Uniform double in [0, 1).
double Uniform01(Rng& rng);

}  // namespace dgof

#endif  // DGOF_RANDOM_H_
