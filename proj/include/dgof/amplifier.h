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

#ifndef DGOF_AMPLIFIER_H_
#define DGOF_AMPLIFIER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dgof/constants.h"

namespace dgof {

// d maps pi_1..pi_d on {0,1}^s given by the neighbor lists of a d-regular
// multigraph whose spectral expansion has been certified.
class AmplifierMaps {
 public:
  int s() const { return s_; }
  uint64_t n() const { return n_; }
  int d() const { return d_; }
  double lambda() const { return lambda_; }
  double eta() const { return eta_; }
  double gamma() const { return gamma_; }
  uint64_t seed() const { return seed_; }
  bool complete() const { return complete_; }

  // pi_1(r), ..., pi_d(r).
  absl::StatusOr<std::vector<uint64_t>> Neighbors(uint64_t r) const;
  // Unchecked i-th neighbor, 0 <= i < d.
  uint64_t Neighbor(uint64_t r, int i) const {
    return adjacency_[r * d_ + i];
  }

  // lambda sqrt(|S||T|) / n - |e(S,T)/(dn) - |S||T|/n^2| for indicator
  // vectors of S and T.
  double MixingResidual(std::span<const uint8_t> in_s,
                        std::span<const uint8_t> in_t) const;

  // Header line then one line of d neighbor labels per vertex.
  std::string Dump() const;

 private:
  friend absl::StatusOr<AmplifierMaps> BuildAmplifier(int, double, double,
                                                       uint64_t, int);
  friend absl::StatusOr<AmplifierMaps> BuildCompleteAmplifier(int, double,
                                                               double);
  friend AmplifierMaps TrivialAmplifier(int);

  int s_ = 0;
  uint64_t n_ = 1;
  int d_ = 0;
  double lambda_ = 0.0;
  double eta_ = 0.0;
  double gamma_ = 0.0;
  uint64_t seed_ = 0;
  bool complete_ = false;
  std::vector<uint32_t> adjacency_;
};

// ceil(4.1 eta / ((1 - eta)^2 gamma)).
int RequiredDegree(double eta, double gamma);
// (1 - eta) sqrt(gamma / eta).
double LambdaThreshold(double eta, double gamma);

// Largest vertex count for the dense eigensolver; beyond it power iteration
// with the all-ones direction projected out is used.
inline constexpr uint64_t kDenseSpectrumLimit = 4096;

// Second largest absolute eigenvalue of the normalized adjacency matrix.
double SpectralExpansion(std::span<const uint32_t> adjacency, uint64_t n,
                         int d);

// Random d-regular multigraph from d/2 permutations and their inverses (plus
// one perfect matching when d is odd), regenerated with seed + 1 until
// lambda <= LambdaThreshold(eta, gamma).
absl::StatusOr<AmplifierMaps> BuildAmplifier(
    int s, double eta, double gamma, uint64_t seed,
    int max_retries = kMaxCertificationRetries);

// K_n with d = n - 1, neighbors in ascending order, lambda = 1 / (n - 1).
absl::StatusOr<AmplifierMaps> BuildCompleteAmplifier(int s, double eta,
                                                     double gamma);

// A single map pi_1 = identity on {0,1}^s, used when no amplification is
// needed.
AmplifierMaps TrivialAmplifier(int s);

}  // namespace dgof

#endif  // DGOF_AMPLIFIER_H_
