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

// Numerical companions to the lower-bound argument: the pairwise-difference
// Gram matrices H(W), their nuclear norms, Paninski perturbations of the
// uniform distribution and the decoupled chi-square fluctuation.
//
// Inputs are numbered in pairs (1,2), (3,4), ... and pair i (0-based) is
// perturbed by z_i.

#ifndef DGOF_BOUNDS_H_
#define DGOF_BOUNDS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dgof/distribution.h"
#include "dgof/random.h"

namespace dgof {

struct HMatrix {
  int64_t half_k = 0;
  std::vector<double> entries;  // row-major, half_k x half_k

  double operator()(int64_t i, int64_t j) const {
    return entries[i * half_k + j];
  }
  double Trace() const;
  // z^T H z'.
  double Bilinear(std::span<const double> z, std::span<const double> zp) const;
  double SymmetryDefect() const;
  double MinEigenvalue() const;
};

// H_{ab} = sum_y dW_a(y) dW_b(y) / sum_x W(y|x), dW_a = W(.|2a+1) - W(.|2a+2).
// Outputs no input can reach are skipped.
absl::StatusOr<HMatrix> ComputeHMatrix(const Channel& w);

// Sum of singular values.
double NuclearNorm(const HMatrix& h);

// Elementwise mean; all inputs must share half_k.
absl::StatusOr<HMatrix> AverageHMatrix(std::span<const HMatrix> hs);

// p_z = (1/k)(1 + eps z_1, 1 - eps z_1, ...). Requires eps * max|z_i| <= 1.
absl::StatusOr<Distribution> PaninskiDistribution(std::span<const double> z,
                                                  double eps, int64_t k);

// |<delta_z, delta_z'> - (eps^2/k) z^T H z'|, the inner product taken under
// the output law of the uniform reference. Both sides are evaluated
// independently.
absl::StatusOr<double> BilinearIdentityResidual(const Channel& w,
                                                std::span<const double> z,
                                                std::span<const double> zp,
                                                double eps);

// Left-hand side alone: sum_y q^W(y) delta_z(y) delta_z'(y), with q uniform.
absl::StatusOr<double> DecoupledInnerProduct(const Channel& w,
                                             std::span<const double> z,
                                             std::span<const double> zp,
                                             double eps);

enum class FluctuationMode {
  kExact,
  kMonteCarlo,
};

inline constexpr int64_t kMaxExactHalfK = 12;

struct FluctuationConfig {
  std::vector<Channel> channels;  // W_1..W_n, all on the same input domain
  int64_t k = 0;                  // needed when channels is empty
  double eps = 0.0;
  double beta = 1.0;
  FluctuationMode mode = FluctuationMode::kExact;
  int64_t samples = 100000;
  uint64_t seed = 0;
};

struct FluctuationResult {
  double value = 0.0;
  double standard_error = 0.0;  // zero in exact mode
};

// ln E_{Z,Z'} exp(sum_i <delta_Z^{W_i}, delta_Z'^{W_i}>) over independent
// Rademacher Z, Z', with perturbation size beta * eps.
absl::StatusOr<FluctuationResult> Chi2Fluctuation(const FluctuationConfig& cfg);

// Same quantity for a quadratic form already summed over channels:
// ln E exp(scale * Z^T H Z').
absl::StatusOr<FluctuationResult> RademacherChaosLogMgf(
    const HMatrix& h, double scale, FluctuationMode mode, int64_t samples,
    uint64_t seed);

// Mean over a channel multiset of 1 ∧ chi^2.
double SemimaxminAverage(std::span<const double> fluctuations);

// Lower-bound rates without their constants.
double SampleLowerBound(const ConstraintSpec& constraint, int64_t k, double eps,
                        int s);

struct NormAuditReport {
  std::string constraint;
  int64_t k = 0;
  int64_t random_trials = 0;
  double max_random = 0.0;
  int64_t deterministic_count = 0;  // 0 when not enumerated
  double max_deterministic = 0.0;
  std::vector<int64_t> deterministic_witness;  // output per input, 0-based
  double bound = 0.0;                          // 2^l for Comm, 0 for LDP
  bool within_bound = true;
  // LDP sweep: one entry per rho on the grid.
  std::vector<double> rho_grid;
  std::vector<double> max_norm_per_rho;
  std::vector<double> hadamard_norm_per_rho;
  double fitted_constant = 0.0;  // least squares fit of max norm to c rho^2

  std::string ToString() const;
};

// Largest number of deterministic channels enumerated exhaustively.
inline constexpr int64_t kMaxDeterministicEnumeration = int64_t{1} << 22;

// Comm: random row-stochastic channels with flat Dirichlet rows, plus every
// deterministic l-bit channel when there are few enough. LDP: random
// mixtures of binary randomized response, k-ary randomized response and the
// Hadamard column channels at each rho of a grid ending at the given rho.
absl::StatusOr<NormAuditReport> NormBoundAudit(const ConstraintSpec& constraint,
                                               int64_t k, int64_t trials,
                                               Rng& rng);

struct BoundsRow {
  std::string constraint;
  int64_t k = 0;
  double eps = 0.0;
  double l_or_rho = 0.0;
  int s = 0;
  double lb_formula = 0.0;
  double empirical_n_star = -1.0;  // negative when unavailable
};

std::string BoundsCsv(std::span<const BoundsRow> rows);

}  // namespace dgof

#endif  // DGOF_BOUNDS_H_
