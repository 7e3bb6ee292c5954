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

#ifndef DGOF_TESTERS_H_
#define DGOF_TESTERS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dgof/distribution.h"
#include "dgof/random.h"

namespace dgof {

// Number of independent splits whose median statistic is compared with the
// threshold: 1 when delta >= 1/12, otherwise the odd Hoeffding count that
// drives a per-split error of 1/12 down to delta.
int MedianSplits(double delta);

// ---------------------------------------------------------------------------
// Centralized test.

// T = sum_x [N_x (N_x - 1) - 2 (m - 1) q_x N_x + m (m - 1) q_x^2] / w_x with
// w_x = max(q_x, 1/k) and m = sum_x N_x. Its mean is
// m (m - 1) sum_x (p_x - q_x)^2 / w_x.
double CentralizedStatistic(const Distribution& q,
                            std::span<const int64_t> counts);
double CentralizedExpectation(const Distribution& p, const Distribution& q,
                              int64_t m);
// Half the smallest mean possible at distance eps, 2 m (m - 1) eps^2 / W with
// W = sum_x w_x.
double CentralizedThreshold(const Distribution& q, int64_t m, double eps);

// Median of the per-split statistics against the common threshold. Every
// split must hold the same number of samples.
Verdict DecideCentralized(const Distribution& q,
                          const std::vector<std::vector<int64_t>>& split_counts,
                          double eps);

// Splits the samples into MedianSplits(delta) equal chunks, dropping the
// remainder.
absl::StatusOr<Verdict> CentralizedIdentityTest(const Distribution& q,
                                                std::span<const Symbol> samples,
                                                double eps, double delta);

// ---------------------------------------------------------------------------
// Simulate-and-infer with l-bit messages.
//
// The padded domain [k'] is cut into g blocks of 2^l - 1 symbols. A group has
// g primaries and g witnesses; member i reports the in-block offset (1-based)
// of its own sample for block (i mod g), or 0. A group yields the symbol
// reported by primary j exactly when j is the only nonzero primary and
// witness j reports 0, which happens with probability prod_j (1 - p(B_j))
// and returns an exact draw from p. Before encoding, each player replaces its
// sample by a uniform symbol with probability kFlattenWeight, which keeps
// every block below mass 3/4 + 1/(4g) and the success probability bounded
// away from zero.

inline constexpr double kFlattenWeight = 0.25;

struct SimulateInferLayout {
  int64_t k = 0;
  int bits = 0;
  int64_t block_size = 0;
  int64_t padded_k = 0;
  int64_t num_blocks = 0;
  int64_t group_size = 0;
  // False when one message can carry the whole sample.
  bool flatten = false;
};

absl::StatusOr<SimulateInferLayout> MakeSimulateInferLayout(int64_t k,
                                                            int bits);

// Law fed into the encoder: pad, then mix with uniform when flattening.
Distribution SimulateInferInputLaw(const SimulateInferLayout& layout,
                                   const Distribution& p);
// Distance at which the reconstructed samples are tested.
double SimulateInferDistance(const SimulateInferLayout& layout, double eps);

// Message of group member `member` (0-based) whose preprocessed sample is x.
uint32_t SimulateInferEncode(const SimulateInferLayout& layout, Symbol x,
                             int64_t member);
// Private-coin preprocessing of a raw sample in [k] into [k'].
Symbol SimulateInferPreprocess(const SimulateInferLayout& layout, Symbol x,
                               Rng& rng);
std::optional<Symbol> SimulateInferDecode(const SimulateInferLayout& layout,
                                          std::span<const uint32_t> group);
// prod_j (1 - p'(B_j)) for the preprocessed law p'.
double SimulateInferSuccessProbability(const SimulateInferLayout& layout,
                                       const Distribution& input_law);

struct CommTranscript {
  SimulateInferLayout layout;
  std::vector<uint32_t> message;
};

CommTranscript RunSimulateInferPlayers(const SimulateInferLayout& layout,
                                       std::span<const Symbol> samples,
                                       Rng& rng);

// Decodes every complete group and tests the reconstructed samples.
absl::StatusOr<Verdict> SimulateInferServer(const Distribution& q,
                                            const CommTranscript& transcript,
                                            double eps, double delta);

// Players plus server. The number of samples must be a multiple of the group
// size.
absl::StatusOr<Verdict> SimulateInferTest(const Distribution& q, int bits,
                                          std::span<const Symbol> samples,
                                          double eps, double delta, Rng& rng);

// Reconstructed-sample counts per split drawn directly from their exact law
// for `groups` groups fed by input law p'.
std::vector<std::vector<int64_t>> SampleReconstructedCounts(
    const SimulateInferLayout& layout, const Distribution& input_law,
    int64_t groups, int splits, Rng& rng);

// ---------------------------------------------------------------------------
// One-bit Hadamard response.

class HadamardScheme {
 public:
  static absl::StatusOr<HadamardScheme> Create(int64_t k, double rho);

  int64_t k() const { return k_; }
  int64_t K() const { return K_; }
  double rho() const { return rho_; }
  // (e^rho - 1) / (e^rho + 1).
  double contrast() const { return contrast_; }

  // Whether x is a +1 position of Sylvester column j (both 1-based).
  static bool InColumn(int64_t j, Symbol x) {
    return (__builtin_popcountll(static_cast<uint64_t>((j - 1) & x.index())) &
            1) == 0;
  }
  double ProbOne(int64_t j, Symbol x) const {
    return InColumn(j, x) ? p_in_ : p_out_;
  }
  // |C_j| over [K].
  int64_t ColumnSize(int64_t j) const { return j == 1 ? K_ : K_ / 2; }

  // The k x 2 channel of column j; output 1 means "bit is one".
  Channel AsChannel(int64_t j) const;
  // p_C_j = contrast * p(C_j) + 1 / (e^rho + 1) for j = 1..K.
  std::vector<double> ColumnMeans(const Distribution& p) const;

 private:
  int64_t k_ = 0;
  int64_t K_ = 0;
  double rho_ = 0.0;
  double contrast_ = 0.0;
  double p_in_ = 0.5;
  double p_out_ = 0.5;
};

bool LdpHadamardResponse(const HadamardScheme& scheme, int64_t j, Symbol x,
                         Rng& rng);

// Block (column) of a player under round-robin assignment.
inline int64_t LdpBlockOf(const HadamardScheme& scheme, int64_t player) {
  return player % scheme.K() + 1;
}

struct LdpTranscript {
  std::vector<int32_t> block;
  std::vector<uint8_t> bit;
};

LdpTranscript RunLdpPlayers(const HadamardScheme& scheme,
                            std::span<const Symbol> samples, Rng& rng);

struct BlockTallies {
  std::vector<int64_t> ones;
  std::vector<int64_t> totals;
};

// Sum over columns of the unbiased estimate of (p_C_j - q_C_j)^2.
double LdpStatistic(std::span<const double> q_columns, const BlockTallies& t);
// Half of K c^2 eps^2 / k, the smallest value of ||p_C - q_C||^2 at
// distance eps.
double LdpThreshold(const HadamardScheme& scheme, double eps);

Verdict DecideLdp(const HadamardScheme& scheme, const Distribution& q,
                  const std::vector<BlockTallies>& splits, double eps);

// Smallest player count the test accepts for confidence delta.
int64_t LdpMinimumPlayers(const HadamardScheme& scheme, double delta);

// Consumes only the one-bit transcript. Players are cut into
// MedianSplits(delta) splits of K * floor(n / (splits K)) players.
absl::StatusOr<Verdict> LdpTest(const Distribution& q, double rho,
                                const LdpTranscript& transcript, double eps,
                                double delta);

// Tallies drawn directly from their exact binomial law.
std::vector<BlockTallies> SampleLdpTallies(const HadamardScheme& scheme,
                                           const Distribution& p, int splits,
                                           int64_t per_block, Rng& rng);

// Draws a count vector from Multinomial(m, p).
std::vector<int64_t> SampleMultinomial(const Distribution& p, int64_t m,
                                       Rng& rng);

}  // namespace dgof

#endif  // DGOF_TESTERS_H_
