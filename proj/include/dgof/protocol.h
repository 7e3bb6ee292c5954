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

#ifndef DGOF_PROTOCOL_H_
#define DGOF_PROTOCOL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dgof/amplifier.h"
#include "dgof/distribution.h"
#include "dgof/domain_compression.h"
#include "dgof/testers.h"

namespace dgof {

enum class AmplifierProfile {
  // eta = 1/2, gamma = 3/10.
  kDesk,
  // eta = 3/4, gamma = delta / 2.
  kPaperFaithful,
};

enum class SeedMode {
  // One public seed R, group i uses the i-th expander neighbor of R.
  kExpander,
  // Baseline that draws an independent seed per group. Uses d times the
  // public-coin budget.
  kFreshRandomness,
};

enum class SimulationMode {
  // Every player draws a sample and computes its message.
  kPlayer,
  // Sufficient statistics drawn from their exact law.
  kAggregate,
};

std::string_view SimulationModeName(SimulationMode m);

struct ProtocolOptions {
  double delta = 1.0 / 12.0;
  AmplifierProfile profile = AmplifierProfile::kDesk;
  SeedMode seed_mode = SeedMode::kExpander;
  // 0 selects max(RequiredPlayers, smallest workable count).
  int64_t players = 0;
  uint64_t codebook_seed = 0;
  uint64_t amplifier_seed = 0;
};

struct ProtocolConfig {
  int64_t k = 0;
  double eps = 0.0;
  double delta = 0.0;
  ConstraintSpec constraint;
  int s = 0;
  int effective_s = 0;
  bool bypass = true;
  int sigma = 0;
  int64_t L = 0;
  double theta = 1.0;
  // Isometry constant of the codebook, 0 when the compression is bypassed.
  double alpha = 0.0;
  int d = 1;
  double eta = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  bool complete_graph = false;
  double delta_prime = 0.0;
  int splits = 1;
  int64_t players = 0;
  int64_t players_per_group = 0;
  AmplifierProfile profile = AmplifierProfile::kDesk;
  SeedMode seed_mode = SeedMode::kExpander;
  uint64_t codebook_seed = 0;
  uint64_t amplifier_seed = 0;

  std::shared_ptr<const DcmMap> dcm;
  std::shared_ptr<const AmplifierMaps> amplifier;

  // Public bits drawn by one run.
  int PublicBitsConsumed() const;
  // One line of key=value pairs.
  std::string Summary() const;
};

// Comm: C (sqrt k / eps^2) sqrt(max(k / 2^l, 1)) sqrt(max(k / 2^(s+l), 1)).
// Ldp:  C (k / (eps^2 rho^2)) sqrt(max(k / 2^s, 1)).
// Player-count formula without its calibrated multiplier.
double PlayerRate(const ConstraintSpec& constraint, int64_t k, double eps,
                  int s);

int64_t RequiredPlayers(const ConstraintSpec& constraint, int64_t k, double eps,
                        int s);

// min(log2 k - l, s) clamped at 0 for Comm, min(log2 k, s) for Ldp.
// Fewest players a single amplification group may hold for its tester to
// produce a statistic.
int64_t MinimumGroupPlayers(const ProtocolConfig& config);

int EffectiveCoins(const ConstraintSpec& constraint, int64_t k, int s);

absl::StatusOr<ProtocolConfig> MakeProtocolConfig(
    int64_t k, double eps, const ConstraintSpec& constraint, int s,
    const ProtocolOptions& options = {});

// Everything player code may read. The reference distribution is absent.
struct PlayerView {
  ConstraintSpec constraint;
  int group = 0;
  int64_t member = 0;
  uint64_t public_seed = 0;
  const DcmMap* dcm = nullptr;
  const SimulateInferLayout* layout = nullptr;
  const HadamardScheme* scheme = nullptr;
#ifdef DGOF_INSTRUMENT_REFERENCE_LEAK
  const Distribution* leaked_reference = nullptr;
#endif
};

// The message of one player holding sample x in [k].
uint32_t PlayerMessage(const PlayerView& view, Symbol x, Rng& private_rng);

struct GroupRecord {
  int index = 0;
  uint64_t seed = 0;
  int64_t L = 0;
  double theta = 1.0;
  uint64_t reference_digest = 0;
  int64_t players = 0;
  Verdict verdict = Verdict::kAccept;
};

struct Transcript {
  std::string config_summary;
  uint64_t master_seed = 0;
  uint64_t public_seed = 0;
  int public_bits = 0;
  SimulationMode mode = SimulationMode::kPlayer;
  std::vector<GroupRecord> groups;
  // Player mode only: messages of each amplification group, in player order.
  std::vector<std::vector<uint32_t>> messages;
  Verdict verdict = Verdict::kAccept;

  std::string Serialize() const;
  // CSV with columns player_index,group_or_block,message.
  std::string PlayersCsv(const ProtocolConfig& config) const;
};

struct ProtocolRun {
  std::shared_ptr<const ProtocolConfig> config;
  Distribution reference = Distribution::Uniform(1);
  Distribution truth = Distribution::Uniform(1);
  Transcript transcript;
  Verdict verdict() const { return transcript.verdict; }
};

struct RunOptions {
  SimulationMode mode = SimulationMode::kPlayer;
  // Keep evaluating groups after a reject so the transcript is complete.
  bool evaluate_all_groups = true;
  bool keep_messages = true;
};

absl::StatusOr<ProtocolRun> RunProtocol(
    std::shared_ptr<const ProtocolConfig> config, const Distribution& q,
    const Distribution& true_p, uint64_t master_seed,
    const RunOptions& options = {});

// Replays the player side with decoy reference distributions under the same
// seeds and checks that every message is unchanged.
bool UniversalityAudit(const ProtocolRun& run);

// 64-bit FNV-1a over the little-endian bytes of the probabilities.
uint64_t DistributionDigest(const Distribution& p);

}  // namespace dgof

#endif  // DGOF_PROTOCOL_H_
