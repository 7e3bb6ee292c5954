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

// Monte Carlo error-rate experiments over parameter grids.
//
// A spec is a flat text file of `key = value` lines; `#` starts a comment and
// list values are comma separated. Keys:
//
//   k           domain sizes; others are padded to the next power of two
//   eps         distances
//   constraint  comm:<bits> or ldp:<rho>
//   coins       public coin counts s
//   players     player counts, or `auto` for the calibrated requirement
//   truth       null, far (default both)
//   trials      trials per cell (>= 1)
//   alternative paninski | random-far | file:<path>
//   reference   uniform | file:<path>
//   delta       target failure probability (default 1/12)
//   master_seed 64-bit seed
//   simulation  aggregate | player
//   profile     desk | paper
//   seed_mode   expander | fresh
//   output      CSV path, `-` for stdout
//
// Cells enumerate k, eps, constraint, coins, players, truth with truth
// varying fastest. Trial t of cell c draws everything from
// DeriveSeed(master_seed, {c, t}), so output never depends on scheduling.

#ifndef DGOF_EXPERIMENT_H_
#define DGOF_EXPERIMENT_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dgof/distribution.h"
#include "dgof/protocol.h"

namespace dgof {

enum class AlternativeKind {
  kPaninski,
  kRandomFar,
  kFile,
};

enum class Truth {
  kNull,
  kFar,
};

std::string_view TruthName(Truth t);

struct ExperimentSpec {
  std::vector<int64_t> ks;
  std::vector<double> epss;
  std::vector<ConstraintSpec> constraints;
  std::vector<int> coins;
  std::vector<int64_t> players;  // 0 means auto
  std::vector<Truth> truths = {Truth::kNull, Truth::kFar};
  int64_t trials = 1;
  AlternativeKind alternative = AlternativeKind::kPaninski;
  std::string alternative_path;
  std::string reference_path;  // empty means uniform
  double delta = 1.0 / 12.0;
  uint64_t master_seed = 0;
  SimulationMode simulation = SimulationMode::kAggregate;
  AmplifierProfile profile = AmplifierProfile::kDesk;
  SeedMode seed_mode = SeedMode::kExpander;
  std::string output = "-";
};

absl::StatusOr<ExperimentSpec> ParseExperimentSpec(std::string_view text);
absl::StatusOr<ExperimentSpec> LoadExperimentSpec(const std::string& path);

struct ResultRow {
  int64_t cell = 0;
  int64_t k = 0;
  int64_t padded_k = 0;
  double eps = 0.0;
  std::string constraint;
  int s = 0;
  int64_t n = 0;
  std::string n_spec;  // "auto" or the requested count
  Truth truth = Truth::kNull;
  int64_t trials = 0;
  int64_t accepts = 0;
  double accept_rate = 0.0;
  double stderr_ = 0.0;
  double wall_time = 0.0;  // seconds; not written to the CSV
};

inline constexpr char kResultsCsvHeader[] =
    "cell,k,padded_k,eps,constraint,s,n_spec,n,truth,trials,accepts,"
    "accept_rate,stderr";

std::string ResultsCsv(const std::vector<ResultRow>& rows);
std::string SummaryTable(const std::vector<ResultRow>& rows);

// Worker count from DGOF_WORKERS, at least 1.
int WorkersFromEnv();

// Generates the far distribution for one trial at total variation eps from q.
// Paninski requires a uniform q.
absl::StatusOr<Distribution> DrawAlternative(AlternativeKind kind,
                                             const Distribution& q, double eps,
                                             const Distribution* fixed,
                                             Rng& rng);

// Runs every cell. Invalid configurations fail before any trial runs.
absl::StatusOr<std::vector<ResultRow>> RunExperiment(const ExperimentSpec& spec,
                                                     int workers);

struct ErrorEstimate {
  int64_t trials = 0;
  int64_t null_rejects = 0;
  int64_t far_accepts = 0;
  double type1() const { return static_cast<double>(null_rejects) / trials; }
  double type2() const { return static_cast<double>(far_accepts) / trials; }
};

// Both error rates of one configuration against uniform q and Paninski
// alternatives at distance config->eps.
absl::StatusOr<ErrorEstimate> EstimateErrors(
    std::shared_ptr<const ProtocolConfig> config, int64_t trials, uint64_t seed,
    SimulationMode mode, int workers);

}  // namespace dgof

#endif  // DGOF_EXPERIMENT_H_
