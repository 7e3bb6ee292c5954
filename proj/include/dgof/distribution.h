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

#ifndef DGOF_DISTRIBUTION_H_
#define DGOF_DISTRIBUTION_H_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dgof/random.h"

namespace dgof {

// A symbol of the domain [k] = {1, ..., k}. Serialized forms use the 0-based
// index() instead.
class Symbol {
 public:
  constexpr Symbol() = default;
  constexpr explicit Symbol(int64_t value) : value_(value) {}
  static constexpr Symbol FromIndex(int64_t index) { return Symbol(index + 1); }

  constexpr int64_t value() const { return value_; }
  constexpr int64_t index() const { return value_ - 1; }

  auto operator<=>(const Symbol&) const = default;

 private:
  int64_t value_ = 1;
};

// A probability vector over [k]. Immutable once created.
class Distribution {
 public:
  static constexpr double kSimplexTolerance = 1e-9;

  // Fails unless every entry is finite and nonnegative and the entries sum to
  // one within kSimplexTolerance.
  static absl::StatusOr<Distribution> Create(std::vector<double> probs);
  static Distribution Uniform(int64_t k);
  static Distribution PointMass(int64_t k, Symbol x);

  int64_t k() const { return static_cast<int64_t>(probs_.size()); }
  double operator()(Symbol x) const { return probs_[x.index()]; }
  double at_index(int64_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  // Draws one symbol by inversion. O(log k) after the first call.
  Symbol Sample(Rng& rng) const;

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.probs_ == b.probs_;
  }

 private:
  explicit Distribution(std::vector<double> probs);

  std::vector<double> probs_;
  std::vector<double> cdf_;
};

// Half the l1 distance. Both arguments must share k.
double TotalVariation(const Distribution& p, const Distribution& q);
double L2Distance(const Distribution& p, const Distribution& q);
// Sum over x of (p_x - q_x)^2 / q_x; infinite if p puts mass where q has none.
double ChiSquare(const Distribution& p, const Distribution& q);

// Row-stochastic matrix W(y|x), x in [k], y in {0, ..., y_size - 1}.
class Channel {
 public:
  static absl::StatusOr<Channel> Create(int64_t k, int64_t y_size,
                                        std::vector<double> rows);

  int64_t k() const { return k_; }
  int64_t y_size() const { return y_size_; }
  double operator()(int64_t y, Symbol x) const {
    return rows_[x.index() * y_size_ + y];
  }
  std::span<const double> row(Symbol x) const {
    return std::span<const double>(rows_).subspan(x.index() * y_size_,
                                                  y_size_);
  }

  // Output law when the input is distributed as p.
  std::vector<double> OutputLaw(const Distribution& p) const;

 private:
  Channel(int64_t k, int64_t y_size, std::vector<double> rows)
      : k_(k), y_size_(y_size), rows_(std::move(rows)) {}

  int64_t k_;
  int64_t y_size_;
  std::vector<double> rows_;
};

// True iff W(y|x) / W(y|x') <= e^rho for all y, x, x'. A zero ratio 0/0 counts
// as 1, and a positive entry over zero fails.
bool IsLdp(const Channel& w, double rho);

struct CommConstraint {
  int bits = 1;
};
struct LdpConstraint {
  double rho = 1.0;
};
using ConstraintSpec = std::variant<CommConstraint, LdpConstraint>;

absl::Status ValidateConstraint(const ConstraintSpec& c);
// "comm:3" or "ldp:0.5".
std::string ConstraintToString(const ConstraintSpec& c);
absl::StatusOr<ConstraintSpec> ParseConstraint(std::string_view text);

enum class Verdict { kAccept, kReject };
std::string_view VerdictName(Verdict v);

// Number of shared random bits available to a protocol, plus the harness seed
// from which every stream of a run is derived.
struct SeedBudget {
  int s = 0;
  uint64_t master_seed = 0;
};

// Draws a public seed uniformly from {0, ..., 2^s - 1}.
uint64_t DrawPublicSeed(const SeedBudget& budget, Rng& rng);

// k' = L * ceil(k / L).
int64_t PaddedSize(int64_t k, int64_t L);

// Mixes p with the uniform law on the k' - k new symbols so that the result
// lives on [k'] and TV distances shrink exactly by k / k'.
absl::StatusOr<Distribution> PadDomain(const Distribution& p, int64_t L);

// Sample-level counterpart of PadDomain using private randomness.
Symbol PadSample(Symbol x, int64_t k, int64_t L, Rng& rng);

// The L = 2^floor(log2 k) choice, which makes k' a power of two.
int64_t PowerOfTwoPadTarget(int64_t k);

bool IsPowerOfTwo(int64_t x);
// floor(log2 x) for x >= 1.
int FloorLog2(uint64_t x);
// ceil(log2 x) for x >= 1.
int CeilLog2(uint64_t x);

// Newline-delimited decimal probabilities; '#' starts a comment line.
absl::StatusOr<Distribution> ParseDistribution(std::string_view text);
absl::StatusOr<Distribution> LoadDistributionFile(const std::string& path);
std::string SerializeDistribution(const Distribution& p);

}  // namespace dgof

#endif  // DGOF_DISTRIBUTION_H_
