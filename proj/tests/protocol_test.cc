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

#include "dgof/protocol.h"

#include <cmath>
#include <memory>

#include "absl/strings/match.h"
#include "absl/strings/str_split.h"
#include "dgof/constants.h"
#include "dgof/random.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dgof {
namespace {

using ::dgof::testing::PaninskiAlternative;
using ::dgof::testing::RandomDistribution;

std::shared_ptr<const ProtocolConfig> MustConfig(
    int64_t k, double eps, const ConstraintSpec& c, int s,
    const ProtocolOptions& opts = {}) {
  absl::StatusOr<ProtocolConfig> config = MakeProtocolConfig(k, eps, c, s, opts);
  EXPECT_TRUE(config.ok()) << config.status();
  return std::make_shared<const ProtocolConfig>(*std::move(config));
}

// Smallest legal player count, to keep player-level runs quick.
std::shared_ptr<const ProtocolConfig> SmallConfig(int64_t k, double eps,
                                                  const ConstraintSpec& c, int s) {
  auto probe = MustConfig(k, eps, c, s);
  ProtocolOptions opts;
  opts.players = probe->d * MinimumGroupPlayers(*probe);
  return MustConfig(k, eps, c, s, opts);
}

TEST(EffectiveCoinsTest, CapsAtDomainBudget) {
  EXPECT_EQ(EffectiveCoins(CommConstraint{3}, 64, 4), 3);
  EXPECT_EQ(EffectiveCoins(CommConstraint{3}, 64, 2), 2);
  EXPECT_EQ(EffectiveCoins(CommConstraint{8}, 64, 5), 0);
  EXPECT_EQ(EffectiveCoins(LdpConstraint{0.5}, 64, 4), 4);
  EXPECT_EQ(EffectiveCoins(LdpConstraint{0.5}, 64, 10), 6);
}

TEST(RequiredPlayersTest, CentralizedRateWhenMessageCoversDomain) {
  const double eps = 0.3;
  for (int s : {0, 3, 9}) {
    EXPECT_EQ(RequiredPlayers(CommConstraint{6}, 64, eps, s),
              static_cast<int64_t>(std::ceil(kCComm * 8 / (eps * eps))));
  }
}

TEST(RequiredPlayersTest, PrivateCoinRate) {
  const double eps = 0.25;
  for (int bits : {1, 2, 3}) {
    EXPECT_EQ(RequiredPlayers(CommConstraint{bits}, 256, eps, 0),
              static_cast<int64_t>(std::ceil(
                  kCComm * std::pow(256.0, 1.5) / ((1 << bits) * eps * eps))));
  }
}

TEST(RequiredPlayersTest, OneBitOfMessageIsWorthTwoCoins) {
  const int64_t k = 1 << 12;
  for (int bits = 1; bits <= 4; ++bits) {
    for (int s = 0; s + bits + 2 <= 12; s += 2) {
      const double a = static_cast<double>(RequiredPlayers(CommConstraint{bits + 1}, k, 0.5, s));
      const double b = static_cast<double>(RequiredPlayers(CommConstraint{bits}, k, 0.5, s + 2));
      EXPECT_NEAR(a / b, 1.0, 1e-5) << bits << " " << s;
    }
  }
  const double ref = kCComm * std::pow(k, 1.5) / (4 * 8 * 0.25);
  EXPECT_EQ(RequiredPlayers(CommConstraint{2}, k, 0.5, 6),
            static_cast<int64_t>(std::ceil(ref)));
}

TEST(RequiredPlayersTest, LdpRate) {
  EXPECT_EQ(RequiredPlayers(LdpConstraint{0.5}, 64, 0.3, 0),
            static_cast<int64_t>(std::ceil(kCLdp * 64 * 8 / (0.09 * 0.25))));
  EXPECT_EQ(RequiredPlayers(LdpConstraint{0.5}, 64, 0.3, 8),
            static_cast<int64_t>(std::ceil(kCLdp * 64 / (0.09 * 0.25))));
}

TEST(MakeProtocolConfigTest, BypassWhenFewCoins) {
  auto c = MustConfig(64, 0.3, CommConstraint{3}, 4);
  EXPECT_TRUE(c->bypass);
  EXPECT_EQ(c->effective_s, 3);
  EXPECT_EQ(c->L, 64);
  EXPECT_EQ(c->theta, 1.0);
  EXPECT_EQ(c->d, 1);
  EXPECT_EQ(c->delta_prime, c->delta);
  EXPECT_EQ(c->PublicBitsConsumed(), 0);
  EXPECT_EQ(c->players % c->d, 0);
  EXPECT_GE(c->players, RequiredPlayers(CommConstraint{3}, 64, 0.3, 4));
  EXPECT_TRUE(absl::StrContains(c->Summary(), "bypass=1"));
}

TEST(MakeProtocolConfigTest, CompressesWithEnoughCoins) {
  auto c = MustConfig(64, 0.3, LdpConstraint{0.5}, 5);
  EXPECT_FALSE(c->bypass);
  EXPECT_EQ(c->effective_s, 5);
  EXPECT_EQ(c->sigma, 2);
  EXPECT_EQ(c->L, 32);
  EXPECT_NEAR(c->theta, c->alpha, 1e-15);
  EXPECT_GE(c->d, 2);
  EXPECT_EQ(c->players % c->d, 0);
  EXPECT_DOUBLE_EQ(c->delta_prime,
                   std::min(1 - std::pow(1 - c->delta, 1.0 / c->d), c->delta / 2));
  EXPECT_EQ(c->splits, MedianSplits(c->delta_prime));
  EXPECT_EQ(c->PublicBitsConsumed(), 5);
  EXPECT_LE(c->lambda, LambdaThreshold(c->eta, c->gamma) + 1e-12);

  ProtocolOptions fresh;
  fresh.seed_mode = SeedMode::kFreshRandomness;
  auto f = MustConfig(64, 0.3, LdpConstraint{0.5}, 5, fresh);
  EXPECT_EQ(f->PublicBitsConsumed(), 5 * f->d);
}

TEST(MakeProtocolConfigTest, ExplicitPlayersFloorToMultipleOfD) {
  auto c = MustConfig(64, 0.3, LdpConstraint{0.5}, 5);
  ProtocolOptions opts;
  opts.players = c->players + c->d - 1;
  auto e = MustConfig(64, 0.3, LdpConstraint{0.5}, 5, opts);
  EXPECT_EQ(e->players, c->players);
  opts.players = 10;
  EXPECT_EQ(MakeProtocolConfig(64, 0.3, LdpConstraint{0.5}, 5, opts).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(MakeProtocolConfigTest, RejectsBadInput) {
  EXPECT_FALSE(MakeProtocolConfig(48, 0.3, CommConstraint{2}, 0).ok());
  EXPECT_FALSE(MakeProtocolConfig(64, 0.0, CommConstraint{2}, 0).ok());
  EXPECT_FALSE(MakeProtocolConfig(64, 0.3, CommConstraint{0}, 0).ok());
  EXPECT_FALSE(MakeProtocolConfig(64, 0.3, LdpConstraint{-1}, 0).ok());
  ProtocolOptions opts;
  opts.delta = 1.5;
  EXPECT_FALSE(MakeProtocolConfig(64, 0.3, CommConstraint{2}, 0, opts).ok());
}

TEST(MakeProtocolConfigTest, PaperFaithfulProfileFallsBackToCompleteGraph) {
  ProtocolOptions opts;
  opts.profile = AmplifierProfile::kPaperFaithful;
  auto c = MustConfig(64, 0.3, LdpConstraint{0.5}, 5, opts);
  EXPECT_TRUE(c->complete_graph);
  EXPECT_EQ(c->d, 31);
  EXPECT_DOUBLE_EQ(c->lambda, 1.0 / 31);
  EXPECT_DOUBLE_EQ(c->gamma, c->delta / 2);
  // Sixteen vertices cannot meet the faithful spectral threshold.
  EXPECT_EQ(MakeProtocolConfig(64, 0.3, LdpConstraint{0.5}, 4, opts).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(RunProtocolTest, NullPushForwardsMatchExactly) {
  auto c = MustConfig(64, 0.3, LdpConstraint{0.5}, 5);
  Rng rng(3);
  const Distribution q = RandomDistribution(64, rng);
  RunOptions opts;
  opts.mode = SimulationMode::kAggregate;
  absl::StatusOr<ProtocolRun> run = RunProtocol(c, q, q, 11, opts);
  ASSERT_TRUE(run.ok()) << run.status();
  ASSERT_EQ(run->transcript.groups.size(), static_cast<size_t>(c->d));
  for (const GroupRecord& g : run->transcript.groups) {
    EXPECT_EQ(g.L, c->L);
    EXPECT_EQ(c->dcm->PushForward(g.seed, q), c->dcm->PushForward(g.seed, q));
    EXPECT_EQ(g.reference_digest, DistributionDigest(c->dcm->PushForward(g.seed, q)));
  }
}

TEST(RunProtocolTest, GroupSeedsFollowExpanderNeighbors) {
  auto c = MustConfig(64, 0.3, LdpConstraint{0.5}, 5);
  const Distribution q = Distribution::Uniform(64);
  RunOptions opts;
  opts.mode = SimulationMode::kAggregate;
  auto run = RunProtocol(c, q, q, 5, opts);
  ASSERT_TRUE(run.ok());
  const uint64_t r = run->transcript.public_seed;
  EXPECT_LT(r, 32u);
  for (const GroupRecord& g : run->transcript.groups) {
    EXPECT_EQ(g.seed, c->amplifier->Neighbor(r, g.index));
  }
}

TEST(RunProtocolTest, ReproducibleBitForBit) {
  for (const ConstraintSpec& cons :
       {ConstraintSpec(CommConstraint{2}), ConstraintSpec(LdpConstraint{1.0})}) {
    auto c = SmallConfig(16, 0.5, cons, 0);
    Rng rng(9);
    const Distribution q = RandomDistribution(16, rng);
    const Distribution p = PaninskiAlternative(16, 0.5, rng);
    auto a = RunProtocol(c, q, p, 77);
    auto b = RunProtocol(c, q, p, 77);
    auto other = RunProtocol(c, q, p, 78);
    ASSERT_TRUE(a.ok() && b.ok() && other.ok());
    EXPECT_EQ(a->transcript.Serialize(), b->transcript.Serialize());
    EXPECT_EQ(a->transcript.messages, b->transcript.messages);
    EXPECT_NE(a->transcript.messages, other->transcript.messages);
  }
}

TEST(RunProtocolTest, TranscriptLayout) {
  auto c = MustConfig(16, 0.5, CommConstraint{2}, 0);
  const Distribution q = Distribution::Uniform(16);
  auto run = RunProtocol(c, q, q, 1);
  ASSERT_TRUE(run.ok());
  const std::string text = run->transcript.Serialize();
  std::vector<std::string> lines = absl::StrSplit(text, '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_TRUE(absl::StartsWith(lines[1], "config k=16 "));
  EXPECT_TRUE(absl::StartsWith(lines[2], "master_seed=1 "));
  EXPECT_TRUE(absl::StartsWith(lines[3], "group index=0 "));
  EXPECT_TRUE(absl::StrContains(lines[3], "q_digest="));
  EXPECT_TRUE(absl::StartsWith(lines[4], "verdict="));

  const std::string csv = run->transcript.PlayersCsv(*c);
  std::vector<std::string> rows = absl::StrSplit(csv, '\n', absl::SkipEmpty());
  ASSERT_EQ(rows.size(), static_cast<size_t>(c->players) + 1);
  EXPECT_EQ(rows[0], "player_index,group_or_block,message");
  EXPECT_TRUE(absl::StartsWith(rows[1], "0,0,"));
}

TEST(RunProtocolTest, RejectsMismatchedDomains) {
  auto c = MustConfig(16, 0.5, CommConstraint{2}, 0);
  EXPECT_FALSE(RunProtocol(c, Distribution::Uniform(8), Distribution::Uniform(16), 1).ok());
  ProtocolConfig broken = *c;
  broken.players += 1;
  broken.d = 2;
  EXPECT_FALSE(RunProtocol(std::make_shared<const ProtocolConfig>(broken),
                           Distribution::Uniform(16), Distribution::Uniform(16), 1)
                   .ok());
}

TEST(UniversalityAuditTest, HonestRunsPass) {
  Rng rng(21);
  struct Case {
    ConstraintSpec c;
    int64_t k;
    int s;
  };
  const Case cases[] = {{CommConstraint{2}, 16, 0},
                        {LdpConstraint{1.0}, 16, 0},
                        {LdpConstraint{1.0}, 32, 5},
                        {CommConstraint{1}, 32, 4}};
  for (const Case& cs : cases) {
    auto c = SmallConfig(cs.k, 0.5, cs.c, cs.s);
    const Distribution q = RandomDistribution(cs.k, rng);
    const Distribution p = PaninskiAlternative(cs.k, 0.5, rng);
    RunOptions ro;
    ro.evaluate_all_groups = true;
    auto run = RunProtocol(c, q, p, 31, ro);
    ASSERT_TRUE(run.ok()) << run.status();
    EXPECT_TRUE(UniversalityAudit(*run)) << c->Summary();
  }
}

// Player-level and aggregate simulation must reject at the same rate.
TEST(RunProtocolTest, PlayerAndAggregateModesAgreeInLaw) {
  Rng rng(41);
  const int64_t k = 16;
  const Distribution q = Distribution::Uniform(k);
  const Distribution p = PaninskiAlternative(k, 0.5, rng);
  for (const ConstraintSpec& cons :
       {ConstraintSpec(CommConstraint{1}), ConstraintSpec(LdpConstraint{1.0})}) {
    ProtocolOptions po;
    po.players = std::holds_alternative<CommConstraint>(cons) ? 1200 : 2200;
    auto c = MustConfig(k, 0.5, cons, 0, po);
    const int trials = 400;
    int rejects[2] = {0, 0};
    for (int m = 0; m < 2; ++m) {
      RunOptions ro;
      ro.mode = m == 0 ? SimulationMode::kPlayer : SimulationMode::kAggregate;
      ro.keep_messages = false;
      for (int t = 0; t < trials; ++t) {
        auto run = RunProtocol(c, q, p, 1000 + t, ro);
        ASSERT_TRUE(run.ok());
        rejects[m] += run->verdict() == Verdict::kReject;
      }
    }
    const double a = rejects[0] / static_cast<double>(trials);
    const double b = rejects[1] / static_cast<double>(trials);
    EXPECT_GT(a, 0.1) << ConstraintToString(cons);
    EXPECT_LT(a, 0.9) << ConstraintToString(cons);
    const double se = std::sqrt((a * (1 - a) + b * (1 - b)) / trials);
    EXPECT_LE(std::abs(a - b), 4 * se + 0.01) << ConstraintToString(cons);
  }
}

}  // namespace
}  // namespace dgof
