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
#include <cstring>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dgof/constants.h"

namespace dgof {
namespace {

constexpr uint64_t kPublicTag = 1;
constexpr uint64_t kNatureTag = 2;
constexpr uint64_t kPrivateTag = 3;
constexpr uint64_t kAggregateTag = 4;

}  // namespace

int64_t MinimumGroupPlayers(const ProtocolConfig& c) {
  if (const auto* comm = std::get_if<CommConstraint>(&c.constraint)) {
    const SimulateInferLayout layout = *MakeSimulateInferLayout(c.L, comm->bits);
    return 8 * layout.group_size * c.splits;
  }
  const HadamardScheme scheme =
      *HadamardScheme::Create(c.L, std::get<LdpConstraint>(c.constraint).rho);
  return LdpMinimumPlayers(scheme, c.delta_prime);
}

namespace {

uint64_t GroupSeed(const ProtocolConfig& c, uint64_t master, uint64_t public_seed,
                   int i) {
  if (c.bypass) return 0;
  if (c.seed_mode == SeedMode::kFreshRandomness) {
    Rng rng(DeriveSeed(master, {kPublicTag, static_cast<uint64_t>(i) + 1}));
    return DrawPublicSeed({c.effective_s, master}, rng);
  }
  return c.amplifier->Neighbor(public_seed, i);
}

}  // namespace

std::string_view SimulationModeName(SimulationMode m) {
  return m == SimulationMode::kPlayer ? "player" : "aggregate";
}

int EffectiveCoins(const ConstraintSpec& constraint, int64_t k, int s) {
  const int log_k = FloorLog2(static_cast<uint64_t>(k));
  if (const auto* comm = std::get_if<CommConstraint>(&constraint)) {
    return std::max(0, std::min(log_k - comm->bits, s));
  }
  return std::min(log_k, s);
}

double PlayerRate(const ConstraintSpec& constraint, int64_t k, double eps,
                  int s) {
  const double kd = static_cast<double>(k);
  if (const auto* comm = std::get_if<CommConstraint>(&constraint)) {
    const double l = comm->bits;
    return std::sqrt(kd) / (eps * eps) *
           std::sqrt(std::max(kd / std::exp2(l), 1.0)) *
           std::sqrt(std::max(kd / std::exp2(s + l), 1.0));
  }
  const double rho = std::get<LdpConstraint>(constraint).rho;
  return kd / (eps * eps * rho * rho) * std::sqrt(std::max(kd / std::exp2(s), 1.0));
}

int64_t RequiredPlayers(const ConstraintSpec& constraint, int64_t k, double eps,
                        int s) {
  const double c =
      std::holds_alternative<CommConstraint>(constraint) ? kCComm : kCLdp;
  // Absorb rounding so exact products are not bumped up by one.
  return static_cast<int64_t>(
      std::ceil(c * PlayerRate(constraint, k, eps, s) * (1 - 1e-12)));
}

int ProtocolConfig::PublicBitsConsumed() const {
  if (bypass) return 0;
  return seed_mode == SeedMode::kExpander ? effective_s : d * effective_s;
}

std::string ProtocolConfig::Summary() const {
  return absl::StrFormat(
      "k=%d eps=%.17g delta=%.17g constraint=%s s=%d effective_s=%d bypass=%d "
      "c0=%d sigma=%d L=%d theta=%.17g alpha=%.17g d=%d eta=%.17g "
      "gamma=%.17g lambda=%.17g complete_graph=%d delta_prime=%.17g "
      "splits=%d players=%d players_per_group=%d profile=%s seed_mode=%s "
      "codebook_seed=%d amplifier_seed=%d",
      k, eps, delta, ConstraintToString(constraint), s, effective_s,
      bypass ? 1 : 0, kC0, sigma, L, theta, alpha, d, eta, gamma, lambda,
      complete_graph ? 1 : 0, delta_prime, splits, players, players_per_group,
      profile == AmplifierProfile::kDesk ? "desk" : "paper",
      seed_mode == SeedMode::kExpander ? "expander" : "fresh", codebook_seed,
      amplifier_seed);
}

absl::StatusOr<ProtocolConfig> MakeProtocolConfig(
    int64_t k, double eps, const ConstraintSpec& constraint, int s,
    const ProtocolOptions& options) {
  if (k < 2 || !IsPowerOfTwo(k)) {
    return absl::InvalidArgumentError(
        absl::StrCat("k=", k, " must be a power of two >= 2; pad first"));
  }
  if (!(eps > 0 && eps <= 1)) return absl::InvalidArgumentError("eps must be in (0, 1]");
  if (!(options.delta > 0 && options.delta < 1)) {
    return absl::InvalidArgumentError("delta must be in (0, 1)");
  }
  if (s < 0 || s > 62) return absl::InvalidArgumentError("s must be in [0, 62]");
  if (absl::Status st = ValidateConstraint(constraint); !st.ok()) return st;

  ProtocolConfig c;
  c.k = k;
  c.eps = eps;
  c.delta = options.delta;
  c.constraint = constraint;
  c.s = s;
  c.effective_s = EffectiveCoins(constraint, k, s);
  c.profile = options.profile;
  c.seed_mode = options.seed_mode;
  c.codebook_seed = options.codebook_seed;
  c.amplifier_seed = options.amplifier_seed;
  c.bypass = c.effective_s <= kC0;

  if (c.bypass) {
    c.L = k;
    c.theta = 1.0;
    c.d = 1;
    c.delta_prime = c.delta;
  } else {
    DcmOptions dcm_options;
    dcm_options.codebook_seed = options.codebook_seed;
    absl::StatusOr<DcmMap> dcm = BuildDcm(k, c.effective_s, dcm_options);
    if (!dcm.ok()) return dcm.status();
    c.dcm = std::make_shared<const DcmMap>(*std::move(dcm));
    c.sigma = c.dcm->sigma();
    c.L = c.dcm->L();
    c.theta = c.dcm->theta();
    c.alpha = c.dcm->codebook().alpha();

    if (options.profile == AmplifierProfile::kDesk) {
      c.eta = kDeskEta;
      c.gamma = kDeskGamma;
    } else {
      c.eta = kFaithfulEta;
      c.gamma = c.delta / 2;
    }
    absl::StatusOr<AmplifierMaps> amp =
        BuildAmplifier(c.effective_s, c.eta, c.gamma, options.amplifier_seed);
    if (!amp.ok()) {
      // Too few vertices for a random graph of the required degree: the
      // complete graph is the best expander available.
      const double threshold = LambdaThreshold(c.eta, c.gamma);
      const double complete_lambda = 1.0 / (std::exp2(c.effective_s) - 1);
      if (complete_lambda > threshold) {
        return absl::FailedPreconditionError(absl::StrFormat(
            "insufficient public coins to amplify: complete graph on 2^%d "
            "vertices has lambda=%.4f > %.4f (%s)",
            c.effective_s, complete_lambda, threshold,
            std::string(amp.status().message())));
      }
      amp = BuildCompleteAmplifier(c.effective_s, c.eta, c.gamma);
      if (!amp.ok()) return amp.status();
    }
    c.amplifier = std::make_shared<const AmplifierMaps>(*std::move(amp));
    c.d = c.amplifier->d();
    c.lambda = c.amplifier->lambda();
    c.complete_graph = c.amplifier->complete();
    c.delta_prime =
        std::min(1.0 - std::pow(1.0 - c.delta, 1.0 / c.d), c.delta / 2);
  }
  c.splits = MedianSplits(c.delta_prime);

  const int64_t min_group = MinimumGroupPlayers(c);
  if (options.players == 0) {
    const int64_t n =
        std::max(RequiredPlayers(constraint, k, eps, s), c.d * min_group);
    c.players_per_group = (n + c.d - 1) / c.d;
  } else {
    c.players_per_group = options.players / c.d;
    if (c.players_per_group < min_group) {
      return absl::InvalidArgumentError(absl::StrCat(
          "n=", options.players, " gives ", c.players_per_group,
          " players per group; the group tester needs ", min_group));
    }
  }
  c.players = c.players_per_group * c.d;
  return c;
}

uint32_t PlayerMessage(const PlayerView& view, Symbol x, Rng& private_rng) {
  const Symbol y = view.dcm != nullptr ? view.dcm->Map(view.public_seed, x) : x;
  uint32_t message;
  if (view.layout != nullptr) {
    const Symbol z = SimulateInferPreprocess(*view.layout, y, private_rng);
    message = SimulateInferEncode(*view.layout, z,
                                  view.member % view.layout->group_size);
  } else {
    message = LdpHadamardResponse(*view.scheme,
                                  LdpBlockOf(*view.scheme, view.member), y,
                                  private_rng)
                  ? 1
                  : 0;
  }
#ifdef DGOF_INSTRUMENT_REFERENCE_LEAK
  // Deliberately broken encoder for the audit's negative test.
  if (view.leaked_reference != nullptr &&
      view.leaked_reference->at_index(0) >
          1.0 / static_cast<double>(view.leaked_reference->k())) {
    message ^= 1;
  }
#endif
  return message;
}

uint64_t DistributionDigest(const Distribution& p) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : p.probs()) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

absl::StatusOr<ProtocolRun> RunProtocol(
    std::shared_ptr<const ProtocolConfig> config, const Distribution& q,
    const Distribution& true_p, uint64_t master_seed,
    const RunOptions& options) {
  const ProtocolConfig& c = *config;
  if (q.k() != c.k || true_p.k() != c.k) {
    return absl::InvalidArgumentError(
        absl::StrCat("reference and truth must live on [", c.k, "]"));
  }
  if (c.players_per_group * c.d != c.players) {
    return absl::InvalidArgumentError("player count not divisible by d");
  }
  if (!c.bypass && (c.dcm == nullptr || c.amplifier == nullptr ||
                    c.dcm->s_bits() != c.effective_s)) {
    return absl::InvalidArgumentError("effective coin count inconsistent");
  }

  ProtocolRun run;
  run.config = config;
  run.reference = q;
  run.truth = true_p;
  Transcript& tr = run.transcript;
  tr.config_summary = c.Summary();
  tr.master_seed = master_seed;
  tr.mode = options.mode;
  tr.public_bits = c.PublicBitsConsumed();
  if (!c.bypass && c.seed_mode == SeedMode::kExpander) {
    Rng pub(DeriveSeed(master_seed, {kPublicTag}));
    tr.public_seed = DrawPublicSeed({c.effective_s, master_seed}, pub);
  }

  const double group_eps = c.theta * c.eps;
  std::optional<SimulateInferLayout> layout;
  std::optional<HadamardScheme> scheme;
  double rho = 0.0;
  if (const auto* comm = std::get_if<CommConstraint>(&c.constraint)) {
    absl::StatusOr<SimulateInferLayout> l = MakeSimulateInferLayout(c.L, comm->bits);
    if (!l.ok()) return l.status();
    layout = *l;
  } else {
    rho = std::get<LdpConstraint>(c.constraint).rho;
    absl::StatusOr<HadamardScheme> h = HadamardScheme::Create(c.L, rho);
    if (!h.ok()) return h.status();
    scheme = *h;
  }

  tr.verdict = Verdict::kAccept;
  for (int i = 0; i < c.d; ++i) {
    GroupRecord rec;
    rec.index = i;
    rec.seed = GroupSeed(c, master_seed, tr.public_seed, i);
    rec.L = c.L;
    rec.theta = c.theta;
    rec.players = c.players_per_group;
    const Distribution qi = c.bypass ? q : c.dcm->PushForward(rec.seed, q);
    rec.reference_digest = DistributionDigest(qi);

    absl::StatusOr<Verdict> verdict;
    if (options.mode == SimulationMode::kPlayer) {
      Rng nature(DeriveSeed(master_seed, {kNatureTag, static_cast<uint64_t>(i)}));
      Rng priv(DeriveSeed(master_seed, {kPrivateTag, static_cast<uint64_t>(i)}));
      PlayerView view;
      view.constraint = c.constraint;
      view.group = i;
      view.public_seed = rec.seed;
      view.dcm = c.bypass ? nullptr : c.dcm.get();
      view.layout = layout ? &*layout : nullptr;
      view.scheme = scheme ? &*scheme : nullptr;
#ifdef DGOF_INSTRUMENT_REFERENCE_LEAK
      view.leaked_reference = &qi;
#endif
      std::vector<uint32_t> messages(c.players_per_group);
      for (int64_t j = 0; j < c.players_per_group; ++j) {
        view.member = j;
        messages[j] = PlayerMessage(view, true_p.Sample(nature), priv);
      }
      if (layout) {
        verdict = SimulateInferServer(qi, CommTranscript{*layout, messages},
                                      group_eps, c.delta_prime);
      } else {
        LdpTranscript lt;
        lt.block.resize(messages.size());
        lt.bit.resize(messages.size());
        for (size_t j = 0; j < messages.size(); ++j) {
          lt.block[j] = static_cast<int32_t>(
              LdpBlockOf(*scheme, static_cast<int64_t>(j)));
          lt.bit[j] = static_cast<uint8_t>(messages[j]);
        }
        verdict = LdpTest(qi, rho, lt, group_eps, c.delta_prime);
      }
      if (options.keep_messages) tr.messages.push_back(std::move(messages));
    } else {
      Rng rng(DeriveSeed(master_seed, {kAggregateTag, static_cast<uint64_t>(i)}));
      const Distribution pi = c.bypass ? true_p : c.dcm->PushForward(rec.seed, true_p);
      if (layout) {
        const int64_t groups = c.players_per_group / layout->group_size;
        verdict = DecideCentralized(
            SimulateInferInputLaw(*layout, qi),
            SampleReconstructedCounts(*layout, SimulateInferInputLaw(*layout, pi),
                                      groups, c.splits, rng),
            SimulateInferDistance(*layout, group_eps));
      } else {
        const int64_t per_block = c.players_per_group / (c.splits * scheme->K());
        verdict = DecideLdp(*scheme, qi,
                            SampleLdpTallies(*scheme, pi, c.splits, per_block, rng),
                            group_eps);
      }
    }
    if (!verdict.ok()) return verdict.status();
    rec.verdict = *verdict;
    tr.groups.push_back(rec);
    if (*verdict == Verdict::kReject) {
      tr.verdict = Verdict::kReject;
      if (!options.evaluate_all_groups) break;
    }
  }
  return run;
}

bool UniversalityAudit(const ProtocolRun& run) {
  RunOptions opts;
  opts.mode = SimulationMode::kPlayer;
  const uint64_t master = run.transcript.master_seed;
  absl::StatusOr<ProtocolRun> base =
      RunProtocol(run.config, run.reference, run.truth, master, opts);
  if (!base.ok()) return false;
  if (run.transcript.mode == SimulationMode::kPlayer &&
      !run.transcript.messages.empty() &&
      run.transcript.messages != base->transcript.messages) {
    return false;
  }
  const int64_t k = run.config->k;
  std::vector<double> geometric(k);
  double sum = 0;
  for (int64_t x = 0; x < k; ++x) sum += (geometric[x] = std::pow(0.7, x));
  for (double& v : geometric) v /= sum;
  const Distribution decoys[] = {Distribution::PointMass(k, Symbol(1)),
                                 Distribution::PointMass(k, Symbol(k)),
                                 *Distribution::Create(geometric)};
  for (const Distribution& decoy : decoys) {
    absl::StatusOr<ProtocolRun> replay =
        RunProtocol(run.config, decoy, run.truth, master, opts);
    if (!replay.ok()) return false;
    if (replay->transcript.messages != base->transcript.messages) return false;
  }
  return true;
}

std::string Transcript::Serialize() const {
  std::string out = "# dgof protocol transcript v1\n";
  absl::StrAppend(&out, "config ", config_summary, "\n");
  absl::StrAppendFormat(&out,
                        "master_seed=%d public_seed=%d public_bits=%d mode=%s\n",
                        master_seed, public_seed, public_bits,
                        std::string(SimulationModeName(mode)));
  for (const GroupRecord& g : groups) {
    absl::StrAppendFormat(
        &out,
        "group index=%d seed=%d L=%d theta=%.17g q_digest=%016x players=%d "
        "verdict=%s\n",
        g.index, g.seed, g.L, g.theta, g.reference_digest, g.players,
        std::string(VerdictName(g.verdict)));
  }
  absl::StrAppend(&out, "verdict=", std::string(VerdictName(verdict)), "\n");
  return out;
}

std::string Transcript::PlayersCsv(const ProtocolConfig& config) const {
  std::string out = "player_index,group_or_block,message\n";
  int64_t group_size = 1;
  int64_t K = 0;
  if (const auto* comm = std::get_if<CommConstraint>(&config.constraint)) {
    group_size = MakeSimulateInferLayout(config.L, comm->bits)->group_size;
  } else {
    K = HadamardScheme::Create(config.L, 0.0)->K();
  }
  const int64_t groups_per_amp = config.players_per_group / group_size;
  for (size_t i = 0; i < messages.size(); ++i) {
    for (size_t j = 0; j < messages[i].size(); ++j) {
      const int64_t player = static_cast<int64_t>(i) * config.players_per_group + j;
      const int64_t tag = K > 0 ? static_cast<int64_t>(j) % K
                                : static_cast<int64_t>(i) * groups_per_amp +
                                      static_cast<int64_t>(j) / group_size;
      absl::StrAppend(&out, player, ",", tag, ",", messages[i][j], "\n");
    }
  }
  return out;
}

}  // namespace dgof
