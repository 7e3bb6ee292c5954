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

// Runs every acceptance criterion and prints one PASS or FAIL line for each.
// The exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_format.h"
#include "dgof/amplifier.h"
#include "dgof/bounds.h"
#include "dgof/distribution.h"
#include "dgof/domain_compression.h"
#include "dgof/experiment.h"
#include "dgof/protocol.h"
#include "dgof/random.h"
#include "dgof/testers.h"
#include "test_util.h"

namespace dgof {
namespace {

using testing::RandomDistribution;
using testing::RandomFarPair;

// Seeds here are disjoint from the ones used to calibrate the constants.
constexpr uint64_t kSeed = 20261015;
constexpr double kDelta = 1.0 / 12.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Channel RandomChannel(int64_t k, int64_t outputs, Rng& rng) {
  std::vector<double> rows;
  for (int64_t x = 0; x < k; ++x) {
    const Distribution row = RandomDistribution(outputs, rng);
    rows.insert(rows.end(), row.probs().begin(), row.probs().end());
  }
  return *Channel::Create(k, outputs, std::move(rows));
}

Outcome Parseval() {
  Rng rng(kSeed);
  double worst = 0.0;
  int instances = 0;
  for (int64_t k : {8, 16, 32, 64}) {
    for (double rho : {0.25, 0.5, 1.0}) {
      const HadamardScheme s = *HadamardScheme::Create(k, rho);
      const double e = std::exp(rho);
      const double factor = s.K() * (e - 1) * (e - 1) / (4 * (e + 1) * (e + 1));
      for (int t = 0; t < 1000; ++t, ++instances) {
        const Distribution p = RandomDistribution(k, rng);
        const Distribution q = RandomDistribution(k, rng);
        const std::vector<double> pc = s.ColumnMeans(p), qc = s.ColumnMeans(q);
        double lhs = 0.0;
        for (size_t j = 0; j < pc.size(); ++j) {
          lhs += (pc[j] - qc[j]) * (pc[j] - qc[j]);
        }
        const double l2 = L2Distance(p, q);
        worst = std::max(worst, std::abs(lhs - factor * l2 * l2));
      }
    }
  }
  return {worst <= 1e-9,
          absl::StrFormat("%d pairs, max abs error %.3g", instances, worst)};
}

Outcome HIdentities() {
  std::vector<double> id(16, 0.0);
  for (int x = 0; x < 4; ++x) id[x * 4 + x] = 1.0;
  const HMatrix h = *ComputeHMatrix(*Channel::Create(4, 4, id));
  bool ok = h.half_k == 2;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) ok &= std::abs(h(i, j) - (i == j ? 2 : 0)) < 1e-12;
  }
  const double id_norm = NuclearNorm(h);
  ok &= std::abs(id_norm - 4.0) < 1e-12;

  std::vector<double> constant(16, 0.0);
  for (int x = 0; x < 4; ++x) constant[x * 4] = 1.0;
  const double const_norm =
      NuclearNorm(*ComputeHMatrix(*Channel::Create(4, 4, constant)));
  ok &= const_norm < 1e-12;

  Rng rng(kSeed + 1);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int64_t k = int64_t{2} << UniformBelow(rng, 5);
    const HMatrix r = *ComputeHMatrix(
        RandomChannel(k, 1 + UniformBelow(rng, 8), rng));
    worst = std::max(worst, std::abs(NuclearNorm(r) - r.Trace()));
  }
  ok &= worst <= 1e-9;
  return {ok, absl::StrFormat("identity norm %.12g, constant norm %.3g, "
                              "max |nuclear - trace| %.3g on 200 channels",
                              id_norm, const_norm, worst)};
}

Outcome NormAudit() {
  Rng rng(kSeed + 2);
  const NormAuditReport r = *NormBoundAudit(CommConstraint{1}, 8, 5000, rng);
  bool separating = r.deterministic_witness.size() == 8;
  for (size_t i = 0; separating && i + 1 < r.deterministic_witness.size(); i += 2) {
    separating = r.deterministic_witness[i] != r.deterministic_witness[i + 1];
  }
  const bool ok = r.within_bound && r.max_random <= 2.0 + 1e-12 &&
                  r.deterministic_count == 256 &&
                  std::abs(r.max_deterministic - 2.0) < 1e-12 && separating;
  return {ok, absl::StrFormat("random max %.6f, deterministic max %.12g over "
                              "%d channels, witness pair-separating=%s",
                              r.max_random, r.max_deterministic,
                              r.deterministic_count, separating ? "yes" : "no")};
}

Outcome BilinearAndFluctuation() {
  Rng rng(kSeed + 3);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const int64_t k = int64_t{2} << UniformBelow(rng, 4);
    const Channel w = RandomChannel(k, 1 + UniformBelow(rng, 6), rng);
    std::vector<double> z(k / 2), zp(k / 2);
    for (double& v : z) v = 2 * Uniform01(rng) - 1;
    for (double& v : zp) v = 2 * Uniform01(rng) - 1;
    worst = std::max(worst, *BilinearIdentityResidual(w, z, zp, Uniform01(rng)));
  }
  bool ok = worst <= 1e-9;
  double worst_z = 0.0;
  for (int n = 1; n <= 4; ++n) {
    FluctuationConfig cfg;
    cfg.channels.assign(n, RandomChannel(8, 2 + UniformBelow(rng, 3), rng));
    cfg.eps = 0.3;
    const double exact = Chi2Fluctuation(cfg)->value;
    cfg.mode = FluctuationMode::kMonteCarlo;
    cfg.samples = 1000000;
    cfg.seed = kSeed + 30 + n;
    const FluctuationResult mc = *Chi2Fluctuation(cfg);
    const double zscore = std::abs(mc.value - exact) / mc.standard_error;
    worst_z = std::max(worst_z, zscore);
    ok &= mc.standard_error > 0 && zscore <= 4.0;
  }
  return {ok, absl::StrFormat("max bilinear residual %.3g on 500 instances, "
                              "worst exact-vs-MC gap %.2f SE for n=1..4",
                              worst, worst_z)};
}

Outcome Dcm() {
  const DcmMap dcm = *BuildDcm(256, 7);
  Rng rng(kSeed + 4);
  double min_fraction = 1.0, max_excess = -1.0;
  bool ok = true;
  for (int t = 0; t < 100; ++t) {
    auto [p, q] = RandomFarPair(256, 0.3, rng);
    const DistortionReport r = DcmDistortion(dcm, p, q);
    min_fraction = std::min(min_fraction, r.fraction_preserved);
    for (double v : r.per_seed_tv) max_excess = std::max(max_excess, v - r.input_tv);
    const DistortionReport same = DcmDistortion(dcm, p, p);
    for (uint64_t u = 0; u < dcm.num_seeds(); ++u) {
      ok &= same.per_seed_tv[u] == 0.0 && dcm.PushForward(u, p) == dcm.PushForward(u, p);
    }
  }
  // Contraction is exact in real arithmetic; the check allows one part in
  // 1e15 for rounding in the two TV sums.
  ok &= min_fraction >= 0.5 && max_excess <= 1e-15;
  return {ok, absl::StrFormat("L=%d theta=%.4f seeds=%d, min preserved "
                              "fraction %.3f, max TV excess %.3g",
                              dcm.L(), dcm.theta(), dcm.num_seeds(),
                              min_fraction, max_excess)};
}

Outcome Amplifier() {
  const double eta = 0.5, gamma = 0.3;
  const double threshold = LambdaThreshold(eta, gamma);
  bool ok = true;
  std::string lambdas;
  for (int s : {6, 8, 10}) {
    const AmplifierMaps amp = *BuildAmplifier(s, eta, gamma, kSeed + s);
    ok &= amp.lambda() <= threshold;
    lambdas += absl::StrFormat(" s=%d:%.4f", s, amp.lambda());
  }
  const AmplifierMaps amp = *BuildAmplifier(10, eta, gamma, kSeed + 10);
  Rng rng(kSeed + 5);
  double worst = 1.0;
  for (int t = 0; t < 500; ++t) {
    std::vector<uint8_t> s(amp.n()), u(amp.n());
    const double ps = Uniform01(rng), pt = Uniform01(rng);
    for (uint64_t v = 0; v < amp.n(); ++v) {
      s[v] = Uniform01(rng) < ps;
      u[v] = Uniform01(rng) < pt;
    }
    worst = std::min(worst, amp.MixingResidual(s, u));
  }
  ok &= worst >= -1e-12;
  int good = 0;
  for (int planting = 0; planting < 100; ++planting) {
    std::vector<uint32_t> order(amp.n());
    for (uint32_t i = 0; i < amp.n(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[UniformBelow(rng, i)]);
    }
    std::vector<uint8_t> bad(amp.n(), 0);
    for (uint64_t i = 0; i < static_cast<uint64_t>(eta * amp.n()); ++i) {
      bad[order[i]] = 1;
    }
    int64_t captured = 0;
    for (uint64_t r = 0; r < amp.n(); ++r) {
      bool all = true;
      for (int i = 0; i < amp.d() && all; ++i) all = bad[amp.Neighbor(r, i)];
      captured += all;
    }
    good += static_cast<double>(captured) / amp.n() <= gamma;
  }
  ok &= good >= 95;
  return {ok, absl::StrFormat("threshold %.4f, lambda%s; min mixing residual "
                              "%.3g; %d/100 plantings within gamma",
                              threshold, lambdas, worst, good)};
}

std::shared_ptr<const ProtocolConfig> Config(int64_t k, double eps,
                                             const ConstraintSpec& c, int s,
                                             int64_t players = 0) {
  ProtocolOptions options;
  options.delta = kDelta;
  options.players = players;
  absl::StatusOr<ProtocolConfig> config = MakeProtocolConfig(k, eps, c, s, options);
  if (!config.ok()) return nullptr;
  return std::make_shared<const ProtocolConfig>(*std::move(config));
}

Outcome EndToEnd() {
  const double limit = kDelta + 0.05;
  bool ok = true;
  std::string detail;
  struct Case {
    const char* name;
    ConstraintSpec c;
    int s;
  };
  const Case cases[] = {{"comm:3", CommConstraint{3}, 0},
                        {"comm:3", CommConstraint{3}, 4},
                        {"ldp:0.5", LdpConstraint{0.5}, 0},
                        {"ldp:0.5", LdpConstraint{0.5}, 4}};
  uint64_t seed = kSeed + 100;
  for (const Case& c : cases) {
    const auto config = Config(64, 0.3, c.c, c.s);
    if (config == nullptr) return {false, "configuration rejected"};
    const absl::StatusOr<ErrorEstimate> e =
        EstimateErrors(config, 300, seed++, SimulationMode::kAggregate, WorkersFromEnv());
    if (!e.ok()) return {false, std::string(e.status().message())};
    ok &= e->type1() <= limit && e->type2() <= limit;
    detail += absl::StrFormat(" [%s s=%d n=%d I=%.3f II=%.3f]", c.name, c.s,
                              config->players, e->type1(), e->type2());
  }
  return {ok, absl::StrFormat("limit %.4f;%s", limit, detail)};
}

// Smallest n on a 2^(1/8) grid with both error rates at most delta, each
// estimated from 1000 trials.
int64_t EmpiricalNStar(int64_t k, const ConstraintSpec& c, uint64_t seed) {
  const double rate = PlayerRate(c, k, 0.3, 0);
  for (int j = 8; j <= 8 * 10; ++j) {
    const int64_t n = static_cast<int64_t>(rate * std::exp2(j / 8.0));
    const auto config = Config(k, 0.3, c, 0, n);
    if (config == nullptr) continue;
    const ErrorEstimate e = *EstimateErrors(config, 1000, seed,
                                            SimulationMode::kAggregate, WorkersFromEnv());
    if (e.type1() <= kDelta && e.type2() <= kDelta) return config->players;
  }
  return -1;
}

Outcome ScalingTrend() {
  const ConstraintSpec c = CommConstraint{2};
  const int64_t k = 64;
  const int64_t lo = RequiredPlayers(c, k, 0.3, 6);
  const int64_t hi = RequiredPlayers(c, k, 0.3, 0);
  // Geometric midpoint of the predicted counts, raised if needed so that the
  // compressed configurations can still fill every group.
  int64_t n_mid = static_cast<int64_t>(std::sqrt(double(lo) * double(hi)));
  for (int s : {0, 2, 4, 6}) {
    const auto config = Config(k, 0.3, c, s);
    if (config == nullptr) return {false, absl::StrFormat("s=%d rejected", s)};
    n_mid = std::max(n_mid, config->d * MinimumGroupPlayers(*config));
  }
  bool monotone = true;
  double prev_power = -1.0, prev_se = 0.0;
  std::string powers;
  for (int s : {0, 2, 4, 6}) {
    const auto config = Config(k, 0.3, c, s, n_mid);
    if (config == nullptr) return {false, absl::StrFormat("n=%d rejected at s=%d", n_mid, s)};
    const ErrorEstimate e = *EstimateErrors(config, 300, kSeed + 200,
                                            SimulationMode::kAggregate, WorkersFromEnv());
    const double power = 1.0 - e.type2();
    const double se = std::sqrt(std::max(power * (1 - power), 1e-12) / e.trials);
    if (prev_power >= 0 &&
        power < prev_power - 3 * std::sqrt(se * se + prev_se * prev_se)) {
      monotone = false;
    }
    powers += absl::StrFormat(" s=%d:%.3f", s, power);
    prev_power = power;
    prev_se = se;
  }

  std::vector<double> xs, ys;
  std::string stars;
  for (int64_t kk : {32, 64, 128}) {
    const int64_t n_star = EmpiricalNStar(kk, c, kSeed + 300 + kk);
    stars += absl::StrFormat(" k=%d:%d", kk, n_star);
    if (n_star > 0) {
      xs.push_back(std::log(static_cast<double>(kk)));
      ys.push_back(std::log(static_cast<double>(n_star)));
    }
  }
  double slope = std::nan("");
  if (xs.size() == 3) {
    const double mx = (xs[0] + xs[1] + xs[2]) / 3, my = (ys[0] + ys[1] + ys[2]) / 3;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    slope = sxy / sxx;
  }
  const bool slope_ok = slope >= 1.2 && slope <= 1.8;
  return {monotone && slope_ok,
          absl::StrFormat("power at n=%d:%s (monotone=%s); n*:%s slope %.3f",
                          n_mid, powers, monotone ? "yes" : "no", stars, slope)};
}

Outcome Reproducibility() {
  const ExperimentSpec spec = *ParseExperimentSpec(
      "k = 24,32\neps = 0.3\nconstraint = comm:2,ldp:1\ncoins = 0,5\n"
      "players = auto\ntrials = 40\nalternative = random-far\n"
      "master_seed = 20261015\n");
  const auto run = [&](int workers) -> std::string {
    absl::StatusOr<std::vector<ResultRow>> rows = RunExperiment(spec, workers);
    return rows.ok() ? ResultsCsv(*rows) : std::string();
  };
  const std::string a = run(1), b = run(1), c = run(8);
  const bool ok = !a.empty() && a == b && a == c;
  return {ok, absl::StrFormat("%d bytes; repeat %s, 1 vs 8 workers %s", a.size(),
                              a == b ? "identical" : "differs",
                              a == c ? "identical" : "differs")};
}

}  // namespace
}  // namespace dgof

int main() {
  using Criterion = dgof::Outcome (*)();
  const Criterion criteria[] = {
      dgof::Parseval, dgof::HIdentities, dgof::NormAudit,
      dgof::BilinearAndFluctuation, dgof::Dcm, dgof::Amplifier,
      dgof::EndToEnd, dgof::ScalingTrend, dgof::Reproducibility};
  int failures = 0;
  for (int i = 0; i < 9; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const dgof::Outcome o = criteria[i]();
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("criterion %d: %s (%.1fs) %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
