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

// One-time calibration of the frozen constants in dgof/constants.h.
//
//   calibrate codebook   smallest subset eigenvalue at n = 64
//   calibrate players    multipliers for the player-count formulas

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <cmath>
#include <memory>

#include "dgof/codebook.h"
#include "dgof/constants.h"
#include "dgof/experiment.h"
#include "dgof/protocol.h"
#include "dgof/random.h"

namespace dgof {
namespace {

int CalibrateCodebook() {
  const int n = 64;
  CertParams params;
  params.c2 = 0.0;
  double worst = 1e9;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(DeriveSeed(seed, {0xc0deb00cULL}));
    const int64_t m = (int64_t{1} << kC0) * n;
    std::vector<uint8_t> bits(m * n);
    for (size_t i = 0; i < bits.size(); i += 64) {
      const uint64_t word = rng();
      for (size_t b = 0; b < 64 && i + b < bits.size(); ++b) {
        bits[i + b] = (word >> b) & 1;
      }
    }
    const CertReport r = CertifyVectors(n, bits, params, seed);
    std::printf("seed=%llu %s\n", static_cast<unsigned long long>(seed),
                r.ToString().c_str());
    worst = std::min(worst, r.lambda_min_subsets);
  }
  std::printf("min subset lambda_min=%.6f -> kC2=%.4f\n", worst, 0.8 * worst);
  return 0;
}

ErrorEstimate Measure(int64_t k, double eps, const ConstraintSpec& c, int s,
                     int64_t n, int trials, uint64_t seed) {
  ProtocolOptions opts;
  auto probe = MakeProtocolConfig(k, eps, c, s, opts);
  opts.players = std::max(n, probe->d * MinimumGroupPlayers(*probe));
  auto config =
      std::make_shared<const ProtocolConfig>(*MakeProtocolConfig(k, eps, c, s, opts));
  return *EstimateErrors(config, trials, seed, SimulationMode::kAggregate, 1);
}

// For each configuration, the smallest multiplier on a quarter-octave grid
// with both error rates at most 1/12.
int CalibratePlayers() {
  struct Case {
    ConstraintSpec c;
    int64_t k;
    int s;
  };
  const Case cases[] = {
      {CommConstraint{3}, 64, 0}, {CommConstraint{3}, 64, 4},
      {LdpConstraint{0.5}, 64, 0}, {LdpConstraint{0.5}, 64, 4},
      {LdpConstraint{0.5}, 32, 0}, {CommConstraint{2}, 32, 0},
      {CommConstraint{2}, 128, 0},
  };
  const double eps = 0.3;
  const int trials = 300;
  for (const Case& cs : cases) {
    const double rate = PlayerRate(cs.c, cs.k, eps, cs.s);
    for (int j = -12; j <= 80; ++j) {
      const double mult = std::exp2(j / 4.0);
      const int64_t n = static_cast<int64_t>(std::ceil(mult * rate));
      const ErrorEstimate e = Measure(cs.k, eps, cs.c, cs.s, n, trials, 0xca11b8);
      std::printf("%s k=%lld s=%d C=%.4f n=%lld type1=%.4f type2=%.4f\n",
                  ConstraintToString(cs.c).c_str(), static_cast<long long>(cs.k),
                  cs.s, mult, static_cast<long long>(n), e.type1(), e.type2());
      std::fflush(stdout);
      if (e.type1() <= 1.0 / 12 && e.type2() <= 1.0 / 12) break;
    }
  }
  return 0;
}

// Empirical n* for comm:2 at s=0 over k = 16..256 on an eighth-octave grid,
// with a least-squares log-log slope.
int NStarSlope(int trials, uint64_t seed) {
  const ConstraintSpec c = CommConstraint{2};
  std::vector<double> xs, ys;
  for (int64_t k : {16, 32, 64, 128, 256}) {
    const double rate = PlayerRate(c, k, 0.3, 0);
    for (int j = 0; j <= 80; ++j) {
      const int64_t n = static_cast<int64_t>(rate * std::exp2(j / 8.0));
      const ErrorEstimate e = Measure(k, 0.3, c, 0, n, trials, seed + k);
      if (e.type1() <= 1.0 / 12 && e.type2() <= 1.0 / 12) {
        std::printf("k=%lld n*=%lld n*/rate=%.3f\n", static_cast<long long>(k),
                    static_cast<long long>(n), n / rate);
        std::fflush(stdout);
        xs.push_back(std::log(double(k)));
        ys.push_back(std::log(double(n)));
        break;
      }
    }
  }
  for (size_t lo = 0; lo + 2 < xs.size(); ++lo) {
    double mx = 0, my = 0, sxy = 0, sxx = 0;
    for (size_t i = lo; i < lo + 3; ++i) mx += xs[i] / 3, my += ys[i] / 3;
    for (size_t i = lo; i < lo + 3; ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    std::printf("slope over k=%.0f..%.0f: %.3f\n", std::exp(xs[lo]),
                std::exp(xs[lo + 2]), sxy / sxx);
  }
  return 0;
}

}  // namespace
}  // namespace dgof

int main(int argc, char** argv) {
  if (argc >= 2 && std::strcmp(argv[1], "codebook") == 0) {
    return dgof::CalibrateCodebook();
  }
  if (argc >= 2 && std::strcmp(argv[1], "players") == 0) {
    return dgof::CalibratePlayers();
  }
  if (argc >= 2 && std::strcmp(argv[1], "nstar") == 0) {
    const int trials = argc >= 3 ? std::atoi(argv[2]) : 300;
    const uint64_t seed = argc >= 4 ? std::strtoull(argv[3], nullptr, 0) : 1;
    return dgof::NStarSlope(trials, seed);
  }
  std::fprintf(stderr, "usage: calibrate codebook|players|nstar [trials seed]\n");
  return 2;
}
