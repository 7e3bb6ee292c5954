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

#include "dgof/testers.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dgof {
namespace {

// Per-split error the median amplification starts from.
constexpr double kBaseSplitError = 1.0 / 12.0;

double MedianOf(std::vector<double> v) {
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

int64_t SampleBinomial(int64_t n, double p, Rng& rng) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<int64_t> b(n, p);
  return b(rng);
}

// In-place Walsh-Hadamard transform of a length-2^t vector.
void WalshHadamard(std::vector<double>& v) {
  for (size_t h = 1; h < v.size(); h <<= 1) {
    for (size_t i = 0; i < v.size(); i += 2 * h) {
      for (size_t j = i; j < i + h; ++j) {
        const double a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

}  // namespace

int MedianSplits(double delta) {
  if (delta >= kBaseSplitError - 1e-15) return 1;
  const double gap = 0.5 - kBaseSplitError;
  int r = static_cast<int>(std::ceil(std::log(1.0 / delta) / (2 * gap * gap)));
  if (r % 2 == 0) ++r;
  return r;
}

double CentralizedStatistic(const Distribution& q,
                            std::span<const int64_t> counts) {
  const int64_t k = q.k();
  const double m = static_cast<double>(
      std::accumulate(counts.begin(), counts.end(), int64_t{0}));
  const double floor_w = 1.0 / static_cast<double>(k);
  double t = 0.0;
  for (int64_t x = 0; x < k; ++x) {
    const double n = static_cast<double>(counts[x]);
    const double qx = q.at_index(x);
    const double w = std::max(qx, floor_w);
    t += (n * (n - 1) - 2 * (m - 1) * qx * n + m * (m - 1) * qx * qx) / w;
  }
  return t;
}

double CentralizedExpectation(const Distribution& p, const Distribution& q,
                              int64_t m) {
  const double floor_w = 1.0 / static_cast<double>(q.k());
  double acc = 0.0;
  for (int64_t x = 0; x < q.k(); ++x) {
    const double d = p.at_index(x) - q.at_index(x);
    acc += d * d / std::max(q.at_index(x), floor_w);
  }
  return static_cast<double>(m) * static_cast<double>(m - 1) * acc;
}

double CentralizedThreshold(const Distribution& q, int64_t m, double eps) {
  const double floor_w = 1.0 / static_cast<double>(q.k());
  double w = 0.0;
  for (double v : q.probs()) w += std::max(v, floor_w);
  return 2.0 * static_cast<double>(m) * static_cast<double>(m - 1) * eps *
         eps / w;
}

Verdict DecideCentralized(const Distribution& q,
                          const std::vector<std::vector<int64_t>>& split_counts,
                          double eps) {
  if (split_counts.empty()) return Verdict::kAccept;
  std::vector<double> stats;
  stats.reserve(split_counts.size());
  for (const auto& c : split_counts) stats.push_back(CentralizedStatistic(q, c));
  const int64_t m = std::accumulate(split_counts[0].begin(),
                                    split_counts[0].end(), int64_t{0});
  return MedianOf(std::move(stats)) <= CentralizedThreshold(q, m, eps)
             ? Verdict::kAccept
             : Verdict::kReject;
}

absl::StatusOr<Verdict> CentralizedIdentityTest(const Distribution& q,
                                                std::span<const Symbol> samples,
                                                double eps, double delta) {
  if (samples.empty()) return absl::InvalidArgumentError("no samples");
  if (!(eps > 0) || !(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError("need eps > 0 and delta in (0, 1)");
  }
  const int r = MedianSplits(delta);
  const int64_t m = static_cast<int64_t>(samples.size()) / r;
  std::vector<std::vector<int64_t>> counts(r, std::vector<int64_t>(q.k(), 0));
  for (int s = 0; s < r; ++s) {
    for (int64_t i = 0; i < m; ++i) {
      const Symbol x = samples[s * m + i];
      if (x.value() < 1 || x.value() > q.k()) {
        return absl::OutOfRangeError("sample outside [k]");
      }
      ++counts[s][x.index()];
    }
  }
  return DecideCentralized(q, counts, eps);
}

absl::StatusOr<SimulateInferLayout> MakeSimulateInferLayout(int64_t k,
                                                            int bits) {
  if (k < 1) return absl::InvalidArgumentError("k must be positive");
  if (bits < 1 || bits > 30) {
    return absl::InvalidArgumentError("message width must be in [1, 30]");
  }
  SimulateInferLayout layout;
  layout.k = k;
  layout.bits = bits;
  const int64_t capacity = (int64_t{1} << bits) - 1;
  if (capacity >= k) {
    layout.block_size = k;
    layout.padded_k = k;
    layout.num_blocks = 1;
    layout.group_size = 1;
    layout.flatten = false;
  } else {
    layout.block_size = capacity;
    layout.padded_k = PaddedSize(k, capacity);
    layout.num_blocks = layout.padded_k / capacity;
    layout.group_size = 2 * layout.num_blocks;
    layout.flatten = true;
  }
  return layout;
}

Distribution SimulateInferInputLaw(const SimulateInferLayout& layout,
                                   const Distribution& p) {
  if (!layout.flatten) return p;
  const Distribution padded = *PadDomain(p, layout.block_size);
  std::vector<double> v(padded.probs().begin(), padded.probs().end());
  const double floor_mass = kFlattenWeight / static_cast<double>(layout.padded_k);
  for (double& x : v) x = (1.0 - kFlattenWeight) * x + floor_mass;
  return *Distribution::Create(std::move(v));
}

double SimulateInferDistance(const SimulateInferLayout& layout, double eps) {
  if (!layout.flatten) return eps;
  return (1.0 - kFlattenWeight) * static_cast<double>(layout.k) /
         static_cast<double>(layout.padded_k) * eps;
}

uint32_t SimulateInferEncode(const SimulateInferLayout& layout, Symbol x,
                             int64_t member) {
  const int64_t block = member % layout.num_blocks;
  const int64_t offset = x.index() - block * layout.block_size;
  if (offset < 0 || offset >= layout.block_size) return 0;
  return static_cast<uint32_t>(offset + 1);
}

Symbol SimulateInferPreprocess(const SimulateInferLayout& layout, Symbol x,
                               Rng& rng) {
  if (!layout.flatten) return x;
  Symbol y = PadSample(x, layout.k, layout.block_size, rng);
  if (Uniform01(rng) < kFlattenWeight) {
    y = Symbol::FromIndex(static_cast<int64_t>(UniformBelow(rng, layout.padded_k)));
  }
  return y;
}

std::optional<Symbol> SimulateInferDecode(const SimulateInferLayout& layout,
                                          std::span<const uint32_t> group) {
  if (layout.group_size == 1) {
    if (group[0] == 0) return std::nullopt;
    return Symbol(group[0]);
  }
  const int64_t g = layout.num_blocks;
  int64_t hit = -1;
  for (int64_t j = 0; j < g; ++j) {
    if (group[j] == 0) continue;
    if (hit >= 0) return std::nullopt;
    hit = j;
  }
  if (hit < 0 || group[g + hit] != 0) return std::nullopt;
  return Symbol(hit * layout.block_size + group[hit]);
}

double SimulateInferSuccessProbability(const SimulateInferLayout& layout,
                                       const Distribution& input_law) {
  if (layout.group_size == 1) return 1.0;
  double prob = 1.0;
  for (int64_t j = 0; j < layout.num_blocks; ++j) {
    double mass = 0.0;
    for (int64_t r = 0; r < layout.block_size; ++r) {
      mass += input_law.at_index(j * layout.block_size + r);
    }
    prob *= std::max(0.0, 1.0 - mass);
  }
  return prob;
}

CommTranscript RunSimulateInferPlayers(const SimulateInferLayout& layout,
                                       std::span<const Symbol> samples,
                                       Rng& rng) {
  CommTranscript t;
  t.layout = layout;
  t.message.resize(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    const Symbol x = SimulateInferPreprocess(layout, samples[i], rng);
    t.message[i] = SimulateInferEncode(
        layout, x, static_cast<int64_t>(i) % layout.group_size);
  }
  return t;
}

absl::StatusOr<Verdict> SimulateInferServer(const Distribution& q,
                                            const CommTranscript& transcript,
                                            double eps, double delta) {
  const SimulateInferLayout& layout = transcript.layout;
  if (q.k() != layout.k) return absl::InvalidArgumentError("q has the wrong k");
  const uint32_t limit = uint32_t{1} << layout.bits;
  std::vector<Symbol> samples;
  const int64_t groups =
      static_cast<int64_t>(transcript.message.size()) / layout.group_size;
  for (int64_t g = 0; g < groups; ++g) {
    std::span<const uint32_t> group(
        transcript.message.data() + g * layout.group_size, layout.group_size);
    for (uint32_t msg : group) {
      if (msg >= limit) return absl::InvalidArgumentError("message too wide");
    }
    if (std::optional<Symbol> x = SimulateInferDecode(layout, group)) {
      samples.push_back(*x);
    }
  }
  const Distribution reference = SimulateInferInputLaw(layout, q);
  const double eps_eff = SimulateInferDistance(layout, eps);
  const int r = MedianSplits(delta);
  const int64_t m = static_cast<int64_t>(samples.size()) / r;
  std::vector<std::vector<int64_t>> counts(
      r, std::vector<int64_t>(reference.k(), 0));
  for (int s = 0; s < r; ++s) {
    for (int64_t i = 0; i < m; ++i) ++counts[s][samples[s * m + i].index()];
  }
  return DecideCentralized(reference, counts, eps_eff);
}

absl::StatusOr<Verdict> SimulateInferTest(const Distribution& q, int bits,
                                          std::span<const Symbol> samples,
                                          double eps, double delta, Rng& rng) {
  absl::StatusOr<SimulateInferLayout> layout = MakeSimulateInferLayout(q.k(), bits);
  if (!layout.ok()) return layout.status();
  if (samples.empty() ||
      static_cast<int64_t>(samples.size()) % layout->group_size != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "player count must be a positive multiple of the group size ",
        layout->group_size));
  }
  return SimulateInferServer(q, RunSimulateInferPlayers(*layout, samples, rng),
                             eps, delta);
}

std::vector<int64_t> SampleMultinomial(const Distribution& p, int64_t m,
                                       Rng& rng) {
  std::vector<int64_t> counts(p.k(), 0);
  double mass_left = 1.0;
  int64_t left = m;
  for (int64_t x = 0; x < p.k() && left > 0; ++x) {
    const double px = p.at_index(x);
    if (x == p.k() - 1 || px >= mass_left) {
      counts[x] = left;
      break;
    }
    const int64_t c = SampleBinomial(left, std::min(1.0, px / mass_left), rng);
    counts[x] = c;
    left -= c;
    mass_left -= px;
  }
  return counts;
}

std::vector<std::vector<int64_t>> SampleReconstructedCounts(
    const SimulateInferLayout& layout, const Distribution& input_law,
    int64_t groups, int splits, Rng& rng) {
  const double p0 = SimulateInferSuccessProbability(layout, input_law);
  const int64_t successes = SampleBinomial(groups, p0, rng);
  const int64_t m = successes / splits;
  std::vector<std::vector<int64_t>> out;
  out.reserve(splits);
  for (int s = 0; s < splits; ++s) out.push_back(SampleMultinomial(input_law, m, rng));
  return out;
}

absl::StatusOr<HadamardScheme> HadamardScheme::Create(int64_t k, double rho) {
  if (k < 1 || k > (int64_t{1} << 30)) {
    return absl::InvalidArgumentError("k out of range");
  }
  if (!(rho >= 0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError("rho must be finite and nonnegative");
  }
  HadamardScheme s;
  s.k_ = k;
  s.K_ = int64_t{1} << CeilLog2(static_cast<uint64_t>(k + 1));
  s.rho_ = rho;
  const double e = std::exp(rho);
  s.contrast_ = (e - 1) / (e + 1);
  s.p_in_ = e / (e + 1);
  s.p_out_ = 1 / (e + 1);
  return s;
}

Channel HadamardScheme::AsChannel(int64_t j) const {
  std::vector<double> rows(k_ * 2);
  for (int64_t x = 1; x <= k_; ++x) {
    const double one = ProbOne(j, Symbol(x));
    rows[(x - 1) * 2] = 1 - one;
    rows[(x - 1) * 2 + 1] = one;
  }
  return *Channel::Create(k_, 2, std::move(rows));
}

std::vector<double> HadamardScheme::ColumnMeans(const Distribution& p) const {
  std::vector<double> v(K_, 0.0);
  for (int64_t x = 0; x < k_; ++x) v[x] = p.at_index(x);
  WalshHadamard(v);
  // p(C_j) = (1 + (H p)_j) / 2 because p sums to one.
  const double base = p_out_;
  for (double& x : v) x = contrast_ * 0.5 * (1.0 + x) + base;
  return v;
}

bool LdpHadamardResponse(const HadamardScheme& scheme, int64_t j, Symbol x,
                         Rng& rng) {
  return Uniform01(rng) < scheme.ProbOne(j, x);
}

LdpTranscript RunLdpPlayers(const HadamardScheme& scheme,
                            std::span<const Symbol> samples, Rng& rng) {
  LdpTranscript t;
  t.block.resize(samples.size());
  t.bit.resize(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    const int64_t j = LdpBlockOf(scheme, static_cast<int64_t>(i));
    t.block[i] = static_cast<int32_t>(j);
    t.bit[i] = LdpHadamardResponse(scheme, j, samples[i], rng) ? 1 : 0;
  }
  return t;
}

double LdpStatistic(std::span<const double> q_columns, const BlockTallies& t) {
  double acc = 0.0;
  for (size_t j = 0; j < q_columns.size(); ++j) {
    const double n = static_cast<double>(t.totals[j]);
    if (n < 2) continue;
    const double hat = static_cast<double>(t.ones[j]) / n;
    const double d = hat - q_columns[j];
    acc += d * d - hat * (1 - hat) / (n - 1);
  }
  return acc;
}

double LdpThreshold(const HadamardScheme& scheme, double eps) {
  const double c = scheme.contrast();
  return 0.5 * static_cast<double>(scheme.K()) * c * c * eps * eps /
         static_cast<double>(scheme.k());
}

Verdict DecideLdp(const HadamardScheme& scheme, const Distribution& q,
                  const std::vector<BlockTallies>& splits, double eps) {
  const std::vector<double> qc = scheme.ColumnMeans(q);
  std::vector<double> stats;
  stats.reserve(splits.size());
  for (const BlockTallies& t : splits) stats.push_back(LdpStatistic(qc, t));
  return MedianOf(std::move(stats)) <= LdpThreshold(scheme, eps)
             ? Verdict::kAccept
             : Verdict::kReject;
}

int64_t LdpMinimumPlayers(const HadamardScheme& scheme, double delta) {
  return 2 * scheme.K() * MedianSplits(delta);
}

absl::StatusOr<Verdict> LdpTest(const Distribution& q, double rho,
                                const LdpTranscript& transcript, double eps,
                                double delta) {
  absl::StatusOr<HadamardScheme> scheme = HadamardScheme::Create(q.k(), rho);
  if (!scheme.ok()) return scheme.status();
  const int64_t n = static_cast<int64_t>(transcript.bit.size());
  if (n < LdpMinimumPlayers(*scheme, delta)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need at least ", LdpMinimumPlayers(*scheme, delta), " players, got ", n));
  }
  const int r = MedianSplits(delta);
  const int64_t K = scheme->K();
  const int64_t per_block = n / (r * K);
  std::vector<BlockTallies> splits(
      r, BlockTallies{std::vector<int64_t>(K, 0), std::vector<int64_t>(K, 0)});
  for (int64_t i = 0; i < r * K * per_block; ++i) {
    const int64_t j = transcript.block[i];
    if (j < 1 || j > K) return absl::InvalidArgumentError("bad block id");
    BlockTallies& t = splits[i / (K * per_block)];
    ++t.totals[j - 1];
    t.ones[j - 1] += transcript.bit[i];
  }
  return DecideLdp(*scheme, q, splits, eps);
}

std::vector<BlockTallies> SampleLdpTallies(const HadamardScheme& scheme,
                                           const Distribution& p, int splits,
                                           int64_t per_block, Rng& rng) {
  const std::vector<double> pc = scheme.ColumnMeans(p);
  std::vector<BlockTallies> out(splits);
  for (BlockTallies& t : out) {
    t.totals.assign(scheme.K(), per_block);
    t.ones.resize(scheme.K());
    for (int64_t j = 0; j < scheme.K(); ++j) {
      t.ones[j] = SampleBinomial(per_block, pc[j], rng);
    }
  }
  return out;
}

}  // namespace dgof
