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

#include "dgof/amplifier.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dgof/linalg.h"
#include "dgof/random.h"

namespace dgof {
namespace {

void Shuffle(std::vector<uint32_t>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[UniformBelow(rng, i)]);
  }
}

std::vector<uint32_t> PermutationModel(uint64_t n, int d, Rng& rng) {
  std::vector<uint32_t> adj(n * d);
  std::vector<uint32_t> perm(n);
  int slot = 0;
  for (int p = 0; p < d / 2; ++p) {
    std::iota(perm.begin(), perm.end(), 0u);
    Shuffle(perm, rng);
    for (uint64_t v = 0; v < n; ++v) {
      adj[v * d + slot] = perm[v];
      adj[perm[v] * d + slot + 1] = static_cast<uint32_t>(v);
    }
    slot += 2;
  }
  if (d % 2 == 1) {
    std::iota(perm.begin(), perm.end(), 0u);
    Shuffle(perm, rng);
    for (uint64_t i = 0; i + 1 < n; i += 2) {
      adj[perm[i] * d + slot] = perm[i + 1];
      adj[perm[i + 1] * d + slot] = perm[i];
    }
  }
  return adj;
}

double PowerIterationExpansion(std::span<const uint32_t> adj, uint64_t n,
                               int d) {
  Rng rng(0x5eedULL);
  std::vector<double> v(n), w(n);
  for (double& x : v) x = Uniform01(rng) - 0.5;
  double estimate = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double norm = 0.0;
    for (double& x : v) {
      x -= mean;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    double out = 0.0;
    for (uint64_t a = 0; a < n; ++a) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i) acc += v[adj[a * d + i]];
      w[a] = acc / d;
      out += w[a] * w[a];
    }
    estimate = std::sqrt(out);
    std::swap(v, w);
  }
  return estimate;
}

}  // namespace

int RequiredDegree(double eta, double gamma) {
  return static_cast<int>(
      std::ceil(4.1 * eta / ((1 - eta) * (1 - eta) * gamma) - 1e-12));
}

double LambdaThreshold(double eta, double gamma) {
  return (1 - eta) * std::sqrt(gamma / eta);
}

double SpectralExpansion(std::span<const uint32_t> adjacency, uint64_t n,
                         int d) {
  if (n <= 1) return 0.0;
  if (n > kDenseSpectrumLimit) return PowerIterationExpansion(adjacency, n, d);
  std::vector<double> a(n * n, 0.0);
  for (uint64_t v = 0; v < n; ++v) {
    for (int i = 0; i < d; ++i) a[v * n + adjacency[v * d + i]] += 1.0 / d;
  }
  const std::vector<double> ev = SymmetricEigenvalues(a, static_cast<int64_t>(n));
  // The top eigenvalue is 1 for a regular graph.
  return std::max(std::abs(ev.front()), std::abs(ev[n - 2]));
}

absl::StatusOr<std::vector<uint64_t>> AmplifierMaps::Neighbors(
    uint64_t r) const {
  if (r >= n_) {
    return absl::OutOfRangeError(absl::StrCat("seed ", r, " outside 2^s"));
  }
  std::vector<uint64_t> out(d_);
  for (int i = 0; i < d_; ++i) out[i] = Neighbor(r, i);
  return out;
}

double AmplifierMaps::MixingResidual(std::span<const uint8_t> in_s,
                                     std::span<const uint8_t> in_t) const {
  double size_s = 0, size_t_ = 0, edges = 0;
  for (uint64_t v = 0; v < n_; ++v) {
    size_s += in_s[v];
    size_t_ += in_t[v];
    if (!in_s[v]) continue;
    for (int i = 0; i < d_; ++i) edges += in_t[Neighbor(v, i)];
  }
  const double nn = static_cast<double>(n_);
  const double dev = std::abs(edges / (d_ * nn) - size_s * size_t_ / (nn * nn));
  return lambda_ * std::sqrt(size_s * size_t_) / nn - dev;
}

std::string AmplifierMaps::Dump() const {
  std::string out = absl::StrFormat(
      "# s=%d d=%d lambda=%.17g eta=%.17g gamma=%.17g seed=%d complete=%d\n",
      s_, d_, lambda_, eta_, gamma_, seed_, complete_ ? 1 : 0);
  for (uint64_t v = 0; v < n_; ++v) {
    for (int i = 0; i < d_; ++i) {
      absl::StrAppend(&out, i == 0 ? "" : " ", Neighbor(v, i));
    }
    out.push_back('\n');
  }
  return out;
}

absl::StatusOr<AmplifierMaps> BuildAmplifier(int s, double eta, double gamma,
                                             uint64_t seed, int max_retries) {
  if (!(eta > 0 && eta < 1 && gamma > 0 && gamma < 1)) {
    return absl::InvalidArgumentError("eta and gamma must lie in (0, 1)");
  }
  if (s < 1 || s > 24) return absl::InvalidArgumentError("s must be in [1, 24]");
  const uint64_t n = uint64_t{1} << s;
  const int d = RequiredDegree(eta, gamma);
  if (static_cast<uint64_t>(d) >= n) {
    return absl::FailedPreconditionError(absl::StrCat(
        "degree exceeds graph: d=", d, " needs more than 2^", s, " vertices"));
  }
  const double threshold = LambdaThreshold(eta, gamma);
  double last = 0.0;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    Rng rng(DeriveSeed(seed + attempt, {0xe8a2d3ULL}));
    AmplifierMaps amp;
    amp.adjacency_ = PermutationModel(n, d, rng);
    amp.lambda_ = SpectralExpansion(amp.adjacency_, n, d);
    last = amp.lambda_;
    if (amp.lambda_ <= threshold) {
      amp.s_ = s;
      amp.n_ = n;
      amp.d_ = d;
      amp.eta_ = eta;
      amp.gamma_ = gamma;
      amp.seed_ = seed + attempt;
      return amp;
    }
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "expander certification failed: lambda=%.4f > %.4f after %d attempts",
      last, threshold, max_retries + 1));
}

absl::StatusOr<AmplifierMaps> BuildCompleteAmplifier(int s, double eta,
                                                     double gamma) {
  if (s < 1 || s > 12) return absl::InvalidArgumentError("s must be in [1, 12]");
  const uint64_t n = uint64_t{1} << s;
  AmplifierMaps amp;
  amp.s_ = s;
  amp.n_ = n;
  amp.d_ = static_cast<int>(n - 1);
  amp.lambda_ = 1.0 / static_cast<double>(n - 1);
  amp.eta_ = eta;
  amp.gamma_ = gamma;
  amp.complete_ = true;
  amp.adjacency_.reserve(n * (n - 1));
  for (uint64_t v = 0; v < n; ++v) {
    for (uint64_t w = 0; w < n; ++w) {
      if (w != v) amp.adjacency_.push_back(static_cast<uint32_t>(w));
    }
  }
  return amp;
}

AmplifierMaps TrivialAmplifier(int s) {
  AmplifierMaps amp;
  amp.s_ = s;
  amp.n_ = uint64_t{1} << s;
  amp.d_ = 1;
  amp.lambda_ = 1.0;
  amp.adjacency_.resize(amp.n_);
  std::iota(amp.adjacency_.begin(), amp.adjacency_.end(), 0u);
  return amp;
}

}  // namespace dgof
