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

#include "dgof/codebook.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dgof/distribution.h"
#include "dgof/linalg.h"
#include "dgof/random.h"
#include "dgof/text.h"

namespace dgof {
namespace {

// Unnormalized Gram counts G_ab = #{u : u_a = u_b = 1} over the given rows.
std::vector<double> GramCounts(int n, std::span<const uint8_t> bits,
                               std::span<const int64_t> rows) {
  std::vector<double> g(static_cast<size_t>(n) * n, 0.0);
  std::vector<int> ones;
  ones.reserve(n);
  for (int64_t u : rows) {
    ones.clear();
    for (int a = 0; a < n; ++a) {
      if (bits[u * n + a]) ones.push_back(a);
    }
    for (int a : ones) {
      for (int b : ones) g[static_cast<size_t>(a) * n + b] += 1.0;
    }
  }
  return g;
}

}  // namespace

std::string CertReport::ToString() const {
  return absl::StrFormat(
      "lambda_min_full=%.6f lambda_min_subsets=%.6f lambda_max_centered=%.6f "
      "subset_size=%d trials=%d passed=%s",
      lambda_min_full, lambda_min_subsets, lambda_max_centered, subset_size,
      trials, passed ? "true" : "false");
}

CertReport CertifyVectors(int n, std::span<const uint8_t> bits,
                          const CertParams& params, uint64_t subset_seed) {
  CertReport report;
  const int64_t m = static_cast<int64_t>(bits.size()) / n;
  std::vector<int64_t> all(m);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<double> g_full = GramCounts(n, bits, all);

  std::vector<double> a(g_full.size());
  for (size_t i = 0; i < a.size(); ++i) a[i] = g_full[i] / m;
  report.lambda_min_full = MinEigenvalue(a, n);

  // (1/m) sum (u - 1/2)(u - 1/2)^T expanded through the Gram counts and the
  // per-coordinate ones counts.
  std::vector<double> col(n);
  for (int i = 0; i < n; ++i) col[i] = g_full[static_cast<size_t>(i) * n + i];
  std::vector<double> centered(g_full.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      centered[static_cast<size_t>(i) * n + j] =
          (g_full[static_cast<size_t>(i) * n + j] - 0.5 * col[i] -
           0.5 * col[j] + 0.25 * m) /
          m;
    }
  }
  report.lambda_max_centered = MaxEigenvalue(centered, n);

  const int64_t keep = static_cast<int64_t>(
      std::ceil((1.0 - params.c1) * static_cast<double>(m) - 1e-9));
  report.subset_size = static_cast<int>(keep);
  report.trials = params.subset_trials;
  report.lambda_min_subsets = report.lambda_min_full;
  std::vector<int64_t> perm(m);
  for (int trial = 0; trial < params.subset_trials; ++trial) {
    Rng rng(DeriveSeed(subset_seed, {static_cast<uint64_t>(trial)}));
    std::iota(perm.begin(), perm.end(), 0);
    // Partial Fisher-Yates: the first m - keep entries are the dropped rows.
    const int64_t drop = m - keep;
    for (int64_t i = 0; i < drop; ++i) {
      const int64_t j = i + static_cast<int64_t>(UniformBelow(rng, m - i));
      std::swap(perm[i], perm[j]);
    }
    const std::vector<double> g_drop = GramCounts(
        n, bits, std::span<const int64_t>(perm.data(), drop));
    for (size_t i = 0; i < a.size(); ++i) {
      a[i] = (g_full[i] - g_drop[i]) / static_cast<double>(keep);
    }
    report.lambda_min_subsets =
        std::min(report.lambda_min_subsets, MinEigenvalue(a, n));
  }
  report.passed = report.lambda_min_subsets >= params.c2 &&
                  report.lambda_max_centered <= params.lambda_max_cap;
  return report;
}

absl::StatusOr<Codebook> Codebook::Create(int n, int c0,
                                          std::vector<uint8_t> bits,
                                          const CertParams& params,
                                          uint64_t cert_seed) {
  if (n < 1 || !IsPowerOfTwo(n) || n > kMaxCodebookBlock) {
    return absl::InvalidArgumentError(
        absl::StrCat("codebook block length ", n,
                     " must be a power of two at most ", kMaxCodebookBlock));
  }
  if (c0 < 1 || c0 > 20) {
    return absl::InvalidArgumentError("c0 must be in [1, 20]");
  }
  const int64_t m = (int64_t{1} << c0) * n;
  if (static_cast<int64_t>(bits.size()) != m * n) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", m, " rows of length ", n));
  }
  for (uint8_t b : bits) {
    if (b > 1) return absl::InvalidArgumentError("codebook entries must be 0/1");
  }
  Codebook cb;
  cb.n_ = n;
  cb.m_ = m;
  cb.c0_ = c0;
  cb.cert_ = CertifyVectors(n, bits, params, cert_seed);
  if (!cb.cert_.passed) {
    return absl::FailedPreconditionError(
        absl::StrCat("codebook certification failed: ", cb.cert_.ToString()));
  }
  cb.alpha_ = std::sqrt(params.c2);
  cb.delta0_ = 1.0 - params.c1;
  cb.bits_ = std::move(bits);
  return cb;
}

std::string Codebook::Serialize() const {
  std::string out = absl::StrFormat("n=%d m=%d c0=%d alpha=%.17g delta0=%.17g\n",
                                    n_, m_, c0_, alpha_, delta0_);
  out.reserve(out.size() + bits_.size() + m_);
  for (int64_t u = 0; u < m_; ++u) {
    for (int r = 0; r < n_; ++r) out.push_back(Contains(u, r) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

absl::StatusOr<Codebook> Codebook::Parse(std::string_view text) {
  std::vector<std::string_view> lines = SplitString(text, '\n', true);
  if (lines.empty()) return absl::InvalidArgumentError("empty codebook");
  int64_t n = -1, m = -1, c0 = -1;
  double alpha = -1, delta0 = -1;
  for (std::string_view field : SplitString(lines[0], ' ', true)) {
    const size_t eq = field.find('=');
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError("malformed codebook header");
    }
    const std::string_view key = field.substr(0, eq);
    const std::string_view value = field.substr(eq + 1);
    bool ok = true;
    if (key == "n") ok = ParseInt64(value, &n);
    else if (key == "m") ok = ParseInt64(value, &m);
    else if (key == "c0") ok = ParseInt64(value, &c0);
    else if (key == "alpha") ok = ParseDouble(value, &alpha);
    else if (key == "delta0") ok = ParseDouble(value, &delta0);
    if (!ok) return absl::InvalidArgumentError("malformed codebook header");
  }
  if (n < 1 || m < 1 || c0 < 1 || alpha < 0 || delta0 < 0) {
    return absl::InvalidArgumentError("incomplete codebook header");
  }
  if (static_cast<int64_t>(lines.size()) != m + 1) {
    return absl::InvalidArgumentError("codebook row count mismatch");
  }
  std::vector<uint8_t> bits;
  bits.reserve(m * n);
  for (int64_t u = 0; u < m; ++u) {
    std::string_view row = TrimWhitespace(lines[u + 1]);
    if (static_cast<int64_t>(row.size()) != n) {
      return absl::InvalidArgumentError("codebook row length mismatch");
    }
    for (char c : row) {
      if (c != '0' && c != '1') {
        return absl::InvalidArgumentError("codebook rows must be 0/1");
      }
      bits.push_back(c == '1');
    }
  }
  absl::StatusOr<Codebook> cb =
      Create(static_cast<int>(n), static_cast<int>(c0), std::move(bits));
  if (!cb.ok()) return cb.status();
  if (cb->m() != m) return absl::InvalidArgumentError("m inconsistent with n, c0");
  cb->alpha_ = alpha;
  cb->delta0_ = delta0;
  return cb;
}

absl::StatusOr<Codebook> BuildCodebook(int n, int c0, uint64_t seed,
                                       const CodebookOptions& options) {
  if (n < 1 || !IsPowerOfTwo(n) || n > kMaxCodebookBlock) {
    return absl::InvalidArgumentError(
        absl::StrCat("codebook block length ", n, " unsupported"));
  }
  if (c0 < 1 || c0 > 20) return absl::InvalidArgumentError("bad c0");
  const int64_t m = (int64_t{1} << c0) * n;
  absl::Status last;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    const uint64_t s = seed + attempt;
    Rng rng(DeriveSeed(s, {0xc0deb00cULL}));
    std::vector<uint8_t> bits(m * n);
    for (size_t i = 0; i < bits.size(); i += 64) {
      uint64_t word = rng();
      for (size_t b = 0; b < 64 && i + b < bits.size(); ++b) {
        bits[i + b] = (word >> b) & 1;
      }
    }
    absl::StatusOr<Codebook> cb = Codebook::Create(
        n, c0, std::move(bits), options.cert, DeriveSeed(s, {0x5eb5e7ULL}));
    if (cb.ok()) return cb;
    last = cb.status();
  }
  return absl::ResourceExhaustedError(absl::StrCat(
      "codebook certification failed after ", options.max_retries + 1,
      " attempts; last: ", last.message()));
}

absl::StatusOr<double> IsometryGap(const Codebook& cb,
                                   std::span<const double> x) {
  if (static_cast<int>(x.size()) != cb.n()) {
    return absl::InvalidArgumentError("vector length must equal n");
  }
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  if (norm2 == 0.0) return absl::InvalidArgumentError("zero vector");
  const double bar = cb.alpha() * std::sqrt(norm2);
  int64_t hits = 0;
  for (int64_t u = 0; u < cb.m(); ++u) {
    double acc = 0.0;
    for (int r = 0; r < cb.n(); ++r) {
      if (cb.Contains(u, r)) acc += x[r];
    }
    // Relative slack so that exact ties computed in different orders count.
    if (std::abs(acc) >= bar * (1.0 - 1e-12)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(cb.m());
}

}  // namespace dgof
