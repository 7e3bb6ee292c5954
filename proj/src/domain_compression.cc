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

#include "dgof/domain_compression.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dgof {

absl::StatusOr<DcmMap> DcmMap::Create(int64_t k,
                                      std::shared_ptr<const Codebook> cb) {
  if (cb == nullptr) return absl::InvalidArgumentError("null codebook");
  if (!IsPowerOfTwo(k)) {
    return absl::InvalidArgumentError(
        absl::StrCat("domain size ", k, " must be a power of two"));
  }
  if (cb->n() > k) {
    return absl::InvalidArgumentError("codebook block longer than the domain");
  }
  DcmMap dcm;
  dcm.k_ = k;
  dcm.t_ = FloorLog2(static_cast<uint64_t>(k));
  dcm.sigma_ = FloorLog2(static_cast<uint64_t>(cb->n()));
  dcm.theta_ = 2.0 * cb->alpha() / std::sqrt(static_cast<double>(cb->n()));
  dcm.codebook_ = std::move(cb);
  return dcm;
}

absl::StatusOr<Symbol> DcmMap::Apply(uint64_t u, Symbol x) const {
  if (u >= num_seeds()) {
    return absl::OutOfRangeError(absl::StrCat("seed ", u, " out of range"));
  }
  if (x.value() < 1 || x.value() > k_) {
    return absl::OutOfRangeError(absl::StrCat("symbol ", x.value(), " not in [k]"));
  }
  return Map(u, x);
}

Distribution DcmMap::PushForward(uint64_t u, const Distribution& p) const {
  std::vector<double> out(L(), 0.0);
  const int64_t n = int64_t{1} << sigma_;
  for (int64_t j = 0; j < num_blocks(); ++j) {
    double in = 0.0, rest = 0.0;
    for (int64_t r = 0; r < n; ++r) {
      const double v = p.at_index(j * n + r);
      if (codebook_->Contains(u, static_cast<int>(r))) {
        in += v;
      } else {
        rest += v;
      }
    }
    out[2 * j] = in;
    out[2 * j + 1] = rest;
  }
  // Summation reorders terms, so renormalization is not needed beyond the
  // simplex tolerance.
  return *Distribution::Create(std::move(out));
}

absl::StatusOr<DcmMap> BuildDcm(int64_t k, int s, const DcmOptions& options) {
  if (!IsPowerOfTwo(k)) {
    return absl::InvalidArgumentError("k must be a power of two; pad first");
  }
  if (s <= options.c0) {
    return absl::FailedPreconditionError(absl::StrCat(
        "insufficient public coins: s=", s, " <= c0=", options.c0));
  }
  const int t = FloorLog2(static_cast<uint64_t>(k));
  const int sigma = std::min(s - options.c0, t);
  absl::StatusOr<Codebook> cb = BuildCodebook(
      1 << sigma, options.c0, options.codebook_seed, options.codebook);
  if (!cb.ok()) return cb.status();
  return DcmMap::Create(k, std::make_shared<const Codebook>(*std::move(cb)));
}

DistortionReport DcmDistortion(const DcmMap& dcm, const Distribution& p,
                               const Distribution& q) {
  DistortionReport report;
  report.input_tv = TotalVariation(p, q);
  report.threshold = dcm.theta() * report.input_tv;
  report.per_seed_tv.resize(dcm.num_seeds());
  int64_t good = 0;
  for (uint64_t u = 0; u < dcm.num_seeds(); ++u) {
    const double tv =
        TotalVariation(dcm.PushForward(u, p), dcm.PushForward(u, q));
    report.per_seed_tv[u] = tv;
    if (report.input_tv > 0 && tv >= report.threshold) ++good;
  }
  report.fraction_preserved =
      static_cast<double>(good) / static_cast<double>(dcm.num_seeds());
  return report;
}

uint64_t SeedFromBits(std::span<const uint8_t> bits) {
  uint64_t u = 0;
  for (uint8_t b : bits) u = (u << 1) | (b & 1);
  return u;
}

}  // namespace dgof
