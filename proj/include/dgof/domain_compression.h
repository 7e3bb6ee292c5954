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

#ifndef DGOF_DOMAIN_COMPRESSION_H_
#define DGOF_DOMAIN_COMPRESSION_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dgof/codebook.h"
#include "dgof/distribution.h"

namespace dgof {

// Seeded map [k] -> [L] that splits [k] into J = k / 2^sigma blocks and sends
// each symbol to one of two outputs per block depending on whether its offset
// lies in the seed's codebook subset.
class DcmMap {
 public:
  // k must be a power of two at least as large as the codebook block length.
  static absl::StatusOr<DcmMap> Create(int64_t k,
                                       std::shared_ptr<const Codebook> cb);

  int64_t k() const { return k_; }
  int t() const { return t_; }
  int sigma() const { return sigma_; }
  int64_t num_blocks() const { return k_ >> sigma_; }
  int64_t L() const { return 2 * num_blocks(); }
  double theta() const { return theta_; }
  int s_bits() const { return sigma_ + codebook_->c0(); }
  uint64_t num_seeds() const { return static_cast<uint64_t>(codebook_->m()); }
  const Codebook& codebook() const { return *codebook_; }

  // Output symbol for seed u and input x, without range checks.
  Symbol Map(uint64_t u, Symbol x) const {
    const int64_t i = x.index();
    const int64_t j = i >> sigma_;
    const int r = static_cast<int>(i - (j << sigma_));
    return Symbol::FromIndex(2 * j + (codebook_->Contains(u, r) ? 0 : 1));
  }
  absl::StatusOr<Symbol> Apply(uint64_t u, Symbol x) const;

  // Exact image law of p under the seed-u map.
  Distribution PushForward(uint64_t u, const Distribution& p) const;

 private:
  DcmMap() = default;

  int64_t k_ = 0;
  int t_ = 0;
  int sigma_ = 0;
  double theta_ = 1.0;
  std::shared_ptr<const Codebook> codebook_;
};

struct DcmOptions {
  int c0 = kC0;
  uint64_t codebook_seed = 0;
  CodebookOptions codebook;
};

// Uses sigma = min(s - c0, log2 k). Fails with FailedPrecondition when
// s <= c0, in which case callers take the private-coin path.
absl::StatusOr<DcmMap> BuildDcm(int64_t k, int s, const DcmOptions& options = {});

struct DistortionReport {
  double input_tv = 0.0;
  double threshold = 0.0;  // theta * input_tv
  std::vector<double> per_seed_tv;
  // Fraction of seeds with per-seed TV >= threshold.
  double fraction_preserved = 0.0;
};

DistortionReport DcmDistortion(const DcmMap& dcm, const Distribution& p,
                               const Distribution& q);

// Reads s bits, most significant first, as a codebook row index.
uint64_t SeedFromBits(std::span<const uint8_t> bits);

}  // namespace dgof

#endif  // DGOF_DOMAIN_COMPRESSION_H_
