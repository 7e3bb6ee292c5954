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

#ifndef DGOF_CODEBOOK_H_
#define DGOF_CODEBOOK_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dgof/constants.h"

namespace dgof {

struct CertParams {
  double c1 = kC1;
  double c2 = kC2;
  int subset_trials = kSubsetTrials;
  double lambda_max_cap = kLambdaMaxCap;
};

struct CertReport {
  double lambda_min_full = 0.0;
  double lambda_min_subsets = 0.0;
  double lambda_max_centered = 0.0;
  int subset_size = 0;
  int trials = 0;
  bool passed = false;

  std::string ToString() const;
};

// Largest block length accepted by the dense eigensolver path.
inline constexpr int kMaxCodebookBlock = 1024;

// Certifies m binary vectors of length n stored row-major in `bits`. Subset
// j of the trials is drawn from a stream derived from (subset_seed, j), so the
// report is a pure function of its arguments.
CertReport CertifyVectors(int n, std::span<const uint8_t> bits,
                          const CertParams& params, uint64_t subset_seed);

// A certified family of m = 2^c0 * n subsets S_u of [n], each given by its
// indicator row.
class Codebook {
 public:
  // Certifies the rows and fails unless certification passes. The isometry
  // constant defaults to sqrt(c2).
  static absl::StatusOr<Codebook> Create(int n, int c0,
                                         std::vector<uint8_t> bits,
                                         const CertParams& params = {},
                                         uint64_t cert_seed = 0);

  int n() const { return n_; }
  int64_t m() const { return m_; }
  int c0() const { return c0_; }
  double alpha() const { return alpha_; }
  double delta0() const { return delta0_; }
  const CertReport& cert() const { return cert_; }

  // Whether coordinate r (0-based) belongs to S_u.
  bool Contains(int64_t u, int r) const { return bits_[u * n_ + r] != 0; }
  std::span<const uint8_t> row(int64_t u) const {
    return std::span<const uint8_t>(bits_).subspan(u * n_, n_);
  }

  // Header line then m rows of '0'/'1' characters.
  std::string Serialize() const;
  static absl::StatusOr<Codebook> Parse(std::string_view text);

 private:
  Codebook() = default;

  int n_ = 0;
  int64_t m_ = 0;
  int c0_ = 0;
  double alpha_ = 0.0;
  double delta0_ = 0.0;
  CertReport cert_;
  std::vector<uint8_t> bits_;
};

struct CodebookOptions {
  CertParams cert;
  int max_retries = kMaxCertificationRetries;
};

// Draws 2^c0 * n uniform binary vectors and certifies them, retrying with the
// next seed on failure.
absl::StatusOr<Codebook> BuildCodebook(int n, int c0, uint64_t seed,
                                       const CodebookOptions& options = {});

// Fraction of rows u with |sum over S_u of x_i| >= alpha * ||x||_2.
absl::StatusOr<double> IsometryGap(const Codebook& cb,
                                   std::span<const double> x);

}  // namespace dgof

#endif  // DGOF_CODEBOOK_H_
