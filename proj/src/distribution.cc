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

#include "dgof/distribution.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dgof/text.h"

namespace dgof {

Distribution::Distribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  cdf_.resize(probs_.size());
  double acc = 0.0;
  for (size_t i = 0; i < probs_.size(); ++i) {
    acc += probs_[i];
    cdf_[i] = acc;
  }
}

absl::StatusOr<Distribution> Distribution::Create(std::vector<double> probs) {
  if (probs.empty()) {
    return absl::InvalidArgumentError("distribution needs k >= 1");
  }
  double sum = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid probability entry ", v));
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    return absl::InvalidArgumentError(
        absl::StrFormat("probabilities sum to %.17g, not 1", sum));
  }
  return Distribution(std::move(probs));
}

Distribution Distribution::Uniform(int64_t k) {
  return Distribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Distribution Distribution::PointMass(int64_t k, Symbol x) {
  std::vector<double> probs(k, 0.0);
  probs[x.index()] = 1.0;
  return Distribution(std::move(probs));
}

Symbol Distribution::Sample(Rng& rng) const {
  const double u = Uniform01(rng) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  int64_t i = it - cdf_.begin();
  if (i >= k()) i = k() - 1;
  return Symbol::FromIndex(i);
}

double TotalVariation(const Distribution& p, const Distribution& q) {
  double acc = 0.0;
  for (int64_t i = 0; i < p.k(); ++i) {
    acc += std::abs(p.at_index(i) - q.at_index(i));
  }
  return 0.5 * acc;
}

double L2Distance(const Distribution& p, const Distribution& q) {
  double acc = 0.0;
  for (int64_t i = 0; i < p.k(); ++i) {
    const double d = p.at_index(i) - q.at_index(i);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double ChiSquare(const Distribution& p, const Distribution& q) {
  double acc = 0.0;
  for (int64_t i = 0; i < p.k(); ++i) {
    const double d = p.at_index(i) - q.at_index(i);
    if (q.at_index(i) == 0.0) {
      if (d != 0.0) return INFINITY;
      continue;
    }
    acc += d * d / q.at_index(i);
  }
  return acc;
}

absl::StatusOr<Channel> Channel::Create(int64_t k, int64_t y_size,
                                        std::vector<double> rows) {
  if (k < 1 || y_size < 1) {
    return absl::InvalidArgumentError("channel dimensions must be positive");
  }
  if (static_cast<int64_t>(rows.size()) != k * y_size) {
    return absl::InvalidArgumentError("channel matrix has the wrong size");
  }
  for (int64_t x = 0; x < k; ++x) {
    double sum = 0.0;
    for (int64_t y = 0; y < y_size; ++y) {
      const double v = rows[x * y_size + y];
      if (!std::isfinite(v) || v < 0.0) {
        return absl::InvalidArgumentError("negative channel entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > Distribution::kSimplexTolerance) {
      return absl::InvalidArgumentError(
          absl::StrFormat("channel row %d sums to %.17g", x, sum));
    }
  }
  return Channel(k, y_size, std::move(rows));
}

std::vector<double> Channel::OutputLaw(const Distribution& p) const {
  std::vector<double> out(y_size_, 0.0);
  for (int64_t x = 0; x < k_; ++x) {
    const double px = p.at_index(x);
    if (px == 0.0) continue;
    for (int64_t y = 0; y < y_size_; ++y) out[y] += px * rows_[x * y_size_ + y];
  }
  return out;
}

bool IsLdp(const Channel& w, double rho) {
  // The relative slack absorbs the last-ulp rounding of channels whose
  // extremal ratio is exactly e^rho.
  const double bound = std::exp(rho) * (1.0 + 1e-12);
  for (int64_t y = 0; y < w.y_size(); ++y) {
    double lo = INFINITY;
    double hi = 0.0;
    for (int64_t x = 1; x <= w.k(); ++x) {
      const double v = w(y, Symbol(x));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi == 0.0) continue;
    if (lo == 0.0) return false;
    if (hi / lo > bound) return false;
  }
  return true;
}

absl::Status ValidateConstraint(const ConstraintSpec& c) {
  if (const auto* comm = std::get_if<CommConstraint>(&c)) {
    if (comm->bits < 1 || comm->bits > 30) {
      return absl::InvalidArgumentError("message width must be in [1, 30]");
    }
  } else {
    const double rho = std::get<LdpConstraint>(c).rho;
    if (!(rho > 0.0) || !std::isfinite(rho)) {
      return absl::InvalidArgumentError("privacy parameter must be positive");
    }
  }
  return absl::OkStatus();
}

std::string ConstraintToString(const ConstraintSpec& c) {
  if (const auto* comm = std::get_if<CommConstraint>(&c)) {
    return absl::StrCat("comm:", comm->bits);
  }
  return absl::StrCat("ldp:", std::get<LdpConstraint>(c).rho);
}

absl::StatusOr<ConstraintSpec> ParseConstraint(std::string_view text) {
  std::vector<std::string_view> parts = SplitString(text, ':');
  if (parts.size() != 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "constraint must look like comm:L or ldp:RHO, got ", std::string(text)));
  }
  ConstraintSpec out;
  if (parts[0] == "comm") {
    int bits;
    if (!ParseInt(parts[1], &bits)) {
      return absl::InvalidArgumentError("bad message width");
    }
    out = CommConstraint{bits};
  } else if (parts[0] == "ldp") {
    double rho;
    if (!ParseDouble(parts[1], &rho)) {
      return absl::InvalidArgumentError("bad privacy parameter");
    }
    out = LdpConstraint{rho};
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown constraint kind ", std::string(parts[0])));
  }
  if (absl::Status st = ValidateConstraint(out); !st.ok()) return st;
  return out;
}

std::string_view VerdictName(Verdict v) {
  return v == Verdict::kAccept ? "accept" : "reject";
}

uint64_t DrawPublicSeed(const SeedBudget& budget, Rng& rng) {
  if (budget.s <= 0) return 0;
  if (budget.s >= 64) return rng();
  return rng() >> (64 - budget.s);
}

int64_t PaddedSize(int64_t k, int64_t L) { return L * ((k + L - 1) / L); }

absl::StatusOr<Distribution> PadDomain(const Distribution& p, int64_t L) {
  const int64_t k = p.k();
  if (L < 1 || L > k) {
    return absl::InvalidArgumentError(
        absl::StrCat("pad target L=", L, " outside [1, ", k, "]"));
  }
  const int64_t kp = PaddedSize(k, L);
  if (kp == k) return p;
  std::vector<double> out(kp, 1.0 / static_cast<double>(kp));
  for (int64_t i = 0; i < k; ++i) {
    out[i] = p.at_index(i) * static_cast<double>(k) / static_cast<double>(kp);
  }
  return Distribution::Create(std::move(out));
}

Symbol PadSample(Symbol x, int64_t k, int64_t L, Rng& rng) {
  const int64_t kp = PaddedSize(k, L);
  if (kp == k) return x;
  // Keep x with probability k / k', else move to a uniform new symbol.
  const uint64_t u = UniformBelow(rng, kp);
  if (u < static_cast<uint64_t>(k)) return x;
  return Symbol(k + 1 + static_cast<int64_t>(UniformBelow(rng, kp - k)));
}

int64_t PowerOfTwoPadTarget(int64_t k) {
  return int64_t{1} << FloorLog2(static_cast<uint64_t>(k));
}

bool IsPowerOfTwo(int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

int FloorLog2(uint64_t x) { return 63 - std::countl_zero(x); }

int CeilLog2(uint64_t x) { return x <= 1 ? 0 : FloorLog2(x - 1) + 1; }

absl::StatusOr<Distribution> ParseDistribution(std::string_view text) {
  std::vector<double> probs;
  int line_no = 0;
  for (std::string_view line : SplitString(text, '\n')) {
    ++line_no;
    line = TrimWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    double v;
    if (!ParseDouble(line, &v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": not a number: ", std::string(line)));
    }
    probs.push_back(v);
  }
  return Distribution::Create(std::move(probs));
}

absl::StatusOr<Distribution> LoadDistributionFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseDistribution(ss.str());
}

std::string SerializeDistribution(const Distribution& p) {
  std::string out = absl::StrCat("# k=", p.k(), "\n");
  for (double v : p.probs()) absl::StrAppendFormat(&out, "%.17g\n", v);
  return out;
}

}  // namespace dgof
