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

#include "dgof/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dgof/linalg.h"
#include "dgof/testers.h"

namespace dgof {
namespace {

absl::Status CheckPerturbation(int64_t k, std::span<const double> z) {
  if (k < 2 || k % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat("k=", k, " must be even"));
  }
  if (static_cast<int64_t>(z.size()) != k / 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("perturbation has ", z.size(), " entries, expected ", k / 2));
  }
  return absl::OkStatus();
}

// Running log-sum-exp.
class LogSumExp {
 public:
  void Add(double x) {
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double Value() const { return max_ + std::log(sum_); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

std::vector<double> FlatSimplexRow(int64_t size, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> row(size);
  double total = 0.0;
  for (double& v : row) total += (v = expo(rng));
  for (double& v : row) v /= total;
  return row;
}

Channel BinaryRandomizedResponse(const std::vector<bool>& subset, double rho) {
  const double hi = std::exp(rho) / (1 + std::exp(rho));
  const int64_t k = static_cast<int64_t>(subset.size());
  std::vector<double> rows(2 * k);
  for (int64_t x = 0; x < k; ++x) {
    rows[2 * x + 1] = subset[x] ? hi : 1 - hi;
    rows[2 * x] = 1 - rows[2 * x + 1];
  }
  return *Channel::Create(k, 2, std::move(rows));
}

Channel RandomBinaryLdpMixture(int64_t k, double rho, Rng& rng) {
  const int parts = 1 + static_cast<int>(UniformBelow(rng, 4));
  const std::vector<double> weights = FlatSimplexRow(parts, rng);
  std::vector<double> rows(2 * k, 0.0);
  for (int j = 0; j < parts; ++j) {
    std::vector<bool> subset(k);
    for (int64_t x = 0; x < k; ++x) subset[x] = rng() & 1;
    const Channel c = BinaryRandomizedResponse(subset, rho);
    for (int64_t x = 0; x < k; ++x) {
      for (int y = 0; y < 2; ++y) {
        rows[2 * x + y] += weights[j] * c(y, Symbol(x + 1));
      }
    }
  }
  return *Channel::Create(k, 2, std::move(rows));
}

Channel KaryRandomizedResponse(int64_t k, double rho) {
  const double z = std::exp(rho) + static_cast<double>(k) - 1;
  std::vector<double> rows(k * k, 1.0 / z);
  for (int64_t x = 0; x < k; ++x) rows[x * k + x] = std::exp(rho) / z;
  return *Channel::Create(k, k, std::move(rows));
}

}  // namespace

double HMatrix::Trace() const {
  double t = 0.0;
  for (int64_t i = 0; i < half_k; ++i) t += (*this)(i, i);
  return t;
}

double HMatrix::Bilinear(std::span<const double> z,
                         std::span<const double> zp) const {
  double acc = 0.0;
  for (int64_t i = 0; i < half_k; ++i) {
    double row = 0.0;
    for (int64_t j = 0; j < half_k; ++j) row += (*this)(i, j) * zp[j];
    acc += z[i] * row;
  }
  return acc;
}

double HMatrix::SymmetryDefect() const {
  double worst = 0.0;
  for (int64_t i = 0; i < half_k; ++i) {
    for (int64_t j = 0; j < i; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

double HMatrix::MinEigenvalue() const {
  return dgof::MinEigenvalue(entries, half_k);
}

absl::StatusOr<HMatrix> ComputeHMatrix(const Channel& w) {
  const int64_t k = w.k();
  if (k % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat("k=", k, " is odd"));
  }
  HMatrix h;
  h.half_k = k / 2;
  h.entries.assign(h.half_k * h.half_k, 0.0);
  std::vector<double> diff(h.half_k);
  for (int64_t y = 0; y < w.y_size(); ++y) {
    double mass = 0.0;
    for (int64_t x = 1; x <= k; ++x) mass += w(y, Symbol(x));
    if (mass <= 0.0) continue;
    for (int64_t i = 0; i < h.half_k; ++i) {
      diff[i] = w(y, Symbol(2 * i + 1)) - w(y, Symbol(2 * i + 2));
    }
    for (int64_t i = 0; i < h.half_k; ++i) {
      if (diff[i] == 0.0) continue;
      for (int64_t j = 0; j < h.half_k; ++j) {
        h.entries[i * h.half_k + j] += diff[i] * diff[j] / mass;
      }
    }
  }
  return h;
}

double NuclearNorm(const HMatrix& h) {
  if (h.half_k == 0) return 0.0;
  double total = 0.0;
  for (double ev : SymmetricEigenvalues(h.entries, h.half_k)) total += std::abs(ev);
  return total;
}

absl::StatusOr<HMatrix> AverageHMatrix(std::span<const HMatrix> hs) {
  if (hs.empty()) return absl::InvalidArgumentError("nothing to average");
  HMatrix avg;
  avg.half_k = hs[0].half_k;
  avg.entries.assign(avg.half_k * avg.half_k, 0.0);
  for (const HMatrix& h : hs) {
    if (h.half_k != avg.half_k) {
      return absl::InvalidArgumentError("H matrices of different sizes");
    }
    for (size_t i = 0; i < h.entries.size(); ++i) avg.entries[i] += h.entries[i];
  }
  for (double& v : avg.entries) v /= static_cast<double>(hs.size());
  return avg;
}

absl::StatusOr<Distribution> PaninskiDistribution(std::span<const double> z,
                                                  double eps, int64_t k) {
  if (absl::Status st = CheckPerturbation(k, z); !st.ok()) return st;
  double zmax = 0.0;
  for (double v : z) zmax = std::max(zmax, std::abs(v));
  if (!(eps >= 0) || eps * zmax > 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "eps * max|z| = %g exceeds 1", eps * zmax));
  }
  std::vector<double> p(k);
  for (int64_t i = 0; i < k / 2; ++i) {
    p[2 * i] = (1 + eps * z[i]) / static_cast<double>(k);
    p[2 * i + 1] = (1 - eps * z[i]) / static_cast<double>(k);
  }
  return Distribution::Create(std::move(p));
}

absl::StatusOr<double> DecoupledInnerProduct(const Channel& w,
                                             std::span<const double> z,
                                             std::span<const double> zp,
                                             double eps) {
  const int64_t k = w.k();
  if (absl::Status st = CheckPerturbation(k, z); !st.ok()) return st;
  if (absl::Status st = CheckPerturbation(k, zp); !st.ok()) return st;
  const double kd = static_cast<double>(k);
  double acc = 0.0;
  for (int64_t y = 0; y < w.y_size(); ++y) {
    double q = 0.0;
    double pz = 0.0;
    double pzp = 0.0;
    for (int64_t x = 0; x < k; ++x) {
      const double sign = x % 2 == 0 ? 1.0 : -1.0;
      const double wy = w(y, Symbol(x + 1));
      q += wy / kd;
      pz += (1 + sign * eps * z[x / 2]) / kd * wy;
      pzp += (1 + sign * eps * zp[x / 2]) / kd * wy;
    }
    if (q <= 0.0) continue;
    acc += q * ((pz - q) / q) * ((pzp - q) / q);
  }
  return acc;
}

absl::StatusOr<double> BilinearIdentityResidual(const Channel& w,
                                                std::span<const double> z,
                                                std::span<const double> zp,
                                                double eps) {
  absl::StatusOr<double> lhs = DecoupledInnerProduct(w, z, zp, eps);
  if (!lhs.ok()) return lhs.status();
  absl::StatusOr<HMatrix> h = ComputeHMatrix(w);
  if (!h.ok()) return h.status();
  const double rhs = eps * eps / static_cast<double>(w.k()) * h->Bilinear(z, zp);
  return std::abs(*lhs - rhs);
}

absl::StatusOr<FluctuationResult> RademacherChaosLogMgf(
    const HMatrix& h, double scale, FluctuationMode mode, int64_t samples,
    uint64_t seed) {
  const int64_t m = h.half_k;
  FluctuationResult result;
  if (scale == 0.0 || m == 0) return result;
  if (mode == FluctuationMode::kExact) {
    if (m > kMaxExactHalfK) {
      return absl::InvalidArgumentError(absl::StrCat(
          "exact enumeration needs k/2 <= ", kMaxExactHalfK, ", got ", m));
    }
    const int64_t count = int64_t{1} << m;
    // Hz' for every sign pattern z'.
    std::vector<double> hz(count * m, 0.0);
    for (int64_t b = 0; b < count; ++b) {
      for (int64_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int64_t j = 0; j < m; ++j) {
          acc += h(i, j) * ((b >> j) & 1 ? -1.0 : 1.0);
        }
        hz[b * m + i] = scale * acc;
      }
    }
    LogSumExp lse;
    for (int64_t a = 0; a < count; ++a) {
      for (int64_t b = 0; b < count; ++b) {
        const double* v = &hz[b * m];
        double x = 0.0;
        for (int64_t i = 0; i < m; ++i) x += (a >> i) & 1 ? -v[i] : v[i];
        lse.Add(x);
      }
    }
    result.value = lse.Value() - 2.0 * static_cast<double>(m) * std::log(2.0);
    return result;
  }
  if (samples < 2) return absl::InvalidArgumentError("need at least 2 samples");
  Rng rng(DeriveSeed(seed, {0xf1c7ULL}));
  std::vector<double> xs(samples);
  std::vector<double> z(m);
  std::vector<double> zp(m);
  double top = -std::numeric_limits<double>::infinity();
  for (int64_t t = 0; t < samples; ++t) {
    for (int64_t i = 0; i < m; ++i) {
      z[i] = rng() & 1 ? -1.0 : 1.0;
      zp[i] = rng() & 1 ? -1.0 : 1.0;
    }
    xs[t] = scale * h.Bilinear(z, zp);
    top = std::max(top, xs[t]);
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : xs) {
    const double e = std::exp(x - top);
    sum += e;
    sum_sq += e * e;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
  result.value = top + std::log(mean);
  result.standard_error = std::sqrt(var / n) / mean;
  return result;
}

absl::StatusOr<FluctuationResult> Chi2Fluctuation(const FluctuationConfig& cfg) {
  if (cfg.channels.empty() || cfg.eps == 0.0 || cfg.beta == 0.0) {
    return FluctuationResult{};
  }
  const int64_t k = cfg.channels[0].k();
  std::vector<HMatrix> hs;
  hs.reserve(cfg.channels.size());
  for (const Channel& w : cfg.channels) {
    if (w.k() != k) return absl::InvalidArgumentError("channels on different domains");
    absl::StatusOr<HMatrix> h = ComputeHMatrix(w);
    if (!h.ok()) return h.status();
    hs.push_back(*std::move(h));
  }
  HMatrix total = *AverageHMatrix(hs);
  for (double& v : total.entries) v *= static_cast<double>(hs.size());
  const double e = cfg.beta * cfg.eps;
  return RademacherChaosLogMgf(total, e * e / static_cast<double>(k), cfg.mode,
                               cfg.samples, cfg.seed);
}

double SemimaxminAverage(std::span<const double> fluctuations) {
  if (fluctuations.empty()) return 0.0;
  double acc = 0.0;
  for (double f : fluctuations) acc += std::min(1.0, f);
  return acc / static_cast<double>(fluctuations.size());
}

double SampleLowerBound(const ConstraintSpec& constraint, int64_t k, double eps,
                        int s) {
  const double kd = static_cast<double>(k);
  const double base = std::sqrt(kd) / (eps * eps);
  const double coins = std::sqrt(std::max(kd / std::pow(2.0, s), 1.0));
  if (const auto* comm = std::get_if<CommConstraint>(&constraint)) {
    const double msg = std::pow(2.0, comm->bits);
    return base * std::sqrt(std::max(kd / msg, 1.0)) *
           std::sqrt(std::max(kd / (std::pow(2.0, s) * msg), 1.0));
  }
  const double rho = std::get<LdpConstraint>(constraint).rho;
  return base * (std::sqrt(kd) / (rho * rho)) * coins;
}

absl::StatusOr<NormAuditReport> NormBoundAudit(const ConstraintSpec& constraint,
                                               int64_t k, int64_t trials,
                                               Rng& rng) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (k < 2 || k % 2 != 0) return absl::InvalidArgumentError("k must be even");
  if (absl::Status st = ValidateConstraint(constraint); !st.ok()) return st;
  NormAuditReport report;
  report.constraint = ConstraintToString(constraint);
  report.k = k;
  report.random_trials = trials;

  if (const auto* comm = std::get_if<CommConstraint>(&constraint)) {
    if (comm->bits > 20) return absl::InvalidArgumentError("too many message bits");
    const int64_t outputs = int64_t{1} << comm->bits;
    report.bound = static_cast<double>(outputs);
    for (int64_t t = 0; t < trials; ++t) {
      std::vector<double> rows;
      rows.reserve(k * outputs);
      for (int64_t x = 0; x < k; ++x) {
        const std::vector<double> row = FlatSimplexRow(outputs, rng);
        rows.insert(rows.end(), row.begin(), row.end());
      }
      const Channel w = *Channel::Create(k, outputs, std::move(rows));
      report.max_random = std::max(report.max_random, NuclearNorm(*ComputeHMatrix(w)));
    }
    // outputs^k maps, counted without overflow.
    int64_t count = 1;
    for (int64_t x = 0; x < k && count <= kMaxDeterministicEnumeration; ++x) {
      count *= outputs;
    }
    if (count <= kMaxDeterministicEnumeration) {
      report.deterministic_count = count;
      std::vector<int64_t> f(k, 0);
      for (int64_t code = 0; code < count; ++code) {
        int64_t c = code;
        std::vector<double> rows(k * outputs, 0.0);
        for (int64_t x = 0; x < k; ++x) {
          f[x] = c % outputs;
          c /= outputs;
          rows[x * outputs + f[x]] = 1.0;
        }
        const double norm =
            NuclearNorm(*ComputeHMatrix(*Channel::Create(k, outputs, std::move(rows))));
        if (norm > report.max_deterministic) {
          report.max_deterministic = norm;
          report.deterministic_witness = f;
        }
      }
    }
    report.within_bound =
        std::max(report.max_random, report.max_deterministic) <= report.bound + 1e-9;
    return report;
  }

  const double rho = std::get<LdpConstraint>(constraint).rho;
  absl::StatusOr<HadamardScheme> probe = HadamardScheme::Create(k, rho);
  if (!probe.ok()) return probe.status();
  const int grid = 10;
  const int64_t per_rho = std::max<int64_t>(1, trials / grid);
  double num = 0.0;
  double den = 0.0;
  for (int g = 1; g <= grid; ++g) {
    const double r = rho * g / grid;
    double worst = NuclearNorm(*ComputeHMatrix(KaryRandomizedResponse(k, r)));
    for (int64_t t = 0; t < per_rho; ++t) {
      worst = std::max(worst,
                       NuclearNorm(*ComputeHMatrix(RandomBinaryLdpMixture(k, r, rng))));
    }
    const HadamardScheme scheme = *HadamardScheme::Create(k, r);
    double hadamard = 0.0;
    for (int64_t j = 1; j <= scheme.K(); ++j) {
      hadamard = std::max(hadamard, NuclearNorm(*ComputeHMatrix(scheme.AsChannel(j))));
    }
    worst = std::max(worst, hadamard);
    report.rho_grid.push_back(r);
    report.max_norm_per_rho.push_back(worst);
    report.hadamard_norm_per_rho.push_back(hadamard);
    report.max_random = std::max(report.max_random, worst);
    num += worst * r * r;
    den += r * r * r * r;
  }
  report.fitted_constant = num / den;
  return report;
}

std::string NormAuditReport::ToString() const {
  std::string out = absl::StrFormat(
      "constraint=%s k=%d random_trials=%d max_random=%.12g", constraint, k,
      random_trials, max_random);
  if (bound > 0) {
    absl::StrAppendFormat(&out,
                          " deterministic=%d max_deterministic=%.12g bound=%g "
                          "within_bound=%d",
                          deterministic_count, max_deterministic, bound,
                          within_bound ? 1 : 0);
    if (!deterministic_witness.empty()) {
      absl::StrAppend(&out, " witness=");
      for (size_t i = 0; i < deterministic_witness.size(); ++i) {
        absl::StrAppend(&out, i ? "," : "", deterministic_witness[i]);
      }
    }
  } else {
    absl::StrAppendFormat(&out, " fitted_c=%.6g", fitted_constant);
    for (size_t i = 0; i < rho_grid.size(); ++i) {
      absl::StrAppendFormat(&out, "\n  rho=%.3f max_norm=%.6g hadamard=%.6g ratio=%.6g",
                            rho_grid[i], max_norm_per_rho[i], hadamard_norm_per_rho[i],
                            max_norm_per_rho[i] / (rho_grid[i] * rho_grid[i]));
    }
  }
  return out;
}

std::string BoundsCsv(std::span<const BoundsRow> rows) {
  std::string out = "constraint,k,eps,l_or_rho,s,lb_formula,empirical_n_star\n";
  for (const BoundsRow& r : rows) {
    absl::StrAppendFormat(&out, "%s,%d,%.17g,%.17g,%d,%.17g,", r.constraint, r.k,
                          r.eps, r.l_or_rho, r.s, r.lb_formula);
    if (r.empirical_n_star >= 0) absl::StrAppendFormat(&out, "%.17g", r.empirical_n_star);
    out += "\n";
  }
  return out;
}

}  // namespace dgof
