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

#include "dgof/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dgof/bounds.h"
#include "dgof/text.h"

namespace dgof {
namespace {

// Runs fn(0..count-1) on a pool; returns the error of the lowest failing index.
absl::Status ParallelFor(int64_t count, int workers,
                         const std::function<absl::Status(int64_t)>& fn) {
  std::vector<absl::Status> status(count);
  std::atomic<int64_t> next{0};
  auto work = [&] {
    for (int64_t i = next++; i < count; i = next++) status[i] = fn(i);
  };
  const int threads = static_cast<int>(std::min<int64_t>(std::max(workers, 1), count));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  for (const absl::Status& st : status) {
    if (!st.ok()) return st;
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status ParseList(std::string_view key, std::string_view value,
                       std::vector<T>* out,
                       const std::function<bool(std::string_view, T*)>& parse) {
  out->clear();
  for (std::string_view item : SplitString(value, ',', /*skip_empty=*/true)) {
    item = TrimWhitespace(item);
    if (item.empty()) continue;
    T v;
    if (!parse(item, &v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad value '", std::string(item), "' for ", std::string(key)));
    }
    out->push_back(v);
  }
  return absl::OkStatus();
}

bool IsUniform(const Distribution& q) {
  const double u = 1.0 / static_cast<double>(q.k());
  for (double v : q.probs()) {
    if (std::abs(v - u) > 1e-12) return false;
  }
  return true;
}

struct Cell {
  int64_t k;
  double eps;
  ConstraintSpec constraint;
  int s;
  int64_t players;
  Truth truth;
  int config_index;
};

struct PreparedConfig {
  std::shared_ptr<const ProtocolConfig> config;
  Distribution reference = Distribution::Uniform(1);  // original domain
  Distribution padded_reference = Distribution::Uniform(1);
};

}  // namespace

std::string_view TruthName(Truth t) { return t == Truth::kNull ? "null" : "far"; }

absl::StatusOr<ExperimentSpec> ParseExperimentSpec(std::string_view text) {
  ExperimentSpec spec;
  spec.players = {0};
  spec.coins = {0};
  bool have_trials = false;
  int line_no = 0;
  for (std::string_view line : SplitString(text, '\n', /*skip_empty=*/false)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = TrimWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected key = value"));
    }
    const std::string key(TrimWhitespace(line.substr(0, eq)));
    const std::string_view value = TrimWhitespace(line.substr(eq + 1));
    absl::Status st;
    if (key == "k") {
      st = ParseList<int64_t>(key, value, &spec.ks, [](std::string_view s, int64_t* v) {
        return ParseInt64(s, v) && *v >= 2;
      });
    } else if (key == "eps") {
      st = ParseList<double>(key, value, &spec.epss, [](std::string_view s, double* v) {
        return ParseDouble(s, v) && *v > 0 && *v <= 1;
      });
    } else if (key == "constraint") {
      st = ParseList<ConstraintSpec>(key, value, &spec.constraints,
                                     [](std::string_view s, ConstraintSpec* v) {
                                       auto c = ParseConstraint(s);
                                       if (!c.ok()) return false;
                                       *v = *c;
                                       return true;
                                     });
    } else if (key == "coins") {
      st = ParseList<int>(key, value, &spec.coins, [](std::string_view s, int* v) {
        return ParseInt(s, v) && *v >= 0 && *v <= 62;
      });
    } else if (key == "players") {
      st = ParseList<int64_t>(key, value, &spec.players, [](std::string_view s, int64_t* v) {
        if (s == "auto") {
          *v = 0;
          return true;
        }
        return ParseInt64(s, v) && *v >= 1;
      });
    } else if (key == "truth") {
      st = ParseList<Truth>(key, value, &spec.truths, [](std::string_view s, Truth* v) {
        if (s == "null") *v = Truth::kNull;
        else if (s == "far") *v = Truth::kFar;
        else return false;
        return true;
      });
    } else if (key == "trials") {
      if (!ParseInt64(value, &spec.trials) || spec.trials < 1) {
        st = absl::InvalidArgumentError("trials must be an integer >= 1");
      }
      have_trials = true;
    } else if (key == "alternative") {
      if (value == "paninski") {
        spec.alternative = AlternativeKind::kPaninski;
      } else if (value == "random-far") {
        spec.alternative = AlternativeKind::kRandomFar;
      } else if (value.substr(0, 5) == "file:" && value.size() > 5) {
        spec.alternative = AlternativeKind::kFile;
        spec.alternative_path = std::string(value.substr(5));
      } else {
        st = absl::InvalidArgumentError("alternative must be paninski, random-far or file:<path>");
      }
    } else if (key == "reference") {
      if (value == "uniform") {
        spec.reference_path.clear();
      } else if (value.substr(0, 5) == "file:" && value.size() > 5) {
        spec.reference_path = std::string(value.substr(5));
      } else {
        st = absl::InvalidArgumentError("reference must be uniform or file:<path>");
      }
    } else if (key == "delta") {
      if (!ParseDouble(value, &spec.delta) || !(spec.delta > 0 && spec.delta < 1)) {
        st = absl::InvalidArgumentError("delta must be in (0, 1)");
      }
    } else if (key == "master_seed") {
      if (!ParseUint64(value, &spec.master_seed)) {
        st = absl::InvalidArgumentError("master_seed must be an unsigned integer");
      }
    } else if (key == "simulation") {
      if (value == "aggregate") spec.simulation = SimulationMode::kAggregate;
      else if (value == "player") spec.simulation = SimulationMode::kPlayer;
      else st = absl::InvalidArgumentError("simulation must be aggregate or player");
    } else if (key == "profile") {
      if (value == "desk") spec.profile = AmplifierProfile::kDesk;
      else if (value == "paper") spec.profile = AmplifierProfile::kPaperFaithful;
      else st = absl::InvalidArgumentError("profile must be desk or paper");
    } else if (key == "seed_mode") {
      if (value == "expander") spec.seed_mode = SeedMode::kExpander;
      else if (value == "fresh") spec.seed_mode = SeedMode::kFreshRandomness;
      else st = absl::InvalidArgumentError("seed_mode must be expander or fresh");
    } else if (key == "output") {
      spec.output = std::string(value);
    } else {
      st = absl::InvalidArgumentError(absl::StrCat("unknown key '", key, "'"));
    }
    if (!st.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", std::string(st.message())));
    }
  }
  if (!have_trials) return absl::InvalidArgumentError("missing key 'trials'");
  return spec;
}

absl::StatusOr<ExperimentSpec> LoadExperimentSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseExperimentSpec(buf.str());
}

std::string ResultsCsv(const std::vector<ResultRow>& rows) {
  std::string out = absl::StrCat(kResultsCsvHeader, "\n");
  for (const ResultRow& r : rows) {
    absl::StrAppendFormat(&out, "%d,%d,%d,%.17g,%s,%d,%s,%d,%s,%d,%d,%.17g,%.17g\n",
                          r.cell, r.k, r.padded_k, r.eps, r.constraint, r.s, r.n_spec,
                          r.n, std::string(TruthName(r.truth)), r.trials, r.accepts,
                          r.accept_rate, r.stderr_);
  }
  return out;
}

std::string SummaryTable(const std::vector<ResultRow>& rows) {
  std::string out = absl::StrFormat("%5s %6s %6s %-10s %3s %12s %5s %8s %8s %9s\n", "cell",
                                    "k", "eps", "constraint", "s", "n", "truth",
                                    "accept", "stderr", "wall_s");
  for (const ResultRow& r : rows) {
    absl::StrAppendFormat(&out, "%5d %6d %6.3f %-10s %3d %12d %5s %8.4f %8.4f %9.3f\n",
                          r.cell, r.k, r.eps, r.constraint, r.s, r.n,
                          std::string(TruthName(r.truth)), r.accept_rate, r.stderr_,
                          r.wall_time);
  }
  return out;
}

int WorkersFromEnv() {
  const char* env = std::getenv("DGOF_WORKERS");
  int workers = 1;
  if (env == nullptr || !ParseInt(env, &workers) || workers < 1) return 1;
  return workers;
}

absl::StatusOr<Distribution> DrawAlternative(AlternativeKind kind,
                                             const Distribution& q, double eps,
                                             const Distribution* fixed, Rng& rng) {
  const int64_t k = q.k();
  switch (kind) {
    case AlternativeKind::kFile:
      if (fixed == nullptr || fixed->k() != k) {
        return absl::InvalidArgumentError("alternative file does not match the domain");
      }
      return *fixed;
    case AlternativeKind::kPaninski: {
      if (!IsUniform(q) || k % 2 != 0) {
        return absl::InvalidArgumentError(
            "paninski alternatives need a uniform reference on an even domain");
      }
      if (eps > 0.5) {
        return absl::InvalidArgumentError("paninski alternatives need eps <= 1/2");
      }
      std::vector<double> z(k / 2);
      for (double& v : z) v = rng() & 1 ? 1.0 : -1.0;
      return PaninskiDistribution(z, 2 * eps, k);
    }
    case AlternativeKind::kRandomFar: {
      std::exponential_distribution<double> expo(1.0);
      std::vector<double> r(k);
      double total = 0.0;
      for (double& v : r) total += (v = expo(rng));
      for (double& v : r) v /= total;
      Distribution target = *Distribution::Create(r);
      if (TotalVariation(target, q) < eps) {
        const auto& probs = q.probs();
        const int64_t lightest = std::min_element(probs.begin(), probs.end()) - probs.begin();
        target = Distribution::PointMass(k, Symbol(lightest + 1));
      }
      const double tv = TotalVariation(target, q);
      if (tv < eps) {
        return absl::InvalidArgumentError("no distribution that far from the reference");
      }
      const double lambda = eps / tv;
      std::vector<double> p(k);
      for (int64_t x = 0; x < k; ++x) {
        p[x] = (1 - lambda) * q.at_index(x) + lambda * target.at_index(x);
      }
      return Distribution::Create(std::move(p));
    }
  }
  return absl::InternalError("unreachable");
}

absl::StatusOr<std::vector<ResultRow>> RunExperiment(const ExperimentSpec& spec,
                                                     int workers) {
  std::optional<Distribution> reference_file;
  if (!spec.reference_path.empty()) {
    absl::StatusOr<Distribution> q = LoadDistributionFile(spec.reference_path);
    if (!q.ok()) return q.status();
    reference_file = *q;
  }
  std::optional<Distribution> alternative_file;
  if (spec.alternative == AlternativeKind::kFile) {
    absl::StatusOr<Distribution> p = LoadDistributionFile(spec.alternative_path);
    if (!p.ok()) return p.status();
    alternative_file = *p;
  }

  // Configurations are shared by the truths of a cell.
  std::vector<PreparedConfig> configs;
  std::vector<Cell> cells;
  for (int64_t k : spec.ks) {
    if (reference_file && reference_file->k() != k) {
      return absl::InvalidArgumentError(absl::StrCat(
          "reference file has k=", reference_file->k(), " but the grid asks for k=", k));
    }
    const Distribution q = reference_file ? *reference_file : Distribution::Uniform(k);
    const int64_t pad_target = PowerOfTwoPadTarget(k);
    const int64_t padded = PaddedSize(k, pad_target);
    for (double eps : spec.epss) {
      for (const ConstraintSpec& c : spec.constraints) {
        for (int s : spec.coins) {
          for (int64_t n : spec.players) {
            ProtocolOptions opts;
            opts.delta = spec.delta;
            opts.profile = spec.profile;
            opts.seed_mode = spec.seed_mode;
            opts.players = n;
            // Padding shrinks distances by k / padded.
            absl::StatusOr<ProtocolConfig> config = MakeProtocolConfig(
                padded, eps * static_cast<double>(k) / padded, c, s, opts);
            if (!config.ok()) {
              return absl::Status(config.status().code(),
                                  absl::StrFormat("cell k=%d eps=%g %s s=%d: %s", k, eps,
                                                  ConstraintToString(c), s,
                                                  std::string(config.status().message())));
            }
            PreparedConfig pc;
            pc.config = std::make_shared<const ProtocolConfig>(*std::move(config));
            pc.reference = q;
            pc.padded_reference = *PadDomain(q, pad_target);
            configs.push_back(std::move(pc));
            for (Truth t : spec.truths) {
              cells.push_back({k, eps, c, s, n, t, static_cast<int>(configs.size()) - 1});
            }
          }
        }
      }
    }
  }
  // Reject impossible alternatives before spending any time.
  for (const Cell& cell : cells) {
    if (cell.truth != Truth::kFar) continue;
    Rng probe(0);
    absl::StatusOr<Distribution> p =
        DrawAlternative(spec.alternative, configs[cell.config_index].reference, cell.eps,
                        alternative_file ? &*alternative_file : nullptr, probe);
    if (!p.ok()) return p.status();
  }

  const int64_t trials = spec.trials;
  std::vector<uint8_t> accepted(cells.size() * trials, 0);
  std::vector<double> seconds(cells.size() * trials, 0.0);
  RunOptions ro;
  ro.mode = spec.simulation;
  ro.evaluate_all_groups = false;
  ro.keep_messages = false;
  absl::Status st = ParallelFor(
      static_cast<int64_t>(cells.size()) * trials, workers, [&](int64_t task) {
        const auto start = std::chrono::steady_clock::now();
        const int64_t c = task / trials;
        const int64_t t = task % trials;
        const Cell& cell = cells[c];
        const PreparedConfig& pc = configs[cell.config_index];
        const uint64_t trial_seed = DeriveSeed(
            spec.master_seed, {static_cast<uint64_t>(c), static_cast<uint64_t>(t)});
        Distribution truth = pc.padded_reference;
        if (cell.truth == Truth::kFar) {
          Rng alt(DeriveSeed(trial_seed, {1}));
          absl::StatusOr<Distribution> p =
              DrawAlternative(spec.alternative, pc.reference, cell.eps,
                              alternative_file ? &*alternative_file : nullptr, alt);
          if (!p.ok()) return p.status();
          truth = *PadDomain(*p, PowerOfTwoPadTarget(pc.reference.k()));
        }
        absl::StatusOr<ProtocolRun> run = RunProtocol(
            pc.config, pc.padded_reference, truth, DeriveSeed(trial_seed, {2}), ro);
        if (!run.ok()) return run.status();
        accepted[task] = run->verdict() == Verdict::kAccept;
        seconds[task] = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        return absl::OkStatus();
      });
  if (!st.ok()) return st;

  std::vector<ResultRow> rows;
  for (size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    const ProtocolConfig& config = *configs[cell.config_index].config;
    ResultRow r;
    r.cell = static_cast<int64_t>(c);
    r.k = cell.k;
    r.padded_k = config.k;
    r.eps = cell.eps;
    r.constraint = ConstraintToString(cell.constraint);
    r.s = cell.s;
    r.n = config.players;
    r.n_spec = cell.players == 0 ? "auto" : absl::StrCat(cell.players);
    r.truth = cell.truth;
    r.trials = trials;
    for (int64_t t = 0; t < trials; ++t) {
      r.accepts += accepted[c * trials + t];
      r.wall_time += seconds[c * trials + t];
    }
    r.accept_rate = static_cast<double>(r.accepts) / trials;
    r.stderr_ = std::sqrt(r.accept_rate * (1 - r.accept_rate) / trials);
    rows.push_back(std::move(r));
  }
  return rows;
}

absl::StatusOr<ErrorEstimate> EstimateErrors(
    std::shared_ptr<const ProtocolConfig> config, int64_t trials, uint64_t seed,
    SimulationMode mode, int workers) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  const Distribution q = Distribution::Uniform(config->k);
  RunOptions ro;
  ro.mode = mode;
  ro.evaluate_all_groups = false;
  ro.keep_messages = false;
  std::vector<uint8_t> null_reject(trials, 0);
  std::vector<uint8_t> far_accept(trials, 0);
  absl::Status st = ParallelFor(trials, workers, [&](int64_t t) {
    const uint64_t ts = DeriveSeed(seed, {static_cast<uint64_t>(t)});
    absl::StatusOr<ProtocolRun> null_run = RunProtocol(config, q, q, DeriveSeed(ts, {1}), ro);
    if (!null_run.ok()) return null_run.status();
    Rng alt(DeriveSeed(ts, {2}));
    absl::StatusOr<Distribution> p =
        DrawAlternative(AlternativeKind::kPaninski, q, config->eps, nullptr, alt);
    if (!p.ok()) return p.status();
    absl::StatusOr<ProtocolRun> far_run = RunProtocol(config, q, *p, DeriveSeed(ts, {3}), ro);
    if (!far_run.ok()) return far_run.status();
    null_reject[t] = null_run->verdict() == Verdict::kReject;
    far_accept[t] = far_run->verdict() == Verdict::kAccept;
    return absl::OkStatus();
  });
  if (!st.ok()) return st;
  ErrorEstimate e;
  e.trials = trials;
  for (int64_t t = 0; t < trials; ++t) {
    e.null_rejects += null_reject[t];
    e.far_accepts += far_accept[t];
  }
  return e;
}

}  // namespace dgof
