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

// dgof: command-line front end.
//
//   dgof certify codebook --n 64 --seed 1
//   dgof certify expander --s 10 --eta 0.5 --gamma 0.3
//   dgof test --uniform --k 64 --eps 0.3 --comm-bits 3 --coins 4 --seed 9
//   dgof experiment spec.txt
//   dgof bounds --comm-bits 2 --k 64 --eps 0.3 --coins 0..6
//
// Exit codes: 0 success, 1 failed certification or invalid configuration,
// 2 bad flags or malformed input files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dgof/amplifier.h"
#include "dgof/bounds.h"
#include "dgof/codebook.h"
#include "dgof/constants.h"
#include "dgof/distribution.h"
#include "dgof/experiment.h"
#include "dgof/protocol.h"
#include "dgof/text.h"

namespace dgof {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

// Above this many players the test command simulates in aggregate.
constexpr int64_t kAutoPlayerLimit = 20000000;

int Fail(const absl::Status& st) {
  std::fprintf(stderr, "error: %s\n", st.ToString().c_str());
  const bool usage = st.code() == absl::StatusCode::kInvalidArgument ||
                     st.code() == absl::StatusCode::kNotFound ||
                     st.code() == absl::StatusCode::kOutOfRange;
  return usage ? kExitUsage : kExitFailed;
}

int Usage(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return kExitUsage;
}

bool WriteText(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

struct ConstraintFlags {
  std::optional<int> comm_bits;
  std::optional<double> ldp_rho;

  void Add(CLI::App* app) {
    auto* c = app->add_option("--comm-bits", comm_bits, "message length l in bits");
    auto* l = app->add_option("--ldp-rho", ldp_rho, "local privacy level rho");
    c->excludes(l);
  }
  absl::StatusOr<ConstraintSpec> Get() const {
    ConstraintSpec spec;
    if (comm_bits) {
      spec = CommConstraint{*comm_bits};
    } else if (ldp_rho) {
      spec = LdpConstraint{*ldp_rho};
    } else {
      return absl::InvalidArgumentError("one of --comm-bits or --ldp-rho is required");
    }
    if (absl::Status st = ValidateConstraint(spec); !st.ok()) return st;
    return spec;
  }
};

// "0..6" or "0,2,4".
absl::StatusOr<std::vector<int>> ParseCoinList(const std::string& text) {
  std::vector<int> out;
  if (const size_t dots = text.find(".."); dots != std::string::npos) {
    int lo;
    int hi;
    if (!ParseInt(text.substr(0, dots), &lo) || !ParseInt(text.substr(dots + 2), &hi) ||
        lo < 0 || hi < lo || hi > 62) {
      return absl::InvalidArgumentError(absl::StrCat("bad coin range '", text, "'"));
    }
    for (int s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  for (std::string_view item : SplitString(text, ',', /*skip_empty=*/true)) {
    int s;
    if (!ParseInt(TrimWhitespace(item), &s) || s < 0 || s > 62) {
      return absl::InvalidArgumentError(absl::StrCat("bad coin list '", text, "'"));
    }
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------- certify

struct CertifyCodebookArgs {
  int n = 0;
  uint64_t seed = 0;
  int c0 = kC0;
  int retries = 0;
};

int CertifyCodebook(const CertifyCodebookArgs& a) {
  CodebookOptions opts;
  opts.max_retries = a.retries;
  absl::StatusOr<Codebook> cb = BuildCodebook(a.n, a.c0, a.seed, opts);
  if (!cb.ok()) return Fail(cb.status());
  std::printf("codebook n=%d m=%lld c0=%d alpha=%.6f delta0=%.3f\n%s\n", cb->n(),
              static_cast<long long>(cb->m()), cb->c0(), cb->alpha(), cb->delta0(),
              cb->cert().ToString().c_str());
  return cb->cert().passed ? kExitOk : kExitFailed;
}

struct CertifyExpanderArgs {
  int s = 0;
  double eta = kDeskEta;
  double gamma = kDeskGamma;
  uint64_t seed = 0;
  int retries = kMaxCertificationRetries;
  std::string dump;
};

int CertifyExpander(const CertifyExpanderArgs& a) {
  if (a.s < 1 || a.s > 24) return Usage("--s must be in [1, 24]");
  if (!(a.eta > 0 && a.eta < 1) || !(a.gamma > 0 && a.gamma < 1)) {
    return Usage("--eta and --gamma must lie in (0, 1)");
  }
  const double threshold = LambdaThreshold(a.eta, a.gamma);
  absl::StatusOr<AmplifierMaps> amp = BuildAmplifier(a.s, a.eta, a.gamma, a.seed, a.retries);
  if (!amp.ok()) {
    std::printf("expander s=%d d=%d threshold=%.6f certified=0\n", a.s,
                RequiredDegree(a.eta, a.gamma), threshold);
    return Fail(amp.status());
  }
  std::printf("expander s=%d vertices=%llu d=%d lambda=%.6f threshold=%.6f certified=1\n",
              a.s, static_cast<unsigned long long>(amp->n()), amp->d(), amp->lambda(),
              threshold);
  if (!a.dump.empty() && !WriteText(a.dump, amp->Dump())) {
    return Fail(absl::UnavailableError(absl::StrCat("cannot write ", a.dump)));
  }
  return kExitOk;
}

// ------------------------------------------------------------------- test

struct TestArgs {
  bool uniform = false;
  std::string reference;
  int64_t k = 0;
  double eps = 0.0;
  ConstraintFlags constraint;
  int coins = 0;
  uint64_t seed = 0;
  std::string true_dist = "reference";
  int64_t players = 0;
  double delta = 1.0 / 12.0;
  std::string mode = "auto";
  std::string profile = "desk";
  std::string seed_mode = "expander";
  uint64_t codebook_seed = 0;
  uint64_t amplifier_seed = 0;
  std::string transcript = "dgof_transcript.txt";
  std::string players_csv;
};

int RunTest(const TestArgs& a) {
  absl::StatusOr<ConstraintSpec> constraint = a.constraint.Get();
  if (!constraint.ok()) return Fail(constraint.status());
  if (a.uniform == !a.reference.empty()) {
    return Usage("give exactly one of --uniform or --reference");
  }
  std::optional<Distribution> q;
  if (a.uniform) {
    if (a.k < 2) return Usage("--uniform needs --k >= 2");
    q = Distribution::Uniform(a.k);
  } else {
    absl::StatusOr<Distribution> loaded = LoadDistributionFile(a.reference);
    if (!loaded.ok()) return Usage(std::string(loaded.status().message()));
    if (a.k != 0 && a.k != loaded->k()) return Usage("--k disagrees with the reference file");
    q = *loaded;
  }
  const int64_t k = q->k();
  if (!(a.eps > 0 && a.eps <= 1)) return Usage("--eps must be in (0, 1]");

  // True distribution on the original domain.
  std::optional<Distribution> p;
  Rng alt_rng(DeriveSeed(a.seed, {0xa17ULL}));
  if (a.true_dist == "reference") {
    p = *q;
  } else if (a.true_dist == "uniform") {
    p = Distribution::Uniform(k);
  } else if (a.true_dist.rfind("paninski:", 0) == 0 || a.true_dist.rfind("random-far:", 0) == 0) {
    const bool paninski = a.true_dist[0] == 'p';
    double tv;
    if (!ParseDouble(a.true_dist.substr(a.true_dist.find(':') + 1), &tv) || tv <= 0) {
      return Usage(absl::StrCat("bad distance in --true-dist ", a.true_dist));
    }
    absl::StatusOr<Distribution> d = DrawAlternative(
        paninski ? AlternativeKind::kPaninski : AlternativeKind::kRandomFar, *q, tv, nullptr,
        alt_rng);
    if (!d.ok()) return Usage(std::string(d.status().message()));
    p = *d;
  } else if (a.true_dist.rfind("file:", 0) == 0) {
    absl::StatusOr<Distribution> d = LoadDistributionFile(a.true_dist.substr(5));
    if (!d.ok()) return Usage(std::string(d.status().message()));
    if (d->k() != k) return Usage("true distribution file has the wrong domain size");
    p = *d;
  } else {
    return Usage(absl::StrCat("unknown --true-dist ", a.true_dist));
  }

  const int64_t pad_target = PowerOfTwoPadTarget(k);
  const int64_t padded = PaddedSize(k, pad_target);
  const double eps = a.eps * static_cast<double>(k) / padded;
  if (padded != k) {
    std::printf("padding domain %lld -> %lld, testing at eps=%.6g\n",
                static_cast<long long>(k), static_cast<long long>(padded), eps);
  }
  ProtocolOptions opts;
  opts.delta = a.delta;
  opts.players = a.players;
  opts.codebook_seed = a.codebook_seed;
  opts.amplifier_seed = a.amplifier_seed;
  if (a.profile == "paper") opts.profile = AmplifierProfile::kPaperFaithful;
  else if (a.profile != "desk") return Usage("--profile must be desk or paper");
  if (a.seed_mode == "fresh") opts.seed_mode = SeedMode::kFreshRandomness;
  else if (a.seed_mode != "expander") return Usage("--seed-mode must be expander or fresh");

  absl::StatusOr<ProtocolConfig> config = MakeProtocolConfig(padded, eps, *constraint, a.coins, opts);
  if (!config.ok()) return Fail(config.status());
  auto shared = std::make_shared<const ProtocolConfig>(*std::move(config));

  RunOptions ro;
  if (a.mode == "player") {
    ro.mode = SimulationMode::kPlayer;
  } else if (a.mode == "aggregate") {
    ro.mode = SimulationMode::kAggregate;
  } else if (a.mode == "auto") {
    ro.mode = shared->players <= kAutoPlayerLimit ? SimulationMode::kPlayer
                                                  : SimulationMode::kAggregate;
  } else {
    return Usage("--mode must be auto, player or aggregate");
  }
  ro.keep_messages = !a.players_csv.empty();

  absl::StatusOr<ProtocolRun> run =
      RunProtocol(shared, *PadDomain(*q, pad_target), *PadDomain(*p, pad_target), a.seed, ro);
  if (!run.ok()) return Fail(run.status());
  if (!WriteText(a.transcript, run->transcript.Serialize())) {
    return Fail(absl::UnavailableError(absl::StrCat("cannot write ", a.transcript)));
  }
  if (!a.players_csv.empty() &&
      !WriteText(a.players_csv, run->transcript.PlayersCsv(*shared))) {
    return Fail(absl::UnavailableError(absl::StrCat("cannot write ", a.players_csv)));
  }
  std::printf("%s\n", shared->Summary().c_str());
  std::printf("path=%s mode=%s public_bits=%d\n",
              shared->bypass ? "private-coin" : "domain-compression",
              std::string(SimulationModeName(ro.mode)).c_str(),
              shared->PublicBitsConsumed());
  std::printf("verdict=%s\ntranscript=%s\n", std::string(VerdictName(run->verdict())).c_str(),
              a.transcript.c_str());
  return kExitOk;
}

// ------------------------------------------------------------- experiment

int RunExperimentCommand(const std::string& spec_path, const std::string& output) {
  absl::StatusOr<ExperimentSpec> spec = LoadExperimentSpec(spec_path);
  if (!spec.ok()) return Usage(std::string(spec.status().message()));
  if (!output.empty()) spec->output = output;
  for (const std::string& path : {spec->reference_path, spec->alternative_path}) {
    if (path.empty()) continue;
    if (absl::Status st = LoadDistributionFile(path).status(); !st.ok()) {
      return Usage(std::string(st.message()));
    }
  }
  absl::StatusOr<std::vector<ResultRow>> rows = RunExperiment(*spec, WorkersFromEnv());
  if (!rows.ok()) {
    std::fprintf(stderr, "error: %s\n", rows.status().ToString().c_str());
    return kExitFailed;
  }
  if (!WriteText(spec->output, ResultsCsv(*rows))) {
    return Fail(absl::UnavailableError(absl::StrCat("cannot write ", spec->output)));
  }
  std::FILE* table = spec->output == "-" ? stderr : stdout;
  std::fputs(SummaryTable(*rows).c_str(), table);
  return kExitOk;
}

// ----------------------------------------------------------------- bounds

struct BoundsArgs {
  ConstraintFlags constraint;
  int64_t k = 0;
  double eps = 0.3;
  std::string coins = "0";
  bool audit_norms = false;
  int64_t trials = 1000;
  bool fluctuation = false;
  int n = 1;
  bool exact = false;
  int64_t samples = 100000;
  std::string channel = "parity";
  uint64_t seed = 0;
  std::string output = "-";
};

absl::StatusOr<Channel> NamedChannel(const std::string& name, int64_t k) {
  if (name == "parity" || name == "identity") {
    const int64_t outputs = name == "parity" ? 2 : k;
    std::vector<double> rows(k * outputs, 0.0);
    for (int64_t x = 0; x < k; ++x) rows[x * outputs + (name == "parity" ? x % 2 : x)] = 1.0;
    return Channel::Create(k, outputs, std::move(rows));
  }
  if (name.rfind("file:", 0) == 0) {
    // One row per input symbol, whitespace separated probabilities.
    std::ifstream in(name.substr(5));
    if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", name.substr(5)));
    std::vector<double> rows;
    int64_t outputs = -1;
    std::string line;
    int64_t inputs = 0;
    while (std::getline(in, line)) {
      if (TrimWhitespace(line).empty() || line[0] == '#') continue;
      int64_t count = 0;
      for (std::string_view tok : SplitString(line, ' ', /*skip_empty=*/true)) {
        double v;
        if (!ParseDouble(TrimWhitespace(tok), &v)) {
          return absl::InvalidArgumentError(absl::StrCat("bad channel entry '", std::string(tok), "'"));
        }
        rows.push_back(v);
        ++count;
      }
      if (outputs >= 0 && count != outputs) {
        return absl::InvalidArgumentError("channel rows have different lengths");
      }
      outputs = count;
      ++inputs;
    }
    if (inputs != k) return absl::InvalidArgumentError("channel file row count differs from --k");
    return Channel::Create(k, outputs, std::move(rows));
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown channel ", name));
}

int RunBounds(const BoundsArgs& a) {
  if (a.k < 2) return Usage("--k must be >= 2");
  if (a.fluctuation) {
    absl::StatusOr<Channel> w = NamedChannel(a.channel, a.k);
    if (!w.ok()) return Fail(w.status());
    FluctuationConfig cfg;
    cfg.channels.assign(a.n, *w);
    cfg.eps = a.eps;
    cfg.mode = a.exact ? FluctuationMode::kExact : FluctuationMode::kMonteCarlo;
    cfg.samples = a.samples;
    cfg.seed = a.seed;
    absl::StatusOr<FluctuationResult> r = Chi2Fluctuation(cfg);
    if (!r.ok()) return Fail(r.status());
    std::printf("fluctuation channel=%s k=%lld n=%d eps=%.6g mode=%s value=%.17g stderr=%.6g\n",
                a.channel.c_str(), static_cast<long long>(a.k), a.n, a.eps,
                a.exact ? "exact" : "monte-carlo", r->value, r->standard_error);
    return kExitOk;
  }
  absl::StatusOr<ConstraintSpec> constraint = a.constraint.Get();
  if (!constraint.ok()) return Fail(constraint.status());
  if (a.audit_norms) {
    Rng rng(a.seed);
    absl::StatusOr<NormAuditReport> r = NormBoundAudit(*constraint, a.k, a.trials, rng);
    if (!r.ok()) return Fail(r.status());
    std::printf("%s\n", r->ToString().c_str());
    return r->within_bound ? kExitOk : kExitFailed;
  }
  absl::StatusOr<std::vector<int>> coins = ParseCoinList(a.coins);
  if (!coins.ok()) return Fail(coins.status());
  if (!(a.eps > 0 && a.eps <= 1)) return Usage("--eps must be in (0, 1]");
  std::vector<BoundsRow> rows;
  for (int s : *coins) {
    BoundsRow row;
    row.constraint = ConstraintToString(*constraint);
    row.k = a.k;
    row.eps = a.eps;
    row.l_or_rho = std::holds_alternative<CommConstraint>(*constraint)
                       ? std::get<CommConstraint>(*constraint).bits
                       : std::get<LdpConstraint>(*constraint).rho;
    row.s = s;
    row.lb_formula = SampleLowerBound(*constraint, a.k, a.eps, s);
    rows.push_back(row);
  }
  if (!WriteText(a.output, BoundsCsv(rows))) {
    return Fail(absl::UnavailableError(absl::StrCat("cannot write ", a.output)));
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Identity testing under communication, privacy and public-coin budgets"};
  app.require_subcommand(1);

  CLI::App* certify = app.add_subcommand("certify", "certify a codebook or an expander");
  certify->require_subcommand(1);
  CertifyCodebookArgs cb;
  CLI::App* codebook = certify->add_subcommand("codebook", "draw and certify a codebook");
  codebook->add_option("--n", cb.n, "vector length (power of two)")->required();
  codebook->add_option("--seed", cb.seed, "draw seed");
  codebook->add_option("--c0", cb.c0, "codebook has 2^c0 * n vectors");
  codebook->add_option("--retries", cb.retries, "redraws allowed after a failed check");
  CertifyExpanderArgs ex;
  CLI::App* expander = certify->add_subcommand("expander", "build and certify an expander");
  expander->add_option("--s", ex.s, "vertex count is 2^s")->required();
  expander->add_option("--eta", ex.eta, "tolerated bad-seed fraction");
  expander->add_option("--gamma", ex.gamma, "allowed failure fraction");
  expander->add_option("--seed", ex.seed, "graph seed");
  expander->add_option("--retries", ex.retries, "redraws allowed");
  expander->add_option("--dump", ex.dump, "write the neighbor table here");

  TestArgs ta;
  CLI::App* test = app.add_subcommand("test", "run the protocol once");
  test->add_flag("--uniform", ta.uniform, "uniform reference on --k symbols");
  test->add_option("--reference", ta.reference, "reference distribution file");
  test->add_option("--k", ta.k, "domain size");
  test->add_option("--eps", ta.eps, "distance parameter")->required();
  ta.constraint.Add(test);
  test->add_option("--coins", ta.coins, "public coins s");
  test->add_option("--seed", ta.seed, "master seed");
  test->add_option("--true-dist", ta.true_dist,
                   "reference | uniform | paninski:<tv> | random-far:<tv> | file:<path>");
  test->add_option("--players", ta.players, "player count (default: calibrated)");
  test->add_option("--delta", ta.delta, "failure probability");
  test->add_option("--mode", ta.mode, "auto | player | aggregate");
  test->add_option("--profile", ta.profile, "desk | paper");
  test->add_option("--seed-mode", ta.seed_mode, "expander | fresh");
  test->add_option("--codebook-seed", ta.codebook_seed, "codebook draw seed");
  test->add_option("--amplifier-seed", ta.amplifier_seed, "expander seed");
  test->add_option("--transcript", ta.transcript, "transcript output path");
  test->add_option("--players-csv", ta.players_csv, "per-player message dump");

  std::string spec_path;
  std::string exp_output;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "run a Monte Carlo grid from a key = value spec file");
  experiment->add_option("spec", spec_path, "spec file")->required();
  experiment->add_option("--output", exp_output, "override the spec's output path");
  experiment->footer(absl::StrCat(
      "CSV columns: ", kResultsCsvHeader,
      "\nWorker threads come from DGOF_WORKERS (default 1); output does not "
      "depend on it.\nSpec keys: k eps constraint coins players truth trials "
      "alternative reference delta master_seed simulation profile seed_mode output"));

  BoundsArgs ba;
  CLI::App* bounds = app.add_subcommand("bounds", "lower-bound formulas and audits");
  ba.constraint.Add(bounds);
  bounds->add_option("--k", ba.k, "domain size")->required();
  bounds->add_option("--eps", ba.eps, "distance parameter");
  bounds->add_option("--coins", ba.coins, "coin counts, a..b or a,b,c");
  bounds->add_flag("--audit-norms", ba.audit_norms, "nuclear-norm audit");
  bounds->add_option("--trials", ba.trials, "random channels in the audit");
  bounds->add_flag("--fluctuation", ba.fluctuation, "decoupled chi-square fluctuation");
  bounds->add_option("--n", ba.n, "channels in the fluctuation");
  bounds->add_flag("--exact", ba.exact, "enumerate instead of sampling");
  bounds->add_option("--samples", ba.samples, "Monte Carlo samples");
  bounds->add_option("--channel", ba.channel, "parity | identity | file:<path>");
  bounds->add_option("--seed", ba.seed, "random seed");
  bounds->add_option("--output", ba.output, "CSV path, - for stdout");
  bounds->footer(
      "CSV columns: constraint,k,eps,l_or_rho,s,lb_formula,empirical_n_star");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::fputs("\n", stderr);
    std::fputs(app.help().c_str(), stderr);
    return kExitUsage;
  }

  if (codebook->parsed()) return CertifyCodebook(cb);
  if (expander->parsed()) return CertifyExpander(ex);
  if (test->parsed()) return RunTest(ta);
  if (experiment->parsed()) return RunExperimentCommand(spec_path, exp_output);
  if (bounds->parsed()) return RunBounds(ba);
  return kExitUsage;
}

}  // namespace
}  // namespace dgof

int main(int argc, char** argv) { return dgof::Main(argc, argv); }
