// Copyright 2026 The mkp Authors
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

/**
 * @file cli.hpp
 * @brief Command-line front end: verify, enumerate, simulate, keydist, interactive.
 *
 * Exit codes: 0 success, 1 a verification failed, 2 invalid configuration.
 */

#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mkp/error.hpp"
#include "mkp/harness.hpp"
#include "mkp/report.hpp"

namespace mkp {

struct CliConfig {
  std::string subcommand;
  int dim = 3;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  std::string mode = "auto";
  std::string king_policy = "uniform";
  std::string prep = "fixed:0,0";
  std::string format = "text";
  bool emit_transcripts = false;
  std::optional<std::string> control_basis_file;
  unsigned workers = 0;
  std::size_t key_length = 128;
  std::string role = "outcome";
  bool summary_only = false;
};

/// Parsed and validated form of the string-typed flags.
struct ResolvedConfig {
  PrimeDim d;
  ProtocolMode mode;
  KingPolicy policy;
  std::optional<LabelPair> prep;
  ReportFormat format;
  std::optional<ControlBasis> control;
};

namespace detail {

inline std::int64_t parse_int(const std::string& s) {
  std::size_t used = 0;
  std::int64_t x = 0;
  try {
    x = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(Errc::InvalidConfig, "not an integer: '" + s + "'");
  return x;
}

inline ProtocolMode resolve_mode(const std::string& text, PrimeDim d) {
  if (text == "auto") return d.qubit_mode() ? ProtocolMode::Qubit : ProtocolMode::Extended;
  ProtocolMode m;
  try {
    m = parse_mode(text);
  } catch (const Error& e) {
    throw Error(Errc::InvalidConfig, e.what());
  }
  if ((m == ProtocolMode::Qubit) != d.qubit_mode()) {
    throw Error(Errc::InvalidConfig, "qubit mode requires --dim 2 and --dim 2 requires qubit mode");
  }
  return m;
}

inline KingPolicy resolve_policy(const std::string& text, PrimeDim d) {
  if (text == "uniform") return KingPolicy::uniform();
  if (text.rfind("fixed:", 0) == 0) {
    return KingPolicy::fixed(BasisLabel::parse(text.substr(6), d));
  }
  throw Error(Errc::InvalidConfig, "--king must be uniform or fixed:<label>");
}

inline std::optional<LabelPair> resolve_prep(const std::string& text, PrimeDim d) {
  if (text == "random") return std::nullopt;
  if (text.rfind("fixed:", 0) == 0) {
    const std::string body = text.substr(6);
    const auto comma = body.find(',');
    if (comma != std::string::npos) {
      const std::int64_t u = parse_int(body.substr(0, comma));
      const std::int64_t v = parse_int(body.substr(comma + 1));
      return LabelPair::checked(u, v, d);
    }
  }
  throw Error(Errc::InvalidConfig, "--prep must be random or fixed:<u>,<v>");
}

}  // namespace detail

inline ResolvedConfig resolve(const CliConfig& c) {
  const PrimeDim d = validate_dimension(c.dim);
  ResolvedConfig r{d, detail::resolve_mode(c.mode, d), detail::resolve_policy(c.king_policy, d),
                   detail::resolve_prep(c.prep, d), parse_format(c.format), std::nullopt};
  if (c.control_basis_file) {
    if (r.mode != ProtocolMode::Qubit) throw Error(Errc::InvalidConfig, "--control-basis applies to qubit mode");
    r.control = load_control_basis(*c.control_basis_file, d);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Invariant suite.

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

inline std::vector<CheckResult> run_invariant_suite(PrimeDim d) {
  std::vector<CheckResult> out;
  const auto labels = king_labels(d);

  {
    double worst = 0.0;
    for (const auto& b1 : labels) {
      for (const auto& b2 : labels) worst = std::max(worst, unbiasedness_error(d, b1, b2));
    }
    out.push_back({"mub-unbiasedness", worst < tolerance(d.value()), "max error " + std::to_string(worst)});
  }
  {
    bool ok = true;
    for (const auto& b : labels) ok = ok && verify_eigenrelation(d, b);
    out.push_back({"weyl-eigenrelation", ok, std::to_string(labels.size()) + " bases"});
  }
  {
    bool ok = true;
    for (int a = 0; a < d.value() && ok; ++a) {
      const Ket n = computational_state(d, Residue(a, d));
      const Ket zx = apply_weyl(WeylOp::make(d, 0, 1), apply_weyl(WeylOp::make(d, 1, 0), n));
      const Ket xz = apply_weyl(WeylOp::make(d, 1, 0), apply_weyl(WeylOp::make(d, 0, 1), n));
      const PhaseSum w = phase(d, 1);
      for (int k = 0; k < d.value(); ++k) ok = ok && zx[k] == w * xz[k];
    }
    out.push_back({"weyl-commutation", ok, "ZX = omega XZ"});
  }
  for (const Family f : {Family::Minus, Family::Plus}) {
    if (d.qubit_mode() && f == Family::Minus) continue;
    const auto states = entangled_basis(d, f);
    out.push_back({"gram-" + to_string(f), exact_gram_identity<2>(states), std::to_string(states.size()) + " states"});
  }

  const PowerRational expected_failure(d.value(), 1, 1);
  if (d.qubit_mode()) {
    bool sound = true, mass = true;
    for (int k = 0; k < 4; ++k) {
      const QubitSetup setup(LabelPair::from_index(k, d));
      for (const auto& b : labels) {
        const auto branches = enumerate_qubit_branches(setup, b);
        for (const auto& w : branches) {
          AliceRecord a{setup.prep(), w.r1, w.r2, w.control1, std::nullopt};
          const auto r = retrodict_qubit(setup, a);
          if (r.determined() && !(r.basis == b && r.outcome_m == w.m)) sound = false;
        }
        const auto fm = failure_mass(branches);
        mass = mass && fm.total == PowerRational(2, 1, 0) && fm.failure == expected_failure;
      }
    }
    out.push_back({"decoder-soundness", sound, "all preps, all bases"});
    out.push_back({"failure-mass", mass, "1/2 for every prep and basis"});
  } else if (d.value() <= kMaxEnumerationDim) {
    const BranchEnumerator en(d);
    bool sound = true, mass = true;
    for (int k = 0; k < d.value() * d.value(); ++k) {
      const LabelPair prep = LabelPair::from_index(k, d);
      for (const auto& b : labels) {
        PowerRational total, failure;
        en.for_each(prep, b, [&](const BranchWeight& w) {
          total += w.prob;
          if (w.r2 == w.r1) failure += w.prob;
          const auto r = retrodict_extended(d, AliceRecord{prep, w.r1, w.r2, std::nullopt, std::nullopt});
          if (r.determined() && !(r.basis == b && r.outcome_m == w.m)) sound = false;
        });
        mass = mass && total == PowerRational(d.value(), 1, 0) && failure == expected_failure;
      }
    }
    out.push_back({"decoder-soundness", sound, "exhaustive, all preps and bases"});
    out.push_back({"failure-mass", mass, "exactly 1/" + std::to_string(d.value())});
  } else {
    MonteCarloConfig mc{d};
    mc.trials = 20000;
    mc.prep = std::nullopt;
    const auto s = monte_carlo(mc).stats;
    out.push_back({"decoder-soundness", s.correct == s.determined, "sampled, 20000 rounds"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands.

namespace detail {

inline int cmd_verify(const CliConfig& c, std::ostream& out) {
  const ResolvedConfig r = resolve(c);
  const auto checks = run_invariant_suite(r.d);
  bool ok = true;
  for (const auto& ch : checks) ok = ok && ch.passed;
  if (r.format == ReportFormat::Json) {
    Json arr = Json::array();
    for (const auto& ch : checks) arr.push_back(Json{{"check", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    out << Json{{"dim", r.d.value()}, {"checks", std::move(arr)}, {"passed", ok}, {"version", kVersion}}.dump(2)
        << "\n";
  } else {
    for (const auto& ch : checks) out << (ch.passed ? "PASS " : "FAIL ") << ch.name << " (" << ch.detail << ")\n";
  }
  return ok ? 0 : 1;
}

inline int cmd_enumerate(const CliConfig& c, std::ostream& out) {
  const ResolvedConfig r = resolve(c);
  const LabelPair prep = r.prep.value_or(LabelPair{0, 0});
  std::vector<BasisLabel> bases = king_labels(r.d);
  if (r.policy.fixed_basis()) bases = {*r.policy.fixed_basis()};

  std::vector<BranchWeight> all;
  std::vector<std::pair<BasisLabel, FailureMass>> masses;
  std::optional<ProtocolSetup> setup;
  std::optional<BranchEnumerator> en;
  std::optional<QubitSetup> qubit;
  if (r.mode == ProtocolMode::Qubit) {
    qubit.emplace(prep, r.control);
  } else if (r.mode == ProtocolMode::Alternative) {
    if (r.d.value() > kMaxEnumerationDim) throw Error(Errc::DimensionTooLarge, "exact enumeration supports d <= 7");
    setup.emplace(r.d);
  } else {
    en.emplace(r.d);
  }
  for (const auto& b : bases) {
    std::vector<BranchWeight> branches = r.mode == ProtocolMode::Qubit         ? enumerate_qubit_branches(*qubit, b)
                                         : r.mode == ProtocolMode::Alternative ? enumerate_alternative_branches(*setup, prep, b)
                                                                               : en->enumerate(prep, b);
    FailureMass fm = failure_mass(branches);
    if (r.mode == ProtocolMode::Alternative) {
      fm.failure = PowerRational();
      for (const auto& w : branches) {
        if (!w.final_outcome) fm.failure += w.prob;
      }
    }
    masses.emplace_back(b, fm);
    all.insert(all.end(), branches.begin(), branches.end());
  }

  if (r.format == ReportFormat::Json) {
    Json per = Json::array();
    for (const auto& [b, fm] : masses) {
      per.push_back(Json{{"b", b.to_string()}, {"total", to_json(fm.total)}, {"failure", to_json(fm.failure)}});
    }
    Json doc{{"dim", r.d.value()}, {"mode", to_string(r.mode)}, {"prep", to_json(prep)}, {"failure", std::move(per)}};
    if (!c.summary_only) doc["branches"] = to_json(all);
    doc["version"] = kVersion;
    out << doc.dump(2) << "\n";
  } else {
    if (!c.summary_only) out << to_text(all);
    for (const auto& [b, fm] : masses) {
      out << "basis " << b.to_string() << ": total " << format_rational(fm.total) << ", failure "
          << format_rational(fm.failure) << " = " << fm.failure.to_double() << "\n";
    }
  }
  return 0;
}

inline int cmd_simulate(const CliConfig& c, std::ostream& out) {
  const ResolvedConfig r = resolve(c);
  MonteCarloConfig mc{r.d, r.mode, c.trials, r.policy, r.prep, c.seed};
  mc.workers = c.workers;
  mc.qubit_control = r.control;
  mc.keep_transcripts = c.emit_transcripts;
  if (c.trials < 1) throw Error(Errc::InvalidConfig, "--trials must be >= 1");
  const auto result = monte_carlo(mc);
  if (r.format == ReportFormat::Json) {
    Json doc = to_json(result.stats);
    if (c.emit_transcripts) {
      Json ts = Json::array();
      for (const auto& t : result.transcripts) ts.push_back(to_json(t));
      doc["transcripts"] = std::move(ts);
    }
    out << doc.dump(2) << "\n";
  } else {
    out << to_text(result.stats);
    for (const auto& t : result.transcripts) out << to_json(t).dump() << "\n";
  }
  return result.stats.correct == result.stats.determined ? 0 : 1;
}

inline int cmd_keydist(const CliConfig& c, std::ostream& out) {
  const ResolvedConfig r = resolve(c);
  if (c.role != "outcome" && c.role != "basis") throw Error(Errc::InvalidConfig, "--role must be outcome or basis");
  if (r.mode == ProtocolMode::Qubit && r.control) throw Error(Errc::InvalidConfig, "keydist uses the default control basis");
  KeyConfig kc{r.d, c.key_length, c.role == "outcome" ? KeyRole::OutcomeKey : KeyRole::BasisKey, c.seed, r.mode,
               r.policy, r.prep};
  const KeyReport report = key_distribution_session(kc);
  out << emit_report(report, r.format);
  return report.mismatches == 0 && report.alice_key.size() == report.target ? 0 : 1;
}

inline int cmd_interactive(const CliConfig& c, std::ostream& out, std::istream& in) {
  const ResolvedConfig r = resolve(c);
  const PrimeDim d = r.d;
  std::optional<QubitSetup> qubit;
  if (r.mode == ProtocolMode::Qubit) qubit.emplace(r.prep.value_or(LabelPair{}), r.control);
  const ProtocolSetup setup(d);

  out << "You are the King.  Alice prepared her pair; choose a basis each round.\n"
      << "Labels: ddot0 or 0.." << d.value() - 1 << ".  Enter q to quit.\n";
  std::uint64_t round = 0, failures = 0;
  for (;;) {
    out << "round " << round << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line)) break;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    if (line == "q" || line == "quit") break;

    BasisLabel b = BasisLabel::computational();
    try {
      b = BasisLabel::parse(line, d);
    } catch (const Error&) {
      out << "not a basis label: " << line << "\n";
      continue;
    }
    RngStream rng(c.seed, round);
    LabelPair prep = r.prep.value_or(LabelPair{});
    if (!r.prep) {
      prep.u = static_cast<int>(rng.below(d.value()));
      prep.v = static_cast<int>(rng.below(d.value()));
    }
    const KingPolicy policy = KingPolicy::fixed(b);
    const Transcript t = r.mode == ProtocolMode::Qubit        ? run_qubit_round(*qubit, policy, Selectivity::Selective, rng)
                         : r.mode == ProtocolMode::Alternative ? run_alternative_round(setup, prep, policy, rng)
                                                               : run_extended_round(setup, prep, policy, Selectivity::Selective, rng);
    ++round;
    out << "  your outcome: m = " << (t.mode == ProtocolMode::Alternative ? *t.sealed.m2 : t.sealed.m) << "\n";
    if (t.decoded.determined()) {
      out << "  Alice says: basis " << t.decoded.basis->to_string() << ", outcome " << *t.decoded.outcome_m
          << (t.verified ? "  [correct]" : "  [WRONG]") << "\n";
    } else {
      ++failures;
      out << "  Alice cannot tell this round (undetermined)\n";
    }
  }
  out << "\n" << round << " rounds, " << failures << " undetermined\n";
  return 0;
}

}  // namespace detail

/// Entry point shared by the executable and the tests.  args excludes argv[0].
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CliConfig c;
  CLI::App app{"Retrodiction protocol simulator", "mkp"};
  app.require_subcommand(1);

  const auto common = [&c](CLI::App* s) {
    s->add_option("--dim,-d", c.dim, "prime dimension");
    s->add_option("--mode", c.mode, "auto | extended | alternative | qubit");
    s->add_option("--king", c.king_policy, "uniform | fixed:<label>");
    s->add_option("--prep", c.prep, "random | fixed:<u>,<v>");
    s->add_option("--format", c.format, "json | text");
    s->add_option("--seed", c.seed, "master seed");
    s->add_option("--control-basis", c.control_basis_file, "qubit round-1 control basis file");
  };
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  common(verify);
  auto* enumerate = app.add_subcommand("enumerate", "exact branch probabilities");
  common(enumerate);
  enumerate->add_flag("--summary-only", c.summary_only, "print failure masses only");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo statistics");
  common(simulate);
  simulate->add_option("--trials,-n", c.trials, "number of rounds");
  simulate->add_option("--workers", c.workers, "worker threads (0: all cores)");
  simulate->add_flag("--transcripts", c.emit_transcripts, "include every round's transcript");
  auto* keydist = app.add_subcommand("keydist", "key distribution session");
  common(keydist);
  keydist->add_option("--key-length", c.key_length, "symbols to agree on");
  keydist->add_option("--role", c.role, "outcome | basis: which record forms the key");
  auto* interactive = app.add_subcommand("interactive", "play the King against Alice");
  common(interactive);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (verify->parsed()) return detail::cmd_verify(c, out);
    if (enumerate->parsed()) return detail::cmd_enumerate(c, out);
    if (simulate->parsed()) return detail::cmd_simulate(c, out);
    if (keydist->parsed()) return detail::cmd_keydist(c, out);
    return detail::cmd_interactive(c, out, in);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mkp
