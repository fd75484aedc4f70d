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

// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>

#include "mkp/harness.hpp"
#include "mkp/report.hpp"

namespace {

using namespace mkp;
using Clock = std::chrono::steady_clock;

PrimeDim D(int n) { return validate_dimension(n); }
Residue R(int x, PrimeDim d) { return Residue(x, d); }

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome mub_pairs() {
  Outcome r;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int n : {2, 3, 5, 7, 11, 13}) {
    const auto labels = king_labels(D(n));
    for (std::size_t i = 0; i < labels.size(); ++i)
      for (std::size_t j = i + 1; j < labels.size(); ++j) worst = std::max(worst, unbiasedness_error(D(n), labels[i], labels[j]));
  }
  const double t = seconds_since(t0);
  if (worst >= 1e-9) r.fail("max overlap error " + std::to_string(worst));
  if (t >= 5.0) r.fail("took " + std::to_string(t) + " s");
  if (r.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "max error %.3g, %.3f s", worst, t);
    r.detail = buf;
  }
  return r;
}

Outcome eigenrelation() {
  Outcome r;
  for (int n : {3, 5, 7, 11, 13}) {
    for (const auto& b : king_labels(D(n))) {
      if (!verify_eigenrelation(D(n), b)) r.fail("d=" + std::to_string(n) + " b=" + b.to_string());
    }
  }
  if (r.ok) r.detail = "all b, m for d = 3..13";
  return r;
}

Outcome gram() {
  Outcome r;
  for (int n : {3, 5, 7}) {
    for (const Family f : {Family::Minus, Family::Plus}) {
      if (!exact_gram_identity<2>(entangled_basis(D(n), f))) r.fail("d=" + std::to_string(n) + " " + to_string(f));
    }
  }
  if (!exact_gram_identity<2>(entangled_basis(D(2), Family::Plus))) r.fail("d=2 plus");
  if (r.ok) r.detail = "exact for d = 3, 5, 7 and the qubit plus family";
  return r;
}

Outcome soundness() {
  Outcome r;
  const auto t0 = Clock::now();
  std::uint64_t chains = 0;
  for (int n : {3, 5, 7}) {
    const PrimeDim d = D(n);
    const BranchEnumerator en(d);
    for (int k = 0; k < n * n; ++k) {
      const LabelPair prep = LabelPair::from_index(k, d);
      for (const auto& b : king_labels(d)) {
        en.for_each(prep, b, [&](const BranchWeight& w) {
          ++chains;
          const DecodeResult got = retrodict_extended(d, AliceRecord{prep, w.r1, w.r2, std::nullopt, std::nullopt});
          if (got.determined() && (*got.basis != b || *got.outcome_m != w.m)) {
            r.fail("wrong decode at d=" + std::to_string(n) + " b=" + b.to_string());
          }
        });
      }
    }
  }
  const double t = seconds_since(t0);
  if (t >= 60.0) r.fail("took " + std::to_string(t) + " s");
  if (r.ok) r.detail = std::to_string(chains) + " chains, " + std::to_string(t) + " s";
  return r;
}

Outcome failure_probability() {
  Outcome r;
  for (int n : {3, 5, 7}) {
    const PrimeDim d = D(n);
    const BranchEnumerator en(d);
    const PowerRational expected(n, 1, 1);
    for (int k = 0; k < n * n; ++k) {
      for (const auto& b : king_labels(d)) {
        const FailureMass fm = failure_mass(en.enumerate(LabelPair::from_index(k, d), b));
        if (!(fm.failure == expected) || !(fm.total == PowerRational(n, 1, 0))) {
          r.fail("d=" + std::to_string(n) + " b=" + b.to_string() + " got " + format_rational(fm.failure));
        }
      }
    }
  }
  for (int k = 0; k < 4; ++k) {
    const QubitSetup setup(LabelPair::from_index(k, D(2)));
    for (const auto& b : king_labels(D(2))) {
      const FailureMass fm = failure_mass(enumerate_qubit_branches(setup, b));
      if (!(fm.failure == PowerRational(2, 1, 1))) r.fail("qubit b=" + b.to_string() + " got " + format_rational(fm.failure));
    }
  }
  if (r.ok) r.detail = "1/d for d = 3, 5, 7 and 1/2 for qubits";
  return r;
}

Outcome monte_carlo_consistency() {
  Outcome r;
  const auto t0 = Clock::now();
  std::ostringstream detail;
  for (int n : {3, 5}) {
    MonteCarloConfig cfg{D(n), ProtocolMode::Extended, 100000};
    cfg.prep = std::nullopt;
    cfg.master_seed = 20260000u + n;
    const auto first = monte_carlo(cfg);
    const auto second = monte_carlo(cfg);
    const double p = 1.0 / n;
    const double band = 3.0 * std::sqrt(p * (1 - p) / 100000.0);
    const auto& s = first.stats;
    if (std::abs(s.failure_rate - p) > band) r.fail("d=" + std::to_string(n) + " rate " + std::to_string(s.failure_rate));
    if (s.correct != s.determined || second.stats.correct != second.stats.determined) r.fail("incorrect decode");
    if (emit_report(s, ReportFormat::Json) != emit_report(second.stats, ReportFormat::Json)) r.fail("reports differ");
    detail << "d=" << n << " rate " << s.failure_rate << "; ";
  }
  const double t = seconds_since(t0);
  if (t >= 30.0) r.fail("took " + std::to_string(t) + " s");
  if (r.ok) r.detail = detail.str() + std::to_string(t) + " s";
  return r;
}

// Closed forms against the compatibility table built from amplitudes alone.
Outcome closed_forms() {
  Outcome r;
  std::ostringstream detail;
  for (int n : {3, 5, 7, 11}) {
    const auto t0 = Clock::now();
    const PrimeDim d = D(n);
    const KingBases kings = KingBases::all(d);
    const ControlBasis minus = minus_basis(d);
    const SecondRoundOracle second(kings, minus, minus);
    std::vector<LabelPair> preps;
    if (n <= 7) {
      for (int k = 0; k < n * n; ++k) preps.push_back(LabelPair::from_index(k, d));
    } else {
      preps = {{0, 0}, {1, 0}, {0, 1}, {3, 7}, {10, 10}};
    }
    std::size_t entries = 0;
    for (const LabelPair p : preps) {
      const auto table = build_compatibility_table(entangled_plus(d, R(p.u, d), R(p.v, d)), kings, minus, second);
      for (const auto& [key, entry] : table.entries()) {
        ++entries;
        const LabelPair r1 = LabelPair::from_index(key.first, d), r2 = LabelPair::from_index(key.second, d);
        const DecodeResult got = decode_b(d, R(r1.u, d), R(r1.v, d), R(r2.u, d), R(r2.v, d));
        const auto bases = table.bases(key.first, key.second);
        if (key.first == key.second) {
          if (got.determined() || bases.size() < 2) r.fail("repeat entry at d=" + std::to_string(n));
          continue;
        }
        if (!got.determined() || bases.size() != 1 || *got.basis != *bases.begin() || entry.size() != 1) {
          r.fail("decode_b disagrees at d=" + std::to_string(n));
          continue;
        }
        const Residue m = decode_m(d, *got.basis, R(p.u, d), R(p.v, d), R(r1.u, d), R(r1.v, d));
        if (entry.begin()->m != m.value()) r.fail("decode_m disagrees at d=" + std::to_string(n));
      }
    }
    detail << "d=" << n << ": " << preps.size() << " preps, " << entries << " entries, " << std::setprecision(3)
           << seconds_since(t0) << " s; ";
  }

  // Qubit round two: plus-basis controls against decode_b_qubit.
  const PrimeDim d2 = D(2);
  const KingBases kings2 = KingBases::all(d2);
  const ControlBasis plus = plus_basis(d2);
  for (int k = 0; k < 4; ++k) {
    const LabelPair p = LabelPair::from_index(k, d2);
    const RoundTable table = RoundTable::build(plus[k], kings2, plus);
    for (std::size_t k2 = 0; k2 < 4; ++k2) {
      std::set<BasisLabel> bases;
      for (std::size_t o = 0; o < kings2.size(); ++o) {
        if (table.reachable(o, k2)) bases.insert(kings2.labels[o]);
      }
      if (bases.empty()) continue;
      const LabelPair q = LabelPair::from_index(k2, d2);
      const DecodeResult got = decode_b_qubit(R(p.u, d2), R(p.v, d2), R(q.u, d2), R(q.v, d2));
      const bool expect_determined = bases.size() == 1;
      if (got.determined() != expect_determined || (expect_determined && *got.basis != *bases.begin())) {
        r.fail("decode_b_qubit disagrees");
      }
    }
  }
  if (r.ok) r.detail = detail.str() + "qubit round two";
  return r;
}

Outcome alternative_readout() {
  Outcome r;
  std::uint64_t determined = 0;
  for (int n : {3, 5}) {
    const ProtocolSetup setup(D(n));
    for (int k = 0; k < n * n; ++k) {
      for (const auto& b : king_labels(D(n))) {
        for (const auto& w : enumerate_alternative_branches(setup, LabelPair::from_index(k, D(n)), b)) {
          if (!w.final_outcome) continue;
          ++determined;
          if (*w.final_outcome != w.m2) r.fail("read-out differs at d=" + std::to_string(n));
        }
      }
    }
  }
  if (r.ok) r.detail = std::to_string(determined) + " determined branches";
  return r;
}

Outcome key_sessions() {
  Outcome r;
  std::ostringstream detail;
  for (int n : {3, 5, 7}) {
    for (const KeyRole role : {KeyRole::OutcomeKey, KeyRole::BasisKey}) {
      KeyConfig cfg{D(n), 128, role, 777u + n};
      const KeyReport k = key_distribution_session(cfg);
      if (k.mismatches != 0 || k.alice_key.size() != 128 || k.alice_key != k.king_key || k.alice_auth != k.king_auth) {
        r.fail("d=" + std::to_string(n) + " role " + to_string(role));
      }
      detail << "d=" << n << "/" << to_string(role) << " " << k.rounds << " rounds; ";
    }
  }
  if (r.ok) r.detail = detail.str();
  return r;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"mutually unbiased bases", mub_pairs},
      {"eigenrelation", eigenrelation},
      {"entangled Gram identity", gram},
      {"decoder soundness", soundness},
      {"exact failure probability", failure_probability},
      {"Monte Carlo consistency", monte_carlo_consistency},
      {"closed forms vs compatibility table", closed_forms},
      {"alternative read-out", alternative_readout},
      {"key distribution", key_sessions},
  };
  int failed = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.ok;
    std::printf("%s %d %s: %s\n", o.ok ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
