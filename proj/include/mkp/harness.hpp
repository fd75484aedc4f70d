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
 * @file harness.hpp
 * @brief Exact branch enumeration, Monte Carlo statistics and key sessions.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "mkp/error.hpp"
#include "mkp/hilbert.hpp"
#include "mkp/measurement.hpp"
#include "mkp/numerics.hpp"
#include "mkp/protocol.hpp"
#include "mkp/retrodiction.hpp"

namespace mkp {

/// Largest d for exact enumeration (d^6 chains per basis).
inline constexpr int kMaxEnumerationDim = 7;

/// One outcome chain (b, m, r1, m2, r2) with its exact probability.
struct BranchWeight {
  BasisLabel b;
  int m;
  LabelPair r1;
  int m2;
  LabelPair r2;
  PowerRational prob;
  std::optional<int> control1;       // qubit round-1 control outcome
  std::optional<int> final_outcome;  // alternative read-out
};

/// A nonzero-probability (King outcome, control outcome) pair of one round.
struct RoundStep {
  int m;
  std::size_t k;
  PowerRational prob;
};

/// |<k| (|m;b><m;b| (x) 1) |from>|^2 for every (m, k) with nonzero amplitude.
inline std::vector<RoundStep> round_steps(const Ket2& from, const SingleBasis& king, const ControlBasis& control) {
  std::vector<RoundStep> steps;
  for (std::size_t m = 0; m < king.size(); ++m) {
    auto amps = project_particle1(from, king[m]);
    if (std::all_of(amps.begin(), amps.end(), [](const PhaseSum& a) { return a.is_zero(); })) continue;
    const Ket2 projected(from.dim(), std::move(amps));
    for (std::size_t k = 0; k < control.size(); ++k) {
      const PhaseSum a = inner_product(control[k], projected);
      if (a.is_zero()) continue;
      steps.push_back({static_cast<int>(m), k, squared_magnitude(a)});
    }
  }
  return steps;
}

/**
 * Exact enumeration of the extended protocol for odd d <= 7.  Round-2 step
 * tables depend only on (b, k1) and are built once.
 */
class BranchEnumerator {
 public:
  explicit BranchEnumerator(PrimeDim d) : setup_(checked(d)), second_(setup_.kings().size()) {
    const std::size_t n_controls = setup_.minus().size();
    for (auto& per_b : second_) per_b.resize(n_controls);
    detail::parallel_for(second_.size() * n_controls, [&](std::size_t job) {
      const std::size_t o = job / n_controls, k1 = job % n_controls;
      second_[o][k1] = round_steps(setup_.minus()[k1], setup_.kings().bases[o], setup_.minus());
    });
  }

  const ProtocolSetup& setup() const noexcept { return setup_; }

  /// Calls visit(const BranchWeight&) for every nonzero-probability chain.
  template <class Visitor>
  void for_each(LabelPair prep, BasisLabel b, Visitor&& visit) const {
    const PrimeDim d = setup_.dim();
    prep = LabelPair::checked(prep.u, prep.v, d);
    const auto first = round_steps(setup_.plus_state(prep), setup_.kings().of(b), setup_.minus());
    for (const auto& s1 : first) {
      const LabelPair r1 = LabelPair::from_index(s1.k, d);
      for (const auto& s2 : second_[b.ordinal()][s1.k]) {
        visit(BranchWeight{b, s1.m, r1, s2.m, LabelPair::from_index(s2.k, d), s1.prob * s2.prob, std::nullopt,
                           std::nullopt});
      }
    }
  }

  std::vector<BranchWeight> enumerate(LabelPair prep, BasisLabel b) const {
    std::vector<BranchWeight> out;
    for_each(prep, b, [&](const BranchWeight& w) { out.push_back(w); });
    return out;
  }

 private:
  static PrimeDim checked(PrimeDim d) {
    if (d.qubit_mode()) throw Error(Errc::QubitModeUnsupported, "use enumerate_qubit_branches for d = 2");
    if (d.value() > kMaxEnumerationDim) {
      throw Error(Errc::DimensionTooLarge, "exact enumeration supports d <= " + std::to_string(kMaxEnumerationDim));
    }
    return d;
  }

  ProtocolSetup setup_;
  std::vector<std::vector<std::vector<RoundStep>>> second_;  // [ordinal][k1]
};

inline std::vector<BranchWeight> enumerate_branches(PrimeDim d, LabelPair prep, BasisLabel b) {
  return BranchEnumerator(d).enumerate(prep, b);
}

/// Qubit chains: round 1 with the validated control basis, round 2 from a fresh |u,v;+>.
inline std::vector<BranchWeight> enumerate_qubit_branches(const QubitSetup& setup, BasisLabel b) {
  const ProtocolSetup& base = setup.base();
  const PrimeDim d = base.dim();
  const Ket2& prep = base.plus_state(setup.prep());
  const auto first = round_steps(prep, base.kings().of(b), setup.control1());
  const auto second = round_steps(prep, base.kings().of(b), base.plus());
  std::vector<BranchWeight> out;
  for (const auto& s1 : first) {
    for (const auto& s2 : second) {
      out.push_back(BranchWeight{b, s1.m, setup.prep(), s2.m, LabelPair::from_index(s2.k, d), s1.prob * s2.prob,
                                 static_cast<int>(s1.k), std::nullopt});
    }
  }
  return out;
}

/// ||(P (x) 1) ray||^2 summed exactly over the amplitudes.
inline PowerRational exact_norm_sq(const std::vector<PhaseSum>& amps) {
  PowerRational total;
  for (const auto& a : amps) {
    if (!a.is_zero()) total += squared_magnitude(a);
  }
  return total;
}

/**
 * Alternative-protocol chains: hidden m, plus outcome r1, King's selective
 * m2 and, when the basis is inferred, Alice's particle-1 read-out in the
 * inferred basis.  r2 is unused and set to r1.
 */
inline std::vector<BranchWeight> enumerate_alternative_branches(const ProtocolSetup& setup, LabelPair prep,
                                                                BasisLabel b) {
  const PrimeDim d = setup.dim();
  if (d.qubit_mode()) throw Error(Errc::QubitModeUnsupported, "alternative protocol is defined for odd d");
  if (d.value() > kMaxEnumerationDim) throw Error(Errc::DimensionTooLarge, "exact enumeration supports d <= 7");
  prep = LabelPair::checked(prep.u, prep.v, d);
  const SingleBasis& king = setup.kings().of(b);
  std::vector<BranchWeight> out;
  for (const auto& s1 : round_steps(setup.plus_state(prep), king, setup.plus())) {
    const LabelPair r1 = LabelPair::from_index(s1.k, d);
    const Ket2& after = setup.plus()[s1.k];
    const DecodeResult inferred = decode_b_alternative(d, Residue(prep.u, d), Residue(prep.v, d), Residue(r1.u, d),
                                                       Residue(r1.v, d));
    for (std::size_t m2 = 0; m2 < king.size(); ++m2) {
      auto ray = project_particle1(after, king[m2]);
      if (!inferred.determined()) {
        const PowerRational p = exact_norm_sq(ray);
        if (!p.is_zero()) out.push_back({b, s1.m, r1, static_cast<int>(m2), r1, s1.prob * p, std::nullopt, std::nullopt});
        continue;
      }
      if (std::all_of(ray.begin(), ray.end(), [](const PhaseSum& a) { return a.is_zero(); })) continue;
      const Ket2 post(d, std::move(ray));
      const SingleBasis& readout = setup.kings().of(*inferred.basis);
      for (std::size_t f = 0; f < readout.size(); ++f) {
        const PowerRational p = exact_norm_sq(project_particle1(post, readout[f]));
        if (p.is_zero()) continue;
        out.push_back({b, s1.m, r1, static_cast<int>(m2), r1, s1.prob * p, std::nullopt, static_cast<int>(f)});
      }
    }
  }
  return out;
}

/// Total probability and mass of the undetermined outcome (r2 == r1) of a branch list.
struct FailureMass {
  PowerRational total;
  PowerRational failure;
};

inline FailureMass failure_mass(const std::vector<BranchWeight>& branches) {
  FailureMass fm;
  for (const auto& w : branches) {
    fm.total += w.prob;
    if (w.r2 == w.r1) fm.failure += w.prob;
  }
  return fm;
}

// ---------------------------------------------------------------------------
// Monte Carlo.

struct BasisTally {
  std::uint64_t trials = 0;
  std::uint64_t determined = 0;
  std::uint64_t correct = 0;

  BasisTally& operator+=(const BasisTally& o) {
    trials += o.trials;
    determined += o.determined;
    correct += o.correct;
    return *this;
  }
  friend bool operator==(const BasisTally&, const BasisTally&) = default;
};

struct TrialStatistics {
  PrimeDim d;
  ProtocolMode mode;
  std::uint64_t trials = 0;
  std::uint64_t determined = 0;
  std::uint64_t undetermined = 0;
  std::uint64_t correct = 0;
  double failure_rate = 0.0;
  std::map<BasisLabel, BasisTally> per_basis;
  std::uint64_t master_seed = 0;
};

struct MonteCarloConfig {
  PrimeDim d;
  ProtocolMode mode = ProtocolMode::Extended;
  std::uint64_t trials = 1;
  KingPolicy policy = KingPolicy::uniform();
  std::optional<LabelPair> prep = LabelPair{0, 0};  // nullopt: uniform per trial
  std::uint64_t master_seed = 0;
  Selectivity king_mode = Selectivity::Selective;
  unsigned workers = 0;  // 0: hardware concurrency
  std::optional<ControlBasis> qubit_control;
  bool keep_transcripts = false;
};

struct MonteCarloResult {
  TrialStatistics stats;
  std::vector<Transcript> transcripts;  // in trial order when kept
};

/// Runs rounds on demand; trial i always uses stream (master_seed, i).
class RoundRunner {
 public:
  RoundRunner(PrimeDim d, ProtocolMode mode, KingPolicy policy, std::optional<LabelPair> prep, Selectivity king_mode,
              const std::optional<ControlBasis>& qubit_control)
      : d_(d), mode_(mode), policy_(std::move(policy)), prep_(prep), king_mode_(king_mode), setup_(d) {
    if ((mode == ProtocolMode::Qubit) != d.qubit_mode()) {
      throw Error(Errc::InvalidConfig, "qubit mode requires d = 2 and d = 2 requires qubit mode");
    }
    if (prep_) prep_ = LabelPair::checked(prep_->u, prep_->v, d);
    if (mode == ProtocolMode::Qubit) {
      qubit_.resize(4);
      for (int k = 0; k < 4; ++k) {
        const LabelPair p = LabelPair::from_index(k, d);
        if (!prep_ || *prep_ == p) qubit_[k].emplace(p, qubit_control);
      }
    }
  }

  Transcript run(std::uint64_t stream_index, std::uint64_t master_seed) const {
    RngStream rng(master_seed, stream_index);
    LabelPair prep = prep_.value_or(LabelPair{});
    if (!prep_) {
      prep.u = static_cast<int>(rng.below(d_.value()));
      prep.v = static_cast<int>(rng.below(d_.value()));
    }
    switch (mode_) {
      case ProtocolMode::Extended: return run_extended_round(setup_, prep, policy_, king_mode_, rng);
      case ProtocolMode::Alternative: return run_alternative_round(setup_, prep, policy_, rng);
      case ProtocolMode::Qubit: return run_qubit_round(*qubit_[prep.index(d_)], policy_, king_mode_, rng);
    }
    throw Error(Errc::InvalidConfig, "unknown mode");
  }

 private:
  PrimeDim d_;
  ProtocolMode mode_;
  KingPolicy policy_;
  std::optional<LabelPair> prep_;
  Selectivity king_mode_;
  ProtocolSetup setup_;
  std::vector<std::optional<QubitSetup>> qubit_;
};

inline MonteCarloResult monte_carlo(const MonteCarloConfig& config) {
  if (config.trials < 1) throw Error(Errc::InvalidConfig, "trials must be >= 1");
  const RoundRunner runner(config.d, config.mode, config.policy, config.prep, config.king_mode, config.qubit_control);

  unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, config.trials));

  struct Partial {
    std::map<BasisLabel, BasisTally> per_basis;
  };
  std::vector<Partial> partials(workers);
  std::vector<std::optional<Transcript>> kept(config.keep_transcripts ? config.trials : 0);

  // Contiguous chunks; tallies are integer sums, so the result does not depend on the split.
  detail::parallel_for(workers, [&](std::size_t w) {
    const std::uint64_t lo = config.trials * w / workers, hi = config.trials * (w + 1) / workers;
    auto& part = partials[w];
    for (std::uint64_t i = lo; i < hi; ++i) {
      Transcript t = runner.run(i, config.master_seed);
      auto& tally = part.per_basis[t.sealed.basis];
      ++tally.trials;
      if (t.decoded.determined()) {
        ++tally.determined;
        if (t.verified) ++tally.correct;
      }
      if (config.keep_transcripts) kept[i].emplace(std::move(t));
    }
  });

  MonteCarloResult result{TrialStatistics{config.d, config.mode}, {}};
  auto& s = result.stats;
  s.master_seed = config.master_seed;
  for (const auto& p : partials) {
    for (const auto& [b, tally] : p.per_basis) s.per_basis[b] += tally;
  }
  for (const auto& [b, tally] : s.per_basis) {
    s.trials += tally.trials;
    s.determined += tally.determined;
    s.correct += tally.correct;
  }
  s.undetermined = s.trials - s.determined;
  s.failure_rate = static_cast<double>(s.undetermined) / static_cast<double>(s.trials);
  if (config.keep_transcripts) {
    result.transcripts.reserve(kept.size());
    for (auto& t : kept) result.transcripts.push_back(std::move(*t));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Key distribution.

/// OutcomeKey: key symbols from the King's outcome, authentication from his basis.
enum class KeyRole { OutcomeKey, BasisKey };

inline std::string to_string(KeyRole r) { return r == KeyRole::OutcomeKey ? "outcome" : "basis"; }

struct KeyConfig {
  PrimeDim d;
  std::size_t key_length = 128;
  KeyRole role = KeyRole::OutcomeKey;
  std::uint64_t master_seed = 0;
  ProtocolMode mode = ProtocolMode::Extended;
  KingPolicy policy = KingPolicy::uniform();
  std::optional<LabelPair> prep = LabelPair{0, 0};
  std::uint64_t max_rounds = 0;  // 0: 1000 * key_length
};

/// Symbols: outcomes are 0..d-1; bases are ordinals (0 computational, b+1 indexed b).
struct KeyReport {
  PrimeDim d;
  ProtocolMode mode;
  KeyRole role;
  std::uint64_t master_seed = 0;
  std::uint64_t rounds = 0;
  std::size_t target = 0;
  double expected_rounds = 0.0;
  std::vector<int> alice_key, king_key;
  std::vector<int> alice_auth, king_auth;
  std::uint64_t mismatches = 0;
};

/// Runs rounds (stream index = round number) until `key_length` of them are determined.
inline KeyReport key_distribution_session(const KeyConfig& config) {
  const RoundRunner runner(config.d, config.mode, config.policy, config.prep, Selectivity::Selective, std::nullopt);
  const std::uint64_t cap = config.max_rounds ? config.max_rounds : 1000 * std::max<std::uint64_t>(1, config.key_length);
  KeyReport r{config.d, config.mode, config.role, config.master_seed};
  r.target = config.key_length;
  r.expected_rounds = static_cast<double>(config.key_length) / (1.0 - 1.0 / config.d.value());
  while (r.alice_key.size() < config.key_length && r.rounds < cap) {
    const Transcript t = runner.run(r.rounds++, config.master_seed);
    if (!t.decoded.determined()) continue;
    const int king_m = t.mode == ProtocolMode::Alternative ? t.sealed.m2.value_or(-1) : t.sealed.m;
    const int alice_m = t.decoded.outcome_m.value_or(-1);
    const int king_b = t.sealed.basis.ordinal();
    const int alice_b = t.decoded.basis->ordinal();
    const bool outcome_key = config.role == KeyRole::OutcomeKey;
    r.alice_key.push_back(outcome_key ? alice_m : alice_b);
    r.king_key.push_back(outcome_key ? king_m : king_b);
    r.alice_auth.push_back(outcome_key ? alice_b : alice_m);
    r.king_auth.push_back(outcome_key ? king_b : king_m);
    if (r.alice_key.back() != r.king_key.back()) ++r.mismatches;
    if (r.alice_auth.back() != r.king_auth.back()) ++r.mismatches;
  }
  return r;
}

}  // namespace mkp
