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
 * @file protocol.hpp
 * @brief The two-round King/Alice protocol and its variants.
 *
 * Extended (odd d):
 *   Alice prepares |u,v;+>, the King measures particle 1 in basis b (m),
 *   Alice measures both particles in the minus basis (u1,v1), the King
 *   measures again in the same b (m2, may be discarded), Alice measures the
 *   minus basis again (u2,v2) and retrodicts (b, m).
 *
 * Alternative (odd d):
 *   The King measures nonselectively, Alice measures the plus basis (u1,v1)
 *   and infers b, the King measures selectively (m2), Alice reads particle 1
 *   in the inferred basis and obtains m2.
 *
 * Qubit (d = 2):
 *   Round 1 uses a validated control basis that gives m(b).  Alice then
 *   re-prepares |u,v;+>, the King repeats b, Alice measures the plus basis
 *   (u2,v2) and infers b from (u,v) -> (u2,v2).
 *
 * The King's record is sealed: the retrodict_* functions only see
 * AliceRecord.
 */

#pragma once

#include <optional>
#include <string>
#include <utility>

#include "mkp/error.hpp"
#include "mkp/hilbert.hpp"
#include "mkp/measurement.hpp"
#include "mkp/numerics.hpp"
#include "mkp/retrodiction.hpp"

namespace mkp {

enum class ProtocolMode { Extended, Alternative, Qubit };

inline std::string to_string(ProtocolMode mode) {
  switch (mode) {
    case ProtocolMode::Extended: return "extended";
    case ProtocolMode::Alternative: return "alternative";
    case ProtocolMode::Qubit: return "qubit";
  }
  return "unknown";
}

inline ProtocolMode parse_mode(const std::string& text) {
  if (text == "extended") return ProtocolMode::Extended;
  if (text == "alternative") return ProtocolMode::Alternative;
  if (text == "qubit") return ProtocolMode::Qubit;
  throw Error(Errc::InvalidConfig, "unknown mode '" + text + "'");
}

class KingPolicy {
 public:
  static KingPolicy uniform() { return KingPolicy(); }
  static KingPolicy fixed(BasisLabel b) { return KingPolicy(b); }

  bool is_uniform() const noexcept { return !fixed_.has_value(); }
  const std::optional<BasisLabel>& fixed_basis() const noexcept { return fixed_; }

  BasisLabel choose(PrimeDim d, RngStream& rng) const {
    if (fixed_) {
      if (!fixed_->is_computational() && fixed_->index() >= d.value()) {
        throw Error(Errc::IndexOutOfRange, "basis " + fixed_->to_string() + " invalid for d = " +
                                               std::to_string(d.value()));
      }
      return *fixed_;
    }
    return BasisLabel::from_ordinal(static_cast<int>(rng.below(d.value() + 1)), d);
  }

 private:
  KingPolicy() = default;
  explicit KingPolicy(BasisLabel b) : fixed_(b) {}

  std::optional<BasisLabel> fixed_;
};

/// Everything Alice observes.
struct AliceRecord {
  LabelPair prep;
  LabelPair r1;  // extended: minus outcome; alternative: plus outcome; qubit: round-2 preparation
  std::optional<LabelPair> r2;
  std::optional<int> control1_outcome;  // qubit round-1 control outcome
  std::optional<int> final_outcome;     // alternative: particle-1 read-out
};

/// Ground truth of the King's measurements.
struct KingRecord {
  BasisLabel basis;
  int m;
  std::optional<int> m2;  // absent when discarded
};

struct Transcript {
  PrimeDim d;
  ProtocolMode mode;
  AliceRecord alice;
  KingRecord sealed;
  DecodeResult decoded;
  bool verified;
};

/// Bases shared by every round at dimension d.
class ProtocolSetup {
 public:
  explicit ProtocolSetup(PrimeDim d) : d_(d), kings_(KingBases::all(d)), plus_(plus_basis(d)) {
    if (!d.qubit_mode()) minus_.emplace(minus_basis(d));
  }

  PrimeDim dim() const noexcept { return d_; }
  const KingBases& kings() const noexcept { return kings_; }
  const ControlBasis& plus() const noexcept { return plus_; }
  const ControlBasis& minus() const {
    if (!minus_) throw Error(Errc::QubitModeUnsupported, "no minus basis for d = 2");
    return *minus_;
  }
  const Ket2& plus_state(LabelPair p) const { return plus_[p.index(d_)]; }

 private:
  PrimeDim d_;
  KingBases kings_;
  ControlBasis plus_;
  std::optional<ControlBasis> minus_;
};

/// d = 2 setup for one preparation: its validated round-1 control basis and m(b) table.
class QubitSetup {
 public:
  explicit QubitSetup(LabelPair prep, std::optional<ControlBasis> control1 = std::nullopt)
      : base_(validate_dimension(2)),
        prep_(LabelPair::checked(prep.u, prep.v, base_.dim())),
        control1_(control1 ? std::move(*control1) : default_qubit_control_basis(prep_)),
        round1_(RoundTable::build(base_.plus_state(prep_), base_.kings(), control1_)) {
    if (!(control1_.dim() == base_.dim())) throw Error(Errc::InvalidControlBasis, "control basis is not two-qubit");
    if (!round1_.conditional()) {
      throw Error(Errc::InvalidControlBasis, control1_.name() + " gives no conditional table m(b)");
    }
  }

  const ProtocolSetup& base() const noexcept { return base_; }
  LabelPair prep() const noexcept { return prep_; }
  const ControlBasis& control1() const noexcept { return control1_; }
  const RoundTable& round1() const noexcept { return round1_; }

  /// m(b) for round-1 control outcome k; nullopt if (b, k) has zero probability.
  std::optional<int> conditional_outcome(BasisLabel b, std::size_t k) const {
    const auto& ms = round1_.outcomes(b, k);
    if (ms.empty()) return std::nullopt;
    return ms.front();
  }

 private:
  ProtocolSetup base_;
  LabelPair prep_;
  ControlBasis control1_;
  RoundTable round1_;
};

// ---------------------------------------------------------------------------
// Decoders.  Inputs are Alice's records only.

inline DecodeResult retrodict_extended(PrimeDim d, const AliceRecord& a) {
  if (!a.r2) return DecodeResult::undetermined();
  const auto r = [d](int x) { return Residue(x, d); };
  DecodeResult out = decode_b(d, r(a.r1.u), r(a.r1.v), r(a.r2->u), r(a.r2->v));
  if (out.determined()) {
    out.outcome_m =
        static_cast<int>(decode_m(d, *out.basis, r(a.prep.u), r(a.prep.v), r(a.r1.u), r(a.r1.v)).value());
  }
  return out;
}

/// Basis part of the alternative protocol; the outcome is Alice's later read-out.
inline DecodeResult retrodict_alternative(PrimeDim d, const AliceRecord& a) {
  const auto r = [d](int x) { return Residue(x, d); };
  DecodeResult out = decode_b_alternative(d, r(a.prep.u), r(a.prep.v), r(a.r1.u), r(a.r1.v));
  if (out.determined()) out.outcome_m = a.final_outcome;
  return out;
}

inline DecodeResult retrodict_qubit(const QubitSetup& setup, const AliceRecord& a) {
  if (!a.r2 || !a.control1_outcome) return DecodeResult::undetermined();
  const PrimeDim d = setup.base().dim();
  const auto r = [d](int x) { return Residue(x, d); };
  DecodeResult out = decode_b_qubit(r(a.r1.u), r(a.r1.v), r(a.r2->u), r(a.r2->v));
  if (out.determined()) {
    out.outcome_m = setup.conditional_outcome(*out.basis, static_cast<std::size_t>(*a.control1_outcome));
  }
  return out;
}

namespace detail {

inline bool verify(const DecodeResult& decoded, BasisLabel basis, std::optional<int> outcome) {
  if (!decoded.determined()) return true;
  return decoded.basis == basis && decoded.outcome_m.has_value() && decoded.outcome_m == outcome;
}

inline void require_odd(PrimeDim d) {
  if (d.qubit_mode()) throw Error(Errc::QubitModeUnsupported, "use run_qubit_round for d = 2");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rounds.  Each is a pure function of its inputs and the stream.

inline Transcript run_extended_round(const ProtocolSetup& setup, LabelPair prep, const KingPolicy& policy,
                                     Selectivity king_mode, RngStream& rng) {
  const PrimeDim d = setup.dim();
  detail::require_odd(d);
  prep = LabelPair::checked(prep.u, prep.v, d);
  const BasisLabel b = policy.choose(d, rng);
  const SingleBasis& king = setup.kings().of(b);

  const auto k1 = measure_particle1(setup.plus_state(prep), king, b, Selectivity::Selective, rng);
  const auto a1 = measure_joint(k1.post_state, setup.minus(), rng);
  // Round 2 reuses b; the policy is not consulted again.
  const auto k2 = measure_particle1(a1.post_state, king, b, king_mode, rng);
  const auto a2 = measure_joint(k2.post_state, setup.minus(), rng);

  Transcript t{d,
               ProtocolMode::Extended,
               AliceRecord{prep, LabelPair::from_index(a1.outcome, d), LabelPair::from_index(a2.outcome, d),
                           std::nullopt, std::nullopt},
               KingRecord{b, static_cast<int>(k1.outcome),
                          k2.hidden ? std::nullopt : std::optional<int>(static_cast<int>(k2.outcome))},
               {},
               false};
  t.decoded = retrodict_extended(d, t.alice);
  t.verified = detail::verify(t.decoded, t.sealed.basis, t.sealed.m);
  return t;
}

inline Transcript run_extended_round(PrimeDim d, LabelPair prep, const KingPolicy& policy, Selectivity king_mode,
                                     RngStream& rng) {
  detail::require_odd(d);
  return run_extended_round(ProtocolSetup(d), prep, policy, king_mode, rng);
}

inline Transcript run_alternative_round(const ProtocolSetup& setup, LabelPair prep, const KingPolicy& policy,
                                        RngStream& rng) {
  const PrimeDim d = setup.dim();
  detail::require_odd(d);
  prep = LabelPair::checked(prep.u, prep.v, d);
  const BasisLabel b = policy.choose(d, rng);
  const SingleBasis& king = setup.kings().of(b);

  const auto k1 = measure_particle1(setup.plus_state(prep), king, b, Selectivity::Nonselective, rng);
  const auto a1 = measure_joint(k1.post_state, setup.plus(), rng);
  const auto k2 = measure_particle1(a1.post_state, king, b, Selectivity::Selective, rng);

  AliceRecord alice{prep, LabelPair::from_index(a1.outcome, d), std::nullopt, std::nullopt, std::nullopt};
  const DecodeResult inferred = retrodict_alternative(d, alice);
  if (inferred.determined()) {
    const auto readout =
        measure_particle1(k2.post_state, setup.kings().of(*inferred.basis), *inferred.basis, Selectivity::Selective, rng);
    alice.final_outcome = static_cast<int>(readout.outcome);
  }

  Transcript t{d,
               ProtocolMode::Alternative,
               alice,
               KingRecord{b, static_cast<int>(k1.outcome), static_cast<int>(k2.outcome)},
               {},
               false};
  t.decoded = retrodict_alternative(d, t.alice);
  t.verified = detail::verify(t.decoded, t.sealed.basis, t.sealed.m2);
  return t;
}

inline Transcript run_qubit_round(const QubitSetup& setup, const KingPolicy& policy, Selectivity king_mode,
                                  RngStream& rng) {
  const ProtocolSetup& base = setup.base();
  const PrimeDim d = base.dim();
  const LabelPair prep = setup.prep();
  const BasisLabel b = policy.choose(d, rng);
  const SingleBasis& king = base.kings().of(b);

  const auto k1 = measure_particle1(base.plus_state(prep), king, b, Selectivity::Selective, rng);
  const auto c1 = measure_joint(k1.post_state, setup.control1(), rng);
  // Round 2 starts from a fresh |u,v;+>.
  const auto k2 = measure_particle1(base.plus_state(prep), king, b, king_mode, rng);
  const auto a2 = measure_joint(k2.post_state, base.plus(), rng);

  Transcript t{d,
               ProtocolMode::Qubit,
               AliceRecord{prep, prep, LabelPair::from_index(a2.outcome, d), static_cast<int>(c1.outcome),
                           std::nullopt},
               KingRecord{b, static_cast<int>(k1.outcome),
                          k2.hidden ? std::nullopt : std::optional<int>(static_cast<int>(k2.outcome))},
               {},
               false};
  t.decoded = retrodict_qubit(setup, t.alice);
  t.verified = detail::verify(t.decoded, t.sealed.basis, t.sealed.m);
  return t;
}

/// Validates `control1` for the preparation (InvalidControlBasis) and runs one qubit round.
inline Transcript run_qubit_round(LabelPair prep, const KingPolicy& policy, const ControlBasis& control1,
                                  RngStream& rng) {
  return run_qubit_round(QubitSetup(prep, control1), policy, Selectivity::Selective, rng);
}

}  // namespace mkp
