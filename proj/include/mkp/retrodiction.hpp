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
 * @file retrodiction.hpp
 * @brief Closed-form decoders and the exact compatibility-table oracle.
 *
 * Notation: Alice prepares |u,v;+>, the King measures basis b with outcome
 * m, Alice's first control outcome is (u1, v1) and her second (u2, v2).
 *
 *   m(b)  = u1 + u                                   b computational
 *         = (v1 + v)/2 + b (u1 + u) - b/2            b indexed
 *   b     = computational                            u2 == u1, v2 != v1
 *         = (v2 - v1) / (2 (u1 - u2))                u2 != u1
 *         undetermined                               (u2, v2) == (u1, v1)
 *
 * All arithmetic is mod d.  The b formula is the one that the compatibility
 * table (enumeration of nonzero amplitudes) confirms for the states built in
 * hilbert.hpp; see the tests.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mkp/error.hpp"
#include "mkp/hilbert.hpp"
#include "mkp/measurement.hpp"
#include "mkp/numerics.hpp"

namespace mkp {

enum class DecodeStatus { Determined, Undetermined };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::Undetermined;
  std::optional<BasisLabel> basis;
  std::optional<int> outcome_m;

  static DecodeResult undetermined() { return {}; }
  static DecodeResult of_basis(BasisLabel b) { return {DecodeStatus::Determined, b, std::nullopt}; }

  bool determined() const noexcept { return status == DecodeStatus::Determined; }

  friend bool operator==(const DecodeResult&, const DecodeResult&) = default;
};

/// The King's round-1 outcome given his basis and Alice's round-1 record.
inline Residue decode_m(PrimeDim d, BasisLabel b, Residue u, Residue v, Residue u1, Residue v1) {
  if (d.qubit_mode()) {
    throw Error(Errc::QubitModeUnsupported, "qubit round-1 decoding uses a validated control basis table");
  }
  if (b.is_computational()) return u1 + u;
  const Residue bb(b.index(), d);
  const Residue half = inv_mod(Residue(2, d));
  return (v1 + v) * half + bb * (u1 + u) - bb * half;
}

/// The King's basis from Alice's two minus-basis outcomes (odd d).
inline DecodeResult decode_b(PrimeDim d, Residue u1, Residue v1, Residue u2, Residue v2) {
  if (d.qubit_mode()) throw Error(Errc::QubitModeUnsupported, "use decode_b_qubit for d = 2");
  if (u1 == u2) {
    if (v1 == v2) return DecodeResult::undetermined();
    return DecodeResult::of_basis(BasisLabel::computational());
  }
  const Residue b = (v2 - v1) * inv_mod(Residue(2, d) * (u1 - u2));
  return DecodeResult::of_basis(BasisLabel::indexed(b));
}

/// The King's basis from Alice's round-2 plus-basis preparation (u1, v1) and outcome (u2, v2), d = 2.
inline DecodeResult decode_b_qubit(Residue u1, Residue v1, Residue u2, Residue v2) {
  const PrimeDim d = u1.modulus();
  if (!d.qubit_mode()) throw Error(Errc::DimensionMismatch, "decode_b_qubit needs d = 2");
  if (u1 == u2) {
    if (v1 == v2) return DecodeResult::undetermined();
    return DecodeResult::of_basis(BasisLabel::computational());
  }
  return DecodeResult::of_basis(BasisLabel::indexed((v1 - v2) * inv_mod(u1 - u2)));
}

/// Alternative protocol: King's basis from the preparation (u, v) and one plus-basis outcome (u1, v1).
inline DecodeResult decode_b_alternative(PrimeDim d, Residue u, Residue v, Residue u1, Residue v1) {
  if (d.qubit_mode()) throw Error(Errc::QubitModeUnsupported, "alternative protocol is defined for odd d");
  if (u1 == u) {
    if (v1 == v) return DecodeResult::undetermined();
    return DecodeResult::of_basis(BasisLabel::computational());
  }
  const Residue b = (v1 - v) * inv_mod(Residue(2, d) * (u - u1));
  return DecodeResult::of_basis(BasisLabel::indexed(b));
}

/// A (basis, outcome) pair the King may have produced.
struct Candidate {
  BasisLabel basis;
  int m;

  friend auto operator<=>(const Candidate&, const Candidate&) = default;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/**
 * One measurement round: for each King basis b and each control outcome k,
 * the King outcomes m with <k| (|m;b><m;b| (x) 1) |prep> != 0 (exact).
 */
class RoundTable {
 public:
  static RoundTable build(const Ket2& prep, const KingBases& kings, const ControlBasis& control) {
    RoundTable t;
    t.outcomes_.assign(kings.size(), std::vector<std::vector<int>>(control.size()));
    for (std::size_t o = 0; o < kings.size(); ++o) {
      const auto& basis = kings.bases[o];
      for (std::size_t m = 0; m < basis.size(); ++m) {
        auto amps = project_particle1(prep, basis[m]);
        if (std::all_of(amps.begin(), amps.end(), [](const PhaseSum& a) { return a.is_zero(); })) continue;
        const Ket2 projected(kings.d, std::move(amps));
        for (std::size_t k = 0; k < control.size(); ++k) {
          if (!inner_product(control[k], projected).is_zero()) {
            t.outcomes_[o][k].push_back(static_cast<int>(m));
          }
        }
      }
    }
    return t;
  }

  /// King outcomes consistent with basis ordinal o and control outcome k.
  const std::vector<int>& outcomes(std::size_t o, std::size_t k) const { return outcomes_.at(o).at(k); }
  const std::vector<int>& outcomes(BasisLabel b, std::size_t k) const { return outcomes(b.ordinal(), k); }

  std::size_t basis_count() const noexcept { return outcomes_.size(); }
  std::size_t control_count() const noexcept { return outcomes_.empty() ? 0 : outcomes_.front().size(); }

  bool reachable(std::size_t o, std::size_t k) const { return !outcomes(o, k).empty(); }

  /// Whether m is unique for every (b, k) with nonzero probability, i.e. a conditional table m(b) exists.
  bool conditional() const {
    for (const auto& per_b : outcomes_) {
      for (const auto& ms : per_b) {
        if (ms.size() > 1) return false;
      }
    }
    return true;
  }

  std::set<Candidate> candidates(std::size_t k, PrimeDim d) const {
    std::set<Candidate> out;
    for (std::size_t o = 0; o < outcomes_.size(); ++o) {
      for (int m : outcomes_[o][k]) out.insert({BasisLabel::from_ordinal(static_cast<int>(o), d), m});
    }
    return out;
  }

 private:
  std::vector<std::vector<std::vector<int>>> outcomes_;
};

/// True iff the control basis yields a conditional table m(b) for this preparation.
inline bool validate_control_basis(const Ket2& prep, const KingBases& kings, const ControlBasis& control) {
  return RoundTable::build(prep, kings, control).conditional();
}

/// Map from (round-1 outcome, round-2 outcome) to the (b, m) pairs with a nonzero chain amplitude.
class CompatibilityTable {
 public:
  using Key = std::pair<std::size_t, std::size_t>;

  CompatibilityTable(PrimeDim d, std::map<Key, std::set<Candidate>> entries)
      : d_(d), entries_(std::move(entries)) {}

  PrimeDim dim() const noexcept { return d_; }
  const std::map<Key, std::set<Candidate>>& entries() const noexcept { return entries_; }

  /// nullptr for unreachable outcome pairs.
  const std::set<Candidate>* find(std::size_t k1, std::size_t k2) const {
    auto it = entries_.find({k1, k2});
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::set<BasisLabel> bases(std::size_t k1, std::size_t k2) const {
    std::set<BasisLabel> out;
    if (const auto* e = find(k1, k2)) {
      for (const auto& c : *e) out.insert(c.basis);
    }
    return out;
  }

 private:
  PrimeDim d_;
  std::map<Key, std::set<Candidate>> entries_;
};

namespace detail {

template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    }));
  }
  for (auto& t : tasks) t.get();
}

}  // namespace detail

/**
 * Round-2 reachability for the extended protocol, independent of the
 * preparation: for every round-1 control state k1 a RoundTable of the King's
 * repeated measurement followed by the round-2 control measurement.
 */
class SecondRoundOracle {
 public:
  SecondRoundOracle(const KingBases& kings, const ControlBasis& control1, const ControlBasis& control2)
      : tables_(control1.size()) {
    detail::parallel_for(control1.size(), [&](std::size_t k1) {
      tables_[k1].emplace(RoundTable::build(control1[k1], kings, control2));
    });
  }

  const RoundTable& after(std::size_t k1) const { return *tables_.at(k1); }

 private:
  std::vector<std::optional<RoundTable>> tables_;
};

inline CompatibilityTable build_compatibility_table(const Ket2& prep, const KingBases& kings,
                                                    const ControlBasis& control1, const SecondRoundOracle& second) {
  const PrimeDim d = kings.d;
  const RoundTable first = RoundTable::build(prep, kings, control1);
  std::map<CompatibilityTable::Key, std::set<Candidate>> entries;
  for (std::size_t k1 = 0; k1 < first.control_count(); ++k1) {
    const RoundTable& r2 = second.after(k1);
    for (std::size_t k2 = 0; k2 < r2.control_count(); ++k2) {
      std::set<Candidate> entry;
      for (std::size_t o = 0; o < kings.size(); ++o) {
        if (!r2.reachable(o, k2)) continue;
        for (int m : first.outcomes(o, k1)) entry.insert({kings.labels[o], m});
      }
      if (!entry.empty()) entries.emplace(CompatibilityTable::Key{k1, k2}, std::move(entry));
    }
  }
  return CompatibilityTable(d, std::move(entries));
}

/// Chain <k2|Pi_{m'}|k1><k1|Pi_m|prep> != 0 for some m' decides membership of (b, m) in entry (k1, k2).
inline CompatibilityTable build_compatibility_table(const Ket2& prep, const KingBases& kings,
                                                    const ControlBasis& control1, const ControlBasis& control2) {
  return build_compatibility_table(prep, kings, control1, SecondRoundOracle(kings, control1, control2));
}

// ---------------------------------------------------------------------------
// Qubit round-1 control bases.

/**
 * All orthonormal bases of the two-qubit space whose states are
 * (|0,0;+> + s1 |0,1;+> + s2 |1,0;+> + s3 |1,1;+>) / 2 with s_j in {1, i, -1, -i}
 * and that give a conditional table m(b) for `prep`.  Deterministic order.
 */
inline std::vector<ControlBasis> qubit_control_candidates(const Ket2& prep, const KingBases& kings) {
  const PrimeDim d = prep.dim();
  if (!d.qubit_mode()) throw Error(Errc::DimensionMismatch, "qubit control bases need d = 2");
  const auto plus = entangled_basis(d, Family::Plus);
  std::vector<Ket2> pool;
  for (int c = 0; c < 64; ++c) {
    const int powers[4] = {0, c / 16, (c / 4) % 4, c % 4};
    std::vector<PhaseSum> amps(4, PhaseSum(d));
    for (int j = 0; j < 4; ++j) {
      for (std::size_t i = 0; i < 4; ++i) amps[i] += plus[j][i].times_root(powers[j]);
    }
    for (auto& a : amps) {
      std::vector<std::int64_t> cs(a.coeffs().begin(), a.coeffs().end());
      a = PhaseSum(d, std::move(cs), a.scale_halves() + 2);
    }
    pool.emplace_back(d, std::move(amps));
  }
  const std::size_t n = pool.size();
  std::vector<std::vector<bool>> orth(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) orth[i][j] = orth[j][i] = inner_product(pool[i], pool[j]).is_zero();
  }
  std::vector<ControlBasis> out;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!orth[a][b]) continue;
      for (std::size_t c = b + 1; c < n; ++c) {
        if (!orth[a][c] || !orth[b][c]) continue;
        for (std::size_t e = c + 1; e < n; ++e) {
          if (!orth[a][e] || !orth[b][e] || !orth[c][e]) continue;
          ControlBasis basis("qubit-r1-" + std::to_string(out.size()), {pool[a], pool[b], pool[c], pool[e]});
          if (validate_control_basis(prep, kings, basis)) out.push_back(std::move(basis));
        }
      }
    }
  }
  return out;
}

/// First candidate of qubit_control_candidates for |u,v;+>.
inline ControlBasis default_qubit_control_basis(LabelPair prep) {
  const PrimeDim d = validate_dimension(2);
  const Ket2 state = entangled_plus(d, Residue(prep.u, d), Residue(prep.v, d));
  auto found = qubit_control_candidates(state, KingBases::all(d));
  if (found.empty()) throw Error(Errc::InvalidControlBasis, "no qubit control basis found");
  return std::move(found.front());
}

// ---------------------------------------------------------------------------
// Control-basis files: one state per line, d^2 amplitudes written as
// comma-separated "re,im" pairs.  Blank lines and lines starting with '#'
// are ignored.

inline void write_control_basis(std::ostream& out, const ControlBasis& basis) {
  std::ostringstream line;
  line.precision(17);
  for (const auto& s : basis.states()) {
    line.str("");
    bool first = true;
    for (const auto& a : s.amplitudes()) {
      if (!first) line << ',';
      first = false;
      line << a.real() << ',' << a.imag();
    }
    out << line.str() << '\n';
  }
}

namespace detail {

/// Recovers the exact form of a numeric state: common scale k in [0, 8],
/// Gaussian integers for d = 2, single monomials c * omega^j for odd d.
inline std::optional<std::vector<PhaseSum>> snap_state(PrimeDim d, const std::vector<std::complex<double>>& amps) {
  constexpr double kSnap = 1e-6;
  for (int k = 0; k <= 8; ++k) {
    const double f = std::pow(static_cast<double>(d.value()), 0.5 * k);
    std::vector<PhaseSum> out;
    bool ok = true;
    for (const auto& a : amps) {
      const std::complex<double> z = a * f;
      if (std::abs(z) < kSnap) {
        out.push_back(PhaseSum::root(d, 0, 0, k));
        continue;
      }
      if (d.qubit_mode()) {
        const double x = std::nearbyint(z.real()), y = std::nearbyint(z.imag());
        if (std::abs(z - std::complex<double>(x, y)) > kSnap) {
          ok = false;
          break;
        }
        std::vector<std::int64_t> cs{static_cast<std::int64_t>(x), static_cast<std::int64_t>(y), 0, 0};
        out.emplace_back(d, std::move(cs), k);
      } else {
        const double c = std::nearbyint(std::abs(z));
        const auto j = static_cast<std::int64_t>(std::nearbyint(std::arg(z) * d.value() / (2.0 * std::numbers::pi)));
        const PhaseSum p = PhaseSum::root(d, j, static_cast<std::int64_t>(c), 0);
        if (c < 1 || std::abs(p.to_complex() - z) > kSnap) {
          ok = false;
          break;
        }
        out.push_back(PhaseSum::root(d, j, static_cast<std::int64_t>(c), k));
      }
    }
    if (ok) return out;
  }
  return std::nullopt;
}

}  // namespace detail

inline ControlBasis read_control_basis(std::istream& in, PrimeDim d, std::string name = "file") {
  const std::size_t n = static_cast<std::size_t>(d.value()) * d.value();
  std::vector<Ket2> states;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (auto& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream fields(line);
    std::vector<double> xs;
    double x = 0.0;
    while (fields >> x) xs.push_back(x);
    if (!fields.eof() || xs.size() != 2 * n) {
      throw Error(Errc::MalformedInput, "line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                                            " re,im pairs");
    }
    std::vector<std::complex<double>> amps(n);
    for (std::size_t i = 0; i < n; ++i) amps[i] = {xs[2 * i], xs[2 * i + 1]};
    auto exact = detail::snap_state(d, amps);
    if (!exact) {
      throw Error(Errc::MalformedInput, "line " + std::to_string(line_no) + ": amplitudes have no exact form");
    }
    states.emplace_back(d, std::move(*exact));
  }
  if (states.size() != n) {
    throw Error(Errc::NonOrthonormalBasis, "expected " + std::to_string(n) + " states, read " +
                                               std::to_string(states.size()));
  }
  return ControlBasis(std::move(name), std::move(states));
}

inline ControlBasis load_control_basis(const std::string& path, PrimeDim d) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::MalformedInput, "cannot open " + path);
  return read_control_basis(in, d, path);
}

}  // namespace mkp
