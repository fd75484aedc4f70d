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
 * @file hilbert.hpp
 * @brief State vectors, Weyl-Schwinger operators, MUB and the entangled
 *        control bases.
 *
 * Conventions:
 *  - Z|n> = omega^n |n>,  X|n> = |n+1>,  labels taken mod d.
 *  - X^a Z^c acts right to left: Z^c first, so X^a Z^c |n> = omega^{cn} |n+a>.
 *  - For odd d, basis b of the d indexed MUB has states
 *      |m;b> = d^-1/2 sum_n omega^{b n(n-1)/2 - n m} |n>,
 *    the eigenbasis of X Z^b with eigenvalue omega^m.
 *  - For d = 2 the indexed bases 0 and 1 are the eigenbases of X and XZ.
 *    |m;0> = (|0> + (-1)^m |1>)/sqrt2 has X-eigenvalue (-1)^m and
 *    |m;1> = (|0> - i(-1)^m |1>)/sqrt2 has XZ-eigenvalue i(-1)^m.
 *  - Two-particle amplitudes are indexed n1 * d + n2.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mkp/error.hpp"
#include "mkp/numerics.hpp"

namespace mkp {

/// A King measurement basis: the computational basis or indexed basis b.
class BasisLabel {
 public:
  static BasisLabel computational() { return BasisLabel(); }
  static BasisLabel indexed(Residue b) { return BasisLabel(static_cast<int>(b.value())); }

  bool is_computational() const noexcept { return !index_.has_value(); }
  /// Only meaningful for indexed labels.
  int index() const { return index_.value(); }

  /// 0 for the computational basis, b + 1 for indexed basis b.
  int ordinal() const noexcept { return index_ ? *index_ + 1 : 0; }

  static BasisLabel from_ordinal(int ordinal, PrimeDim d) {
    if (ordinal == 0) return computational();
    return indexed(Residue(ordinal - 1, d));
  }

  std::string to_string() const { return index_ ? std::to_string(*index_) : "ddot0"; }

  /// Accepts "ddot0" (or "c", "z") for the computational basis and 0..d-1.
  static BasisLabel parse(const std::string& text, PrimeDim d) {
    if (text == "ddot0" || text == "c" || text == "z" || text == "Z") return computational();
    std::size_t used = 0;
    long long b = 0;
    try {
      b = std::stoll(text, &used);
    } catch (const std::exception&) {
      throw Error(Errc::MalformedInput, "bad basis label '" + text + "'");
    }
    if (used != text.size()) throw Error(Errc::MalformedInput, "bad basis label '" + text + "'");
    return indexed(Residue(b, d));
  }

  friend auto operator<=>(const BasisLabel&, const BasisLabel&) = default;
  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;

 private:
  BasisLabel() = default;
  explicit BasisLabel(int b) : index_(b) {}

  std::optional<int> index_;
};

/// All d + 1 King bases in ordinal order: computational, 0, ..., d-1.
inline std::vector<BasisLabel> king_labels(PrimeDim d) {
  std::vector<BasisLabel> labels;
  labels.reserve(d.value() + 1);
  for (int o = 0; o <= d.value(); ++o) labels.push_back(BasisLabel::from_ordinal(o, d));
  return labels;
}

/**
 * Pure state of `Particles` qudits.
 *
 * The exact track determines the ray; it is normalized for every state the
 * constructors below produce, but a post-measurement state may carry an
 * unnormalized projection.  The complex mirror is always normalized.
 */
template <int Particles>
class State {
  static_assert(Particles == 1 || Particles == 2);

 public:
  State(PrimeDim d, std::vector<PhaseSum> amps) : d_(d), exact_(std::move(amps)) {
    std::size_t n = 1;
    for (int p = 0; p < Particles; ++p) n *= static_cast<std::size_t>(d.value());
    if (exact_.size() != n) {
      throw Error(Errc::DimensionMismatch,
                  "state needs " + std::to_string(n) + " amplitudes, got " + std::to_string(exact_.size()));
    }
    mirror_.resize(n);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(exact_[i].dim() == d)) throw Error(Errc::DimensionMismatch, "amplitude of another dimension");
      if (exact_[i].is_null()) continue;
      support_.push_back(i);
      mirror_[i] = exact_[i].to_complex();
      norm2 += std::norm(mirror_[i]);
    }
    if (norm2 <= 0.0) throw std::domain_error("State: zero vector");
    norm_sq_ = norm2;
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto i : support_) mirror_[i] *= inv;
  }

  PrimeDim dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return exact_.size(); }

  const std::vector<PhaseSum>& exact() const noexcept { return exact_; }
  const PhaseSum& operator[](std::size_t i) const { return exact_[i]; }

  /// Normalized complex amplitudes.
  const std::vector<std::complex<double>>& amplitudes() const noexcept { return mirror_; }

  /// Indices whose exact amplitude has a nonzero coefficient.
  std::span<const std::size_t> support() const noexcept { return support_; }

  /// Squared norm of the exact track, evaluated numerically.
  double exact_norm_sq() const noexcept { return norm_sq_; }

 private:
  PrimeDim d_;
  std::vector<PhaseSum> exact_;
  std::vector<std::complex<double>> mirror_;
  std::vector<std::size_t> support_;
  double norm_sq_ = 0.0;
};

using Ket = State<1>;
using Ket2 = State<2>;

/// Exact <a|b> on the exact tracks.
template <int P>
PhaseSum inner_product(const State<P>& a, const State<P>& b) {
  if (!(a.dim() == b.dim()) || a.size() != b.size()) {
    throw Error(Errc::DimensionMismatch, "inner product of states of different dimension");
  }
  PhaseSum acc(a.dim());
  const auto& sa = a.support();
  const auto& sb = b.support();
  const bool iterate_a = sa.size() <= sb.size();
  for (auto i : iterate_a ? sa : sb) {
    if (b[i].is_null() || a[i].is_null()) continue;
    acc += a[i].conj() * b[i];
  }
  return acc;
}

/// <a|b> on the normalized mirrors.
template <int P>
std::complex<double> numeric_inner_product(const State<P>& a, const State<P>& b) {
  if (!(a.dim() == b.dim()) || a.size() != b.size()) {
    throw Error(Errc::DimensionMismatch, "inner product of states of different dimension");
  }
  std::complex<double> s{0.0, 0.0};
  const auto& x = a.amplitudes();
  const auto& y = b.amplitudes();
  for (auto i : a.support()) s += std::conj(x[i]) * y[i];
  return s;
}

/// X^x_pow Z^z_pow times omega^global_phase_exponent.
struct WeylOp {
  Residue x_pow;
  Residue z_pow;
  std::int64_t global_phase_exponent = 0;

  static WeylOp make(PrimeDim d, std::int64_t x, std::int64_t z, std::int64_t global_phase = 0) {
    return WeylOp{Residue::wrap(x, d), Residue::wrap(z, d), global_phase};
  }
};

/// Image of |n>: X^a Z^c |n> = omega^{cn + g} |n + a>.  Returns (omega exponent, index).
inline std::pair<std::int64_t, std::int64_t> weyl_action(const WeylOp& op, std::int64_t n) {
  const std::int64_t d = op.x_pow.modulus().value();
  return {mod(op.z_pow.value() * n + op.global_phase_exponent, d), mod(n + op.x_pow.value(), d)};
}

inline Ket apply_weyl(const WeylOp& op, const Ket& s) {
  const PrimeDim d = s.dim();
  if (!(op.x_pow.modulus() == d) || !(op.z_pow.modulus() == d)) {
    throw Error(Errc::DimensionMismatch, "operator and state dimensions differ");
  }
  std::vector<PhaseSum> out(d.value(), PhaseSum(d));
  for (int n = 0; n < d.value(); ++n) {
    const auto [e, k] = weyl_action(op, n);
    out[k] = s[n].times_root(e * d.omega_step());
  }
  return Ket(d, std::move(out));
}

inline Ket computational_state(PrimeDim d, Residue n) {
  if (!(n.modulus() == d)) throw Error(Errc::DimensionMismatch, "label of another dimension");
  std::vector<PhaseSum> amps(d.value(), PhaseSum(d));
  amps[n.value()] = PhaseSum::root(d, 0);
  return Ket(d, std::move(amps));
}

/// |m;b> for odd d (any label) or the computational basis for any d.
inline Ket mub_state(PrimeDim d, BasisLabel b, Residue m) {
  if (b.is_computational()) return computational_state(d, m);
  if (d.qubit_mode()) {
    throw Error(Errc::QubitModeUnsupported, "indexed bases for d = 2 come from qubit_mub_state");
  }
  const std::int64_t dd = d.value();
  std::vector<PhaseSum> amps;
  amps.reserve(dd);
  for (std::int64_t n = 0; n < dd; ++n) {
    // n(n-1) is even, so the halving is exact before reduction.
    const std::int64_t e = mod(b.index() * mod(n * (n - 1) / 2, dd) - n * m.value(), dd);
    amps.push_back(PhaseSum::root(d, e, 1, 1));
  }
  return Ket(d, std::move(amps));
}

/// Qubit MUB: eigenbases of Z (computational), X (0) and XZ (1).
inline Ket qubit_mub_state(BasisLabel b, Residue m) {
  const PrimeDim d = m.modulus();
  if (!d.qubit_mode()) throw Error(Errc::DimensionMismatch, "qubit_mub_state needs d = 2");
  if (b.is_computational()) return computational_state(d, m);
  // Exponents in units of i.
  const std::int64_t second = b.index() == 0 ? 2 * m.value() : 3 + 2 * m.value();
  return Ket(d, {PhaseSum::root(d, 0, 1, 1), PhaseSum::root(d, second, 1, 1)});
}

/// |m;b> for any prime d.
inline Ket basis_state(PrimeDim d, BasisLabel b, Residue m) {
  return d.qubit_mode() ? qubit_mub_state(b, m) : mub_state(d, b, m);
}

inline std::vector<Ket> mub_basis(PrimeDim d, BasisLabel b) {
  std::vector<Ket> states;
  states.reserve(d.value());
  for (int m = 0; m < d.value(); ++m) states.push_back(basis_state(d, b, Residue(m, d)));
  return states;
}

/// The operator whose eigenbasis is basis b: Z for the computational basis, X Z^b otherwise.
inline WeylOp eigen_operator(PrimeDim d, BasisLabel b) {
  return b.is_computational() ? WeylOp::make(d, 0, 1) : WeylOp::make(d, 1, b.index());
}

/// Eigenvalue of eigen_operator(d, b) on |m;b>: omega^m, times i for the qubit XZ basis.
inline PhaseSum eigenvalue(PrimeDim d, BasisLabel b, Residue m) {
  const PhaseSum w = phase(d, m.value());
  if (d.qubit_mode() && !b.is_computational() && b.index() == 1) return w.times_root(1);
  return w;
}

/// Exact check of eigen_operator(b) s == eigenvalue(b, m) s.
inline bool eigenrelation_holds(const Ket& s, BasisLabel b, Residue m) {
  const PrimeDim d = s.dim();
  const Ket image = apply_weyl(eigen_operator(d, b), s);
  const PhaseSum lambda = eigenvalue(d, b, m);
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (!(image[n] == lambda * s[n])) return false;
  }
  return true;
}

inline bool verify_eigenrelation(PrimeDim d, BasisLabel b) {
  for (int m = 0; m < d.value(); ++m) {
    const Residue r(m, d);
    if (!eigenrelation_holds(basis_state(d, b, r), b, r)) return false;
  }
  return true;
}

/// Largest deviation of |<m;b1|m';b2>| from delta (same basis) or 1/sqrt(d).
inline double unbiasedness_error(PrimeDim d, BasisLabel b1, BasisLabel b2) {
  const auto s1 = mub_basis(d, b1);
  const auto s2 = mub_basis(d, b2);
  const double cross = 1.0 / std::sqrt(static_cast<double>(d.value()));
  double worst = 0.0;
  for (int m = 0; m < d.value(); ++m) {
    for (int mp = 0; mp < d.value(); ++mp) {
      const double overlap = std::abs(numeric_inner_product(s1[m], s2[mp]));
      const double expected = b1 == b2 ? (m == mp ? 1.0 : 0.0) : cross;
      worst = std::max(worst, std::abs(overlap - expected));
    }
  }
  return worst;
}

inline bool verify_unbiased(PrimeDim d, BasisLabel b1, BasisLabel b2) {
  return unbiasedness_error(d, b1, b2) < tolerance(d.value());
}

/// Labels (u, v) of an entangled-basis state; index u * d + v.
struct LabelPair {
  int u = 0;
  int v = 0;

  std::size_t index(PrimeDim d) const { return static_cast<std::size_t>(u) * d.value() + v; }

  static LabelPair from_index(std::size_t k, PrimeDim d) {
    return {static_cast<int>(k / d.value()), static_cast<int>(k % d.value())};
  }

  static LabelPair checked(std::int64_t u, std::int64_t v, PrimeDim d) {
    return {static_cast<int>(Residue(u, d).value()), static_cast<int>(Residue(v, d).value())};
  }

  friend auto operator<=>(const LabelPair&, const LabelPair&) = default;
};

enum class Family { Minus, Plus };

inline std::string to_string(Family f) { return f == Family::Minus ? "minus" : "plus"; }

/// d^-1/2 sum_n |n>_1 X^{2u} Z^{v} |-n>_2, odd d only.
inline Ket2 entangled_minus(PrimeDim d, Residue u, Residue v) {
  if (d.qubit_mode()) throw Error(Errc::QubitModeUnsupported, "the minus basis is defined for odd d");
  const std::int64_t dd = d.value();
  const WeylOp op = WeylOp::make(d, 2 * u.value(), v.value());
  std::vector<PhaseSum> amps(dd * dd, PhaseSum(d));
  for (std::int64_t n = 0; n < dd; ++n) {
    const auto [e, k] = weyl_action(op, mod(-n, dd));
    amps[n * dd + k] = PhaseSum::root(d, e, 1, 1);
  }
  return Ket2(d, std::move(amps));
}

/// Odd d: d^-1/2 sum_n |n>_1 X^{-2u} Z^{-v} |n>_2.
/// d = 2:  2^-1/2 sum_n |n>_1 X^{u} Z^{v} |n>_2.
inline Ket2 entangled_plus(PrimeDim d, Residue u, Residue v) {
  const std::int64_t dd = d.value();
  const WeylOp op = d.qubit_mode() ? WeylOp::make(d, u.value(), v.value())
                                   : WeylOp::make(d, -2 * u.value(), -v.value());
  std::vector<PhaseSum> amps(dd * dd, PhaseSum(d));
  for (std::int64_t n = 0; n < dd; ++n) {
    const auto [e, k] = weyl_action(op, n);
    amps[n * dd + k] = PhaseSum::root(d, e * d.omega_step(), 1, 1);
  }
  return Ket2(d, std::move(amps));
}

/// All d^2 states of a family, index u * d + v.
inline std::vector<Ket2> entangled_basis(PrimeDim d, Family family) {
  std::vector<Ket2> states;
  states.reserve(static_cast<std::size_t>(d.value()) * d.value());
  for (int u = 0; u < d.value(); ++u) {
    for (int v = 0; v < d.value(); ++v) {
      const Residue ru(u, d), rv(v, d);
      states.push_back(family == Family::Minus ? entangled_minus(d, ru, rv) : entangled_plus(d, ru, rv));
    }
  }
  return states;
}

/// |n1>|n2>.
inline Ket2 product_state(PrimeDim d, Residue n1, Residue n2) {
  std::vector<PhaseSum> amps(static_cast<std::size_t>(d.value()) * d.value(), PhaseSum(d));
  amps[n1.value() * d.value() + n2.value()] = PhaseSum::root(d, 0);
  return Ket2(d, std::move(amps));
}

/// Exact Gram matrix test: <i|j> == delta_ij for every pair.
template <int P>
bool exact_gram_identity(std::span<const State<P>> states) {
  if (states.empty()) return true;
  const PhaseSum one = PhaseSum::root(states.front().dim(), 0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i; j < states.size(); ++j) {
      const PhaseSum ip = inner_product(states[i], states[j]);
      if (i == j ? !(ip == one) : !ip.is_zero()) return false;
    }
  }
  return true;
}

/// Computational-basis marginal distributions of particle 1 and particle 2.
inline std::pair<std::vector<double>, std::vector<double>> particle_marginals(const Ket2& s) {
  const int d = s.dim().value();
  std::vector<double> p1(d, 0.0), p2(d, 0.0);
  const auto& a = s.amplitudes();
  for (auto i : s.support()) {
    const double w = std::norm(a[i]);
    p1[i / d] += w;
    p2[i % d] += w;
  }
  return {p1, p2};
}

}  // namespace mkp
