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
 * @file measurement.hpp
 * @brief Projective measurements with Born-rule sampling.
 *
 * Probabilities come from the normalized complex mirror; post-measurement
 * states are built on the exact track.  A nonselective measurement is a
 * selective one whose outcome is marked hidden: by linearity every
 * statistic of later measurements is the same as for dephasing.
 */

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mkp/error.hpp"
#include "mkp/hilbert.hpp"
#include "mkp/numerics.hpp"

namespace mkp {

/// Probabilities below this are treated as exact zeros before sampling.
inline constexpr double kProbabilityFloor = 1e-12;

/// Deterministic random stream keyed by (master_seed, stream_index).
///
/// The engine and seed_seq algorithms are fixed by the standard, and the
/// conversion to doubles is done here, so draws are identical on every
/// conforming platform and independent of scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_seed_(master_seed), stream_index_(stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream_index), static_cast<std::uint32_t>(stream_index >> 32),
                      0x6d6b7031u};
    engine_.seed(seq);
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

/// An orthonormal basis of d^P states, checked once at construction.
template <int P>
class OrthonormalBasis {
 public:
  OrthonormalBasis(std::string name, std::vector<State<P>> states) : name_(std::move(name)), states_(std::move(states)) {
    if (states_.empty()) throw Error(Errc::NonOrthonormalBasis, name_ + ": empty basis");
    const PrimeDim d = states_.front().dim();
    if (states_.size() != states_.front().size()) {
      throw Error(Errc::NonOrthonormalBasis, name_ + ": incomplete basis");
    }
    const double tol = tolerance(d.value());
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (!(states_[i].dim() == d)) throw Error(Errc::DimensionMismatch, name_ + ": mixed dimensions");
      for (std::size_t j = i; j < states_.size(); ++j) {
        const double ov = std::abs(numeric_inner_product(states_[i], states_[j]));
        if (std::abs(ov - (i == j ? 1.0 : 0.0)) > tol) {
          throw Error(Errc::NonOrthonormalBasis, name_ + ": states " + std::to_string(i) + " and " +
                                                     std::to_string(j) + " overlap " + std::to_string(ov));
        }
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  PrimeDim dim() const { return states_.front().dim(); }
  std::size_t size() const noexcept { return states_.size(); }
  const State<P>& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<State<P>>& states() const noexcept { return states_; }

 private:
  std::string name_;
  std::vector<State<P>> states_;
};

using ControlBasis = OrthonormalBasis<2>;
using SingleBasis = OrthonormalBasis<1>;

inline SingleBasis king_basis(PrimeDim d, BasisLabel b) { return SingleBasis(b.to_string(), mub_basis(d, b)); }

inline ControlBasis minus_basis(PrimeDim d) { return ControlBasis("minus", entangled_basis(d, Family::Minus)); }
inline ControlBasis plus_basis(PrimeDim d) { return ControlBasis("plus", entangled_basis(d, Family::Plus)); }

inline ControlBasis computational_product_basis(PrimeDim d) {
  std::vector<Ket2> states;
  for (int a = 0; a < d.value(); ++a) {
    for (int b = 0; b < d.value(); ++b) states.push_back(product_state(d, Residue(a, d), Residue(b, d)));
  }
  return ControlBasis("product", std::move(states));
}

/// The d + 1 King bases with their labels.
struct KingBases {
  PrimeDim d;
  std::vector<BasisLabel> labels;
  std::vector<SingleBasis> bases;

  static KingBases all(PrimeDim d) {
    KingBases k{d, king_labels(d), {}};
    k.bases.reserve(k.labels.size());
    for (const auto& b : k.labels) k.bases.push_back(king_basis(d, b));
    return k;
  }

  std::size_t size() const noexcept { return labels.size(); }
  const SingleBasis& of(BasisLabel b) const { return bases.at(b.ordinal()); }
};

namespace detail {

inline std::vector<double> clamp_and_normalize(std::vector<double> p) {
  double total = 0.0;
  for (auto& x : p) {
    if (x < kProbabilityFloor) x = 0.0;
    total += x;
  }
  if (total <= 0.0) throw std::domain_error("Born distribution has no support");
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace detail

/// p_k = |<basis_k|state>|^2 over a validated basis.
template <int P>
std::vector<double> born_distribution(const State<P>& state, const OrthonormalBasis<P>& basis) {
  std::vector<double> p(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) p[k] = std::norm(numeric_inner_product(basis[k], state));
  return detail::clamp_and_normalize(std::move(p));
}

/// Same, validating the basis first (NonOrthonormalBasis).
template <int P>
std::vector<double> born_distribution(const State<P>& state, const std::vector<State<P>>& basis) {
  return born_distribution(state, OrthonormalBasis<P>("basis", basis));
}

/// Inverse-CDF sampling over outcomes in label order.
inline std::size_t sample_index(const std::vector<double>& probs, RngStream& rng) {
  const double r = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    acc += probs[k];
    last = k;
    if (r < acc) return k;
  }
  return last;
}

enum class Selectivity { Selective, Nonselective };

/// Particle-1 amplitude vector c_{n2} = sum_{n1} conj(phi_{n1}) psi_{n1 n2} (exact).
inline std::vector<PhaseSum> particle1_overlap(const Ket2& state, const Ket& phi) {
  const PrimeDim d = state.dim();
  if (!(phi.dim() == d)) throw Error(Errc::DimensionMismatch, "particle and state dimensions differ");
  const int dd = d.value();
  std::vector<PhaseSum> c(dd, PhaseSum(d));
  std::vector<PhaseSum> phi_conj;
  phi_conj.reserve(dd);
  for (int n = 0; n < dd; ++n) phi_conj.push_back(phi[n].conj());
  for (auto i : state.support()) {
    const auto n1 = static_cast<int>(i) / dd;
    const auto n2 = static_cast<int>(i) % dd;
    if (phi[n1].is_null()) continue;
    c[n2] += phi_conj[n1] * state[i];
  }
  return c;
}

/// (|phi><phi| (x) 1)|state> on the exact track.  Amplitudes may be all zero.
inline std::vector<PhaseSum> project_particle1(const Ket2& state, const Ket& phi) {
  const PrimeDim d = state.dim();
  const int dd = d.value();
  const auto c = particle1_overlap(state, phi);
  std::vector<PhaseSum> out(static_cast<std::size_t>(dd) * dd, PhaseSum(d));
  for (int n1 = 0; n1 < dd; ++n1) {
    if (phi[n1].is_null()) continue;
    for (int n2 = 0; n2 < dd; ++n2) {
      if (c[n2].is_null()) continue;
      out[n1 * dd + n2] = phi[n1] * c[n2];
    }
  }
  return out;
}

/// Born distribution of a particle-1 measurement.
inline std::vector<double> particle1_distribution(const Ket2& state, const SingleBasis& basis) {
  const int dd = state.dim().value();
  const auto& a = state.amplitudes();
  std::vector<double> p(basis.size(), 0.0);
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const auto& phi = basis[m].amplitudes();
    for (int n2 = 0; n2 < dd; ++n2) {
      std::complex<double> c{0.0, 0.0};
      for (int n1 = 0; n1 < dd; ++n1) c += std::conj(phi[n1]) * a[n1 * dd + n2];
      p[m] += std::norm(c);
    }
  }
  return detail::clamp_and_normalize(std::move(p));
}

/// Outcome of one projective measurement.
template <int P>
struct MeasurementRecord {
  std::variant<BasisLabel, std::string> basis;
  std::size_t outcome;  // m, or u * d + v for a joint measurement
  double probability;
  State<P> post_state;
  bool hidden = false;  // nonselective: the outcome must not feed any statistic
};

/// King-side measurement of particle 1 in a MUB.
inline MeasurementRecord<2> measure_particle1(const Ket2& state, const SingleBasis& basis, BasisLabel label,
                                              Selectivity mode, RngStream& rng) {
  const auto probs = particle1_distribution(state, basis);
  const std::size_t m = sample_index(probs, rng);
  Ket2 post(state.dim(), project_particle1(state, basis[m]));
  return {label, m, probs[m], std::move(post), mode == Selectivity::Nonselective};
}

inline MeasurementRecord<2> measure_particle1(const Ket2& state, BasisLabel label, Selectivity mode, RngStream& rng) {
  return measure_particle1(state, king_basis(state.dim(), label), label, mode, rng);
}

/// Alice-side measurement of both particles in a control basis.
inline MeasurementRecord<2> measure_joint(const Ket2& state, const ControlBasis& control, RngStream& rng) {
  const auto probs = born_distribution(state, control);
  const std::size_t k = sample_index(probs, rng);
  return {control.name(), k, probs[k], control[k], false};
}

/// Measurement of a single particle (Alice's final read-out in the alternative protocol).
inline MeasurementRecord<1> measure_single(const Ket& state, const SingleBasis& basis, BasisLabel label,
                                           RngStream& rng) {
  const auto probs = born_distribution(state, basis);
  const std::size_t m = sample_index(probs, rng);
  return {label, m, probs[m], basis[m], false};
}

}  // namespace mkp
