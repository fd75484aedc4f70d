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
 * @file numerics.hpp
 * @brief Modular arithmetic over a prime dimension and exact amplitudes.
 *
 * Amplitudes of every state in this library are integer combinations of
 * roots of unity times a power of 1/sqrt(d).  PhaseSum stores them exactly,
 * so that "is this transition amplitude zero?" never depends on a
 * floating-point tolerance.
 *
 * For odd prime d the expansion is over omega = e^{2 pi i/d}.  Because
 * 1 + omega + ... + omega^{d-1} = 0 is the only integer relation between the
 * powers, a sum is zero iff all d coefficients are equal.
 *
 * For d = 2 the expansion is over the fourth roots of unity (omega = -1 =
 * i^2), which keeps the qubit eigenbasis of XZ and the +-1, +-i control
 * bases exact.  There the zero test is c0 == c2 and c1 == c3.
 */

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mkp/error.hpp"

namespace mkp {

/// Floating tolerance for normalization and orthogonality checks: 1e-9 * d.
inline double tolerance(int d) { return 1e-9 * d; }

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t f = 3; f * f <= n; f += 2) {
    if (n % f == 0) return false;
  }
  return true;
}

/// Non-negative remainder.
constexpr std::int64_t mod(std::int64_t a, std::int64_t d) {
  const std::int64_t r = a % d;
  return r < 0 ? r + d : r;
}

class PrimeDim;
PrimeDim validate_dimension(std::int64_t n);

/// A validated prime dimension d.
class PrimeDim {
 public:
  static constexpr std::int64_t kMax = 1 << 20;

  int value() const noexcept { return d_; }
  bool qubit_mode() const noexcept { return d_ == 2; }

  /// Order of the root of unity exact amplitudes are expanded in.
  int phase_order() const noexcept { return d_ == 2 ? 4 : d_; }

  /// omega = zeta^omega_step, zeta being the phase_order-th root.
  int omega_step() const noexcept { return d_ == 2 ? 2 : 1; }

  friend bool operator==(PrimeDim, PrimeDim) = default;

 private:
  explicit PrimeDim(int d) : d_(d) {}
  friend PrimeDim validate_dimension(std::int64_t n);

  int d_;
};

inline PrimeDim validate_dimension(std::int64_t n) {
  if (n > PrimeDim::kMax) {
    throw Error(Errc::DimensionTooLarge, "dimension " + std::to_string(n) + " exceeds " +
                                             std::to_string(PrimeDim::kMax));
  }
  if (!is_prime(n)) {
    throw Error(Errc::CompositeDimension, "dimension " + std::to_string(n) + " is not prime");
  }
  return PrimeDim(static_cast<int>(n));
}

/// An element of Z/dZ, always held in [0, d).
class Residue {
 public:
  /// Rejects values outside [0, d).
  Residue(std::int64_t value, PrimeDim d) : value_(value), d_(d) {
    if (value < 0 || value >= d.value()) {
      throw Error(Errc::IndexOutOfRange,
                  std::to_string(value) + " not in [0, " + std::to_string(d.value()) + ")");
    }
  }

  /// Reduces any integer into [0, d).
  static Residue wrap(std::int64_t value, PrimeDim d) { return Residue(mod(value, d.value()), d); }

  std::int64_t value() const noexcept { return value_; }
  PrimeDim modulus() const noexcept { return d_; }

  friend Residue operator+(Residue a, Residue b) { return wrap(a.value_ + b.checked(a), a.d_); }
  friend Residue operator-(Residue a, Residue b) { return wrap(a.value_ - b.checked(a), a.d_); }
  friend Residue operator*(Residue a, Residue b) { return wrap(a.value_ * b.checked(a), a.d_); }
  friend Residue operator-(Residue a) { return wrap(-a.value_, a.d_); }
  friend bool operator==(Residue a, Residue b) { return a.value_ == b.value_ && a.d_ == b.d_; }

 private:
  std::int64_t checked(Residue other) const {
    if (!(d_ == other.d_)) throw Error(Errc::DimensionMismatch, "residues of different moduli");
    return value_;
  }

  std::int64_t value_;
  PrimeDim d_;
};

/// Multiplicative inverse modulo d by the extended Euclidean algorithm.
inline Residue inv_mod(Residue a) {
  if (a.value() == 0) throw Error(Errc::ZeroInverse, "0 has no inverse");
  std::int64_t r0 = a.modulus().value(), r1 = a.value();
  std::int64_t t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    r0 = std::exchange(r1, r0 - q * r1);
    t0 = std::exchange(t1, t0 - q * t1);
  }
  return Residue::wrap(t0, a.modulus());
}

inline Residue inv_mod(Residue a, PrimeDim d) {
  if (!(a.modulus() == d)) throw Error(Errc::DimensionMismatch, "residue modulus differs from d");
  return inv_mod(a);
}

namespace detail {

inline const std::vector<std::complex<double>>& unit_roots(int order) {
  thread_local std::unordered_map<int, std::vector<std::complex<double>>> cache;
  auto it = cache.find(order);
  if (it == cache.end()) {
    std::vector<std::complex<double>> roots(order);
    for (int j = 0; j < order; ++j) {
      roots[j] = std::polar(1.0, 2.0 * std::numbers::pi * j / order);
    }
    // Exact values where the grid hits the axes.
    roots[0] = {1.0, 0.0};
    if (order % 2 == 0) roots[order / 2] = {-1.0, 0.0};
    if (order % 4 == 0) {
      roots[order / 4] = {0.0, 1.0};
      roots[3 * order / 4] = {0.0, -1.0};
    }
    it = cache.emplace(order, std::move(roots)).first;
  }
  return it->second;
}

inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > INT64_MAX / base) throw std::overflow_error("ipow overflow");
    r *= base;
  }
  return r;
}

}  // namespace detail

/**
 * Exact amplitude  sum_j coeffs[j] * zeta^j * d^(-scale_halves/2),
 * zeta = e^{2 pi i / phase_order}.
 *
 * Sums of values whose scales differ by an odd number of halves are not
 * representable without sqrt(d) and are rejected; every amplitude built by
 * this library carries matching parities.
 */
class PhaseSum {
 public:
  explicit PhaseSum(PrimeDim d) : d_(d), coeffs_(d.phase_order(), 0), scale_halves_(0) {}

  PhaseSum(PrimeDim d, std::vector<std::int64_t> coeffs, int scale_halves)
      : d_(d), coeffs_(std::move(coeffs)), scale_halves_(scale_halves) {
    if (static_cast<int>(coeffs_.size()) != d.phase_order()) {
      throw Error(Errc::DimensionMismatch, "PhaseSum needs " + std::to_string(d.phase_order()) +
                                               " coefficients");
    }
  }

  /// coeff * zeta^k * d^(-scale_halves/2), zeta the phase_order-th root.
  static PhaseSum root(PrimeDim d, std::int64_t k, std::int64_t coeff = 1, int scale_halves = 0) {
    PhaseSum p(d);
    p.coeffs_[mod(k, d.phase_order())] = coeff;
    p.scale_halves_ = scale_halves;
    return p;
  }

  PrimeDim dim() const noexcept { return d_; }
  int order() const noexcept { return static_cast<int>(coeffs_.size()); }
  std::span<const std::int64_t> coeffs() const noexcept { return coeffs_; }
  int scale_halves() const noexcept { return scale_halves_; }

  /// All coefficients literally zero (a sufficient, not necessary, zero test).
  bool is_null() const noexcept {
    for (auto c : coeffs_) {
      if (c != 0) return false;
    }
    return true;
  }

  /// Exact zero test.
  bool is_zero() const noexcept {
    if (order() == 4) return coeffs_[0] == coeffs_[2] && coeffs_[1] == coeffs_[3];
    for (auto c : coeffs_) {
      if (c != coeffs_[0]) return false;
    }
    return true;
  }

  /// Complex conjugate: zeta^j -> zeta^-j.
  PhaseSum conj() const {
    PhaseSum r(d_);
    r.scale_halves_ = scale_halves_;
    const int n = order();
    for (int j = 0; j < n; ++j) r.coeffs_[(n - j) % n] = coeffs_[j];
    return r;
  }

  /// this * zeta^k (a cyclic shift of the coefficients).
  PhaseSum times_root(std::int64_t k) const {
    PhaseSum r(d_);
    r.scale_halves_ = scale_halves_;
    const int n = order();
    const auto s = static_cast<int>(mod(k, n));
    for (int j = 0; j < n; ++j) r.coeffs_[(j + s) % n] = coeffs_[j];
    return r;
  }

  /// Same value expressed at a larger scale.
  PhaseSum rescaled(int scale_halves) const {
    if (scale_halves == scale_halves_) return *this;
    if (is_zero()) {
      PhaseSum z(d_);
      z.scale_halves_ = scale_halves;
      return z;
    }
    const int diff = scale_halves - scale_halves_;
    if (diff < 0 || diff % 2 != 0) {
      throw std::domain_error("PhaseSum: cannot rescale by " + std::to_string(diff) + " halves");
    }
    const std::int64_t f = detail::ipow(d_.value(), diff / 2);
    PhaseSum r(*this);
    for (auto& c : r.coeffs_) c *= f;
    r.scale_halves_ = scale_halves;
    return r;
  }

  PhaseSum& operator+=(const PhaseSum& o) { return accumulate(o, 1); }
  PhaseSum& operator-=(const PhaseSum& o) { return accumulate(o, -1); }

  friend PhaseSum operator+(PhaseSum a, const PhaseSum& b) { return a += b; }
  friend PhaseSum operator-(PhaseSum a, const PhaseSum& b) { return a -= b; }

  friend PhaseSum operator*(const PhaseSum& a, const PhaseSum& b) {
    a.check_dim(b);
    PhaseSum r(a.d_);
    r.scale_halves_ = a.scale_halves_ + b.scale_halves_;
    const int n = a.order();
    for (int i = 0; i < n; ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (b.coeffs_[j] == 0) continue;
        const int k = i + j < n ? i + j : i + j - n;
        r.coeffs_[k] += a.coeffs_[i] * b.coeffs_[j];
      }
    }
    return r;
  }

  friend bool operator==(const PhaseSum& a, const PhaseSum& b) { return (a - b).is_zero(); }

  std::complex<double> to_complex() const {
    const auto& roots = detail::unit_roots(order());
    std::complex<double> s{0.0, 0.0};
    for (int j = 0; j < order(); ++j) {
      if (coeffs_[j] != 0) s += static_cast<double>(coeffs_[j]) * roots[j];
    }
    if (scale_halves_ != 0) s *= std::pow(static_cast<double>(d_.value()), -0.5 * scale_halves_);
    return s;
  }

 private:
  void check_dim(const PhaseSum& o) const {
    if (!(d_ == o.d_)) throw Error(Errc::DimensionMismatch, "PhaseSum dimensions differ");
  }

  PhaseSum& accumulate(const PhaseSum& o, std::int64_t sign) {
    check_dim(o);
    if (o.is_zero()) return *this;
    if (is_zero()) {
      *this = o;
      if (sign < 0) {
        for (auto& c : coeffs_) c = -c;
      }
      return *this;
    }
    const int target = std::max(scale_halves_, o.scale_halves_);
    if (target != scale_halves_) *this = rescaled(target);
    const PhaseSum& rhs = o.scale_halves_ == target ? o : o.rescaled(target);
    for (std::size_t j = 0; j < coeffs_.size(); ++j) coeffs_[j] += sign * rhs.coeffs_[j];
    return *this;
  }

  PrimeDim d_;
  std::vector<std::int64_t> coeffs_;
  int scale_halves_;
};

/// omega^k with omega = e^{2 pi i/d}.
inline PhaseSum phase(PrimeDim d, std::int64_t k) {
  return PhaseSum::root(d, mod(k, d.value()) * d.omega_step());
}

inline std::complex<double> to_complex(const PhaseSum& p) { return p.to_complex(); }

/// Non-negative rational num / base^den_pow kept in lowest terms.
class PowerRational {
 public:
  PowerRational() = default;

  PowerRational(int base, std::int64_t num, int den_pow) : base_(base), num_(num), den_pow_(den_pow) {
    if (base < 2 || den_pow < 0) throw std::domain_error("PowerRational: bad base or power");
    normalize();
  }

  int base() const noexcept { return base_; }
  std::int64_t num() const noexcept { return num_; }
  int den_pow() const noexcept { return den_pow_; }
  bool is_zero() const noexcept { return num_ == 0; }

  double to_double() const {
    return static_cast<double>(num_) * std::pow(static_cast<double>(base_), -den_pow_);
  }

  friend PowerRational operator+(const PowerRational& a, const PowerRational& b) {
    if (a.num_ == 0) return b;
    if (b.num_ == 0) return a;
    a.check_base(b);
    const int p = std::max(a.den_pow_, b.den_pow_);
    const __int128 na = static_cast<__int128>(a.num_) * detail::ipow(a.base_, p - a.den_pow_);
    const __int128 nb = static_cast<__int128>(b.num_) * detail::ipow(a.base_, p - b.den_pow_);
    return PowerRational(a.base_, narrow(na + nb), p);
  }

  friend PowerRational operator*(const PowerRational& a, const PowerRational& b) {
    if (a.num_ == 0 || b.num_ == 0) return {};
    a.check_base(b);
    const __int128 n = static_cast<__int128>(a.num_) * b.num_;
    return PowerRational(a.base_, narrow(n), a.den_pow_ + b.den_pow_);
  }

  PowerRational& operator+=(const PowerRational& o) { return *this = *this + o; }

  /// Value equality (zero compares equal whatever the base).
  friend bool operator==(const PowerRational& a, const PowerRational& b) {
    if (a.num_ == 0 || b.num_ == 0) return a.num_ == b.num_;
    return a.base_ == b.base_ && a.num_ == b.num_ && a.den_pow_ == b.den_pow_;
  }

 private:
  static std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("PowerRational overflow");
    return static_cast<std::int64_t>(v);
  }

  void check_base(const PowerRational& o) const {
    if (base_ != o.base_) throw std::domain_error("PowerRational: mixed bases");
  }

  void normalize() {
    if (num_ == 0) {
      den_pow_ = 0;
      return;
    }
    while (den_pow_ > 0 && num_ % base_ == 0) {
      num_ /= base_;
      --den_pow_;
    }
  }

  int base_ = 2;
  std::int64_t num_ = 0;
  int den_pow_ = 0;
};

/**
 * |p|^2 as an exact rational with a power-of-d denominator.
 *
 * The magnitude is evaluated numerically, snapped to the nearest multiple of
 * d^-k (tolerance 1e-6) and then confirmed exactly: p * conj(p) minus the
 * snapped integer must be the zero PhaseSum.  Throws std::domain_error if the
 * squared magnitude is not rational.
 */
inline PowerRational squared_magnitude(const PhaseSum& p) {
  const PhaseSum q = p * p.conj();
  const int k = q.scale_halves();  // even by construction
  const PhaseSum unscaled(q.dim(), std::vector<std::int64_t>(q.coeffs().begin(), q.coeffs().end()), 0);
  const std::complex<double> z = unscaled.to_complex();
  const double snapped = std::nearbyint(z.real());
  if (std::abs(z.real() - snapped) > 1e-6 || std::abs(z.imag()) > 1e-6) {
    throw std::domain_error("squared magnitude is not an integer multiple of d^-k");
  }
  const auto n = static_cast<std::int64_t>(snapped);
  if (!(unscaled - PhaseSum::root(q.dim(), 0, n)).is_zero()) {
    throw std::domain_error("squared magnitude failed exact confirmation");
  }
  return PowerRational(q.dim().value(), n, k / 2);
}

}  // namespace mkp
