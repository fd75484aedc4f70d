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

// Dense floating-point reference model used only by the tests.  States are
// built from explicit matrices (X, Z, Kronecker products) with no code shared
// with the exact library track.

#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Vec = std::vector<cd>;

/// Row-major square matrix.
struct Mat {
  int n;
  std::vector<cd> a;
  explicit Mat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_) {}
  cd& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  cd operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

inline constexpr double kEps = 1e-9;

inline cd omega(int d, double k) { return std::polar(1.0, 2.0 * std::numbers::pi * k / d); }

inline Mat identity(int n) {
  Mat m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

inline Mat mul(const Mat& x, const Mat& y) {
  Mat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k)
      for (int j = 0; j < x.n; ++j) r(i, j) += x(i, k) * y(k, j);
  return r;
}

inline Mat power(const Mat& x, int p) {
  Mat r = identity(x.n);
  for (int i = 0; i < p; ++i) r = mul(r, x);
  return r;
}

/// X|n> = |n+1>.
inline Mat shift(int d) {
  Mat m(d);
  for (int n = 0; n < d; ++n) m((n + 1) % d, n) = 1.0;
  return m;
}

/// Z|n> = omega^n |n>.
inline Mat clock(int d) {
  Mat m(d);
  for (int n = 0; n < d; ++n) m(n, n) = omega(d, n);
  return m;
}

inline Vec act(const Mat& m, const Vec& v) {
  Vec r(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r[i] += m(i, j) * v[j];
  return r;
}

inline Vec ket(int d, int n) {
  Vec v(d);
  v[((n % d) + d) % d] = 1.0;
  return v;
}

inline cd dot(const Vec& a, const Vec& b) {
  cd s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm_sq(const Vec& a) { return std::real(dot(a, a)); }

inline Vec kron(const Vec& a, const Vec& b) {
  Vec r;
  r.reserve(a.size() * b.size());
  for (const cd& x : a)
    for (const cd& y : b) r.push_back(x * y);
  return r;
}

/// b = -1 is the computational basis.  Odd d: exponent b n(n-1)/2 - nm taken as a real number.
/// d = 2: b = 0 is the X eigenbasis, b = 1 the XZ eigenbasis.
inline Vec mub(int d, int b, int m) {
  if (b < 0) return ket(d, m);
  Vec v(d);
  if (d == 2) {
    const double s = m == 0 ? 1.0 : -1.0;
    v[0] = 1.0 / std::sqrt(2.0);
    v[1] = (b == 0 ? cd(s, 0.0) : cd(0.0, -s)) / std::sqrt(2.0);
    return v;
  }
  for (int n = 0; n < d; ++n) v[n] = omega(d, b * n * (n - 1) / 2.0 - double(n) * m) / std::sqrt(double(d));
  return v;
}

inline std::vector<Vec> mub_basis(int d, int b) {
  std::vector<Vec> out;
  for (int m = 0; m < d; ++m) out.push_back(mub(d, b, m));
  return out;
}

/// Minus family (odd d): d^-1/2 sum_n |n> (x) X^{2u} Z^{v} |-n>.
inline Vec minus_state(int d, int u, int v) {
  const Mat op = mul(power(shift(d), (2 * u) % d), power(clock(d), v));
  Vec s(static_cast<std::size_t>(d) * d);
  for (int n = 0; n < d; ++n) {
    const Vec t = kron(ket(d, n), act(op, ket(d, -n)));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += t[i] / std::sqrt(double(d));
  }
  return s;
}

/// Plus family: odd d uses X^{-2u} Z^{-v}, d = 2 uses X^{u} Z^{v}.
inline Vec plus_state(int d, int u, int v) {
  const int xp = d == 2 ? u : ((-2 * u) % d + d) % d;
  const int zp = d == 2 ? v : (d - v) % d;
  const Mat op = mul(power(shift(d), xp), power(clock(d), zp));
  Vec s(static_cast<std::size_t>(d) * d);
  for (int n = 0; n < d; ++n) {
    const Vec t = kron(ket(d, n), act(op, ket(d, n)));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += t[i] / std::sqrt(double(d));
  }
  return s;
}

inline std::vector<Vec> family(int d, bool minus) {
  std::vector<Vec> out;
  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v) out.push_back(minus ? minus_state(d, u, v) : plus_state(d, u, v));
  return out;
}

/// (|phi><phi| (x) 1) psi.
inline Vec project1(const Vec& psi, const Vec& phi) {
  const int d = static_cast<int>(phi.size());
  Vec r(psi.size());
  for (int n2 = 0; n2 < d; ++n2) {
    cd c = 0.0;
    for (int n1 = 0; n1 < d; ++n1) c += std::conj(phi[n1]) * psi[n1 * d + n2];
    for (int n1 = 0; n1 < d; ++n1) r[n1 * d + n2] = phi[n1] * c;
  }
  return r;
}

/// Labels: ordinal 0 is the computational basis, ordinal o > 0 is indexed basis o - 1.
inline int basis_of_ordinal(int o) { return o - 1; }

// ---------------------------------------------------------------------------
// Density matrices.

using Rho = std::vector<cd>;  // row-major, dimension D x D

inline Rho pure(const Vec& psi) {
  const std::size_t D = psi.size();
  Rho r(D * D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) r[i * D + j] = psi[i] * std::conj(psi[j]);
  return r;
}

/// sum_m (P_m (x) 1) rho (P_m (x) 1) for the particle-1 basis {phi_m}.
inline Rho dephase1(const Rho& rho, const std::vector<Vec>& basis) {
  const int d = static_cast<int>(basis.size());
  const int D = d * d;
  Rho out(static_cast<std::size_t>(D) * D);
  for (const Vec& phi : basis) {
    // Full projector P = |phi><phi| (x) 1 as a dense D x D matrix.
    std::vector<cd> P(static_cast<std::size_t>(D) * D);
    for (int a1 = 0; a1 < d; ++a1)
      for (int b1 = 0; b1 < d; ++b1)
        for (int n2 = 0; n2 < d; ++n2) P[(a1 * d + n2) * D + (b1 * d + n2)] = phi[a1] * std::conj(phi[b1]);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        cd s = 0.0;
        for (int k = 0; k < D; ++k) {
          if (P[i * D + k] == cd(0.0)) continue;
          for (int l = 0; l < D; ++l) s += P[i * D + k] * rho[k * D + l] * P[l * D + j];
        }
        out[i * D + j] += s;
      }
  }
  return out;
}

inline double expectation(const Rho& rho, const Vec& phi) {
  const std::size_t D = phi.size();
  cd s = 0.0;
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) s += std::conj(phi[i]) * rho[i * D + j] * phi[j];
  return std::real(s);
}

// ---------------------------------------------------------------------------
// Brute-force compatibility table.

using Key = std::pair<int, int>;                   // (k1, k2)
using Entry = std::set<std::pair<int, int>>;       // (basis ordinal, m)

/// (k1, k2) -> {(ordinal, m)} with a nonzero chain amplitude for some m2.
inline std::map<Key, Entry> compatibility(int d, const Vec& prep, const std::vector<Vec>& c1,
                                          const std::vector<Vec>& c2) {
  std::map<Key, Entry> table;
  for (int o = 0; o <= d; ++o) {
    const auto basis = mub_basis(d, basis_of_ordinal(o));
    for (int m = 0; m < d; ++m) {
      const Vec after_m = project1(prep, basis[m]);
      if (norm_sq(after_m) < kEps) continue;
      for (int k1 = 0; k1 < static_cast<int>(c1.size()); ++k1) {
        const cd a1 = dot(c1[k1], after_m);
        if (std::abs(a1) < kEps) continue;
        for (int m2 = 0; m2 < d; ++m2) {
          const Vec after_m2 = project1(c1[k1], basis[m2]);
          for (int k2 = 0; k2 < static_cast<int>(c2.size()); ++k2) {
            if (std::abs(a1 * dot(c2[k2], after_m2)) > kEps) table[{k1, k2}].insert({o, m});
          }
        }
      }
    }
  }
  return table;
}

/// Probability of the chain (m, k1, m2, k2) in the extended protocol.
inline double chain_probability(const Vec& prep, const Vec& phi_m, const Vec& c1, const Vec& phi_m2, const Vec& c2) {
  const cd a1 = dot(c1, project1(prep, phi_m));
  const cd a2 = dot(c2, project1(c1, phi_m2));
  return std::norm(a1 * a2);
}

}  // namespace oracle
