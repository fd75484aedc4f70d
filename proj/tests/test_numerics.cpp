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

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mkp/numerics.hpp"
#include "test_util.hpp"

namespace {

using mkp::Errc;
using mkp::PhaseSum;
using mkp::PowerRational;
using mkp::PrimeDim;
using mkp::Residue;
using mkp::validate_dimension;

const int kSmallPrimes[] = {2, 3, 5, 7, 11, 13};

TEST(ValidateDimension, AcceptsPrimes) {
  const PrimeDim d3 = validate_dimension(3);
  EXPECT_EQ(d3.value(), 3);
  EXPECT_FALSE(d3.qubit_mode());
  const PrimeDim d2 = validate_dimension(2);
  EXPECT_EQ(d2.value(), 2);
  EXPECT_TRUE(d2.qubit_mode());
}

TEST(ValidateDimension, RejectsCompositesAndTiny) {
  EXPECT_ERRC(validate_dimension(4), Errc::CompositeDimension);
  EXPECT_ERRC(validate_dimension(9), Errc::CompositeDimension);
  EXPECT_ERRC(validate_dimension(1), Errc::CompositeDimension);
  EXPECT_ERRC(validate_dimension(0), Errc::CompositeDimension);
}

TEST(ValidateDimension, RejectsHugePrimes) {
  EXPECT_ERRC(validate_dimension(2147483647), Errc::DimensionTooLarge);
}

TEST(ValidateDimension, PrimalityAgreesWithTrialDivisionUpTo500) {
  for (int n = 2; n <= 500; ++n) {
    bool prime = true;
    for (int f = 2; f < n; ++f) prime = prime && n % f != 0;
    EXPECT_EQ(mkp::is_prime(n), prime) << n;
  }
}

TEST(Residue, RangeIsChecked) {
  const PrimeDim d = validate_dimension(3);
  EXPECT_ERRC(Residue(5, d), Errc::IndexOutOfRange);
  EXPECT_ERRC(Residue(-1, d), Errc::IndexOutOfRange);
  EXPECT_EQ(Residue::wrap(-1, d).value(), 2);
  EXPECT_EQ(Residue::wrap(7, d).value(), 1);
}

TEST(Residue, MixedModuliAreRejected) {
  const PrimeDim d3 = validate_dimension(3), d5 = validate_dimension(5);
  EXPECT_ERRC(Residue(1, d3) + Residue(1, d5), Errc::DimensionMismatch);
}

TEST(InvMod, Examples) {
  const PrimeDim d3 = validate_dimension(3), d7 = validate_dimension(7), d5 = validate_dimension(5);
  EXPECT_EQ(mkp::inv_mod(Residue(2, d3)).value(), 2);
  EXPECT_EQ(mkp::inv_mod(Residue(1, d7)).value(), 1);
  EXPECT_ERRC(mkp::inv_mod(Residue(0, d5)), Errc::ZeroInverse);
}

TEST(InvMod, IsAnInverseForAllPrimesUpTo97) {
  for (int n = 2; n <= 97; ++n) {
    if (!mkp::is_prime(n)) continue;
    const PrimeDim d = validate_dimension(n);
    for (int a = 1; a < n; ++a) {
      const Residue x = mkp::inv_mod(Residue(a, d));
      EXPECT_EQ((static_cast<long long>(a) * x.value()) % n, 1) << "a=" << a << " d=" << n;
    }
  }
}

TEST(Phase, Examples) {
  const PrimeDim d3 = validate_dimension(3), d5 = validate_dimension(5);
  const auto c0 = mkp::phase(d3, 0).coeffs();
  EXPECT_EQ(std::vector<std::int64_t>(c0.begin(), c0.end()), (std::vector<std::int64_t>{1, 0, 0}));
  const auto c4 = mkp::phase(d3, 4).coeffs();
  EXPECT_EQ(std::vector<std::int64_t>(c4.begin(), c4.end()), (std::vector<std::int64_t>{0, 1, 0}));
  const auto cm = mkp::phase(d5, -1).coeffs();
  EXPECT_EQ(std::vector<std::int64_t>(cm.begin(), cm.end()), (std::vector<std::int64_t>{0, 0, 0, 0, 1}));
  EXPECT_EQ(mkp::phase(d3, 0).scale_halves(), 0);
}

TEST(Phase, MultiplicationAddsExponents) {
  for (int n : kSmallPrimes) {
    const PrimeDim d = validate_dimension(n);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) EXPECT_TRUE(mkp::phase(d, j) * mkp::phase(d, k) == mkp::phase(d, j + k));
    }
  }
}

TEST(Phase, QubitOmegaIsMinusOne) {
  const PrimeDim d = validate_dimension(2);
  const auto z = mkp::phase(d, 1).to_complex();
  EXPECT_NEAR(z.real(), -1.0, 1e-15);
  EXPECT_NEAR(z.imag(), 0.0, 1e-15);
}

TEST(PhaseSum, ToComplexExamples) {
  const PrimeDim d3 = validate_dimension(3), d5 = validate_dimension(5);
  const PhaseSum all_ones(d3, {1, 1, 1}, 0);
  EXPECT_TRUE(all_ones.is_zero());
  EXPECT_LT(std::abs(all_ones.to_complex()), 1e-12);
  const auto one = mkp::phase(d5, 0).to_complex();
  EXPECT_NEAR(one.real(), 1.0, 1e-15);
  EXPECT_NEAR(one.imag(), 0.0, 1e-15);
}

TEST(PhaseSum, ScaleIsAPowerOfRootD) {
  const PrimeDim d = validate_dimension(5);
  const PhaseSum p(d, {2, 0, 0, 0, 0}, 3);
  EXPECT_NEAR(p.to_complex().real(), 2.0 * std::pow(5.0, -1.5), 1e-15);
}

// The exact zero test must agree with the numeric value for arbitrary coefficients.
TEST(PhaseSum, ExactZeroLawMatchesNumerics) {
  std::mt19937_64 rng(20261018);
  std::uniform_int_distribution<int> coeff(-5, 5);
  for (int n : kSmallPrimes) {
    const PrimeDim d = validate_dimension(n);
    for (int trial = 0; trial < 4000; ++trial) {
      std::vector<std::int64_t> c(d.phase_order());
      for (auto& x : c) x = coeff(rng);
      // Plant zeros regularly so both outcomes are exercised.
      if (trial % 3 == 0) {
        const std::int64_t k = coeff(rng);
        if (n == 2) {
          c[2] = c[0];
          c[3] = c[1];
        } else {
          std::fill(c.begin(), c.end(), k);
        }
      }
      const PhaseSum p(d, c, 0);
      std::complex<double> z = 0.0;
      for (int j = 0; j < d.phase_order(); ++j) {
        z += static_cast<double>(c[j]) * std::polar(1.0, 2.0 * std::numbers::pi * j / d.phase_order());
      }
      EXPECT_EQ(p.is_zero(), std::abs(z) < 1e-10) << "d=" << n << " trial " << trial;
    }
  }
}

TEST(PhaseSum, ArithmeticMatchesComplex) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int n : kSmallPrimes) {
    const PrimeDim d = validate_dimension(n);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::int64_t> a(d.phase_order()), b(d.phase_order());
      for (auto& x : a) x = coeff(rng);
      for (auto& x : b) x = coeff(rng);
      const PhaseSum pa(d, a, 1), pb(d, b, 1);
      const auto za = pa.to_complex(), zb = pb.to_complex();
      EXPECT_LT(std::abs((pa + pb).to_complex() - (za + zb)), 1e-10);
      EXPECT_LT(std::abs((pa - pb).to_complex() - (za - zb)), 1e-10);
      EXPECT_LT(std::abs((pa * pb).to_complex() - za * zb), 1e-10);
      EXPECT_LT(std::abs(pa.conj().to_complex() - std::conj(za)), 1e-10);
    }
  }
}

TEST(PhaseSum, MismatchedScalesOfOddParityAreRejected) {
  const PrimeDim d = validate_dimension(3);
  PhaseSum a = PhaseSum::root(d, 0, 1, 0);
  EXPECT_THROW(a += PhaseSum::root(d, 0, 1, 1), std::domain_error);
}

TEST(PhaseSum, DifferentDimensionsAreRejected) {
  const PrimeDim d3 = validate_dimension(3), d5 = validate_dimension(5);
  EXPECT_ERRC(mkp::phase(d3, 1) * mkp::phase(d5, 1), Errc::DimensionMismatch);
}

TEST(PowerRational, NormalizesAndAdds) {
  const PowerRational third(3, 3, 2);  // 3/9
  EXPECT_EQ(third.num(), 1);
  EXPECT_EQ(third.den_pow(), 1);
  EXPECT_TRUE(third + third + third == PowerRational(3, 1, 0));
  EXPECT_TRUE(third * third == PowerRational(3, 1, 2));
  EXPECT_NEAR(third.to_double(), 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(PowerRational() == PowerRational(5, 0, 3));
}

TEST(SquaredMagnitude, IsExactForRootSums) {
  const PrimeDim d = validate_dimension(5);
  // |1 + omega|^2 = 2 + 2 cos(2 pi / 5) is irrational: the snap must refuse it.
  EXPECT_THROW(mkp::squared_magnitude(PhaseSum(d, {1, 1, 0, 0, 0}, 0)), std::domain_error);
  // |sum_n omega^n| = 0 and |d^-1/2 omega^k|^2 = 1/d.
  EXPECT_TRUE(mkp::squared_magnitude(PhaseSum(d, {1, 1, 1, 1, 1}, 0)).is_zero());
  EXPECT_TRUE(mkp::squared_magnitude(PhaseSum::root(d, 3, 1, 1)) == PowerRational(5, 1, 1));
  EXPECT_TRUE(mkp::squared_magnitude(PhaseSum::root(d, 1, 2, 2)) == PowerRational(5, 4, 2));
}

}  // namespace
