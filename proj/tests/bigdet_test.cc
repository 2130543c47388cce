// Copyright 2026 The pmwpm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "pmwpm/bigdet.h"

namespace pmwpm {
namespace {

BigMatrix random_matrix(std::mt19937_64& rng, size_t n, long range) {
    BigMatrix a(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) a.at(i, j) = static_cast<long>(rng() % (2 * range + 1)) - range;
    return a;
}

// Leibniz formula over all permutations: an independent determinant.
BigInt leibniz(const BigMatrix& a) {
    const size_t n = a.size();
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    BigInt total = 0;
    do {
        int inversions = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
        BigInt term = 1;
        for (size_t i = 0; i < n; ++i) term *= a.at(i, perm[i]);
        total += inversions % 2 ? BigInt(-term) : term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

TEST(Determinant, BerkowitzMatchesLaplaceAndLeibniz) {
    std::mt19937_64 rng(1);
    for (int it = 0; it < 300; ++it) {
        const size_t n = 1 + rng() % 7;
        BigMatrix a = random_matrix(rng, n, 9);
        const BigInt d = det_berkowitz(a);
        EXPECT_EQ(d, det_naive(a));
        EXPECT_EQ(d, leibniz(a));
    }
}

TEST(Determinant, ThreadCountDoesNotMatter) {
    std::mt19937_64 rng(2);
    BigMatrix a = random_matrix(rng, 20, 1000);
    EXPECT_EQ(characteristic_coefficients(a, {1}), characteristic_coefficients(a, {4}));
}

TEST(Determinant, KnownValues) {
    BigMatrix two(2, {BigInt(0), BigInt(8), BigInt(-8), BigInt(0)});
    EXPECT_EQ(det_berkowitz(two), 64);
    EXPECT_EQ(det_berkowitz(BigMatrix::identity(9)), 1);
    BigMatrix singular(3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    EXPECT_EQ(det_berkowitz(singular), 0);
    EXPECT_THROW(det_naive(BigMatrix(11)), std::invalid_argument);
}

// p(lambda) = det(A - lambda I) evaluated pointwise.
TEST(CharacteristicPolynomial, PointwiseEvaluation) {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 100; ++it) {
        const size_t n = 1 + rng() % 6;
        BigMatrix a = random_matrix(rng, n, 50);
        auto p = characteristic_coefficients(a);
        ASSERT_EQ(p.size(), n + 1);
        EXPECT_EQ(p[0], (n % 2 == 0) ? 1 : -1);
        for (long lambda : {-3L, -1L, 0L, 1L, 2L, 5L}) {
            BigInt value = 0;
            for (const BigInt& c : p) value = value * lambda + c;
            BigMatrix shifted = a;
            for (size_t i = 0; i < n; ++i) shifted.at(i, i) -= lambda;
            EXPECT_EQ(value, det_naive(shifted));
        }
    }
}

TEST(Adjugate, TimesMatrixIsDeterminantIdentity) {
    std::mt19937_64 rng(4);
    for (int it = 0; it < 50; ++it) {
        const size_t n = 1 + rng() % 7;
        BigMatrix a = random_matrix(rng, n, 20);
        BigMatrix adj = adjugate(a);
        const BigInt d = det_naive(a);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) {
                BigInt s = 0;
                for (size_t k = 0; k < n; ++k) s += a.at(i, k) * adj.at(k, j);
                EXPECT_EQ(s, i == j ? d : BigInt(0));
            }
        }
    }
}

TEST(Adjugate, EntriesAreSignedMinors) {
    std::mt19937_64 rng(5);
    BigMatrix a = random_matrix(rng, 6, 30);
    BigMatrix adj = adjugate(a);
    for (size_t i = 0; i < 6; ++i) {
        for (size_t j = 0; j < 6; ++j) {
            BigInt m = det_naive(minor(a, i, j));
            EXPECT_EQ((i + j) % 2 ? BigInt(-m) : m, adj.at(j, i));
        }
    }
}

TEST(Rings, WrappedArithmeticAgreesModuloPowerOfTwo) {
    std::mt19937_64 rng(6);
    for (int it = 0; it < 50; ++it) {
        const size_t n = 1 + rng() % 10;
        BigMatrix a = random_matrix(rng, n, 1 << 20);
        const BigInt exact = det_berkowitz(a);
        std::vector<uint64_t> w64(n * n);
        std::vector<unsigned __int128> w128(n * n);
        std::vector<BigInt> w200(n * n);
        PowerOfTwoRing r200{200};
        for (size_t i = 0; i < n * n; ++i) {
            const long x = a.entries()[i].get_si();
            w64[i] = Wrap64Ring{}.from_int(x);
            w128[i] = Wrap128Ring{}.from_int(x);
            w200[i] = r200.from_int(x);
        }
        BigInt m64 = exact, m128 = exact, m200 = exact;
        mpz_fdiv_r_2exp(m64.get_mpz_t(), m64.get_mpz_t(), 64);
        mpz_fdiv_r_2exp(m128.get_mpz_t(), m128.get_mpz_t(), 128);
        mpz_fdiv_r_2exp(m200.get_mpz_t(), m200.get_mpz_t(), 200);
        const uint64_t d64 = berkowitz_coefficients(Wrap64Ring{}, n, std::span<const uint64_t>(w64)).back();
        const unsigned __int128 d128 =
            berkowitz_coefficients(Wrap128Ring{}, n, std::span<const unsigned __int128>(w128)).back();
        EXPECT_EQ(BigInt(std::to_string(d64)), m64);
        BigInt hi(std::to_string(static_cast<uint64_t>(d128 >> 64)));
        BigInt lo(std::to_string(static_cast<uint64_t>(d128)));
        EXPECT_EQ(hi * (BigInt(1) << 64) + lo, m128);
        EXPECT_EQ(berkowitz_coefficients(r200, n, std::span<const BigInt>(w200)).back(), m200);
    }
}

TEST(Valuation, MatchesBitScan) {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 200; ++it) {
        const unsigned shift = rng() % 300;
        BigInt x = (BigInt(static_cast<unsigned long>(rng() | 1)) << shift) * ((rng() & 1) ? 1 : -1);
        EXPECT_EQ(two_adic_valuation(x), shift);
    }
    EXPECT_THROW(two_adic_valuation(BigInt(0)), std::invalid_argument);
}

TEST(Antisymmetric, DeterminantIsPerfectSquare) {
    std::mt19937_64 rng(8);
    for (int it = 0; it < 60; ++it) {
        const size_t n = 2 * (1 + rng() % 5);
        BigMatrix a(n);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                a.at(i, j) = static_cast<long>(rng() % 201) - 100;
                a.at(j, i) = -a.at(i, j);
            }
        }
        BigInt root;
        EXPECT_TRUE(is_perfect_square(det_berkowitz(a), &root));
    }
    EXPECT_FALSE(is_perfect_square(BigInt(-4)));
    EXPECT_FALSE(is_perfect_square(BigInt(8)));
}

TEST(Minor, DropsRowAndColumn) {
    BigMatrix a(3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    BigMatrix m = minor(a, 1, 0);
    EXPECT_EQ(m, BigMatrix(2, {2, 3, 8, 9}));
    EXPECT_THROW(minor(BigMatrix(1), 0, 0), std::invalid_argument);
}

}  // namespace
}  // namespace pmwpm
