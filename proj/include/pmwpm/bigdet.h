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

#ifndef PMWPM_BIGDET_H_
#define PMWPM_BIGDET_H_

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace pmwpm {

/// Exact signed integer of unbounded size.
using BigInt = mpz_class;

/// Square row-major matrix of BigInt.
class BigMatrix {
   public:
    BigMatrix() = default;
    explicit BigMatrix(size_t n) : n_(n), entries_(n * n) {}
    BigMatrix(size_t n, std::vector<BigInt> entries);

    static BigMatrix identity(size_t n);

    size_t size() const { return n_; }
    BigInt& at(size_t i, size_t j) { return entries_.at(i * n_ + j); }
    const BigInt& at(size_t i, size_t j) const { return entries_.at(i * n_ + j); }
    std::span<const BigInt> entries() const { return entries_; }

    bool operator==(const BigMatrix& other) const;

   private:
    size_t n_ = 0;
    std::vector<BigInt> entries_;
};

struct BerkowitzOptions {
    /// Workers for building the Toeplitz columns; the result is identical for
    /// every value.
    unsigned threads = 1;
};

/// Coefficients p_0..p_N of p(lambda) = det(A - lambda I) = sum_n p_{N-n} lambda^n,
/// computed division-free with the Samuelson-Berkowitz construction.
std::vector<BigInt> characteristic_coefficients(const BigMatrix& a, const BerkowitzOptions& options = {});

/// Exact determinant, p_N of characteristic_coefficients.
BigInt det_berkowitz(const BigMatrix& a, const BerkowitzOptions& options = {});

/// Cofactor expansion along the first row. Refuses n > 10.
BigInt det_naive(const BigMatrix& a);

/// Drops one row and one column. Requires n >= 2.
BigMatrix minor(const BigMatrix& a, size_t drop_row, size_t drop_col);

/// Adjugate via Cayley-Hamilton on the Berkowitz coefficients (division-free),
/// so det(minor(a, i, j)) == (-1)^(i+j) * adjugate(a)(j, i).
BigMatrix adjugate(const BigMatrix& a);

/// Largest k with 2^k | x. x must be nonzero.
uint64_t two_adic_valuation(const BigInt& x);

/// Exact integer square root test: returns true and sets `root` if x is a
/// perfect square.
bool is_perfect_square(const BigInt& x, BigInt* root = nullptr);

// ---------------------------------------------------------------------------
// Ring-generic kernels. Rings provide:
//   Value zero() const; Value from_int(int64_t) const;
//   void mul_add(Value& acc, const Value& a, const Value& b) const;  // acc += a*b
//   void reduce(Value& x) const;                                     // canonical form
//   Value neg(const Value& x) const;

/// Exact integers.
struct IntegerRing {
    using Value = BigInt;
    Value zero() const { return 0; }
    Value from_int(int64_t x) const { return BigInt(static_cast<long>(x)); }
    void mul_add(Value& acc, const Value& a, const Value& b) const { mpz_addmul(acc.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t()); }
    void reduce(Value&) const {}
    Value neg(const Value& x) const { return -x; }
};

/// Integers modulo 2^64 (wrapping machine arithmetic).
struct Wrap64Ring {
    using Value = uint64_t;
    static constexpr uint64_t kBits = 64;
    Value zero() const { return 0; }
    Value from_int(int64_t x) const { return static_cast<uint64_t>(x); }
    void mul_add(Value& acc, Value a, Value b) const { acc += a * b; }
    void reduce(Value&) const {}
    Value neg(Value x) const { return 0 - x; }
};

/// Integers modulo 2^128.
struct Wrap128Ring {
    using Value = unsigned __int128;
    static constexpr uint64_t kBits = 128;
    Value zero() const { return 0; }
    Value from_int(int64_t x) const { return static_cast<Value>(static_cast<__int128>(x)); }
    void mul_add(Value& acc, Value a, Value b) const { acc += a * b; }
    void reduce(Value&) const {}
    Value neg(Value x) const { return Value(0) - x; }
};

/// Integers modulo 2^bits, represented by their least non-negative residue.
struct PowerOfTwoRing {
    using Value = BigInt;
    uint64_t bits = 64;
    Value zero() const { return 0; }
    Value from_int(int64_t x) const {
        Value v(static_cast<long>(x));
        reduce(v);
        return v;
    }
    void mul_add(Value& acc, const Value& a, const Value& b) const { mpz_addmul(acc.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t()); }
    void reduce(Value& x) const { mpz_fdiv_r_2exp(x.get_mpz_t(), x.get_mpz_t(), bits); }
    Value neg(const Value& x) const {
        Value v = -x;
        reduce(v);
        return v;
    }
};

namespace detail {

template <class Ring>
using RingVector = std::vector<typename Ring::Value>;

// c = a * b for n x n row-major matrices.
template <class Ring>
RingVector<Ring> mat_mul(const Ring& ring, size_t n, const RingVector<Ring>& a, const RingVector<Ring>& b) {
    RingVector<Ring> c(n * n, ring.zero());
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < n; ++k) {
            const auto& aik = a[i * n + k];
            if (aik == 0) continue;
            for (size_t j = 0; j < n; ++j) ring.mul_add(c[i * n + j], aik, b[k * n + j]);
        }
    }
    for (auto& x : c) ring.reduce(x);
    return c;
}

template <class Ring>
RingVector<Ring> mat_vec(const Ring& ring, size_t n, const RingVector<Ring>& a, const RingVector<Ring>& v) {
    RingVector<Ring> out(n, ring.zero());
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < n; ++k) ring.mul_add(out[i], a[i * n + k], v[k]);
        ring.reduce(out[i]);
    }
    return out;
}

// First column of the lower-triangular Toeplitz matrix C_t (0-based t):
// (-1, A_tt, R M^0 S, R M^1 S, ..., R M^{m-1} S) with m = n - 1 - t.
// The vectors M^k S are produced by doubling with the powers M^{2^j}, so each
// level is one batch of independent matrix-vector products.
template <class Ring>
RingVector<Ring> toeplitz_column(const Ring& ring, size_t n, std::span<const typename Ring::Value> a, size_t t) {
    const size_t m = n - 1 - t;
    RingVector<Ring> col;
    col.reserve(m + 2);
    col.push_back(ring.from_int(-1));
    col.push_back(a[t * n + t]);
    if (m == 0) return col;

    RingVector<Ring> power(m * m);  // M^{2^j}
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) power[i * m + j] = a[(t + 1 + i) * n + (t + 1 + j)];
    std::vector<RingVector<Ring>> krylov;  // krylov[k] = M^k S
    krylov.reserve(m);
    RingVector<Ring> s(m);
    for (size_t i = 0; i < m; ++i) s[i] = a[(t + 1 + i) * n + t];
    krylov.push_back(std::move(s));
    while (krylov.size() < m) {
        const size_t have = krylov.size();
        const size_t add = std::min(have, m - have);
        for (size_t k = 0; k < add; ++k) krylov.push_back(mat_vec(ring, m, power, krylov[k]));
        if (krylov.size() < m) power = mat_mul(ring, m, power, power);
    }
    for (size_t k = 0; k < m; ++k) {
        typename Ring::Value r = ring.zero();
        for (size_t j = 0; j < m; ++j) ring.mul_add(r, a[t * n + (t + 1 + j)], krylov[k][j]);
        ring.reduce(r);
        col.push_back(std::move(r));
    }
    return col;
}

// First column of C_lo C_{lo+1} ... C_{n-1}, applied right to left. Each
// factor is (len) x (len - 1) lower-triangular Toeplitz given by its first
// column; a product of two such factors is not Toeplitz, so only
// matrix-vector steps are exact.
template <class Ring>
RingVector<Ring> toeplitz_product(const Ring& ring, const std::vector<RingVector<Ring>>& cols, size_t lo) {
    RingVector<Ring> v = cols.back();
    for (size_t t = cols.size() - 1; t-- > lo;) {
        const RingVector<Ring>& c = cols[t];
        RingVector<Ring> out(c.size(), ring.zero());
        for (size_t i = 0; i < c.size(); ++i) {
            for (size_t k = 0; k <= i && k < v.size(); ++k) ring.mul_add(out[i], c[i - k], v[k]);
            ring.reduce(out[i]);
        }
        v = std::move(out);
    }
    return v;
}

}  // namespace detail

/// Berkowitz coefficients p_0..p_n of det(A - lambda I) over `ring`.
template <class Ring>
std::vector<typename Ring::Value> berkowitz_coefficients(const Ring& ring, size_t n,
                                                         std::span<const typename Ring::Value> a,
                                                         unsigned threads = 1) {
    if (a.size() != n * n) throw std::invalid_argument("matrix entry count does not match its dimension");
    if (n == 0) return {ring.from_int(1)};
    std::vector<detail::RingVector<Ring>> cols(n);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads == 1) {
        for (size_t t = 0; t < n; ++t) cols[t] = detail::toeplitz_column(ring, n, a, t);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (size_t t = w; t < n; t += threads) cols[t] = detail::toeplitz_column(ring, n, a, t);
            });
        }
    }
    return detail::toeplitz_product(ring, cols, 0);
}

/// adj(A) = -(p_0 A^{n-1} + p_1 A^{n-2} + ... + p_{n-1} I), evaluated by Horner.
template <class Ring>
std::vector<typename Ring::Value> adjugate_from_coefficients(const Ring& ring, size_t n,
                                                             std::span<const typename Ring::Value> a,
                                                             std::span<const typename Ring::Value> coeffs) {
    using Value = typename Ring::Value;
    if (coeffs.size() != n + 1) throw std::invalid_argument("need n + 1 characteristic coefficients");
    std::vector<Value> mat(a.begin(), a.end());
    std::vector<Value> q(n * n, ring.zero());
    for (size_t i = 0; i < n; ++i) q[i * n + i] = coeffs[0];
    for (size_t k = 1; k < n; ++k) {
        q = detail::mat_mul(ring, n, q, mat);
        for (size_t i = 0; i < n; ++i) {
            ring.mul_add(q[i * n + i], coeffs[k], ring.from_int(1));
            ring.reduce(q[i * n + i]);
        }
    }
    for (auto& x : q) x = ring.neg(x);
    return q;
}

}  // namespace pmwpm

#endif  // PMWPM_BIGDET_H_
