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

#include "pmwpm/bigdet.h"

#include <string>

namespace pmwpm {

BigMatrix::BigMatrix(size_t n, std::vector<BigInt> entries) : n_(n), entries_(std::move(entries)) {
    if (entries_.size() != n_ * n_) {
        throw std::invalid_argument("BigMatrix needs n*n entries");
    }
}

BigMatrix BigMatrix::identity(size_t n) {
    BigMatrix m(n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

bool BigMatrix::operator==(const BigMatrix& other) const {
    return n_ == other.n_ && entries_ == other.entries_;
}

std::vector<BigInt> characteristic_coefficients(const BigMatrix& a, const BerkowitzOptions& options) {
    if (a.size() == 0) throw std::invalid_argument("matrix must be at least 1x1");
    return berkowitz_coefficients(IntegerRing{}, a.size(), a.entries(), options.threads);
}

BigInt det_berkowitz(const BigMatrix& a, const BerkowitzOptions& options) {
    return characteristic_coefficients(a, options).back();
}

namespace {

BigInt laplace(const BigMatrix& a, size_t row, std::vector<uint8_t>& used) {
    const size_t n = a.size();
    if (row == n) return 1;
    BigInt total = 0;
    int sign = 1;
    for (size_t c = 0; c < n; ++c) {
        if (used[c]) continue;
        if (a.at(row, c) != 0) {
            used[c] = 1;
            BigInt term = a.at(row, c) * laplace(a, row + 1, used);
            used[c] = 0;
            if (sign > 0) {
                total += term;
            } else {
                total -= term;
            }
        }
        sign = -sign;
    }
    return total;
}

}  // namespace

BigInt det_naive(const BigMatrix& a) {
    if (a.size() == 0) throw std::invalid_argument("matrix must be at least 1x1");
    if (a.size() > 10) {
        throw std::invalid_argument("det_naive refuses n > 10 (factorial cost), got n = " + std::to_string(a.size()));
    }
    std::vector<uint8_t> used(a.size(), 0);
    return laplace(a, 0, used);
}

BigMatrix minor(const BigMatrix& a, size_t drop_row, size_t drop_col) {
    const size_t n = a.size();
    if (n < 2) throw std::invalid_argument("minor requires n >= 2");
    if (drop_row >= n || drop_col >= n) throw std::out_of_range("minor index out of range");
    BigMatrix out(n - 1);
    for (size_t i = 0, oi = 0; i < n; ++i) {
        if (i == drop_row) continue;
        for (size_t j = 0, oj = 0; j < n; ++j) {
            if (j == drop_col) continue;
            out.at(oi, oj++) = a.at(i, j);
        }
        ++oi;
    }
    return out;
}

BigMatrix adjugate(const BigMatrix& a) {
    if (a.size() == 0) throw std::invalid_argument("matrix must be at least 1x1");
    IntegerRing ring;
    auto coeffs = berkowitz_coefficients(ring, a.size(), a.entries());
    return BigMatrix(a.size(), adjugate_from_coefficients(ring, a.size(), a.entries(), std::span<const BigInt>(coeffs)));
}

uint64_t two_adic_valuation(const BigInt& x) {
    if (x == 0) throw std::invalid_argument("valuation of zero is undefined");
    return mpz_scan1(x.get_mpz_t(), 0);
}

bool is_perfect_square(const BigInt& x, BigInt* root) {
    if (x < 0) return false;
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
    if (r * r != x) return false;
    if (root != nullptr) *root = r;
    return true;
}

}  // namespace pmwpm
