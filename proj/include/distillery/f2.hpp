// Copyright 2026 The Distillery Authors
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

#ifndef DISTILLERY_F2_HPP
#define DISTILLERY_F2_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace distillery {

/// Thrown when an exhaustive enumeration would exceed the configured budget.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown by min_weight_coset when span(S_perp) is too large to walk.
struct ComplementTooLarge : BudgetExceeded {
    using BudgetExceeded::BudgetExceeded;
};

/// Enumeration budget. The DISTILLERY_BUDGET environment variable, when set to
/// a positive integer, replaces `fallback`.
uint64_t enumeration_budget(uint64_t fallback);

/// Fixed-length vector over F_2, packed into 64-bit words.
class BitVector {
  public:
    BitVector() = default;
    explicit BitVector(size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    /// Parses a string of '0'/'1' characters.
    static BitVector from_string(std::string_view s);
    /// Low `n` bits of `mask` (bit i of mask is entry i).
    static BitVector from_mask(uint64_t mask, size_t n);
    static BitVector ones(size_t n);
    static BitVector unit(size_t n, size_t i);

    size_t size() const { return n_; }
    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(size_t i, bool v = true) {
        uint64_t m = uint64_t{1} << (i & 63);
        if (v) {
            words_[i >> 6] |= m;
        } else {
            words_[i >> 6] &= ~m;
        }
    }
    void flip(size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }
    bool operator[](size_t i) const { return get(i); }

    size_t weight() const {
        size_t w = 0;
        for (uint64_t x : words_) w += std::popcount(x);
        return w;
    }
    bool is_zero() const {
        for (uint64_t x : words_) {
            if (x) return false;
        }
        return true;
    }
    /// Parity of the AND of the two vectors.
    bool dot(const BitVector &o) const {
        check_len(o);
        uint64_t acc = 0;
        for (size_t i = 0; i < words_.size(); i++) acc ^= words_[i] & o.words_[i];
        return std::popcount(acc) & 1;
    }
    size_t overlap(const BitVector &o) const {
        check_len(o);
        size_t w = 0;
        for (size_t i = 0; i < words_.size(); i++) w += std::popcount(words_[i] & o.words_[i]);
        return w;
    }
    BitVector &operator^=(const BitVector &o) {
        check_len(o);
        for (size_t i = 0; i < words_.size(); i++) words_[i] ^= o.words_[i];
        return *this;
    }
    BitVector &operator&=(const BitVector &o) {
        check_len(o);
        for (size_t i = 0; i < words_.size(); i++) words_[i] &= o.words_[i];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector &b) { return a ^= b; }
    friend BitVector operator&(BitVector a, const BitVector &b) { return a &= b; }
    bool operator==(const BitVector &o) const = default;
    bool operator<(const BitVector &o) const;

    /// First set index, or size() when zero.
    size_t first_one() const;
    /// Entries as a 64-bit mask; requires size() <= 64.
    uint64_t to_mask() const;
    std::vector<size_t> support() const;
    std::string str() const;

    /// Drops entry i, shifting later entries down.
    BitVector without(size_t i) const;
    /// Concatenation.
    BitVector concat(const BitVector &o) const;

    const std::vector<uint64_t> &words() const { return words_; }
    std::vector<uint64_t> &words() { return words_; }

  private:
    void check_len(const BitVector &o) const {
        if (o.n_ != n_) throw std::invalid_argument("BitVector length mismatch");
    }
    size_t n_ = 0;
    std::vector<uint64_t> words_;
};

struct BitVectorHash {
    size_t operator()(const BitVector &v) const;
};

/// Dense matrix over F_2 stored as rows.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}
    explicit BitMatrix(size_t cols) : cols_(cols) {}

    /// Parses rows of '0'/'1' strings; whitespace separates rows.
    static BitMatrix from_strings(const std::vector<std::string> &rows);
    static BitMatrix parse(std::string_view text);
    static BitMatrix identity(size_t n);

    size_t n_rows() const { return rows_.size(); }
    size_t n_cols() const { return cols_; }
    const BitVector &row(size_t i) const { return rows_[i]; }
    BitVector &row(size_t i) { return rows_[i]; }
    const std::vector<BitVector> &rows() const { return rows_; }
    bool get(size_t r, size_t c) const { return rows_[r].get(c); }
    void set(size_t r, size_t c, bool v = true) { rows_[r].set(c, v); }
    void push_row(const BitVector &v);

    BitMatrix transpose() const;
    BitMatrix operator*(const BitMatrix &o) const;
    /// Image of a column vector: entry i is row(i)·v.
    BitVector mul(const BitVector &v) const;
    /// Row vector times matrix: sum of rows selected by c.
    BitVector combine(const BitVector &c) const;
    bool operator==(const BitMatrix &o) const = default;

    bool is_zero() const;
    bool is_symmetric() const;
    /// M·Mᵀ = 0.
    bool is_self_orthogonal() const;
    std::string str() const;

  private:
    size_t cols_ = 0;
    std::vector<BitVector> rows_;
};

/// Reduced row echelon form. Rows of the result are a basis of the row space;
/// `pivots[i]` is the leading column of row i. Pivot search prefers the lowest
/// row index.
struct Echelon {
    BitMatrix basis;
    std::vector<size_t> pivots;
};
Echelon rref(const BitMatrix &m);

size_t rank(const BitMatrix &m);

/// Basis of {v : v·s = 0 for every row s}.
BitMatrix orthogonal_complement(const BitMatrix &s);

/// Whether v lies in the row space described by `e`.
bool in_span(const Echelon &e, const BitVector &v);

/// Reduces v against an echelon basis; zero iff v is in the span.
BitVector reduce(const Echelon &e, BitVector v);

/// Completes span(sub) to span(sup): returns vectors of sup whose classes form
/// a basis of span(sup)/span(sub). Requires span(sub) ⊆ span(sup).
BitMatrix quotient_basis(const BitMatrix &sub, const BitMatrix &sup);

/// Solves x·A = b for a row-combination vector x (length n_rows), i.e. writes b
/// as a sum of rows of A. Returns false when b is outside the row space.
bool solve_combination(const BitMatrix &a, const BitVector &b, BitVector &x);

/// Minimum weight of a vector in span(s_perp) \ span(s).
/// Walks span(s_perp) in Gray-code order. Throws ComplementTooLarge when
/// 2^dim(s_perp) exceeds `budget`.
size_t min_weight_coset(const BitMatrix &s, const BitMatrix &s_perp, uint64_t budget = 0);

/// Calls f(v, coefficients) for every vector of span(basis) in Gray-code order,
/// starting with zero. `basis` rows must be independent. Each step is one XOR.
void for_each_in_span(const BitMatrix &basis, uint64_t budget,
                      const std::function<void(const BitVector &, uint64_t)> &f);

/// Number of vectors of each weight in span(basis) \ span(sub), optionally for
/// the whole span when sub is empty.
std::vector<uint64_t> coset_weight_distribution(const BitMatrix &sub, const BitMatrix &sup,
                                                uint64_t budget = 0);

/// Binomial coefficient as an exact 128-bit integer.
unsigned __int128 binom128(unsigned n, unsigned k);
uint64_t binom(unsigned n, unsigned k);
std::string to_string(unsigned __int128 v);

}  // namespace distillery

#endif
