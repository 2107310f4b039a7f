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

#include "distillery/f2.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace distillery {

uint64_t enumeration_budget(uint64_t fallback) {
    const char *env = std::getenv("DISTILLERY_BUDGET");
    if (env == nullptr || *env == '\0') return fallback;
    char *end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) return fallback;
    return v;
}

BitVector BitVector::from_string(std::string_view s) {
    BitVector v(s.size());
    for (size_t i = 0; i < s.size(); i++) {
        if (s[i] == '1') {
            v.set(i);
        } else if (s[i] != '0') {
            throw std::invalid_argument("bit string contains a character other than 0/1");
        }
    }
    return v;
}

BitVector BitVector::from_mask(uint64_t mask, size_t n) {
    if (n > 64) throw std::invalid_argument("from_mask supports at most 64 entries");
    BitVector v(n);
    if (n) v.words_[0] = n == 64 ? mask : (mask & ((uint64_t{1} << n) - 1));
    return v;
}

BitVector BitVector::ones(size_t n) {
    BitVector v(n);
    for (size_t i = 0; i < n; i++) v.set(i);
    return v;
}

BitVector BitVector::unit(size_t n, size_t i) {
    BitVector v(n);
    v.set(i);
    return v;
}

bool BitVector::operator<(const BitVector &o) const {
    check_len(o);
    for (size_t i = 0; i < n_; i++) {
        if (get(i) != o.get(i)) return o.get(i);
    }
    return false;
}

size_t BitVector::first_one() const {
    for (size_t w = 0; w < words_.size(); w++) {
        if (words_[w]) return w * 64 + std::countr_zero(words_[w]);
    }
    return n_;
}

uint64_t BitVector::to_mask() const {
    if (n_ > 64) throw std::invalid_argument("to_mask supports at most 64 entries");
    return words_.empty() ? 0 : words_[0];
}

std::vector<size_t> BitVector::support() const {
    std::vector<size_t> out;
    for (size_t w = 0; w < words_.size(); w++) {
        uint64_t x = words_[w];
        while (x) {
            out.push_back(w * 64 + std::countr_zero(x));
            x &= x - 1;
        }
    }
    return out;
}

std::string BitVector::str() const {
    std::string s(n_, '0');
    for (size_t i = 0; i < n_; i++) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

BitVector BitVector::without(size_t i) const {
    if (i >= n_) throw std::invalid_argument("index out of range");
    BitVector v(n_ - 1);
    for (size_t j = 0, k = 0; j < n_; j++) {
        if (j == i) continue;
        if (get(j)) v.set(k);
        k++;
    }
    return v;
}

BitVector BitVector::concat(const BitVector &o) const {
    BitVector v(n_ + o.n_);
    for (size_t j : support()) v.set(j);
    for (size_t j : o.support()) v.set(n_ + j);
    return v;
}

size_t BitVectorHash::operator()(const BitVector &v) const {
    uint64_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
    for (uint64_t w : v.words()) {
        h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<size_t>(h);
}

BitMatrix BitMatrix::from_strings(const std::vector<std::string> &rows) {
    if (rows.empty()) return BitMatrix();
    BitMatrix m(rows[0].size());
    for (const auto &r : rows) m.push_row(BitVector::from_string(r));
    return m;
}

BitMatrix BitMatrix::parse(std::string_view text) {
    std::vector<std::string> rows;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) rows.push_back(tok);
    return from_strings(rows);
}

BitMatrix BitMatrix::identity(size_t n) {
    BitMatrix m(n, n);
    for (size_t i = 0; i < n; i++) m.set(i, i);
    return m;
}

void BitMatrix::push_row(const BitVector &v) {
    if (rows_.empty() && cols_ == 0) cols_ = v.size();
    if (v.size() != cols_) throw std::invalid_argument("row length does not match matrix width");
    rows_.push_back(v);
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows_.size());
    for (size_t r = 0; r < rows_.size(); r++) {
        for (size_t c : rows_[r].support()) t.set(c, r);
    }
    return t;
}

BitMatrix BitMatrix::operator*(const BitMatrix &o) const {
    if (cols_ != o.n_rows()) throw std::invalid_argument("matrix product dimension mismatch");
    BitMatrix out(rows_.size(), o.n_cols());
    for (size_t r = 0; r < rows_.size(); r++) {
        BitVector acc(o.n_cols());
        for (size_t c : rows_[r].support()) acc ^= o.row(c);
        out.row(r) = acc;
    }
    return out;
}

BitVector BitMatrix::mul(const BitVector &v) const {
    BitVector out(rows_.size());
    for (size_t r = 0; r < rows_.size(); r++) {
        if (rows_[r].dot(v)) out.set(r);
    }
    return out;
}

BitVector BitMatrix::combine(const BitVector &c) const {
    if (c.size() != rows_.size()) throw std::invalid_argument("combination length mismatch");
    BitVector acc(cols_);
    for (size_t r : c.support()) acc ^= rows_[r];
    return acc;
}

bool BitMatrix::is_zero() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const BitVector &r) { return r.is_zero(); });
}

bool BitMatrix::is_symmetric() const {
    if (rows_.size() != cols_) return false;
    for (size_t i = 0; i < cols_; i++) {
        for (size_t j = i + 1; j < cols_; j++) {
            if (get(i, j) != get(j, i)) return false;
        }
    }
    return true;
}

bool BitMatrix::is_self_orthogonal() const {
    for (size_t i = 0; i < rows_.size(); i++) {
        for (size_t j = i; j < rows_.size(); j++) {
            if (rows_[i].dot(rows_[j])) return false;
        }
    }
    return true;
}

std::string BitMatrix::str() const {
    std::string s;
    for (const auto &r : rows_) {
        s += r.str();
        s += '\n';
    }
    return s;
}

Echelon rref(const BitMatrix &m) {
    std::vector<BitVector> rows = m.rows();
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < m.n_cols() && r < rows.size(); c++) {
        size_t p = r;
        while (p < rows.size() && !rows[p].get(c)) p++;
        if (p == rows.size()) continue;
        std::swap(rows[r], rows[p]);
        for (size_t i = 0; i < rows.size(); i++) {
            if (i != r && rows[i].get(c)) rows[i] ^= rows[r];
        }
        pivots.push_back(c);
        r++;
    }
    Echelon e;
    e.basis = BitMatrix(m.n_cols());
    for (size_t i = 0; i < r; i++) e.basis.push_row(rows[i]);
    e.pivots = std::move(pivots);
    return e;
}

size_t rank(const BitMatrix &m) { return rref(m).pivots.size(); }

BitVector reduce(const Echelon &e, BitVector v) {
    for (size_t i = 0; i < e.pivots.size(); i++) {
        if (v.get(e.pivots[i])) v ^= e.basis.row(i);
    }
    return v;
}

bool in_span(const Echelon &e, const BitVector &v) { return reduce(e, v).is_zero(); }

BitMatrix orthogonal_complement(const BitMatrix &s) {
    size_t n = s.n_cols();
    Echelon e = rref(s);
    std::vector<bool> is_pivot(n, false);
    for (size_t p : e.pivots) is_pivot[p] = true;
    BitMatrix out(n);
    for (size_t f = 0; f < n; f++) {
        if (is_pivot[f]) continue;
        // Free column f set to 1; pivot entries chosen so every reduced row is satisfied.
        BitVector v(n);
        v.set(f);
        for (size_t i = 0; i < e.pivots.size(); i++) {
            if (e.basis.get(i, f)) v.set(e.pivots[i]);
        }
        out.push_row(v);
    }
    return out;
}

BitMatrix quotient_basis(const BitMatrix &sub, const BitMatrix &sup) {
    // Incremental elimination: rows kept with distinct leading columns.
    std::vector<BitVector> reduced;
    auto absorb = [&](BitVector v) {
        for (const auto &r : reduced) {
            if (v.get(r.first_one())) v ^= r;
        }
        if (v.is_zero()) return false;
        size_t lead = v.first_one();
        for (auto &r : reduced) {
            if (r.get(lead)) r ^= v;
        }
        reduced.push_back(v);
        return true;
    };
    for (const auto &r : sub.rows()) absorb(r);
    BitMatrix out(sup.n_cols());
    for (const auto &r : sup.rows()) {
        if (absorb(r)) out.push_row(r);
    }
    return out;
}

bool solve_combination(const BitMatrix &a, const BitVector &b, BitVector &x) {
    // Augment each row with an identity tag to recover the combination.
    size_t m = a.n_rows();
    size_t n = a.n_cols();
    std::vector<BitVector> rows;
    rows.reserve(m);
    for (size_t i = 0; i < m; i++) rows.push_back(a.row(i).concat(BitVector::unit(m, i)));
    BitVector target = b.concat(BitVector(m));
    size_t r = 0;
    for (size_t c = 0; c < n && r < m; c++) {
        size_t p = r;
        while (p < m && !rows[p].get(c)) p++;
        if (p == m) continue;
        std::swap(rows[r], rows[p]);
        for (size_t i = 0; i < m; i++) {
            if (i != r && rows[i].get(c)) rows[i] ^= rows[r];
        }
        if (target.get(c)) target ^= rows[r];
        r++;
    }
    for (size_t c = 0; c < n; c++) {
        if (target.get(c)) return false;
    }
    x = BitVector(m);
    for (size_t i = 0; i < m; i++) {
        if (target.get(n + i)) x.set(i);
    }
    return true;
}

void for_each_in_span(const BitMatrix &basis, uint64_t budget,
                      const std::function<void(const BitVector &, uint64_t)> &f) {
    size_t k = basis.n_rows();
    if (budget == 0) budget = enumeration_budget(uint64_t{1} << 24);
    if (k >= 63 || (uint64_t{1} << k) > budget) {
        throw BudgetExceeded("span of dimension " + std::to_string(k) + " exceeds enumeration budget");
    }
    BitVector v(basis.n_cols());
    uint64_t coeff = 0;
    f(v, coeff);
    uint64_t total = uint64_t{1} << k;
    for (uint64_t i = 1; i < total; i++) {
        size_t bit = std::countr_zero(i);
        v ^= basis.row(bit);
        coeff ^= uint64_t{1} << bit;
        f(v, coeff);
    }
}

size_t min_weight_coset(const BitMatrix &s, const BitMatrix &s_perp, uint64_t budget) {
    if (budget == 0) budget = enumeration_budget(uint64_t{1} << 24);
    // Basis of span(s_perp): first rows span span(s), the rest are coset representatives.
    Echelon es = rref(s);
    BitMatrix reps = quotient_basis(es.basis, s_perp);
    if (reps.n_rows() == 0) throw std::invalid_argument("span(S_perp) equals span(S); no logical vectors");
    Echelon ep = rref(s_perp);
    for (const auto &r : es.basis.rows()) {
        if (!in_span(ep, r)) throw std::invalid_argument("span(S) is not contained in span(S_perp)");
    }
    BitMatrix full(s.n_cols());
    for (const auto &r : reps.rows()) full.push_row(r);
    for (const auto &r : es.basis.rows()) full.push_row(r);
    size_t k = full.n_rows();
    if (k >= 63 || (uint64_t{1} << k) > budget) {
        throw ComplementTooLarge("2^" + std::to_string(k) + " vectors exceed enumeration budget");
    }
    uint64_t rep_mask = (uint64_t{1} << reps.n_rows()) - 1;
    size_t best = s.n_cols() + 1;
    for_each_in_span(full, budget, [&](const BitVector &v, uint64_t c) {
        if (c & rep_mask) best = std::min(best, v.weight());
    });
    return best;
}

std::vector<uint64_t> coset_weight_distribution(const BitMatrix &sub, const BitMatrix &sup, uint64_t budget) {
    Echelon es = rref(sub);
    BitMatrix reps = quotient_basis(es.basis, sup);
    BitMatrix full(sup.n_cols());
    for (const auto &r : reps.rows()) full.push_row(r);
    for (const auto &r : es.basis.rows()) full.push_row(r);
    uint64_t rep_mask = (uint64_t{1} << reps.n_rows()) - 1;
    std::vector<uint64_t> dist(sup.n_cols() + 1, 0);
    bool whole = sub.n_rows() == 0;
    for_each_in_span(full, budget, [&](const BitVector &v, uint64_t c) {
        if (whole || (c & rep_mask)) dist[v.weight()]++;
    });
    return dist;
}

unsigned __int128 binom128(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (unsigned i = 1; i <= k; i++) {
        r = r * (n - k + i) / i;
    }
    return r;
}

uint64_t binom(unsigned n, unsigned k) { return static_cast<uint64_t>(binom128(n, k)); }

std::string to_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

}  // namespace distillery
