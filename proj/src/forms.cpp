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

#include "distillery/forms.hpp"

#include <cmath>
#include <random>

namespace distillery {

namespace {

bool form_f2(const BitMatrix &lambda, const BitVector &u, const BitVector &w) {
    return lambda.mul(w).dot(u);
}

}  // namespace

BitMatrix normal_form(size_t p, size_t q) {
    BitMatrix m(p + q, p + q);
    for (size_t i = 0; i < p; i++) m.set(i, i);
    for (size_t j = 0; j + 1 < q; j += 2) {
        m.set(p + j, p + j + 1);
        m.set(p + j + 1, p + j);
    }
    return m;
}

F2FormClass classify_f2(const BitMatrix &lambda) {
    size_t n = lambda.n_rows();
    if (lambda.n_cols() != n || !lambda.is_symmetric()) throw NotSymmetric("form matrix is not symmetric");
    if (rank(lambda) != n) throw DegenerateForm("form matrix is singular");

    std::vector<BitVector> rest;
    for (size_t i = 0; i < n; i++) rest.push_back(BitVector::unit(n, i));
    std::vector<BitVector> normals;
    std::vector<BitVector> hypers;
    while (!rest.empty()) {
        size_t odd = rest.size();
        for (size_t i = 0; i < rest.size(); i++) {
            if (form_f2(lambda, rest[i], rest[i])) {
                odd = i;
                break;
            }
        }
        if (odd < rest.size()) {
            BitVector u = rest[odd];
            rest.erase(rest.begin() + odd);
            for (auto &w : rest) {
                if (form_f2(lambda, w, u)) w ^= u;
            }
            normals.push_back(u);
            continue;
        }
        BitVector u = rest[0];
        size_t partner = rest.size();
        for (size_t j = 1; j < rest.size(); j++) {
            if (form_f2(lambda, u, rest[j])) {
                partner = j;
                break;
            }
        }
        if (partner == rest.size()) throw DegenerateForm("form matrix is singular");
        BitVector w = rest[partner];
        rest.erase(rest.begin() + partner);
        rest.erase(rest.begin());
        for (auto &x : rest) {
            bool a = form_f2(lambda, x, w);
            bool b = form_f2(lambda, x, u);
            if (a) x ^= u;
            if (b) x ^= w;
        }
        hypers.push_back(u);
        hypers.push_back(w);
    }
    // I_1 ⊕ λ_2 ≅ I_3 via (x+v+w, x+v, x+w).
    while (!normals.empty() && !hypers.empty()) {
        BitVector x = normals.back();
        normals.pop_back();
        BitVector v = hypers[0];
        BitVector w = hypers[1];
        hypers.erase(hypers.begin(), hypers.begin() + 2);
        normals.push_back(x ^ v ^ w);
        normals.push_back(x ^ v);
        normals.push_back(x ^ w);
    }

    F2FormClass out;
    out.p_count = normals.size();
    out.q_count = hypers.size();
    out.transform = BitMatrix(n, n);
    size_t col = 0;
    for (const auto *group : {&normals, &hypers}) {
        for (const auto &b : *group) {
            for (size_t r = 0; r < n; r++) out.transform.set(r, col, b.get(r));
            col++;
        }
    }
    return out;
}

std::vector<BitVector> MagicBasis::all() const {
    std::vector<BitVector> v = normal_vectors;
    v.insert(v.end(), hyperbolic_vectors.begin(), hyperbolic_vectors.end());
    return v;
}

BitMatrix gram(const std::vector<BitVector> &vecs) {
    BitMatrix g(vecs.size(), vecs.size());
    for (size_t i = 0; i < vecs.size(); i++) {
        for (size_t j = 0; j < vecs.size(); j++) g.set(i, j, vecs[i].dot(vecs[j]));
    }
    return g;
}

MagicBasis magic_basis(const BitMatrix &s) {
    if (!s.is_self_orthogonal()) throw NotSelfOrthogonal("stabilizer rows are not self-orthogonal");
    BitMatrix perp = orthogonal_complement(s);
    BitMatrix reps = quotient_basis(s, perp);
    MagicBasis mb;
    if (reps.n_rows() == 0) return mb;
    F2FormClass cls = classify_f2(gram(reps.rows()));
    size_t k = reps.n_rows();
    for (size_t c = 0; c < k; c++) {
        BitVector v(s.n_cols());
        for (size_t r = 0; r < k; r++) {
            if (cls.transform.get(r, c)) v ^= reps.row(r);
        }
        if (c < cls.p_count) {
            mb.normal_vectors.push_back(v);
        } else {
            mb.hyperbolic_vectors.push_back(v);
        }
    }
    mb.p = cls.p_count;
    mb.q = cls.q_count;
    return mb;
}

// ---- Odd characteristic ----

uint32_t fp_pow(uint32_t base, uint64_t e, uint32_t p) {
    uint64_t r = 1 % p;
    uint64_t b = base % p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return static_cast<uint32_t>(r);
}

uint32_t fp_inv(uint32_t a, uint32_t p) {
    if (a % p == 0) throw std::invalid_argument("zero has no inverse");
    return fp_pow(a, p - 2, p);
}

bool fp_is_square(uint32_t a, uint32_t p) {
    a %= p;
    if (a == 0) return true;
    return fp_pow(a, (p - 1) / 2, p) == 1;
}

bool is_prime(uint32_t p) {
    if (p < 2) return false;
    for (uint32_t d = 2; static_cast<uint64_t>(d) * d <= p; d++) {
        if (p % d == 0) return false;
    }
    return true;
}

namespace {

void check_prime(uint32_t p) {
    if (p == 2) throw EvenCharacteristic("characteristic 2: use classify_f2");
    if (!is_prime(p) || p >= (1u << 16)) throw std::invalid_argument("modulus must be an odd prime below 2^16");
}

uint32_t sub_mod(uint32_t a, uint32_t b, uint32_t p) { return (a + p - b % p) % p; }

}  // namespace

uint32_t fp_det(FpMatrix m, uint32_t p) {
    size_t n = m.size();
    uint64_t det = 1;
    for (size_t c = 0; c < n; c++) {
        size_t piv = n;
        for (size_t r = c; r < n; r++) {
            if (m[r][c] % p) {
                piv = r;
                break;
            }
        }
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = (p - det) % p;
        }
        det = det * (m[c][c] % p) % p;
        uint32_t inv = fp_inv(m[c][c], p);
        for (size_t r = c + 1; r < n; r++) {
            uint64_t f = static_cast<uint64_t>(m[r][c] % p) * inv % p;
            if (!f) continue;
            for (size_t j = c; j < n; j++) m[r][j] = sub_mod(m[r][j], static_cast<uint32_t>(f * m[c][j] % p), p);
        }
    }
    return static_cast<uint32_t>(det);
}

uint32_t fp_dot(const std::vector<uint32_t> &a, const std::vector<uint32_t> &b, uint32_t p) {
    if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
    uint64_t acc = 0;
    for (size_t i = 0; i < a.size(); i++) acc = (acc + static_cast<uint64_t>(a[i]) * b[i]) % p;
    return static_cast<uint32_t>(acc);
}

uint32_t fp_form(const FpMatrix &lambda, const std::vector<uint32_t> &x, const std::vector<uint32_t> &y,
                 uint32_t p) {
    uint64_t acc = 0;
    for (size_t i = 0; i < x.size(); i++) {
        if (!x[i]) continue;
        uint64_t row = 0;
        for (size_t j = 0; j < y.size(); j++) row = (row + static_cast<uint64_t>(lambda[i][j]) * y[j]) % p;
        acc = (acc + row * x[i]) % p;
    }
    return static_cast<uint32_t>(acc);
}

FpMatrix fp_nullspace(const FpMatrix &rows, size_t n, uint32_t p) {
    FpMatrix m = rows;
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < n && r < m.size(); c++) {
        size_t piv = m.size();
        for (size_t i = r; i < m.size(); i++) {
            if (m[i][c] % p) {
                piv = i;
                break;
            }
        }
        if (piv == m.size()) continue;
        std::swap(m[piv], m[r]);
        uint32_t inv = fp_inv(m[r][c], p);
        for (auto &x : m[r]) x = static_cast<uint32_t>(static_cast<uint64_t>(x % p) * inv % p);
        for (size_t i = 0; i < m.size(); i++) {
            if (i == r || m[i][c] % p == 0) continue;
            uint64_t f = m[i][c] % p;
            for (size_t j = 0; j < n; j++) m[i][j] = sub_mod(m[i][j], static_cast<uint32_t>(f * m[r][j] % p), p);
        }
        pivots.push_back(c);
        r++;
    }
    std::vector<bool> is_pivot(n, false);
    for (size_t c : pivots) is_pivot[c] = true;
    FpMatrix basis;
    for (size_t f = 0; f < n; f++) {
        if (is_pivot[f]) continue;
        std::vector<uint32_t> x(n, 0);
        x[f] = 1;
        for (size_t i = 0; i < pivots.size(); i++) x[pivots[i]] = (p - m[i][f] % p) % p;
        basis.push_back(std::move(x));
    }
    return basis;
}

size_t fp_rank(FpMatrix rows, uint32_t p) {
    if (rows.empty()) return 0;
    size_t n = rows[0].size();
    return n - fp_nullspace(rows, n, p).size();
}

FpMatrix fp_mul(const FpMatrix &a, const FpMatrix &b, uint32_t p) {
    size_t n = a.size();
    size_t k = b.size();
    size_t m = k ? b[0].size() : 0;
    FpMatrix c(n, std::vector<uint32_t>(m, 0));
    for (size_t i = 0; i < n; i++) {
        for (size_t l = 0; l < k; l++) {
            uint64_t f = a[i][l] % p;
            if (!f) continue;
            for (size_t j = 0; j < m; j++) c[i][j] = static_cast<uint32_t>((c[i][j] + f * b[l][j]) % p);
        }
    }
    return c;
}

FpMatrix fp_transpose(const FpMatrix &a) {
    if (a.empty()) return {};
    FpMatrix t(a[0].size(), std::vector<uint32_t>(a.size()));
    for (size_t i = 0; i < a.size(); i++) {
        for (size_t j = 0; j < a[i].size(); j++) t[j][i] = a[i][j];
    }
    return t;
}

size_t fp_witt_index(size_t n, bool det_is_square, uint32_t p) {
    if (n % 2) return (n - 1) / 2;
    // Hyperbolic iff (−1)^{n/2} det is a square.
    bool minus_one_square = fp_is_square(p - 1, p);
    bool sign_square = (n / 2) % 2 == 0 || minus_one_square;
    return det_is_square == sign_square ? n / 2 : n / 2 - 1;
}

FpFormClass classify_fp(const FpMatrix &lambda, uint32_t p) {
    check_prime(p);
    size_t n = lambda.size();
    for (const auto &row : lambda) {
        if (row.size() != n) throw NotSymmetric("form matrix is not square");
    }
    FpMatrix lam(n, std::vector<uint32_t>(n));
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) lam[i][j] = lambda[i][j] % p;
    }
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < i; j++) {
            if (lam[i][j] != lam[j][i]) throw NotSymmetric("form matrix is not symmetric");
        }
    }
    uint32_t det = fp_det(lam, p);
    if (det == 0) throw DegenerateForm("form matrix is singular mod p");

    // Orthogonal basis by repeated peeling of an anisotropic vector.
    std::vector<std::vector<uint32_t>> rest;
    for (size_t i = 0; i < n; i++) {
        std::vector<uint32_t> e(n, 0);
        e[i] = 1;
        rest.push_back(e);
    }
    std::vector<std::vector<uint32_t>> basis;
    std::vector<uint32_t> diag;
    while (!rest.empty()) {
        size_t pick = rest.size();
        for (size_t i = 0; i < rest.size(); i++) {
            if (fp_form(lam, rest[i], rest[i], p)) {
                pick = i;
                break;
            }
        }
        if (pick == rest.size()) {
            // Every remaining vector is null; x + y is anisotropic for a pair with b(x, y) ≠ 0.
            for (size_t j = 1; j < rest.size() && pick == rest.size(); j++) {
                if (fp_form(lam, rest[0], rest[j], p)) {
                    for (size_t t = 0; t < n; t++) rest[0][t] = (rest[0][t] + rest[j][t]) % p;
                    pick = 0;
                }
            }
            if (pick == rest.size()) throw DegenerateForm("form matrix is singular mod p");
        }
        std::vector<uint32_t> x = rest[pick];
        rest.erase(rest.begin() + pick);
        uint32_t qx = fp_form(lam, x, x, p);
        uint32_t inv = fp_inv(qx, p);
        for (auto &y : rest) {
            uint64_t f = static_cast<uint64_t>(fp_form(lam, y, x, p)) * inv % p;
            if (!f) continue;
            for (size_t t = 0; t < n; t++) y[t] = sub_mod(y[t], static_cast<uint32_t>(f * x[t] % p), p);
        }
        basis.push_back(x);
        diag.push_back(qx);
    }

    // Fold (a, b) into (1, ab) using a solution of a x² + b y² = 1.
    for (size_t i = 0; i + 1 < n; i++) {
        uint32_t a = diag[i];
        uint32_t b = diag[i + 1];
        uint32_t sx = 0;
        uint32_t sy = 0;
        bool found = false;
        for (uint32_t x = 0; x < p && !found; x++) {
            uint32_t rhs = sub_mod(1, static_cast<uint32_t>(static_cast<uint64_t>(a) * x % p * x % p), p);
            uint32_t y2 = static_cast<uint32_t>(static_cast<uint64_t>(rhs) * fp_inv(b, p) % p);
            if (!fp_is_square(y2, p)) continue;
            for (uint32_t y = 0; y < p; y++) {
                if (static_cast<uint64_t>(y) * y % p == y2) {
                    sx = x;
                    sy = y;
                    found = true;
                    break;
                }
            }
        }
        if (!found) throw std::runtime_error("no solution of a x^2 + b y^2 = 1");
        std::vector<uint32_t> u(n);
        std::vector<uint32_t> v(n);
        for (size_t t = 0; t < n; t++) {
            u[t] = static_cast<uint32_t>((static_cast<uint64_t>(sx) * basis[i][t] + static_cast<uint64_t>(sy) * basis[i + 1][t]) % p);
            uint64_t c1 = static_cast<uint64_t>(p - static_cast<uint64_t>(b) * sy % p) % p;
            uint64_t c2 = static_cast<uint64_t>(a) * sx % p;
            v[t] = static_cast<uint32_t>((c1 * basis[i][t] + c2 * basis[i + 1][t]) % p);
        }
        basis[i] = u;
        basis[i + 1] = v;
        diag[i] = 1;
        diag[i + 1] = static_cast<uint32_t>(static_cast<uint64_t>(a) * b % p);
    }

    FpFormClass out;
    out.prime = p;
    out.dimension = n;
    out.det_is_square = fp_is_square(det, p);
    out.diagonal = diag;
    out.transform = fp_transpose(basis);
    out.witt_index = fp_witt_index(n, out.det_is_square, p);
    size_t aniso = n - 2 * out.witt_index;
    if (aniso == 0) {
        out.witt_residue = "hyperbolic";
    } else if (aniso == 1) {
        // Anisotropic part <c> with c = (−1)^{(n−1)/2} det.
        bool sign_square = ((n - 1) / 2) % 2 == 0 || fp_is_square(p - 1, p);
        bool c_square = out.det_is_square == sign_square;
        out.witt_residue = c_square ? "anisotropic <1>" : "anisotropic <alpha>";
    } else {
        out.witt_residue = "anisotropic <1,-alpha>";
    }
    return out;
}

bool fp_congruent(const FpMatrix &a, const FpMatrix &b, uint32_t p) {
    if (a.size() != b.size()) return false;
    return classify_fp(a, p).det_is_square == classify_fp(b, p).det_is_square;
}

int64_t count_null_vectors(size_t n, size_t m, size_t k, uint32_t p) {
    if (k > m || m > n || n < 1) throw InvalidDimensions("need 0 <= k <= m <= n and n >= 1");
    auto pw = [p](long e) -> int64_t {
        int64_t r = 1;
        for (long i = 0; i < e; i++) r *= p;
        return r;
    };
    return pw(static_cast<long>(n - k - 1)) + pw(static_cast<long>(m)) - pw(static_cast<long>(n - m - 1));
}

uint64_t brute_force_null_count(const FpMatrix &lambda, const FpMatrix &null_rows, uint32_t p, uint64_t budget) {
    check_prime(p);
    size_t n = lambda.size();
    if (budget == 0) budget = enumeration_budget(uint64_t{1} << 24);
    uint64_t total = 1;
    for (size_t i = 0; i < n; i++) {
        total *= p;
        if (total > budget) throw BudgetExceeded("p^n exceeds enumeration budget");
    }
    std::vector<uint32_t> x(n, 0);
    uint64_t count = 0;
    for (uint64_t idx = 0; idx < total; idx++) {
        uint64_t t = idx;
        for (size_t i = 0; i < n; i++) {
            x[i] = static_cast<uint32_t>(t % p);
            t /= p;
        }
        if (fp_form(lambda, x, x, p)) continue;
        bool orth = true;
        for (const auto &u : null_rows) {
            if (fp_form(lambda, x, u, p)) {
                orth = false;
                break;
            }
        }
        if (orth) count++;
    }
    return count;
}

FpMatrix sample_fp_self_orthogonal(size_t n, size_t c, uint32_t p, uint64_t seed) {
    check_prime(p);
    if (n == 0 || n % p != 0) throw InvalidDimensions("n must be a positive multiple of p");
    if (c == 0 || 2 * c + 2 >= n) throw InvalidDimensions("need 1 <= c < (n - 2) / 2");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<uint32_t> coin(0, p - 1);
    FpMatrix rows;
    rows.push_back(std::vector<uint32_t>(n, 1));
    while (rows.size() < c) {
        FpMatrix free = fp_nullspace(rows, n, p);
        bool done = false;
        for (int attempt = 0; attempt < 10000 && !done; attempt++) {
            std::vector<uint32_t> x(n, 0);
            for (const auto &b : free) {
                uint64_t f = coin(rng);
                if (!f) continue;
                for (size_t t = 0; t < n; t++) x[t] = static_cast<uint32_t>((x[t] + f * b[t]) % p);
            }
            if (fp_dot(x, x, p) == 0) {
                rows.push_back(std::move(x));
                done = true;
            }
        }
        if (!done) throw std::runtime_error("null-vector rejection sampling exhausted its retry limit");
    }
    return rows;
}

double fp_kernel_bound(size_t n, size_t c) {
    return 20.0 * std::pow(0.6, static_cast<double>(n) - static_cast<double>(c)) +
           std::pow(11.0 / 15.0, static_cast<double>(c) - 1.0);
}

}  // namespace distillery
