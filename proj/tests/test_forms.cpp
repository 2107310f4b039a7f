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


#include <doctest.h>
#include <cmath>
#include <random>

#include "distillery/forms.hpp"
#include "distillery/inner.hpp"

using namespace distillery;

namespace {

BitMatrix random_nonsingular_symmetric(size_t n, std::mt19937_64 &rng) {
    while (true) {
        BitMatrix m(n, n);
        for (size_t i = 0; i < n; i++) {
            for (size_t j = i; j < n; j++) {
                bool b = rng() & 1;
                m.set(i, j, b);
                m.set(j, i, b);
            }
        }
        if (rank(m) == n) return m;
    }
}

bool some_vector_is_odd(const BitMatrix &lambda) {
    // vᵀΛv = Σ v_i² Λ_ii over F_2, so an odd vector exists iff the diagonal is nonzero.
    for (size_t i = 0; i < lambda.n_rows(); i++) {
        if (lambda.get(i, i)) return true;
    }
    return false;
}

FpMatrix fp_diag(const std::vector<uint32_t> &d) {
    FpMatrix m(d.size(), std::vector<uint32_t>(d.size(), 0));
    for (size_t i = 0; i < d.size(); i++) m[i][i] = d[i];
    return m;
}

uint32_t nonsquare(uint32_t p) {
    for (uint32_t a = 2; a < p; a++) {
        if (!fp_is_square(a, p)) return a;
    }
    return 0;
}

std::vector<uint32_t> digits(uint64_t idx, size_t n, uint32_t p) {
    std::vector<uint32_t> v(n);
    for (size_t i = 0; i < n; i++) {
        v[i] = static_cast<uint32_t>(idx % p);
        idx /= p;
    }
    return v;
}

// Greedy totally isotropic subspace of dimension k, or empty if none found.
FpMatrix isotropic_subspace(const FpMatrix &lambda, size_t k, uint32_t p) {
    size_t n = lambda.size();
    FpMatrix rows;
    uint64_t total = 1;
    for (size_t i = 0; i < n; i++) total *= p;
    for (uint64_t idx = 1; idx < total && rows.size() < k; idx++) {
        auto v = digits(idx, n, p);
        if (fp_form(lambda, v, v, p) != 0) continue;
        bool ok = true;
        for (const auto &r : rows) ok = ok && fp_form(lambda, v, r, p) == 0;
        if (!ok) continue;
        FpMatrix trial = rows;
        trial.push_back(v);
        if (fp_rank(trial, p) == trial.size()) rows = trial;
    }
    return rows;
}

}  // namespace

TEST_SUITE("forms") {
    TEST_CASE("classify_f2 examples") {
        auto c = classify_f2(BitMatrix::identity(3));
        CHECK(c.p_count == 3);
        CHECK(c.q_count == 0);
        c = classify_f2(BitMatrix::from_strings({"01", "10"}));
        CHECK(c.p_count == 0);
        CHECK(c.q_count == 2);
    }

    TEST_CASE("I1 plus a hyperbolic plane reduces to I3") {
        BitMatrix a = BitMatrix::from_strings({"111", "110", "101"});
        BitMatrix lam = normal_form(1, 2);
        CHECK(a.transpose() * BitMatrix::identity(3) * a == lam);
        auto c = classify_f2(lam);
        CHECK(c.p_count == 3);
        CHECK(c.q_count == 0);
        CHECK(c.transform.transpose() * lam * c.transform == BitMatrix::identity(3));
        // The inverse of the certificate above is a valid transform as well.
        BitMatrix inv = a * lam;
        CHECK(inv * a == BitMatrix::identity(3));
        CHECK(inv.transpose() * lam * inv == BitMatrix::identity(3));
    }

    TEST_CASE("classify_f2 round trip on random forms") {
        std::mt19937_64 rng(7);
        for (size_t n = 1; n <= 8; n++) {
            for (int trial = 0; trial < 100; trial++) {
                BitMatrix lam = random_nonsingular_symmetric(n, rng);
                auto c = classify_f2(lam);
                CHECK(c.p_count + c.q_count == n);
                CHECK((c.p_count > 0) == some_vector_is_odd(lam));
                CHECK(rank(c.transform) == n);
                CHECK(c.transform.transpose() * lam * c.transform == normal_form(c.p_count, c.q_count));
            }
        }
    }

    TEST_CASE("classify_f2 rejects bad input") {
        CHECK_THROWS_AS(classify_f2(BitMatrix::from_strings({"01", "00"})), NotSymmetric);
        CHECK_THROWS_AS(classify_f2(BitMatrix::from_strings({"11", "11"})), DegenerateForm);
    }

    TEST_CASE("magic basis examples") {
        auto m = magic_basis(BitMatrix::from_strings({"1111"}));
        CHECK(m.p == 0);
        CHECK(m.q == 2);
        m = magic_basis(library_code("7_1_3").stabilizers);
        CHECK(m.p == 1);
        CHECK(m.q == 0);
        m = magic_basis(library_code("16_6_4").stabilizers);
        CHECK(m.p == 0);
        CHECK(m.q == 6);
        CHECK_THROWS_AS(magic_basis(BitMatrix::from_strings({"110", "011"})), NotSelfOrthogonal);
    }

    TEST_CASE("magic basis gram is exact on library codes") {
        for (const auto &name : library_names()) {
            const CssCode &c = library_code(name);
            MagicBasis m = magic_basis(c.stabilizers);
            CAPTURE(name);
            CHECK(gram(m.all()) == normal_form(m.p, m.q));
            if (m.p > 0) CHECK(m.q == 0);
            Echelon se = rref(c.stabilizers);
            BitMatrix perp = orthogonal_complement(c.stabilizers);
            Echelon pe = rref(perp);
            BitMatrix stacked = c.stabilizers;
            for (const auto &v : m.all()) {
                CHECK(in_span(pe, v));
                stacked.push_row(v);
            }
            CHECK(rank(stacked) == rank(c.stabilizers) + m.all().size());
            CHECK(m.all().size() == c.k_inner);
        }
    }

    TEST_CASE("odd characteristic basics") {
        CHECK(fp_is_square(4, 5));
        CHECK_FALSE(fp_is_square(2, 5));
        auto c = classify_fp(fp_diag({2}), 5);
        CHECK_FALSE(c.det_is_square);
        CHECK_THROWS_AS(classify_fp(fp_diag({1}), 2), EvenCharacteristic);
        CHECK_THROWS_AS(classify_fp(FpMatrix{{1, 1}, {0, 1}}, 3), NotSymmetric);
        CHECK_THROWS_AS(classify_fp(fp_diag({1, 0}), 3), DegenerateForm);
    }

    TEST_CASE("diag(a, -a) is a hyperbolic plane and diag(1,1) is not at p = 3") {
        FpMatrix hyp{{0, 1}, {1, 0}};
        for (uint32_t a = 1; a < 3; a++) {
            FpMatrix d = fp_diag({a, 3 - a});
            CHECK(fp_congruent(d, hyp, 3));
            auto c = classify_fp(d, 3);
            CHECK_FALSE(c.det_is_square);
            CHECK(c.witt_index == 1);
        }
        CHECK_FALSE(fp_congruent(fp_diag({1, 1}), hyp, 3));
        auto c = classify_fp(fp_diag({1, 1}), 3);
        CHECK(c.det_is_square);
        CHECK(c.witt_index == 0);
    }

    TEST_CASE("classify_fp certificate and determinant class") {
        std::mt19937_64 rng(8);
        for (uint32_t p : {3u, 5u, 7u}) {
            for (size_t n = 1; n <= 5; n++) {
                for (int trial = 0; trial < 30; trial++) {
                    FpMatrix m(n, std::vector<uint32_t>(n));
                    for (size_t i = 0; i < n; i++) {
                        for (size_t j = i; j < n; j++) m[i][j] = m[j][i] = static_cast<uint32_t>(rng() % p);
                    }
                    if (fp_det(m, p) == 0) continue;
                    auto c = classify_fp(m, p);
                    FpMatrix d = fp_mul(fp_mul(fp_transpose(c.transform), m, p), c.transform, p);
                    CHECK(d == fp_diag(c.diagonal));
                    for (size_t i = 0; i + 1 < n; i++) CHECK(c.diagonal[i] == 1);
                    uint32_t det_t = fp_det(c.transform, p);
                    REQUIRE(det_t != 0);
                    CHECK(fp_det(d, p) == fp_det(m, p) * det_t % p * det_t % p);
                    CHECK(c.det_is_square == fp_is_square(fp_det(m, p), p));
                    CHECK(c.witt_index == fp_witt_index(n, c.det_is_square, p));
                }
            }
        }
    }

    TEST_CASE("congruence iff determinant classes match") {
        for (uint32_t p : {3u, 5u}) {
            uint32_t ns = nonsquare(p);
            for (size_t n = 1; n <= 4; n++) {
                std::vector<uint32_t> ones(n, 1), twisted(n, 1);
                twisted.back() = ns;
                CHECK(fp_congruent(fp_diag(ones), fp_diag(ones), p));
                CHECK_FALSE(fp_congruent(fp_diag(ones), fp_diag(twisted), p));
                std::vector<uint32_t> scaled(n, ns);
                CHECK(fp_congruent(fp_diag(scaled), fp_diag(n % 2 ? twisted : ones), p));
            }
        }
    }

    TEST_CASE("null vector counts") {
        CHECK(count_null_vectors(2, 1, 0, 3) == 5);
        CHECK(count_null_vectors(4, 2, 0, 5) == 145);
        CHECK(brute_force_null_count(FpMatrix{{0, 1}, {1, 0}}, {}, 3) == 5);
        for (uint32_t p : {3u, 5u}) {
            for (size_t m = 0; m <= 3; m++) CHECK(count_null_vectors(2 * m + 1, m, m, p) == std::pow(p, m));
        }
    }

    TEST_CASE("null vector formula matches brute force") {
        for (uint32_t p : {3u, 5u}) {
            uint32_t ns = nonsquare(p);
            for (size_t n = 1; n <= 4; n++) {
                for (bool twist : {false, true}) {
                    std::vector<uint32_t> d(n, 1);
                    if (twist) d.back() = ns;
                    FpMatrix lam = fp_diag(d);
                    size_t m = fp_witt_index(n, fp_is_square(fp_det(lam, p), p), p);
                    for (size_t k = 0; k <= m; k++) {
                        FpMatrix null_rows = isotropic_subspace(lam, k, p);
                        REQUIRE(null_rows.size() == k);
                        CAPTURE(p);
                        CAPTURE(n);
                        CAPTURE(m);
                        CAPTURE(k);
                        CHECK(static_cast<int64_t>(brute_force_null_count(lam, null_rows, p)) ==
                              count_null_vectors(n, m, k, p));
                    }
                    // The greedy search cannot go past the Witt index.
                    CHECK(isotropic_subspace(lam, m + 1, p).size() == m);
                }
            }
        }
    }

    TEST_CASE("sampled F_p matrices are self-orthogonal") {
        for (uint64_t seed = 0; seed < 200; seed++) {
            FpMatrix m = sample_fp_self_orthogonal(9, 3, 3, seed);
            REQUIRE(m.size() == 3);
            CHECK(m[0] == std::vector<uint32_t>(9, 1));
            for (const auto &a : m) {
                for (const auto &b : m) CHECK(fp_dot(a, b, 3) == 0);
            }
        }
        CHECK_THROWS_AS(sample_fp_self_orthogonal(10, 3, 3, 0), InvalidDimensions);
        CHECK_THROWS_AS(sample_fp_self_orthogonal(9, 4, 3, 0), InvalidDimensions);
    }

    TEST_CASE("F_p kernel bound formula") {
        CHECK(fp_kernel_bound(9, 3) == doctest::Approx(20 * std::pow(0.6, 6) + std::pow(11.0 / 15.0, 2)));
        CHECK(fp_kernel_bound(9, 3) > 1.0);
    }

    TEST_CASE("F_p kernel hit frequency stays below the bound") {
        const size_t n = 30, c = 5;
        const uint32_t p = 3;
        std::vector<uint32_t> v(n, 0);
        // Orthogonal to the all-ones row, so only the random rows can miss it.
        v[0] = 1;
        v[1] = 2;
        const int trials = 10000;
        int hits = 0;
        for (int t = 0; t < trials; t++) {
            FpMatrix m = sample_fp_self_orthogonal(n, c, p, static_cast<uint64_t>(t));
            bool zero = true;
            for (const auto &row : m) zero = zero && fp_dot(row, v, p) == 0;
            hits += zero;
        }
        double f = static_cast<double>(hits) / trials;
        double z = 1.96;
        double lower = (f + z * z / (2 * trials) - z * std::sqrt(f * (1 - f) / trials + z * z / (4.0 * trials * trials))) /
                       (1 + z * z / trials);
        CHECK(lower <= fp_kernel_bound(n, c));
    }
}
