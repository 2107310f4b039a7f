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
#include <fstream>
#include <random>
#include <sstream>

#include "distillery/forms.hpp"
#include "distillery/inner.hpp"

using namespace distillery;

namespace {

const std::vector<std::string> kSteaneRows = {"0001111", "0110011", "1010101"};

std::string read_file(const std::string &path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("inner") {
    TEST_CASE("from_self_orthogonal examples") {
        CssCode c = from_self_orthogonal(BitMatrix::from_strings({"1111"}), "four");
        CHECK(c.n_inner == 4);
        CHECK(c.k_inner == 2);
        CHECK(c.distance == 2);
        CHECK(c.kind == CodeKind::Hyperbolic);

        c = from_self_orthogonal(BitMatrix::from_strings(kSteaneRows), "steane");
        CHECK(c.k_inner == 1);
        CHECK(c.distance == 3);
        CHECK(c.kind == CodeKind::Normal);

        CHECK_THROWS_AS(from_self_orthogonal(BitMatrix::from_strings({"100"}), "bad"), NotSelfOrthogonal);
    }

    TEST_CASE("shipped [[21,3,5]] file derives the library code") {
        CssCode c = load_code_file(std::string(DISTILLERY_SOURCE_DIR) + "/data/codes/21_3_5.txt");
        CHECK(c.n_inner == 21);
        CHECK(c.k_inner == 3);
        CHECK(c.distance == 5);
        CHECK(c.kind == CodeKind::Normal);
        CHECK(c.stabilizers.n_rows() == 9);
    }

    TEST_CASE("library parameters and verification") {
        struct Want {
            const char *name;
            size_t n, k, d;
            CodeKind kind;
            size_t p, q;
        };
        const Want want[] = {
            {"4_2_2", 4, 2, 2, CodeKind::Hyperbolic, 0, 2},    {"7_1_3", 7, 1, 3, CodeKind::Normal, 1, 0},
            {"15_7_3", 15, 7, 3, CodeKind::Normal, 7, 0},      {"16_2_4", 16, 2, 4, CodeKind::Hyperbolic, 0, 2},
            {"16_6_4", 16, 6, 4, CodeKind::Hyperbolic, 0, 6},  {"17_1_5", 17, 1, 5, CodeKind::Normal, 1, 0},
            {"21_3_5", 21, 3, 5, CodeKind::Normal, 3, 0},      {"23_1_7", 23, 1, 7, CodeKind::Normal, 1, 0},
        };
        CHECK(library_names().size() == 8);
        for (const auto &w : want) {
            const CssCode &c = library_code(w.name);
            CAPTURE(w.name);
            CHECK(c.n_inner == w.n);
            CHECK(c.k_inner == w.k);
            CHECK(c.distance == w.d);
            CHECK(c.kind == w.kind);
            CHECK(c.magic.p == w.p);
            CHECK(c.magic.q == w.q);
            CHECK(c.stabilizers.is_self_orthogonal());
            CHECK(c.k_inner == c.n_inner - 2 * rank(c.stabilizers));
            CHECK(c.k_inner == c.magic.p + c.magic.q);
            VerificationReport r = verify_code(c);
            CHECK(r.ok());
            CHECK(r.certified_distance == w.d);
        }
        CHECK_THROWS_AS(library_code("5_1_3"), UnknownCode);
    }

    TEST_CASE("[[17,1,5]] keeps its published generator rows") {
        const std::vector<std::string> rows = {
            "11011010101000010", "01100011001100110", "00110110010011001", "00010101000111110",
            "00001110010011101", "00000101000110000", "00000011111011010", "00000001010100001",
        };
        CHECK(library_code("17_1_5").stabilizers == BitMatrix::from_strings(rows));
    }

    TEST_CASE("logical representatives obey the Pauli algebra") {
        for (const auto &name : library_names()) {
            const CssCode &c = library_code(name);
            CAPTURE(name);
            for (size_t i = 0; i < c.k_inner; i++) {
                for (size_t j = 0; j < c.k_inner; j++) {
                    CHECK(c.logical_x[i].anticommutes(c.logical_z[j]) == (i == j));
                    CHECK_FALSE(c.logical_x[i].anticommutes(c.logical_x[j]));
                    CHECK_FALSE(c.logical_z[i].anticommutes(c.logical_z[j]));
                }
                CHECK(c.in_normalizer(c.x_vectors[i]));
                CHECK(c.in_normalizer(c.z_vectors[i]));
            }
        }
    }

    TEST_CASE("[[16,6,4]] hadamard swaps three pairs") {
        const CssCode &c = library_code("16_6_4");
        CHECK(c.n_pairs() == 3);
        for (size_t j = 0; j < 3; j++) {
            // Transversal H maps X(w) to Z(w): the X̃ of slot 2j becomes the X̃ of slot 2j+1.
            CHECK(c.logical_x[2 * j].x == c.logical_x[2 * j + 1].z);
            CHECK(c.logical_z[2 * j].z == c.logical_z[2 * j + 1].x);
        }
    }

    TEST_CASE("verify_code catches corruption") {
        CssCode c = library_code("7_1_3");
        c.stabilizers.set(0, 0, !c.stabilizers.get(0, 0));
        VerificationReport r = verify_code(c);
        CHECK_FALSE(r.self_orthogonal);
        CHECK_FALSE(r.ok());

        CssCode d = library_code("17_1_5");
        d.distance = 6;
        r = verify_code(d);
        CHECK_FALSE(r.distance_ok);
        CHECK(r.certified_distance == 5);
    }

    TEST_CASE("puncture") {
        CssCode p = puncture(library_code("16_6_4"), 0);
        CHECK(p.n_inner == 15);
        CHECK(p.k_inner == 7);
        CHECK(p.distance == 3);
        CHECK(verify_code(p).ok());

        CssCode t = puncture(library_code("4_2_2"), 0);
        CHECK(t.n_inner == 3);
        CHECK(t.k_inner == 3);
        CHECK(t.distance == 1);
        CHECK(t.stabilizers.n_rows() == 0);

        CHECK_THROWS_AS(puncture(library_code("7_1_3"), 9), InvalidQubit);
    }

    TEST_CASE("puncture keeps (n-1, k+1) and projects the normalizer") {
        for (const char *name : {"7_1_3", "16_6_4", "17_1_5", "23_1_7"}) {
            const CssCode &c = library_code(name);
            for (size_t q = 0; q < c.n_inner; q += 3) {
                CssCode p = puncture(c, q);
                CAPTURE(name);
                CAPTURE(q);
                CHECK(p.n_inner == c.n_inner - 1);
                CHECK(p.k_inner == c.k_inner + 1);
                CHECK(p.stabilizers.is_self_orthogonal());
                // Every vector of the original normalizer, restricted, lies in the new one.
                BitMatrix perp = orthogonal_complement(c.stabilizers);
                for (const auto &row : perp.rows()) CHECK(p.in_normalizer(row.without(q)));
            }
        }
    }

    TEST_CASE("majorana lift") {
        CssCode five = majorana_lift({"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"}, 5, "20_2_6");
        CHECK(five.n_inner == 20);
        CHECK(five.k_inner == 2);
        CHECK(five.distance == 6);
        CHECK(verify_code(five).ok());

        CssCode trivial = majorana_lift({}, 1);
        CHECK(trivial.stabilizers == library_code("4_2_2").stabilizers);
        CHECK(trivial.k_inner == 2);
        CHECK(trivial.distance == 2);

        CHECK_THROWS_AS(majorana_lift({"XI", "ZI"}, 2), NonCommutingInput);
    }

    TEST_CASE("majorana lift doubles parameters and keeps block rows") {
        struct Input {
            std::vector<std::string> rows;
            size_t n, k, d;
        };
        const Input inputs[] = {
            {{}, 2, 2, 1},
            {{"XX", "ZZ"}, 2, 0, 1},
            {{"ZZI", "IZZ"}, 3, 1, 1},
            {{"XXXX", "ZZZZ"}, 4, 2, 2},
        };
        for (const auto &in : inputs) {
            CssCode c = majorana_lift(in.rows, in.n);
            CHECK(c.n_inner == 4 * in.n);
            CHECK(c.k_inner == 2 * in.k);
            if (in.k > 0) CHECK(c.distance == 2 * in.d);
            CHECK(c.stabilizers.is_self_orthogonal());
            Echelon e = rref(c.stabilizers);
            for (size_t b = 0; b < in.n; b++) {
                BitVector block(4 * in.n);
                for (size_t i = 0; i < 4; i++) block.set(4 * b + i);
                CHECK(in_span(e, block));
            }
        }
    }

    TEST_CASE("random inner matrices are self-orthogonal") {
        for (uint64_t seed = 0; seed < 1000; seed++) {
            BitMatrix m = sample_random_inner(16, 5, seed);
            REQUIRE(m.n_rows() == 5);
            CHECK(m.row(0) == BitVector::ones(16));
            CHECK(m.is_self_orthogonal());
        }
        CHECK(sample_random_inner(16, 5, 3) == sample_random_inner(16, 5, 3));
        CHECK_THROWS_AS(sample_random_inner(15, 3, 0), InvalidDimensions);
    }

    TEST_CASE("random inner codes reach distance 4 sometimes") {
        // Roughly one sample in a thousand; the first-moment bound is vacuous here.
        CHECK(ncd_bound(16, 5, 3) > 1.0);
        int good = 0;
        for (uint64_t seed = 0; seed < 20000; seed++) {
            CssCode c = from_self_orthogonal(sample_random_inner(16, 5, seed), "r");
            if (c.k_inner > 0 && c.distance >= 4) good++;
        }
        CHECK(good > 0);
    }

    TEST_CASE("weight-2 kernel hits respect the first-moment bound") {
        const size_t n = 16, c = 5;
        BitVector v(n);
        v.set(3);
        v.set(10);
        const int trials = 10000;
        int hits = 0;
        for (int t = 0; t < trials; t++) {
            BitMatrix m = sample_random_inner(n, c, static_cast<uint64_t>(t));
            hits += m.mul(v).is_zero();
        }
        double f = static_cast<double>(hits) / trials;
        double bound = std::pow(2.0, -double(c) + 1) + std::pow(2.0, -double(n) + c + 1);
        double z = 1.96;
        double lower = (f + z * z / (2 * trials) - z * std::sqrt(f * (1 - f) / trials + z * z / (4.0 * trials * trials))) /
                       (1 + z * z / trials);
        CHECK(lower <= bound);
    }

    TEST_CASE("ncd bound") {
        double b = ncd_bound(16, 5, 3);
        double want = (std::pow(2.0, -16 + 5 + 1) + std::pow(2.0, -5 + 1)) * (16 + 120 + 560);
        CHECK(b == doctest::Approx(want));
        CHECK(b > 1.0);
        CHECK(ncd_bound(16, 5, 0) == 0.0);
        double prev = 0;
        for (size_t d = 0; d <= 16; d++) {
            double cur = ncd_bound(16, 5, d);
            CHECK(cur >= prev);
            prev = cur;
        }
        for (size_t n : {8u, 16u, 30u, 60u}) {
            for (size_t c = 1; c < n / 2; c += 3) {
                for (size_t d = 0; d <= 8; d++) {
                    CHECK(ncd_bound_exact(n, c, d).value() == doctest::Approx(ncd_bound(n, c, d)).epsilon(1e-12));
                }
            }
        }
    }

    TEST_CASE("logical weight distributions") {
        auto w7 = logical_weight_distribution(library_code("7_1_3"));
        CHECK(w7[1] == 0);
        CHECK(w7[3] == 7);
        auto w23 = logical_weight_distribution(library_code("23_1_7"));
        for (size_t w = 1; w < 7; w++) CHECK(w23[w] == 0);
        CHECK(w23[7] > 0);
        auto w17 = logical_weight_distribution(library_code("17_1_5"));
        CHECK(w17[5] == 51);
    }

    TEST_CASE("golay constructions") {
        BitMatrix g = golay24_lexicode();
        CHECK(g.n_rows() == 12);
        CHECK(g.n_cols() == 24);
        for (const auto &r : g.rows()) CHECK(r.weight() % 4 == 0);
        CssCode c = golay_21_3_5();
        CHECK(c.n_inner == 21);
        CHECK(c.k_inner == 3);
        CHECK(c.distance == 5);
    }

    TEST_CASE("code files round trip") {
        for (const auto &name : library_names()) {
            const CssCode &c = library_code(name);
            CssCode back = parse_code_file(format_code_file(c), name);
            CHECK(back.stabilizers == c.stabilizers);
            CssCode shipped = load_code_file(std::string(DISTILLERY_SOURCE_DIR) + "/data/codes/" + name + ".txt");
            CHECK(shipped.stabilizers == c.stabilizers);
            CHECK(read_file(std::string(DISTILLERY_SOURCE_DIR) + "/data/codes/" + name + ".txt") == format_code_file(c));
        }
        CHECK_THROWS_AS(parse_code_file("7 1 5 normal\n0001111\n0110011\n1010101\n", "x"), HeaderMismatch);
        CHECK_THROWS_AS(parse_code_file("7 1 3 normal\n00011\n", "x"), ParseError);
        CHECK_THROWS_AS(parse_code_file("", "x"), ParseError);
    }
}
