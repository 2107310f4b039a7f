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

#include "distillery/inner.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

namespace distillery {

const char *kind_name(CodeKind k) { return k == CodeKind::Normal ? "normal" : "hyperbolic"; }

bool CssCode::in_normalizer(const BitVector &e) const {
    for (const auto &s : stabilizers.rows()) {
        if (s.dot(e)) return false;
    }
    return true;
}

uint64_t CssCode::syndrome(const BitVector &e) const {
    uint64_t m = 0;
    for (size_t i = 0; i < stabilizers.n_rows(); i++) {
        if (stabilizers.row(i).dot(e)) m |= uint64_t{1} << i;
    }
    return m;
}

LogicalPauli CssCode::logical_of_y(const BitVector &e) const {
    LogicalPauli l;
    for (size_t i = 0; i < k_inner; i++) {
        if (e.dot(z_vectors[i])) l.x |= uint64_t{1} << i;
        if (e.dot(x_vectors[i])) l.z |= uint64_t{1} << i;
    }
    return l;
}

namespace {

PauliString x_type(const BitVector &v) { return {v, BitVector(v.size())}; }
PauliString z_type(const BitVector &v) { return {BitVector(v.size()), v}; }

void assign_logicals(CssCode &c) {
    size_t n = c.n_inner;
    c.x_vectors.clear();
    c.z_vectors.clear();
    c.logical_x.clear();
    c.logical_z.clear();
    for (const auto &v : c.magic.normal_vectors) {
        c.x_vectors.push_back(v);
        c.z_vectors.push_back(v);
        c.logical_x.push_back(x_type(v));
        c.logical_z.push_back(z_type(v));
    }
    const auto &h = c.magic.hyperbolic_vectors;
    for (size_t j = 0; j + 1 < h.size(); j += 2) {
        const BitVector &w = h[j];
        const BitVector &w2 = h[j + 1];
        c.x_vectors.push_back(w);
        c.z_vectors.push_back(w2);
        c.logical_x.push_back(x_type(w));
        c.logical_z.push_back(z_type(w2));
        c.x_vectors.push_back(w);
        c.z_vectors.push_back(w2);
        c.logical_x.push_back(z_type(w));
        c.logical_z.push_back(x_type(w2));
    }
    (void)n;
}

}  // namespace

CssCode from_self_orthogonal(const BitMatrix &rows, const std::string &name) {
    if (!rows.is_self_orthogonal()) throw NotSelfOrthogonal("stabilizer rows of " + name + " are not self-orthogonal");
    CssCode c;
    c.name = name;
    c.n_inner = rows.n_cols();
    c.stabilizers = rank(rows) == rows.n_rows() ? rows : rref(rows).basis;
    c.magic = magic_basis(c.stabilizers);
    c.k_inner = c.magic.p + c.magic.q;
    if (c.k_inner + 2 * c.stabilizers.n_rows() != c.n_inner) {
        throw std::logic_error("magic basis dimension disagrees with n - 2 rank(S)");
    }
    c.kind = c.magic.q == 0 ? CodeKind::Normal : CodeKind::Hyperbolic;
    assign_logicals(c);
    c.distance = c.k_inner == 0 ? 0 : min_weight_coset(c.stabilizers, orthogonal_complement(c.stabilizers));
    return c;
}

VerificationReport verify_code(const CssCode &code) {
    VerificationReport rep;
    try {
        const BitMatrix &s = code.stabilizers;
        rep.self_orthogonal = s.is_self_orthogonal();
        if (!rep.self_orthogonal) rep.failures.push_back("stabilizer rows are not self-orthogonal");
        if (code.k_inner + 2 * rank(s) != code.n_inner) rep.failures.push_back("k_inner != n_inner - 2 rank(S)");
        size_t k = code.k_inner;
        if (code.logical_x.size() != k || code.logical_z.size() != k) {
            rep.failures.push_back("logical operator count differs from k_inner");
            return rep;
        }

        // Canonical commutation and commutation with every stabilizer.
        rep.commutation = true;
        for (size_t a = 0; a < k; a++) {
            for (size_t b = 0; b < k; b++) {
                bool xz = code.logical_x[a].anticommutes(code.logical_z[b]);
                bool xx = code.logical_x[a].anticommutes(code.logical_x[b]);
                bool zz = code.logical_z[a].anticommutes(code.logical_z[b]);
                if (xz != (a == b) || xx || zz) rep.commutation = false;
            }
            for (const auto &row : s.rows()) {
                for (const auto *op : {&code.logical_x[a], &code.logical_z[a]}) {
                    if (op->anticommutes(x_type(row)) || op->anticommutes(z_type(row))) rep.commutation = false;
                }
            }
        }
        if (!rep.commutation) rep.failures.push_back("logical operators violate canonical commutation relations");

        // Transversal H swaps X and Z parts; compare modulo the stabilizer group.
        Echelon es = rref(s);
        auto equal_mod_s = [&](const PauliString &a, const PauliString &b) {
            return in_span(es, a.x ^ b.x) && in_span(es, a.z ^ b.z);
        };
        auto hadamard = [](const PauliString &p) { return PauliString{p.z, p.x}; };
        rep.hadamard_action = true;
        size_t p = code.magic.p;
        for (size_t i = 0; i < k; i++) {
            size_t target = i;
            if (i >= p) target = ((i - p) % 2 == 0) ? i + 1 : i - 1;
            // H on a normal slot maps X̃ to Z̃; a swap maps X̃_i to X̃_partner.
            const PauliString &want_x = i < p ? code.logical_z[i] : code.logical_x[target];
            const PauliString &want_z = i < p ? code.logical_x[i] : code.logical_z[target];
            if (!equal_mod_s(hadamard(code.logical_x[i]), want_x) || !equal_mod_s(hadamard(code.logical_z[i]), want_z)) {
                rep.hadamard_action = false;
            }
        }
        if ((code.kind == CodeKind::Normal) != (code.magic.q == 0)) rep.hadamard_action = false;
        if (!rep.hadamard_action) rep.failures.push_back("transversal Hadamard does not act as H on normal slots and SWAP on pairs");

        if (k == 0) {
            rep.distance_ok = code.distance == 0;
        } else {
            rep.certified_distance = min_weight_coset(s, orthogonal_complement(s));
            rep.distance_ok = rep.certified_distance == code.distance;
        }
        if (!rep.distance_ok) {
            rep.failures.push_back("declared distance " + std::to_string(code.distance) + " but certified " +
                                   std::to_string(rep.certified_distance));
        }
    } catch (const std::exception &ex) {
        rep.failures.push_back(std::string("verification aborted: ") + ex.what());
    }
    return rep;
}

CssCode puncture(const CssCode &code, size_t qubit) {
    if (qubit >= code.n_inner) throw InvalidQubit("qubit index out of range");
    std::vector<BitVector> rows = code.stabilizers.rows();
    size_t pick = rows.size();
    for (size_t i = 0; i < rows.size(); i++) {
        if (rows[i].get(qubit)) {
            pick = i;
            break;
        }
    }
    if (pick == rows.size()) throw InvalidQubit("no stabilizer generator is supported on the qubit");
    for (size_t i = 0; i < rows.size(); i++) {
        if (i != pick && rows[i].get(qubit)) rows[i] ^= rows[pick];
    }
    BitMatrix out(code.n_inner - 1);
    for (size_t i = 0; i < rows.size(); i++) {
        if (i != pick) out.push_row(rows[i].without(qubit));
    }
    std::string name = std::to_string(code.n_inner - 1) + "_" + std::to_string(code.k_inner + 1) + "_x";
    CssCode c = from_self_orthogonal(out, name);
    c.name = std::to_string(c.n_inner) + "_" + std::to_string(c.k_inner) + "_" + std::to_string(c.distance);
    return c;
}

CssCode majorana_lift(const std::vector<std::string> &pauli_rows, size_t n, const std::string &name) {
    std::vector<PauliString> paulis;
    for (const auto &r : pauli_rows) {
        if (r.size() != n) throw std::invalid_argument("Pauli row length differs from n");
        PauliString p{BitVector(n), BitVector(n)};
        for (size_t j = 0; j < n; j++) {
            char ch = r[j];
            if (ch == 'X' || ch == 'Y') p.x.set(j);
            if (ch == 'Z' || ch == 'Y') p.z.set(j);
            if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z' && ch != '_') {
                throw std::invalid_argument("Pauli rows use the characters I, X, Y, Z");
            }
        }
        paulis.push_back(p);
    }
    for (size_t a = 0; a < paulis.size(); a++) {
        for (size_t b = a + 1; b < paulis.size(); b++) {
            if (paulis[a].anticommutes(paulis[b])) throw NonCommutingInput("input stabilizer rows do not commute");
        }
    }
    BitMatrix m(4 * n);
    for (size_t j = 0; j < n; j++) {
        BitVector q(4 * n);
        for (size_t t = 0; t < 4; t++) q.set(4 * j + t);
        m.push_row(q);
    }
    for (const auto &p : paulis) {
        BitVector v(4 * n);
        for (size_t j = 0; j < n; j++) {
            bool x = p.x.get(j);
            bool z = p.z.get(j);
            if (!x && !z) continue;
            v.set(4 * j);
            size_t partner = (x && z) ? 2 : (x ? 1 : 3);
            v.set(4 * j + partner);
        }
        m.push_row(v);
    }
    CssCode c = from_self_orthogonal(m, name);
    if (name.empty()) {
        c.name = std::to_string(c.n_inner) + "_" + std::to_string(c.k_inner) + "_" + std::to_string(c.distance);
    }
    return c;
}

BitMatrix sample_random_inner(size_t n, size_t c, uint64_t seed) {
    if (n == 0 || n % 2) throw InvalidDimensions("random inner ensemble needs even n");
    if (c == 0 || c > n / 2) throw InvalidDimensions("need 1 <= c <= n/2");
    std::mt19937_64 rng(seed);
    BitMatrix m(n);
    m.push_row(BitVector::ones(n));
    while (m.n_rows() < c) {
        BitMatrix perp = orthogonal_complement(m);
        BitVector v(n);
        for (const auto &b : perp.rows()) {
            if (rng() & 1) v ^= b;
        }
        m.push_row(v);
    }
    return m;
}

double ncd_bound(size_t n, size_t c, size_t d) {
    double sum = 0;
    for (size_t w = 1; w <= d && w <= n; w++) sum += static_cast<double>(binom128(static_cast<unsigned>(n), static_cast<unsigned>(w)));
    double pref = std::ldexp(1.0, -static_cast<int>(n) + static_cast<int>(c) + 1) + std::ldexp(1.0, -static_cast<int>(c) + 1);
    return pref * sum;
}

Rational128 ncd_bound_exact(size_t n, size_t c, size_t d) {
    if (n > 62 || c > n) throw std::invalid_argument("exact ncd bound supports n <= 62 and c <= n");
    unsigned __int128 sum = 0;
    for (size_t w = 1; w <= d && w <= n; w++) sum += binom128(static_cast<unsigned>(n), static_cast<unsigned>(w));
    unsigned __int128 one = 1;
    unsigned __int128 pref = (one << (c + 1)) + (one << (n - c + 1));
    Rational128 r;
    r.num = pref * sum;
    r.den = one << n;
    while (r.num % 2 == 0 && r.den % 2 == 0 && r.den > 1) {
        r.num /= 2;
        r.den /= 2;
    }
    if (r.num == 0) r.den = 1;
    return r;
}

namespace {

// Bit permutation x -> x ^ c inside a 64-bit word, for c < 64.
uint64_t permute_within_word(uint64_t w, unsigned c) {
    static const uint64_t masks[6] = {0x5555555555555555ULL, 0x3333333333333333ULL, 0x0F0F0F0F0F0F0F0FULL,
                                      0x00FF00FF00FF00FFULL, 0x0000FFFF0000FFFFULL, 0x00000000FFFFFFFFULL};
    for (unsigned b = 0; b < 6; b++) {
        if (c >> b & 1) {
            unsigned s = 1u << b;
            w = ((w >> s) & masks[b]) | ((w & masks[b]) << s);
        }
    }
    return w;
}

}  // namespace

BitMatrix golay24_lexicode() {
    constexpr unsigned n = 24;
    constexpr unsigned d = 8;
    constexpr uint64_t total = uint64_t{1} << n;
    // covered[x] marks vectors within distance d-1 of the current code.
    std::vector<uint64_t> covered(total / 64, 0);
    for (uint64_t x = 0; x < total; x++) {
        if (std::popcount(x) < static_cast<int>(d)) covered[x >> 6] |= uint64_t{1} << (x & 63);
    }
    std::vector<uint64_t> basis;
    uint64_t next = 1;
    while (true) {
        while (next < total && (covered[next >> 6] >> (next & 63) & 1)) next++;
        if (next >= total) break;
        uint64_t v = next;
        basis.push_back(v);
        std::vector<uint64_t> shifted(covered.size());
        uint64_t hi = v >> 6;
        unsigned lo = static_cast<unsigned>(v & 63);
        for (uint64_t i = 0; i < covered.size(); i++) shifted[i ^ hi] = permute_within_word(covered[i], lo);
        for (uint64_t i = 0; i < covered.size(); i++) covered[i] |= shifted[i];
    }
    // Integer bit (n-1-j) is string position j, so numeric order is lexicographic order.
    BitMatrix m(n);
    for (uint64_t v : basis) {
        BitVector row(n);
        for (unsigned j = 0; j < n; j++) row.set(j, v >> (n - 1 - j) & 1);
        m.push_row(row);
    }
    return m;
}

BitMatrix shorten(const BitMatrix &code_basis, size_t bit) {
    std::vector<BitVector> rows = code_basis.rows();
    size_t pick = rows.size();
    for (size_t i = 0; i < rows.size(); i++) {
        if (rows[i].get(bit)) {
            pick = i;
            break;
        }
    }
    BitMatrix out(code_basis.n_cols() - 1);
    for (size_t i = 0; i < rows.size(); i++) {
        if (i == pick) continue;
        BitVector r = rows[i];
        if (pick < rows.size() && r.get(bit)) r ^= rows[pick];
        out.push_row(r.without(bit));
    }
    return out;
}

namespace {

const char *kCode17[] = {"11011010101000010", "01100011001100110", "00110110010011001", "00010101000111110",
                         "00001110010011101", "00000101000110000", "00000011111011010", "00000001010100001"};
const char *kCode21[] = {"100000000011110110100", "010000000001111011010", "001000000110110011001",
                         "000100000011011001101", "000010000001101100111", "000001000110111000110",
                         "000000100101010010111", "000000010100100111110", "000000001100011101011"};
const char *kCode16[] = {"1111111111111111", "1111111100000000", "1111000011110000", "1100110011001100",
                         "1010101010101010"};
const char *kSteane[] = {"0001111", "0110011", "1010101"};

template <size_t N>
BitMatrix rows_of(const char *(&rows)[N]) {
    std::vector<std::string> v(rows, rows + N);
    return BitMatrix::from_strings(v);
}

struct Expected {
    size_t n, k, d;
    CodeKind kind;
};

std::map<std::string, CssCode> build_library() {
    std::map<std::string, CssCode> lib;
    lib.emplace("4_2_2", from_self_orthogonal(BitMatrix::from_strings({"1111"}), "4_2_2"));
    lib.emplace("7_1_3", from_self_orthogonal(rows_of(kSteane), "7_1_3"));
    CssCode c16 = from_self_orthogonal(rows_of(kCode16), "16_6_4");
    lib.emplace("16_6_4", c16);
    lib.emplace("17_1_5", from_self_orthogonal(rows_of(kCode17), "17_1_5"));
    lib.emplace("21_3_5", from_self_orthogonal(rows_of(kCode21), "21_3_5"));
    lib.emplace("23_1_7", from_self_orthogonal(shorten(golay24_lexicode(), 0), "23_1_7"));
    // Promote the X̃ and Z̃ of the second and third pairs (vectors w3 and w5) to stabilizers.
    BitMatrix s24 = c16.stabilizers;
    s24.push_row(c16.magic.hyperbolic_vectors[2]);
    s24.push_row(c16.magic.hyperbolic_vectors[4]);
    lib.emplace("16_2_4", from_self_orthogonal(s24, "16_2_4"));
    CssCode c15 = puncture(c16, 0);
    c15.name = "15_7_3";
    lib.emplace("15_7_3", c15);

    const std::map<std::string, Expected> want = {
        {"4_2_2", {4, 2, 2, CodeKind::Hyperbolic}},  {"7_1_3", {7, 1, 3, CodeKind::Normal}},
        {"16_6_4", {16, 6, 4, CodeKind::Hyperbolic}}, {"17_1_5", {17, 1, 5, CodeKind::Normal}},
        {"21_3_5", {21, 3, 5, CodeKind::Normal}},    {"23_1_7", {23, 1, 7, CodeKind::Normal}},
        {"16_2_4", {16, 2, 4, CodeKind::Hyperbolic}}, {"15_7_3", {15, 7, 3, CodeKind::Normal}},
    };
    for (const auto &[name, e] : want) {
        const CssCode &c = lib.at(name);
        if (c.n_inner != e.n || c.k_inner != e.k || c.distance != e.d || c.kind != e.kind) {
            throw LibraryCorrupt("library code " + name + " has unexpected parameters");
        }
        VerificationReport r = verify_code(c);
        if (!r.ok()) throw LibraryCorrupt("library code " + name + " failed verification: " + r.failures.front());
    }
    return lib;
}

}  // namespace

const std::map<std::string, CssCode> &library() {
    static const std::map<std::string, CssCode> lib = build_library();
    return lib;
}

const CssCode &library_code(const std::string &name) {
    const auto &lib = library();
    auto it = lib.find(name);
    if (it == lib.end()) throw UnknownCode("unknown inner code: " + name);
    return it->second;
}

std::vector<std::string> library_names() {
    return {"4_2_2", "7_1_3", "15_7_3", "16_2_4", "16_6_4", "17_1_5", "21_3_5", "23_1_7"};
}

CssCode golay_21_3_5() {
    CssCode c = puncture(puncture(library_code("23_1_7"), 0), 0);
    c.name = "21_3_5_golay";
    return c;
}

std::string format_code_file(const CssCode &code) {
    std::ostringstream out;
    out << code.n_inner << ' ' << code.k_inner << ' ' << code.distance << ' ' << kind_name(code.kind) << '\n';
    for (const auto &r : code.stabilizers.rows()) out << r.str() << '\n';
    return out.str();
}

CssCode parse_code_file(const std::string &text, const std::string &name) {
    std::istringstream in(text);
    std::string line;
    size_t n = 0, k = 0, d = 0;
    std::string kind;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream h(line);
        if (!(h >> n >> k >> d >> kind)) throw ParseError("code file header must be 'n k d kind'");
        break;
    }
    if (kind != "normal" && kind != "hyperbolic") throw ParseError("code kind must be normal or hyperbolic");
    BitMatrix rows(n);
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line.size() != n) throw ParseError("stabilizer row length differs from n");
        rows.push_row(BitVector::from_string(line));
    }
    CssCode c = from_self_orthogonal(rows, name);
    if (c.k_inner != k || c.distance != d || kind_name(c.kind) != kind) {
        throw HeaderMismatch("code file header " + std::to_string(n) + " " + std::to_string(k) + " " +
                             std::to_string(d) + " " + kind + " disagrees with the derived [[" + std::to_string(n) + "," +
                             std::to_string(c.k_inner) + "," + std::to_string(c.distance) + "]] " +
                             kind_name(c.kind));
    }
    return c;
}

CssCode load_code_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open code file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    std::string base = path.substr(path.find_last_of('/') + 1);
    if (auto dot = base.rfind('.'); dot != std::string::npos) base = base.substr(0, dot);
    return parse_code_file(ss.str(), base);
}

std::vector<uint64_t> logical_weight_distribution(const CssCode &code, uint64_t budget) {
    BitMatrix perp = orthogonal_complement(code.stabilizers);
    if (code.stabilizers.n_rows() == 0) {
        std::vector<uint64_t> d = coset_weight_distribution(code.stabilizers, perp, budget);
        d[0] = 0;
        return d;
    }
    return coset_weight_distribution(code.stabilizers, perp, budget);
}

}  // namespace distillery
