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

#include "distillery/outer.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

namespace distillery {

const char *parity_name(RowParity p) {
    switch (p) {
        case RowParity::AllEven:
            return "even";
        case RowParity::AllOdd:
            return "odd";
        default:
            return "mixed";
    }
}

OuterCode make_outer(const BitMatrix &m) {
    OuterCode c;
    c.M = m;
    bool any_even = false;
    bool any_odd = false;
    for (const auto &r : m.rows()) {
        c.row_weights.push_back(r.weight());
        (r.weight() % 2 ? any_odd : any_even) = true;
    }
    c.parity = any_odd && any_even ? RowParity::Mixed : (any_odd ? RowParity::AllOdd : RowParity::AllEven);
    return c;
}

namespace {

std::vector<uint64_t> column_masks(const OuterCode &code) {
    if (code.m() > 64 || code.n_outer() > 63) {
        throw std::invalid_argument("brute-force sensitivity supports m <= 64 and n_outer <= 63");
    }
    std::vector<uint64_t> cols(code.n_outer(), 0);
    for (size_t r = 0; r < code.m(); r++) {
        for (size_t c = 0; c < code.n_outer(); c++) {
            if (code.M.get(r, c)) cols[c] |= uint64_t{1} << r;
        }
    }
    return cols;
}

// Calls f(mask) for every n-bit mask of weight w (Gosper's hack); f returns false to stop.
template <typename F>
bool for_each_weight(size_t n, size_t w, F &&f) {
    if (w == 0 || w > n) return true;
    uint64_t v = (uint64_t{1} << w) - 1;
    uint64_t limit = uint64_t{1} << n;
    while (v < limit) {
        if (!f(v)) return false;
        uint64_t t = v | (v - 1);
        v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
    }
    return true;
}

}  // namespace

SensitivityReport sensitivity(const OuterCode &code, size_t d_tilde, uint64_t budget) {
    if (budget == 0) budget = enumeration_budget(100000000);
    std::vector<uint64_t> cols = column_masks(code);
    size_t n = code.n_outer();
    SensitivityReport rep;
    rep.d_tilde = d_tilde;
    rep.s = code.m() + 1;
    rep.min_2Mv_plus_v = 3 * n + 1;
    uint64_t best_s_mask = 0;
    uint64_t best_mask = 0;
    uint64_t evaluated = 0;
    for (size_t w = 1; w <= n; w++) {
        bool need_s = w <= d_tilde;
        bool need_min = w < rep.min_2Mv_plus_v;
        if (!need_s && !need_min) break;
        for_each_weight(n, w, [&](uint64_t v) {
            if (++evaluated > budget) throw BudgetExceeded("sensitivity enumeration exceeds budget");
            uint64_t syn = 0;
            for (uint64_t t = v; t; t &= t - 1) syn ^= cols[std::countr_zero(t)];
            size_t sw = std::popcount(syn);
            if (need_s && sw < rep.s) {
                rep.s = sw;
                best_s_mask = v;
            }
            if (2 * sw + w < rep.min_2Mv_plus_v) {
                rep.min_2Mv_plus_v = 2 * sw + w;
                best_mask = v;
            }
            return true;
        });
    }
    if (d_tilde == 0) rep.s = 0;
    rep.s_witness = BitVector::from_mask(best_s_mask, n);
    rep.witness = BitVector::from_mask(best_mask, n);
    return rep;
}

ConditionResult distillation_condition(const OuterCode &code, size_t d, uint64_t budget) {
    ConditionResult r;
    if (code.n_outer() == 0) {
        r.holds = true;
        return r;
    }
    SensitivityReport rep = sensitivity(code, 0, budget);
    r.value = rep.min_2Mv_plus_v;
    r.holds = r.value >= d;
    r.witness = rep.witness;
    return r;
}

size_t classical_distance(const BitMatrix &basis, uint64_t budget) {
    size_t best = basis.n_cols() + 1;
    for_each_in_span(basis, budget, [&](const BitVector &v, uint64_t c) {
        if (c) best = std::min(best, v.weight());
    });
    return best;
}

OuterCode from_classical_transpose(const BitMatrix &codeword_basis) {
    size_t k = codeword_basis.n_rows();
    size_t n = codeword_basis.n_cols();
    if (k == 0 || rank(codeword_basis) != k) throw DependentBasis("classical basis rows are linearly dependent");
    BitMatrix m(n, k + 1);
    for (size_t i = 0; i < n; i++) {
        bool sum = false;
        for (size_t j = 0; j < k; j++) {
            bool b = codeword_basis.get(j, i);
            m.set(i, j, b);
            sum ^= b;
        }
        m.set(i, k, sum);
    }
    OuterCode out = make_outer(m);
    if (out.parity != RowParity::AllEven) throw std::logic_error("transpose construction produced an odd row");
    if (k + 1 <= 63 && n <= 64) {
        size_t d = classical_distance(codeword_basis);
        SensitivityReport rep = sensitivity(out, k);
        if (rep.s < d) throw std::logic_error("transpose construction failed its sensitivity certificate");
    }
    return out;
}

size_t girth(const Graph &g) {
    size_t n = g.n_vertices;
    std::vector<std::vector<std::pair<size_t, size_t>>> adj(n);
    for (size_t e = 0; e < g.edges.size(); e++) {
        auto [a, b] = g.edges[e];
        if (a >= n || b >= n) throw std::invalid_argument("edge endpoint out of range");
        if (a == b) return 1;
        adj[a].push_back({b, e});
        adj[b].push_back({a, e});
    }
    size_t best = kInfiniteGirth;
    std::vector<size_t> dist(n);
    std::vector<size_t> via(n);
    for (size_t src = 0; src < n; src++) {
        std::fill(dist.begin(), dist.end(), kInfiniteGirth);
        dist[src] = 0;
        via[src] = SIZE_MAX;
        std::queue<size_t> q;
        q.push(src);
        while (!q.empty()) {
            size_t u = q.front();
            q.pop();
            for (auto [w, e] : adj[u]) {
                if (e == via[u]) continue;
                if (dist[w] == kInfiniteGirth) {
                    dist[w] = dist[u] + 1;
                    via[w] = e;
                    q.push(w);
                } else {
                    best = std::min(best, dist[u] + dist[w] + 1);
                }
            }
        }
    }
    return best;
}

Graph petersen_graph() {
    Graph g;
    g.n_vertices = 10;
    for (size_t i = 0; i < 5; i++) {
        g.edges.push_back({i, (i + 1) % 5});
        g.edges.push_back({i, i + 5});
        g.edges.push_back({5 + i, 5 + (i + 2) % 5});
    }
    return g;
}

Graph cycle_graph(size_t n) {
    Graph g;
    g.n_vertices = n;
    for (size_t i = 0; i < n; i++) g.edges.push_back({i, (i + 1) % n});
    return g;
}

Graph parse_edge_list(const std::string &text) {
    std::istringstream in(text);
    Graph g;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        size_t a = 0, b = 0;
        if (!(ls >> a >> b)) throw std::invalid_argument("edge list lines must be 'u v'");
        g.edges.push_back({a, b});
        g.n_vertices = std::max({g.n_vertices, a + 1, b + 1});
    }
    return g;
}

OuterCode from_bipartite_graph(size_t n_bits, const Graph &g, size_t d_tilde) {
    size_t n_checks = g.n_vertices - n_bits;
    std::vector<size_t> deg(g.n_vertices, 0);
    BitMatrix m(n_checks, n_bits);
    for (auto [a, b] : g.edges) {
        if (a >= n_bits) std::swap(a, b);
        if (a >= n_bits || b < n_bits) throw NotBiregular("edge does not join a bit to a check");
        deg[a]++;
        deg[b]++;
        m.set(b - n_bits, a, !m.get(b - n_bits, a));
    }
    for (size_t v = 1; v < n_bits; v++) {
        if (deg[v] != deg[0]) throw NotBiregular("bit vertices have unequal degrees");
    }
    for (size_t v = n_bits + 1; v < g.n_vertices; v++) {
        if (deg[v] != deg[n_bits]) throw NotBiregular("check vertices have unequal degrees");
    }
    size_t gi = girth(g);
    if (gi != kInfiniteGirth && gi <= 2 * d_tilde) throw GirthTooSmall("girth must exceed 2 d_tilde");
    return make_outer(m);
}

OuterCode from_graph(const Graph &h, size_t d_tilde) {
    // Subdivide: bits are edges of h, checks are its vertices.
    Graph b;
    size_t ne = h.edges.size();
    b.n_vertices = ne + h.n_vertices;
    for (size_t e = 0; e < ne; e++) {
        b.edges.push_back({e, ne + h.edges[e].first});
        b.edges.push_back({e, ne + h.edges[e].second});
    }
    return from_bipartite_graph(ne, b, d_tilde);
}

OuterCode sample_random_outer(size_t m, size_t n_outer, ParityClass parity, uint64_t seed) {
    if (n_outer == 0) throw std::invalid_argument("n_outer must be positive");
    std::mt19937_64 rng(seed);
    BitMatrix mat(m, n_outer);
    for (size_t r = 0; r < m; r++) {
        bool acc = false;
        for (size_t c = 0; c + 1 < n_outer; c++) {
            bool b = rng() & 1;
            mat.set(r, c, b);
            acc ^= b;
        }
        bool want_odd = parity == ParityClass::Odd;
        mat.set(r, n_outer - 1, acc != want_odd);
    }
    return make_outer(mat);
}

OuterCode outer_m4() { return make_outer(BitMatrix::from_strings({"1110", "1101", "1011", "0111"})); }

OuterCode outer_ring6() {
    BitMatrix m(6, 6);
    for (size_t i = 0; i < 6; i++) {
        m.set(i, i);
        m.set(i, (i + 1) % 6);
    }
    return make_outer(m);
}

OuterCode outer_petersen() { return from_graph(petersen_graph(), 4); }

std::string format_outer_file(const OuterCode &code) {
    std::ostringstream out;
    out << code.m() << ' ' << code.n_outer() << '\n';
    for (const auto &r : code.M.rows()) out << r.str() << '\n';
    return out.str();
}

OuterCode parse_outer_file(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    size_t m = 0, n = 0;
    bool header = false;
    BitMatrix mat;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            std::istringstream h(line);
            if (!(h >> m >> n)) throw std::invalid_argument("outer file header must be 'm n_outer'");
            mat = BitMatrix(n);
            header = true;
            continue;
        }
        if (line.size() != n) throw std::invalid_argument("outer row length differs from n_outer");
        mat.push_row(BitVector::from_string(line));
    }
    if (!header || mat.n_rows() != m) throw std::invalid_argument("outer file row count differs from header");
    return make_outer(mat);
}

OuterCode load_outer_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open outer code file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_outer_file(ss.str());
}

}  // namespace distillery
