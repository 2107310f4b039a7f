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

#include "distillery/enumerate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

namespace distillery {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

RoutineOutcome routine_outcome(const CssCode &inner, const BitVector &a_bits, const BitVector &b_bits) {
    if (a_bits.size() != inner.n_inner || b_bits.size() != inner.n_inner) {
        throw LengthMismatch("fault vectors must have length n_inner");
    }
    RoutineOutcome out;
    BitVector e = a_bits ^ b_bits;
    out.logical_mask = BitVector(inner.k_inner);
    if (!inner.in_normalizer(e)) {
        out.status = RoutineStatus::Detected;
        return out;
    }
    out.flip = a_bits.weight() % 2;
    out.logical = inner.logical_of_y(e);
    for (size_t i = 0; i < inner.k_inner; i++) {
        if (((out.logical.x | out.logical.z) >> i) & 1) out.logical_mask.set(i);
    }
    return out;
}

uint64_t logical_weight_count(const CssCode &code, size_t w) {
    std::vector<uint64_t> dist = coset_weight_distribution(code.stabilizers, orthogonal_complement(code.stabilizers));
    return w < dist.size() ? dist[w] : 0;
}

u128 TransferTable::passed_count(size_t w) const {
    u128 s = 0;
    for (const auto &e : passed) {
        if (e.weight == w) s += e.count;
    }
    return s;
}

u128 TransferTable::count(size_t w, bool flip, LogicalPauli logical) const {
    u128 s = 0;
    for (const auto &e : passed) {
        if (e.weight == w && e.flip == flip && e.logical == logical) s += e.count;
    }
    return s;
}

namespace {

// Per-physical-qubit data of a check: syndrome column and Y-logical image on occupied slots.
struct CheckGeometry {
    size_t n = 0;
    std::vector<uint64_t> syn_col;
    std::vector<LogicalPauli> lp;
    uint64_t occupied = 0;
    uint64_t hadamard = 0;
};

CheckGeometry geometry(const CheckJob &job) {
    const CssCode &c = *job.inner;
    if (c.n_inner > 64 || c.k_inner > 64 || c.stabilizers.n_rows() > 64) {
        throw std::invalid_argument("transfer tables support n_inner, k_inner, rank(S) <= 64");
    }
    CheckGeometry g;
    g.n = c.n_inner;
    for (size_t i = 0; i < c.k_inner; i++) {
        if (job.slot_qubit[i] != kFiller) g.occupied |= uint64_t{1} << i;
    }
    for (size_t h : job.hadamard_slots) g.hadamard |= uint64_t{1} << h;
    for (size_t q = 0; q < g.n; q++) {
        BitVector e = BitVector::unit(g.n, q);
        g.syn_col.push_back(c.syndrome(e));
        LogicalPauli l = c.logical_of_y(e);
        l.x &= g.occupied;
        l.z &= g.occupied;
        g.lp.push_back(l);
    }
    return g;
}

struct Group {
    uint64_t syndrome;
    LogicalPauli lp;
    size_t r;
    bool operator<(const Group &o) const {
        return std::tie(syndrome, lp.x, lp.z, r) < std::tie(o.syndrome, o.lp.x, o.lp.z, o.r);
    }
};

// Counts fault vectors of weight <= w_max by (syndrome, logical, weight).
std::map<Group, u128> group_vectors(const CheckGeometry &g, size_t w_max, bool zero_syndrome_only,
                                    uint64_t budget) {
    uint64_t total = 0;
    for (size_t r = 0; r <= std::min(w_max, g.n); r++) total += binom(static_cast<unsigned>(g.n), static_cast<unsigned>(r));
    if (total > budget) throw BudgetExceeded("fault vector enumeration exceeds budget");
    std::map<Group, u128> out;
    struct Frame {
        size_t next;
        size_t r;
        uint64_t syn;
        LogicalPauli lp;
    };
    std::vector<Frame> stack{{0, 0, 0, {}}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (!zero_syndrome_only || f.syn == 0) out[{f.syn, f.lp, f.r}] += 1;
        if (f.r == w_max) continue;
        for (size_t q = f.next; q < g.n; q++) {
            stack.push_back({q + 1, f.r + 1, f.syn ^ g.syn_col[q], {f.lp.x ^ g.lp[q].x, f.lp.z ^ g.lp[q].z}});
        }
    }
    return out;
}

// (weight, parity of a, count) over placements of a and b with a ⊕ b fixed of weight r.
std::vector<std::tuple<size_t, bool, u128>> pass_counts(size_t n, size_t r, size_t w_max) {
    std::vector<std::tuple<size_t, bool, u128>> out;
    for (size_t t = 0; r + 2 * t <= w_max && r + t <= n; t++) {
        size_t w = r + 2 * t;
        u128 c = binom128(static_cast<unsigned>(n - r), static_cast<unsigned>(t));
        if (r == 0) {
            out.emplace_back(w, t % 2, c);
        } else {
            u128 half = c << (r - 1);
            out.emplace_back(w, false, half);
            out.emplace_back(w, true, half);
        }
    }
    return out;
}

using EntryKey = std::tuple<size_t, bool, uint64_t, uint64_t, uint64_t, uint64_t>;

}  // namespace

TransferTable check_transfer_table(const CheckJob &job, size_t w_max, uint64_t budget) {
    if (budget == 0) budget = enumeration_budget(100000000);
    CheckGeometry g = geometry(job);
    TransferTable t;
    t.w_max = w_max;
    t.locations = job.t_gates();
    t.hyperbolic = job.hyperbolic();
    std::map<EntryKey, u128> cells;
    if (!job.hyperbolic()) {
        for (const auto &[grp, m] : group_vectors(g, w_max, true, budget)) {
            for (auto [w, p, c] : pass_counts(g.n, grp.r, w_max)) {
                cells[{w, p, grp.lp.x, grp.lp.z, 0, 0}] += m * c;
            }
        }
    } else {
        bool mid = job.syndrome_between_passes;
        auto groups = group_vectors(g, w_max, mid, budget);
        std::map<uint64_t, std::vector<std::pair<Group, u128>>> by_syndrome;
        for (const auto &[grp, m] : groups) by_syndrome[grp.syndrome].push_back({grp, m});
        for (const auto &[syn, list] : by_syndrome) {
            for (const auto &[g1, m1] : list) {
                uint64_t first = (g1.lp.x ^ g1.lp.z) & g.hadamard;
                auto pc1 = pass_counts(g.n, g1.r, w_max);
                for (const auto &[g2, m2] : list) {
                    if (g1.r + g2.r > w_max) continue;
                    auto pc2 = pass_counts(g.n, g2.r, w_max - g1.r);
                    uint64_t lx = g1.lp.x ^ g2.lp.x;
                    uint64_t lz = g1.lp.z ^ g2.lp.z;
                    for (auto [w1, p1, c1] : pc1) {
                        for (auto [w2, p2, c2] : pc2) {
                            if (w1 + w2 > w_max) continue;
                            bool sgn = (p1 ^ p2 ^ (g1.r & 1));
                            cells[{w1 + w2, sgn, lx, lz, first, 0}] += m1 * m2 * c1 * c2;
                        }
                    }
                }
            }
        }
    }
    t.detected.assign(w_max + 1, 0);
    std::vector<u128> passed(w_max + 1, 0);
    for (const auto &[k, c] : cells) {
        TransferEntry e;
        e.weight = std::get<0>(k);
        e.flip = std::get<1>(k);
        e.logical = {std::get<2>(k), std::get<3>(k)};
        e.first_pass = {std::get<4>(k), std::get<5>(k)};
        e.count = c;
        passed[e.weight] += c;
        t.passed.push_back(e);
    }
    for (size_t w = 0; w <= w_max; w++) {
        t.detected[w] = binom128(static_cast<unsigned>(t.locations), static_cast<unsigned>(w)) - passed[w];
    }
    return t;
}

bool WeightTally::bad_nonzero(size_t w) const {
    if (w > w_max) return false;
    if (exact) return accepted_bad_exact[w] != 0;
    double scale = std::max(1.0, accepted_bad[w] + accepted_good[w]);
    return accepted_bad[w] > 1e-7 * scale;
}

double WeightTally::output_error(double eps) const {
    double num = 0, den = 0;
    for (size_t w = 0; w <= w_max; w++) {
        double f = std::pow(eps, static_cast<double>(w)) * std::pow(1 - eps, static_cast<double>(locations - w));
        num += accepted_bad[w] * f;
        den += (accepted_bad[w] + accepted_good[w]) * f;
    }
    return den > 0 ? num / den : 0;
}

double WeightTally::acceptance(double eps) const {
    double s = 0;
    for (size_t w = 0; w <= w_max; w++) {
        s += (accepted_bad[w] + accepted_good[w]) * std::pow(eps, static_cast<double>(w)) *
             std::pow(1 - eps, static_cast<double>(locations - w));
    }
    return s;
}

namespace {

const double kInvSqrt2 = 0.70710678118654752440;

struct OuterPauli {
    uint64_t x = 0;
    uint64_t z = 0;
};

OuterPauli to_outer(const CheckJob &job, LogicalPauli l) {
    OuterPauli p;
    for (size_t i = 0; i < job.slot_qubit.size(); i++) {
        if (job.slot_qubit[i] == kFiller) continue;
        uint64_t bit = uint64_t{1} << job.slot_qubit[i];
        if ((l.x >> i) & 1) p.x |= bit;
        if ((l.z >> i) & 1) p.z |= bit;
    }
    return p;
}

// Left-multiplies a by the single-qubit gate g on outer qubit q.
void left_1q(Mat &a, size_t q, double g00, double g01, double g10, double g11) {
    size_t bit = size_t{1} << q;
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        if (i & bit) continue;
        Eigen::Index j = i | bit;
        Eigen::RowVectorXd r0 = a.row(i);
        Eigen::RowVectorXd r1 = a.row(j);
        a.row(i) = g00 * r0 + g01 * r1;
        a.row(j) = g10 * r0 + g11 * r1;
    }
}

void left_h(Mat &a, size_t q) { left_1q(a, q, kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2); }
void left_x(Mat &a, size_t q) { left_1q(a, q, 0, 1, 1, 0); }

Mat swap_permutation(size_t dim, size_t q1, size_t q2) {
    Mat p = Mat::Zero(dim, dim);
    for (size_t i = 0; i < dim; i++) {
        size_t b1 = (i >> q1) & 1, b2 = (i >> q2) & 1;
        size_t j = i;
        if (b1 != b2) j ^= (size_t{1} << q1) | (size_t{1} << q2);
        p(j, i) = 1;
    }
    return p;
}

// Checked operator of a cell, without the trailing logical Pauli.
Mat check_operator(const CheckJob &job, size_t n_outer, bool flip, uint64_t first_pass) {
    size_t dim = size_t{1} << n_outer;
    Mat id = Mat::Identity(dim, dim);
    if (!job.hyperbolic()) {
        Mat h = id;
        for (size_t q : job.targets()) left_h(h, q);
        return 0.5 * (id + (flip ? -1.0 : 1.0) * h);
    }
    Mat a = id;
    auto apply_first = [&](Mat &m) {
        for (size_t h : job.hadamard_slots) {
            if ((first_pass >> h) & 1) left_x(m, static_cast<size_t>(job.slot_qubit[h]));
        }
    };
    apply_first(a);
    for (size_t h : job.hadamard_slots) left_h(a, static_cast<size_t>(job.slot_qubit[h]));
    apply_first(a);
    Mat swaps = id;
    for (size_t j = 0; j + 1 < job.slot_qubit.size(); j += 2) {
        if (job.slot_qubit[j] == kFiller) continue;
        swaps = swap_permutation(dim, static_cast<size_t>(job.slot_qubit[j]), static_cast<size_t>(job.slot_qubit[j + 1])) *
                swaps;
    }
    return 0.5 * (a + (flip ? -1.0 : 1.0) * (swaps * a * swaps));
}

// ρ += c · P ρ_in Pᵀ for P = X^x Z^z.
void add_pauli_conjugate(Mat &acc, const Mat &in, OuterPauli p, double c) {
    Eigen::Index dim = in.rows();
    auto x = static_cast<Eigen::Index>(p.x);
    std::vector<double> s(static_cast<size_t>(dim));
    for (Eigen::Index i = 0; i < dim; i++) s[i] = std::popcount(static_cast<uint64_t>(i) & p.z) & 1 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < dim; j++) {
        double cj = c * s[j];
        for (Eigen::Index i = 0; i < dim; i++) acc(i ^ x, j ^ x) += cj * s[i] * in(i, j);
    }
}

Vec apply_pauli(const Vec &v, OuterPauli p) {
    Vec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); i++) {
        double s = std::popcount(static_cast<uint64_t>(i) & p.z) & 1 ? -1.0 : 1.0;
        out(i ^ static_cast<Eigen::Index>(p.x)) = s * v(i);
    }
    return out;
}

const double kCos8 = 0.92387953251128675613;
const double kSin8 = 0.38268343236508977173;

Vec product_state(size_t n_outer, uint64_t faulty) {
    size_t dim = size_t{1} << n_outer;
    Vec v(dim);
    for (size_t i = 0; i < dim; i++) {
        double a = 1;
        for (size_t q = 0; q < n_outer; q++) {
            bool bit = (i >> q) & 1;
            bool f = (faulty >> q) & 1;
            // |H⟩ = (c, s), |H⊥⟩ = (−s, c).
            a *= f ? (bit ? kCos8 : -kSin8) : (bit ? kSin8 : kCos8);
        }
        v(i) = a;
    }
    return v;
}

bool all_normal(const Protocol &p) {
    for (const auto *c : p.checks()) {
        if (c->hyperbolic()) return false;
    }
    return true;
}

WeightTally flag_dp(const Protocol &p, size_t w_max) {
    if (p.n_outer > 63) throw std::invalid_argument("flag DP supports n_outer <= 63");
    std::vector<std::unordered_map<uint64_t, u128>> st(w_max + 1);
    for (uint64_t f = 0; f < (uint64_t{1} << p.n_outer); f++) {
        size_t w = std::popcount(f);
        if (w <= w_max) st[w][f] += 1;
    }
    for (const auto *job : p.checks()) {
        TransferTable t = check_transfer_table(*job, w_max);
        uint64_t tmask = 0;
        for (size_t q : job->targets()) tmask |= uint64_t{1} << q;
        std::vector<std::unordered_map<uint64_t, u128>> nx(w_max + 1);
        for (size_t w = 0; w <= w_max; w++) {
            for (const auto &[flags, c] : st[w]) {
                bool obs = std::popcount(flags & tmask) & 1;
                for (const auto &e : t.passed) {
                    if (w + e.weight > w_max) continue;
                    if (obs != e.flip) continue;
                    uint64_t g = flags ^ to_outer(*job, e.logical).x;
                    nx[w + e.weight][g] += c * e.count;
                }
            }
        }
        st = std::move(nx);
    }
    WeightTally tally;
    tally.w_max = w_max;
    tally.locations = p.n_locations();
    tally.exact = true;
    for (size_t w = 0; w <= w_max; w++) {
        u128 bad = 0, good = 0;
        for (const auto &[f, c] : st[w]) (f ? bad : good) += c;
        u128 total = binom128(static_cast<unsigned>(tally.locations), static_cast<unsigned>(w));
        tally.accepted_bad_exact.push_back(bad);
        tally.accepted_good_exact.push_back(good);
        tally.rejected_exact.push_back(total - bad - good);
        tally.accepted_bad.push_back(static_cast<double>(bad));
        tally.accepted_good.push_back(static_cast<double>(good));
        tally.rejected.push_back(static_cast<double>(total - bad - good));
    }
    return tally;
}

WeightTally density_dp(const Protocol &p, size_t w_max) {
    if (p.n_outer > 10) throw std::invalid_argument("density DP supports n_outer <= 10");
    size_t dim = size_t{1} << p.n_outer;
    std::vector<Mat> rho(w_max + 1, Mat::Zero(dim, dim));
    for (uint64_t f = 0; f < (uint64_t{1} << p.n_outer); f++) {
        size_t w = std::popcount(f);
        if (w > w_max) continue;
        Vec v = product_state(p.n_outer, f);
        rho[w] += v * v.transpose();
    }
    for (const auto *job : p.checks()) {
        TransferTable t = check_transfer_table(*job, w_max);
        // Cells sharing (weight, flip, first_pass) share the checked operator.
        std::map<std::tuple<size_t, bool, uint64_t>, std::vector<std::pair<OuterPauli, double>>> groups;
        for (const auto &e : t.passed) {
            groups[{e.weight, e.flip, e.first_pass.x}].push_back({to_outer(*job, e.logical), static_cast<double>(e.count)});
        }
        std::map<std::pair<bool, uint64_t>, Mat> ops;
        for (const auto &[k, list] : groups) {
            auto key = std::make_pair(std::get<1>(k), std::get<2>(k));
            if (!ops.count(key)) ops[key] = check_operator(*job, p.n_outer, key.first, key.second);
        }
        std::vector<Mat> nx(w_max + 1, Mat::Zero(dim, dim));
        for (size_t w = 0; w <= w_max; w++) {
            if (rho[w].isZero(0)) continue;
            for (const auto &[k, list] : groups) {
                size_t w2 = std::get<0>(k);
                if (w + w2 > w_max) continue;
                const Mat &m = ops[{std::get<1>(k), std::get<2>(k)}];
                Mat y = m * rho[w] * m.transpose();
                for (const auto &[pauli, c] : list) add_pauli_conjugate(nx[w + w2], y, pauli, c);
            }
        }
        rho = std::move(nx);
    }
    Vec ideal = product_state(p.n_outer, 0);
    WeightTally tally;
    tally.w_max = w_max;
    tally.locations = p.n_locations();
    for (size_t w = 0; w <= w_max; w++) {
        double acc = rho[w].trace();
        double good = ideal.dot(rho[w] * ideal);
        double total = static_cast<double>(binom128(static_cast<unsigned>(tally.locations), static_cast<unsigned>(w)));
        tally.accepted_bad.push_back(acc - good);
        tally.accepted_good.push_back(good);
        tally.rejected.push_back(total - acc);
    }
    return tally;
}

}  // namespace

WeightTally error_polynomial(const Protocol &p, size_t w_max, DpMethod method) {
    if (method == DpMethod::Auto) method = all_normal(p) ? DpMethod::Flags : DpMethod::Density;
    if (method == DpMethod::Flags) {
        if (!all_normal(p)) throw std::invalid_argument("the flag DP needs normal inner codes throughout");
        return flag_dp(p, w_max);
    }
    return density_dp(p, w_max);
}

LeadingCoefficient leading_coefficient(const Protocol &p, DpMethod method) {
    size_t d = p.claimed_order;
    WeightTally t = error_polynomial(p, d, method);
    for (size_t w = 0; w <= d; w++) {
        if (!t.bad_nonzero(w)) continue;
        if (w != d) {
            throw OrderMismatch("protocol " + p.name + " fails at weight " + std::to_string(w) + " below its order " +
                                std::to_string(d));
        }
        LeadingCoefficient lc;
        lc.d = d;
        lc.C = t.accepted_bad[d];
        lc.exact = t.exact;
        if (t.exact) lc.C_exact = t.accepted_bad_exact[d];
        return lc;
    }
    throw OrderMismatch("protocol " + p.name + " has no failing pattern at its order " + std::to_string(d));
}

PatternOutcome pattern_outcome(const Protocol &p, const std::vector<size_t> &locations) {
    if (p.n_outer > 16) throw std::invalid_argument("pattern_outcome supports n_outer <= 16");
    std::vector<bool> hit(p.n_locations(), false);
    for (size_t l : locations) {
        if (l >= hit.size()) throw std::out_of_range("fault location out of range");
        hit[l] = !hit[l];
    }
    uint64_t faulty = 0;
    for (size_t q = 0; q < p.n_outer; q++) {
        if (hit[q]) faulty |= uint64_t{1} << q;
    }
    Vec psi = product_state(p.n_outer, faulty);
    auto offsets = p.check_offsets();
    auto checks = p.checks();
    PatternOutcome out;
    for (size_t c = 0; c < checks.size(); c++) {
        const CheckJob &job = *checks[c];
        const CssCode &code = *job.inner;
        size_t n = code.n_inner;
        uint64_t occupied = 0;
        for (size_t i = 0; i < code.k_inner; i++) {
            if (job.slot_qubit[i] != kFiller) occupied |= uint64_t{1} << i;
        }
        std::vector<BitVector> es;
        std::vector<size_t> a_weight;
        for (size_t pass = 0; pass < job.passes(); pass++) {
            BitVector a(n), b(n);
            size_t base = offsets[c] + pass * 2 * n;
            for (size_t q = 0; q < n; q++) {
                a.set(q, hit[base + q]);
                b.set(q, hit[base + n + q]);
            }
            es.push_back(a ^ b);
            a_weight.push_back(a.weight());
        }
        Mat m;
        LogicalPauli net;
        if (!job.hyperbolic()) {
            if (!code.in_normalizer(es[0])) return out;
            net = code.logical_of_y(es[0]);
            m = check_operator(job, p.n_outer, a_weight[0] % 2, 0);
        } else {
            uint64_t s1 = code.syndrome(es[0]);
            uint64_t s2 = code.syndrome(es[1]);
            if (s1 != s2) return out;
            if (job.syndrome_between_passes && s1 != 0) return out;
            LogicalPauli l1 = code.logical_of_y(es[0]);
            LogicalPauli l2 = code.logical_of_y(es[1]);
            net = {l1.x ^ l2.x, l1.z ^ l2.z};
            uint64_t hmask = 0;
            for (size_t h : job.hadamard_slots) hmask |= uint64_t{1} << h;
            bool sgn = (a_weight[0] + a_weight[1] + es[0].weight()) % 2;
            m = check_operator(job, p.n_outer, sgn, (l1.x ^ l1.z) & hmask);
        }
        net.x &= occupied;
        net.z &= occupied;
        psi = apply_pauli(m * psi, to_outer(job, net));
    }
    Vec ideal = product_state(p.n_outer, 0);
    out.p_accept = psi.squaredNorm();
    double f = ideal.dot(psi);
    out.bad = std::max(0.0, out.p_accept - f * f);
    return out;
}

}  // namespace distillery
