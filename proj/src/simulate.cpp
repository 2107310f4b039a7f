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

#include "distillery/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <thread>

namespace distillery {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char *gate_name(GateKind k) {
    switch (k) {
        case GateKind::I:
            return "I";
        case GateKind::X:
            return "X";
        case GateKind::Y:
            return "Y";
        case GateKind::Z:
            return "Z";
        case GateKind::H:
            return "H";
        case GateKind::S:
            return "S";
        case GateKind::S_DAG:
            return "S_DAG";
        case GateKind::CX:
            return "CX";
        case GateKind::CZ:
            return "CZ";
        case GateKind::RY:
            return "RY";
        case GateKind::POSTSELECT_ZERO:
            return "POSTSELECT_ZERO";
    }
    return "?";
}

Circuit Circuit::inverse() const {
    Circuit out;
    out.n_qubits = n_qubits;
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        Gate g = *it;
        switch (g.kind) {
            case GateKind::S:
                g.kind = GateKind::S_DAG;
                break;
            case GateKind::S_DAG:
                g.kind = GateKind::S;
                break;
            case GateKind::RY:
                g.angle = -g.angle;
                break;
            case GateKind::POSTSELECT_ZERO:
                throw std::logic_error("post-selection has no inverse");
            default:
                break;
        }
        out.gates.push_back(g);
    }
    return out;
}

Circuit Circuit::remapped(const std::vector<uint32_t> &map, size_t n) const {
    Circuit out;
    out.n_qubits = n;
    for (Gate g : gates) {
        g.q0 = map.at(g.q0);
        if (g.kind == GateKind::CX || g.kind == GateKind::CZ) g.q1 = map.at(g.q1);
        out.gates.push_back(g);
    }
    return out;
}

size_t Circuit::count(GateKind k) const {
    return static_cast<size_t>(std::count_if(gates.begin(), gates.end(), [&](const Gate &g) { return g.kind == k; }));
}

void conjugate(SignedPauli &p, const Gate &g) {
    size_t a = g.q0, b = g.q1;
    bool xa = p.x.get(a), za = p.z.get(a);
    switch (g.kind) {
        case GateKind::I:
            return;
        case GateKind::X:
            p.negative ^= za;
            return;
        case GateKind::Z:
            p.negative ^= xa;
            return;
        case GateKind::Y:
            p.negative ^= xa ^ za;
            return;
        case GateKind::H:
            p.negative ^= xa && za;
            p.x.set(a, za);
            p.z.set(a, xa);
            return;
        case GateKind::S:
            p.negative ^= xa && za;
            p.z.set(a, za ^ xa);
            return;
        case GateKind::S_DAG:
            p.negative ^= xa && !za;
            p.z.set(a, za ^ xa);
            return;
        case GateKind::CX: {
            bool xb = p.x.get(b), zb = p.z.get(b);
            p.negative ^= xa && zb && !(xb ^ za);
            p.x.set(b, xb ^ xa);
            p.z.set(a, za ^ zb);
            return;
        }
        case GateKind::CZ:
            conjugate(p, {GateKind::H, g.q1, 0, 0});
            conjugate(p, {GateKind::CX, g.q0, g.q1, 0});
            conjugate(p, {GateKind::H, g.q1, 0, 0});
            return;
        default:
            throw std::invalid_argument(std::string("cannot conjugate a Pauli through ") + gate_name(g.kind));
    }
}

namespace {

SignedPauli to_signed(const PauliString &p) { return {p.x, p.z, false}; }
SignedPauli x_only(const BitVector &v) { return {v, BitVector(v.size()), false}; }
SignedPauli z_only(const BitVector &v) { return {BitVector(v.size()), v, false}; }

}  // namespace

EncoderSpec encoder_spec(const CssCode &code) {
    EncoderSpec spec;
    spec.n = code.n_inner;
    spec.k = code.k_inner;
    spec.r = code.stabilizers.n_rows();
    BitMatrix cons(spec.n);
    for (const auto &s : code.stabilizers.rows()) cons.push_row(s);
    for (const auto &v : code.magic.all()) cons.push_row(v);
    BitMatrix ct = cons.transpose();
    for (size_t j = 0; j < spec.r; j++) {
        BitVector rhs = BitVector::unit(cons.n_rows(), j);
        BitVector t;
        if (!solve_combination(ct, rhs, t)) throw SynthesisFailure("no destabilizer for stabilizer row");
        spec.t.push_back(t);
    }
    for (size_t i = 0; i < spec.r; i++) {
        BitVector u = spec.t[i];
        for (size_t j = 0; j < spec.r; j++) {
            if (spec.t[i].dot(spec.t[j])) u ^= code.stabilizers.row(j);
        }
        spec.u.push_back(u);
    }
    for (size_t i = 0; i < spec.k; i++) {
        spec.x_images.push_back(to_signed(code.logical_x[i]));
        spec.z_images.push_back(to_signed(code.logical_z[i]));
    }
    for (size_t j = 0; j < spec.r; j++) {
        spec.x_images.push_back(z_only(spec.u[j]));
        spec.z_images.push_back(x_only(code.stabilizers.row(j)));
    }
    for (size_t j = 0; j < spec.r; j++) {
        spec.x_images.push_back(x_only(spec.t[j]));
        spec.z_images.push_back(z_only(code.stabilizers.row(j)));
    }
    return spec;
}

bool encoder_matches(const Circuit &c, const EncoderSpec &spec) {
    for (size_t i = 0; i < spec.n; i++) {
        SignedPauli px = x_only(BitVector::unit(spec.n, i));
        SignedPauli pz = z_only(BitVector::unit(spec.n, i));
        for (const Gate &g : c.gates) {
            conjugate(px, g);
            conjugate(pz, g);
        }
        if (!(px == spec.x_images[i]) || !(pz == spec.z_images[i])) return false;
    }
    return true;
}

Circuit synthesize_encoder(const CssCode &code) {
    EncoderSpec spec = encoder_spec(code);
    size_t n = spec.n;
    std::vector<SignedPauli> cx = spec.x_images;
    std::vector<SignedPauli> cz = spec.z_images;
    Circuit v;
    v.n_qubits = n;
    auto apply = [&](GateKind k, size_t a, size_t b = 0) {
        Gate g{k, static_cast<uint32_t>(a), static_cast<uint32_t>(b), 0};
        v.gates.push_back(g);
        for (auto &p : cx) conjugate(p, g);
        for (auto &p : cz) conjugate(p, g);
    };
    for (size_t i = 0; i < n; i++) {
        // Reduce the X image to X_i.
        for (size_t j = i; j < n; j++) {
            if (!cx[i].z.get(j)) continue;
            apply(cx[i].x.get(j) ? GateKind::S_DAG : GateKind::H, j);
        }
        if (!cx[i].x.get(i)) {
            size_t j = i + 1;
            while (j < n && !cx[i].x.get(j)) j++;
            if (j == n) throw SynthesisFailure("X image has no support beyond fixed wires");
            apply(GateKind::CX, j, i);
        }
        for (size_t j = i + 1; j < n; j++) {
            if (cx[i].x.get(j)) apply(GateKind::CX, i, j);
        }
        // Reduce the Z image to Z_i while keeping X_i.
        if (!cz[i].z.get(i)) throw SynthesisFailure("Z image commutes with its X partner");
        if (cz[i].x.get(i)) {
            apply(GateKind::H, i);
            apply(GateKind::S, i);
            apply(GateKind::H, i);
        }
        for (size_t j = i + 1; j < n; j++) {
            bool xj = cz[i].x.get(j), zj = cz[i].z.get(j);
            if (!xj && !zj) continue;
            if (xj && zj) apply(GateKind::S_DAG, j);
            if (xj) apply(GateKind::H, j);
            apply(GateKind::CX, j, i);
        }
        if (cx[i].negative) apply(GateKind::Z, i);
        if (cz[i].negative) apply(GateKind::X, i);
        for (size_t j = 0; j < n; j++) {
            bool want = j == i;
            if (cx[i].x.get(j) != want || cx[i].z.get(j) || cz[i].z.get(j) != want || cz[i].x.get(j)) {
                throw SynthesisFailure("tableau reduction left residual support");
            }
        }
    }
    Circuit u = v.inverse();
    if (!encoder_matches(u, spec)) throw SynthesisFailure("synthesized encoder does not reproduce its images");
    return u;
}

StateVector::StateVector(size_t n_qubits, size_t cap) : n_(n_qubits) {
    if (n_qubits > cap) throw QubitCapExceeded("state vector of " + std::to_string(n_qubits) + " qubits exceeds the cap");
    amp_.assign(size_t{1} << n_qubits, 0.0);
    amp_[0] = 1.0;
}

void StateVector::apply_1q(size_t q, std::complex<double> m00, std::complex<double> m01, std::complex<double> m10,
                           std::complex<double> m11) {
    size_t bit = size_t{1} << q;
    for (size_t i = 0; i < amp_.size(); i++) {
        if (i & bit) continue;
        auto a = amp_[i], b = amp_[i | bit];
        amp_[i] = m00 * a + m01 * b;
        amp_[i | bit] = m10 * a + m11 * b;
    }
}

void StateVector::apply(const Gate &g) {
    using C = std::complex<double>;
    const double r = 1.0 / std::sqrt(2.0);
    if (g.q0 >= n_ || ((g.kind == GateKind::CX || g.kind == GateKind::CZ) && g.q1 >= n_)) {
        throw std::out_of_range("gate qubit out of range");
    }
    switch (g.kind) {
        case GateKind::I:
            return;
        case GateKind::X:
            apply_1q(g.q0, 0, 1, 1, 0);
            return;
        case GateKind::Y:
            apply_1q(g.q0, 0, C(0, -1), C(0, 1), 0);
            return;
        case GateKind::Z:
            apply_1q(g.q0, 1, 0, 0, -1);
            return;
        case GateKind::H:
            apply_1q(g.q0, r, r, r, -r);
            return;
        case GateKind::S:
            apply_1q(g.q0, 1, 0, 0, C(0, 1));
            return;
        case GateKind::S_DAG:
            apply_1q(g.q0, 1, 0, 0, C(0, -1));
            return;
        case GateKind::RY: {
            double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
            apply_1q(g.q0, c, -s, s, c);
            return;
        }
        case GateKind::POSTSELECT_ZERO: {
            size_t bit = size_t{1} << g.q0;
            for (size_t i = 0; i < amp_.size(); i++) {
                if (i & bit) amp_[i] = 0;
            }
            return;
        }
        case GateKind::CX: {
            size_t c = size_t{1} << g.q0, t = size_t{1} << g.q1;
            for (size_t i = 0; i < amp_.size(); i++) {
                if ((i & c) && !(i & t)) std::swap(amp_[i], amp_[i | t]);
            }
            return;
        }
        case GateKind::CZ: {
            size_t m = (size_t{1} << g.q0) | (size_t{1} << g.q1);
            for (size_t i = 0; i < amp_.size(); i++) {
                if ((i & m) == m) amp_[i] = -amp_[i];
            }
            return;
        }
    }
}

void StateVector::apply(const Circuit &c) {
    for (const Gate &g : c.gates) apply(g);
}

double StateVector::norm_squared() const {
    double s = 0;
    for (const auto &a : amp_) s += std::norm(a);
    return s;
}

std::complex<double> StateVector::inner(const StateVector &o) const {
    if (o.n_ != n_) throw std::invalid_argument("state vector sizes differ");
    std::complex<double> s = 0;
    for (size_t i = 0; i < amp_.size(); i++) s += std::conj(amp_[i]) * o.amp_[i];
    return s;
}

CheckCircuit build_check_circuit(const CheckJob &job) {
    const CssCode &code = *job.inner;
    size_t n = code.n_inner, k = code.k_inner;
    Circuit enc = synthesize_encoder(code);
    Circuit dec = enc.inverse();
    CheckCircuit cc;
    cc.ancilla = n;
    Circuit &c = cc.circuit;
    c.n_qubits = n + 1;
    auto a = static_cast<uint32_t>(n);
    c.gates.insert(c.gates.end(), enc.gates.begin(), enc.gates.end());
    c.append(GateKind::H, a);
    for (size_t pass = 0; pass < job.passes(); pass++) {
        for (uint32_t q = 0; q < n; q++) {
            c.append(GateKind::RY, q, 0, -kPi / 4);
            cc.t_locations.push_back(c.gates.size() - 1);
        }
        for (uint32_t q = 0; q < n; q++) c.append(GateKind::CZ, a, q);
        std::vector<size_t> t_pos;
        for (uint32_t q = 0; q < n; q++) {
            c.append(GateKind::RY, q, 0, kPi / 4);
            t_pos.push_back(c.gates.size() - 1);
        }
        // The T column is listed after the T† column of the same pass.
        cc.t_locations.insert(cc.t_locations.end(), t_pos.begin(), t_pos.end());
        if (pass == 0 && job.hyperbolic()) {
            c.gates.insert(c.gates.end(), dec.gates.begin(), dec.gates.end());
            if (job.syndrome_between_passes) {
                for (size_t q = k; q < n; q++) c.append(GateKind::POSTSELECT_ZERO, static_cast<uint32_t>(q));
            }
            for (size_t h : job.hadamard_slots) c.append(GateKind::H, static_cast<uint32_t>(h));
            c.gates.insert(c.gates.end(), enc.gates.begin(), enc.gates.end());
        }
    }
    c.gates.insert(c.gates.end(), dec.gates.begin(), dec.gates.end());
    c.append(GateKind::H, a);
    c.append(GateKind::POSTSELECT_ZERO, a);
    for (size_t q = k; q < n; q++) c.append(GateKind::POSTSELECT_ZERO, static_cast<uint32_t>(q));
    return cc;
}

StateVector run_check_circuit(const CheckCircuit &cc, const CheckJob &job, const StateVector &logical_in,
                              const std::vector<size_t> &faults) {
    size_t n = job.inner->n_inner, k = job.inner->k_inner;
    if (logical_in.n_qubits() != k) throw std::invalid_argument("logical input must have k_inner qubits");
    StateVector sv(n + 1, 64);
    auto &amp = sv.amplitudes();
    std::fill(amp.begin(), amp.end(), 0.0);
    for (size_t x = 0; x < logical_in.amplitudes().size(); x++) amp[x] = logical_in.amplitudes()[x];
    std::vector<bool> fault_after(cc.circuit.gates.size(), false);
    for (size_t f : faults) fault_after.at(cc.t_locations.at(f)) = !fault_after.at(cc.t_locations.at(f));
    for (size_t gi = 0; gi < cc.circuit.gates.size(); gi++) {
        sv.apply(cc.circuit.gates[gi]);
        if (fault_after[gi]) sv.apply({GateKind::Y, cc.circuit.gates[gi].q0, 0, 0});
    }
    StateVector out(k, 64);
    for (size_t x = 0; x < out.amplitudes().size(); x++) out.amplitudes()[x] = amp[x];
    return out;
}

double epsilon_of_theta(double theta) {
    if (theta < 0) throw std::invalid_argument("theta must be non-negative");
    if (theta < 1e-3) {
        double t2 = theta * theta;
        return t2 / 12 - t2 * t2 / 240 + t2 * t2 * t2 / 10080;
    }
    return 0.5 - std::sin(theta) / (2 * theta);
}

double theta_of_epsilon(double eps) {
    const double theta_max = 4.493409457909064;
    if (eps < 0 || eps > epsilon_of_theta(theta_max)) throw std::invalid_argument("eps_in out of range");
    if (eps == 0) return 0;
    double lo = 0, hi = theta_max;
    for (int it = 0; it < 200; it++) {
        double mid = 0.5 * (lo + hi);
        (epsilon_of_theta(mid) < eps ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Real-amplitude layout of one check: code qubits in the low n bits, outer
// qubits outside the block above them; the ancilla is carried as two branches.
struct CheckPlan {
    const CheckJob *job = nullptr;
    size_t n = 0;
    size_t k = 0;
    size_t r = 0;
    std::vector<uint32_t> codewords;
    double scale = 1;
    std::vector<uint32_t> x_shift;
    std::vector<uint32_t> z_sign;
    std::vector<uint32_t> t_mask;
    std::vector<uint32_t> u_mask;
    std::vector<size_t> slot_outer;
    std::vector<size_t> others;
    std::vector<std::pair<size_t, size_t>> filler_pairs;
    std::vector<size_t> hadamard;
    size_t location_offset = 0;
};

uint32_t to_mask32(const BitVector &v) { return static_cast<uint32_t>(v.to_mask()); }

CheckPlan make_plan(const CheckJob &job, size_t n_outer, size_t offset) {
    const CssCode &c = *job.inner;
    CheckPlan p;
    p.job = &job;
    p.n = c.n_inner;
    p.k = c.k_inner;
    p.r = c.stabilizers.n_rows();
    p.location_offset = offset;
    if (p.n > 30) throw QubitCapExceeded("inner code too long for the simulator");
    BitMatrix gen(p.n);
    for (const auto &s : c.stabilizers.rows()) gen.push_row(s);
    std::vector<uint32_t> xv(p.k), zv(p.k);
    for (size_t i = 0; i < p.k; i++) {
        if (!c.logical_x[i].x.is_zero()) {
            xv[i] = to_mask32(c.logical_x[i].x);
        } else {
            zv[i] = to_mask32(c.logical_x[i].z);
        }
    }
    const auto &hv = c.magic.hyperbolic_vectors;
    for (size_t j = 1; j < hv.size(); j += 2) gen.push_row(hv[j]);
    p.codewords.push_back(0);
    for (const auto &g : gen.rows()) {
        uint32_t m = to_mask32(g);
        size_t sz = p.codewords.size();
        for (size_t i = 0; i < sz; i++) p.codewords.push_back(p.codewords[i] ^ m);
    }
    p.scale = 1.0 / std::sqrt(static_cast<double>(p.codewords.size()));
    p.x_shift.assign(size_t{1} << p.k, 0);
    p.z_sign.assign(size_t{1} << p.k, 0);
    for (size_t x = 1; x < p.x_shift.size(); x++) {
        size_t low = static_cast<size_t>(std::countr_zero(x));
        p.x_shift[x] = p.x_shift[x & (x - 1)] ^ xv[low];
        p.z_sign[x] = p.z_sign[x & (x - 1)] ^ zv[low];
    }
    EncoderSpec spec = encoder_spec(c);
    for (size_t j = 0; j < p.r; j++) {
        p.t_mask.push_back(to_mask32(spec.t[j]));
        p.u_mask.push_back(to_mask32(spec.u[j]));
    }
    std::vector<bool> inside(n_outer, false);
    std::vector<size_t> fillers;
    for (size_t i = 0; i < p.k; i++) {
        int q = job.slot_qubit[i];
        p.slot_outer.push_back(q == kFiller ? SIZE_MAX : static_cast<size_t>(q));
        if (q == kFiller) {
            fillers.push_back(i);
        } else {
            inside[static_cast<size_t>(q)] = true;
        }
    }
    for (size_t i = 0; i + 1 < fillers.size(); i += 2) p.filler_pairs.push_back({fillers[i], fillers[i + 1]});
    for (size_t q = 0; q < n_outer; q++) {
        if (!inside[q]) p.others.push_back(q);
    }
    p.hadamard = job.hadamard_slots;
    return p;
}

inline int parity32(uint32_t v) { return std::popcount(v) & 1; }

// Applies the 2×2 matrix m to bit q of every index.
void layer(double *v, size_t len, size_t q, const double m[4]) {
    size_t bit = size_t{1} << q;
    double m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3];
    for (size_t base = 0; base < len; base += 2 * bit) {
        double *lo = v + base;
        double *hi = v + base + bit;
        for (size_t i = 0; i < bit; i++) {
            double a = lo[i], b = hi[i];
            lo[i] = m00 * a + m01 * b;
            hi[i] = m10 * a + m11 * b;
        }
    }
}

void ry(double angle, double m[4]) {
    double c = std::cos(angle / 2), s = std::sin(angle / 2);
    m[0] = c;
    m[1] = -s;
    m[2] = s;
    m[3] = c;
}

struct Workspace {
    std::vector<double> br0, br1, logical, tmp;
};

// Inner products of psi with the images of sector (tx, uz); c over (x, others).
void decode_sector(const CheckPlan &p, const double *psi, size_t m, uint32_t tx, uint32_t uz, double *c) {
    size_t nx = size_t{1} << p.k;
    for (size_t o = 0; o < (size_t{1} << m); o++) {
        const double *blk = psi + (o << p.n);
        for (size_t x = 0; x < nx; x++) {
            uint32_t sh = p.x_shift[x], zs = p.z_sign[x];
            double acc = 0;
            for (uint32_t a : p.codewords) {
                uint32_t b = a ^ sh;
                double v = blk[b ^ tx];
                acc += (parity32(zs & a) ^ parity32(uz & b)) ? -v : v;
            }
            c[x | (o << p.k)] = acc * p.scale;
        }
    }
}

void encode_sector(const CheckPlan &p, const double *c, size_t m, uint32_t tx, uint32_t uz, double *psi) {
    size_t nx = size_t{1} << p.k;
    for (size_t o = 0; o < (size_t{1} << m); o++) {
        double *blk = psi + (o << p.n);
        for (size_t x = 0; x < nx; x++) {
            double v = c[x | (o << p.k)] * p.scale;
            if (v == 0) continue;
            uint32_t sh = p.x_shift[x], zs = p.z_sign[x];
            for (uint32_t a : p.codewords) {
                uint32_t b = a ^ sh;
                blk[b ^ tx] += (parity32(zs & a) ^ parity32(uz & b)) ? -v : v;
            }
        }
    }
}

void logical_hadamards(const CheckPlan &p, double *c, size_t len) {
    const double h[4] = {1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), -1 / std::sqrt(2.0)};
    for (size_t s : p.hadamard) layer(c, len, s, h);
}

void mid_step(const CheckPlan &p, std::vector<double> &br, size_t m, Workspace &ws) {
    size_t clen = size_t{1} << (p.k + m);
    ws.logical.assign(clen, 0.0);
    if (p.job->syndrome_between_passes) {
        decode_sector(p, br.data(), m, 0, 0, ws.logical.data());
        logical_hadamards(p, ws.logical.data(), clen);
        std::fill(br.begin(), br.end(), 0.0);
        encode_sector(p, ws.logical.data(), m, 0, 0, br.data());
        return;
    }
    ws.tmp.assign(br.size(), 0.0);
    for (uint64_t sx = 0; sx < (uint64_t{1} << p.r); sx++) {
        uint32_t tx = 0;
        for (size_t j = 0; j < p.r; j++) {
            if ((sx >> j) & 1) tx ^= p.t_mask[j];
        }
        for (uint64_t sz = 0; sz < (uint64_t{1} << p.r); sz++) {
            uint32_t uz = 0;
            for (size_t j = 0; j < p.r; j++) {
                if ((sz >> j) & 1) uz ^= p.u_mask[j];
            }
            decode_sector(p, br.data(), m, tx, uz, ws.logical.data());
            logical_hadamards(p, ws.logical.data(), clen);
            encode_sector(p, ws.logical.data(), m, tx, uz, ws.tmp.data());
        }
    }
    br.swap(ws.tmp);
}

// Runs one check on the normalized outer state; returns the acceptance
// probability and leaves the renormalized output in `outer`. `angle(l)` is
// the effective R_Y angle of location l.
template <typename AngleFn>
double run_check(const CheckPlan &p, std::vector<double> &outer, size_t n_outer, const AngleFn &angle,
                 std::mt19937_64 *rng, Workspace &ws) {
    size_t m = p.others.size();
    size_t k = p.k;
    size_t clen = size_t{1} << (k + m);
    size_t len = size_t{1} << (p.n + m);
    // Logical input over (slots, others).
    ws.logical.assign(clen, 0.0);
    double filler_amp = std::pow(std::sqrt(0.5), static_cast<double>(p.filler_pairs.size()));
    for (size_t i = 0; i < (size_t{1} << n_outer); i++) {
        if (outer[i] == 0) continue;
        size_t x = 0, o = 0;
        for (size_t s = 0; s < k; s++) {
            if (p.slot_outer[s] != SIZE_MAX && ((i >> p.slot_outer[s]) & 1)) x |= size_t{1} << s;
        }
        for (size_t j = 0; j < m; j++) {
            if ((i >> p.others[j]) & 1) o |= size_t{1} << j;
        }
        for (size_t f = 0; f < (size_t{1} << p.filler_pairs.size()); f++) {
            size_t xf = x;
            for (size_t j = 0; j < p.filler_pairs.size(); j++) {
                if ((f >> j) & 1) xf |= (size_t{1} << p.filler_pairs[j].first) | (size_t{1} << p.filler_pairs[j].second);
            }
            ws.logical[xf | (o << k)] = outer[i] * filler_amp;
        }
    }
    ws.br0.assign(len, 0.0);
    encode_sector(p, ws.logical.data(), m, 0, 0, ws.br0.data());
    ws.br1 = ws.br0;
    size_t passes = p.job->passes();
    for (size_t pass = 0; pass < passes; pass++) {
        size_t base = p.location_offset + pass * 2 * p.n;
        for (size_t q = 0; q < p.n; q++) {
            double alpha = angle(base + q);
            double beta = angle(base + p.n + q);
            double m0[4], ma[4], mb[4], m1[4];
            ry(alpha + beta, m0);
            ry(alpha, ma);
            ry(beta, mb);
            // m1 = R_Y(beta) Z R_Y(alpha).
            m1[0] = mb[0] * ma[0] - mb[1] * ma[2];
            m1[1] = mb[0] * ma[1] - mb[1] * ma[3];
            m1[2] = mb[2] * ma[0] - mb[3] * ma[2];
            m1[3] = mb[2] * ma[1] - mb[3] * ma[3];
            layer(ws.br0.data(), len, q, m0);
            layer(ws.br1.data(), len, q, m1);
        }
        if (pass == 0 && passes == 2) {
            mid_step(p, ws.br0, m, ws);
            mid_step(p, ws.br1, m, ws);
        }
    }
    for (size_t i = 0; i < len; i++) ws.br0[i] = 0.5 * (ws.br0[i] + ws.br1[i]);
    ws.logical.assign(clen, 0.0);
    decode_sector(p, ws.br0.data(), m, 0, 0, ws.logical.data());
    double total = 0;
    for (double v : ws.logical) total += v * v;
    if (total <= 0) {
        std::fill(outer.begin(), outer.end(), 0.0);
        return 0;
    }
    // Trace out filler slots by sampling their computational-basis values.
    uint64_t filler_mask = 0;
    for (auto [a, b] : p.filler_pairs) filler_mask |= (uint64_t{1} << a) | (uint64_t{1} << b);
    uint64_t filler_value = 0;
    double kept = total;
    if (filler_mask) {
        if (!rng) throw std::invalid_argument("exact injection does not support filler slots");
        std::vector<double> prob(size_t{1} << k, 0.0);
        for (size_t idx = 0; idx < clen; idx++) prob[(idx & ((size_t{1} << k) - 1)) & filler_mask] += ws.logical[idx] * ws.logical[idx];
        double u = static_cast<double>((*rng)() >> 11) * 0x1.0p-53 * total;
        double acc = 0;
        for (size_t f = 0; f < prob.size(); f++) {
            if ((f & filler_mask) != f || prob[f] == 0) continue;
            filler_value = f;
            acc += prob[f];
            if (u < acc) break;
        }
        kept = prob[filler_value];
    }
    std::fill(outer.begin(), outer.end(), 0.0);
    double renorm = 1.0 / std::sqrt(kept);
    for (size_t idx = 0; idx < clen; idx++) {
        size_t x = idx & ((size_t{1} << k) - 1);
        if ((x & filler_mask) != filler_value) continue;
        size_t o = idx >> k;
        size_t i = 0;
        for (size_t s = 0; s < k; s++) {
            if (p.slot_outer[s] != SIZE_MAX && ((x >> s) & 1)) i |= size_t{1} << p.slot_outer[s];
        }
        for (size_t j = 0; j < m; j++) {
            if ((o >> j) & 1) i |= size_t{1} << p.others[j];
        }
        outer[i] = ws.logical[idx] * renorm;
    }
    return total;
}

std::vector<double> product_input(size_t n_outer, const std::vector<double> &angles) {
    std::vector<double> v(size_t{1} << n_outer);
    for (size_t i = 0; i < v.size(); i++) {
        double a = 1;
        for (size_t q = 0; q < n_outer; q++) {
            a *= ((i >> q) & 1) ? std::sin(angles[q] / 2) : std::cos(angles[q] / 2);
        }
        v[i] = a;
    }
    return v;
}

double ideal_overlap(const std::vector<double> &outer, size_t n_outer) {
    std::vector<double> ideal = product_input(n_outer, std::vector<double>(n_outer, kPi / 4));
    double f = 0;
    for (size_t i = 0; i < outer.size(); i++) f += ideal[i] * outer[i];
    return f;
}

std::vector<CheckPlan> make_plans(const Protocol &p) {
    std::vector<CheckPlan> plans;
    auto offs = p.check_offsets();
    auto checks = p.checks();
    for (size_t c = 0; c < checks.size(); c++) plans.push_back(make_plan(*checks[c], p.n_outer, offs[c]));
    return plans;
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0, comp = 0;
    void add(double v) {
        double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

size_t simulation_qubits(const Protocol &p) {
    size_t best = p.n_outer + 1;
    for (const auto *c : p.checks()) {
        best = std::max(best, c->inner->n_inner + p.n_outer - c->encoded_qubits().size() + 1);
    }
    return best;
}

RunStats run(const Protocol &p, const SimConfig &config) {
    if (config.theta < 0) throw std::invalid_argument("theta must be non-negative");
    if (config.runs < 1) throw std::invalid_argument("runs must be positive");
    if (simulation_qubits(p) > config.qubit_cap) {
        throw QubitCapExceeded("protocol " + p.name + " needs " + std::to_string(simulation_qubits(p)) +
                               " qubits; cap is " + std::to_string(config.qubit_cap));
    }
    std::vector<CheckPlan> plans = make_plans(p);
    size_t n_loc = p.n_locations();
    size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<size_t>(threads, config.runs);
    std::vector<signed char> accepted(config.runs, 0);
    std::vector<double> infid(config.runs, 0.0);
    auto worker = [&](size_t tid) {
        Workspace ws;
        std::vector<double> angles(n_loc);
        for (uint64_t run_index = tid; run_index < config.runs; run_index += threads) {
            std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(run_index)));
            double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            for (size_t l = 0; l < n_loc; l++) {
                double d = (2 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1) * config.theta;
                angles[l] = kPi / 4 + d;
            }
            // T† locations rotate by −φ.
            auto angle = [&](size_t l) {
                size_t c = 0;
                while (c + 1 < plans.size() && plans[c + 1].location_offset <= l) c++;
                size_t local = (l - plans[c].location_offset) % (2 * plans[c].n);
                return local < plans[c].n ? -angles[l] : angles[l];
            };
            std::vector<double> outer = product_input(p.n_outer, angles);
            double p_acc = 1;
            bool ok = true;
            for (const auto &plan : plans) {
                p_acc *= run_check(plan, outer, p.n_outer, angle, &rng, ws);
                if (!(u < p_acc)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            double f = ideal_overlap(outer, p.n_outer);
            accepted[run_index] = 1;
            infid[run_index] = std::max(0.0, 1.0 - f * f);
        }
    };
    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < threads; t++) pool.emplace_back(worker, t);
        for (auto &t : pool) t.join();
    }
    RunStats st;
    st.theta = config.theta;
    st.eps_in = epsilon_of_theta(config.theta);
    st.attempted = config.runs;
    CompensatedSum s1, s2;
    for (uint64_t i = 0; i < config.runs; i++) {
        if (!accepted[i]) continue;
        st.accepted++;
        s1.add(infid[i]);
        s2.add(infid[i] * infid[i]);
    }
    if (st.accepted) {
        double na = static_cast<double>(st.accepted);
        st.mean_infidelity = s1.value() / na;
        if (st.accepted > 1) {
            double var = (s2.value() - na * st.mean_infidelity * st.mean_infidelity) / (na - 1);
            st.stderr_infidelity = std::sqrt(std::max(0.0, var) / na);
        }
    }
    return st;
}

PatternOutcome inject_pauli(const Protocol &p, const std::vector<size_t> &locations) {
    if (simulation_qubits(p) > 64) throw QubitCapExceeded("protocol too large");
    std::vector<CheckPlan> plans = make_plans(p);
    for (const auto &plan : plans) {
        if (!plan.filler_pairs.empty()) throw std::invalid_argument("inject_pauli does not support filler slots");
    }
    size_t n_loc = p.n_locations();
    std::vector<bool> hit(n_loc, false);
    for (size_t l : locations) {
        if (l >= n_loc) throw std::out_of_range("fault location out of range");
        hit[l] = !hit[l];
    }
    std::vector<double> angles(n_loc);
    for (size_t l = 0; l < n_loc; l++) angles[l] = kPi / 4;
    auto angle = [&](size_t l) {
        size_t c = 0;
        while (c + 1 < plans.size() && plans[c + 1].location_offset <= l) c++;
        size_t local = (l - plans[c].location_offset) % (2 * plans[c].n);
        double base = local < plans[c].n ? -kPi / 4 : kPi / 4;
        return hit[l] ? base + kPi : base;
    };
    std::vector<double> in_angles(p.n_outer);
    for (size_t q = 0; q < p.n_outer; q++) in_angles[q] = hit[q] ? kPi / 4 + kPi : kPi / 4;
    std::vector<double> outer = product_input(p.n_outer, in_angles);
    Workspace ws;
    PatternOutcome out;
    double p_acc = 1;
    for (const auto &plan : plans) {
        p_acc *= run_check(plan, outer, p.n_outer, angle, nullptr, ws);
        if (p_acc == 0) return out;
    }
    double f = ideal_overlap(outer, p.n_outer);
    out.p_accept = p_acc;
    out.bad = p_acc * std::max(0.0, 1.0 - f * f);
    return out;
}

PowerLaw fit_power_law(const std::vector<std::pair<double, double>> &points) {
    if (points.size() < 2) throw DegenerateInput("power-law fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : points) {
        if (!(x > 0) || !(y > 0)) throw DegenerateInput("power-law fit needs positive points");
        double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(points.size());
    double den = n * sxx - sx * sx;
    if (std::abs(den) < 1e-12 * std::max(1.0, n * sxx)) throw DegenerateInput("power-law fit needs distinct eps_in");
    PowerLaw pl;
    pl.d = (n * sxy - sx * sy) / den;
    pl.C = std::exp((sy - pl.d * sx) / n);
    return pl;
}

}  // namespace distillery
