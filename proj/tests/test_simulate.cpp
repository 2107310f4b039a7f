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
#include <functional>
#include <random>

#include "distillery/simulate.hpp"

using namespace distillery;

namespace {

const double kPi = 3.14159265358979323846;
const double kC8 = std::cos(kPi / 8), kS8 = std::sin(kPi / 8);

void apply_pauli(StateVector &sv, const SignedPauli &p) {
    for (size_t q = 0; q < p.x.size(); q++) {
        auto w = static_cast<uint32_t>(q);
        if (p.x.get(q) && p.z.get(q)) {
            sv.apply(Gate{GateKind::Y, w});
        } else if (p.x.get(q)) {
            sv.apply(Gate{GateKind::X, w});
        } else if (p.z.get(q)) {
            sv.apply(Gate{GateKind::Z, w});
        }
    }
    if (p.negative) {
        for (auto &a : sv.amplitudes()) a = -a;
    }
}

StateVector random_state(size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    StateVector sv(n);
    double norm = 0;
    for (auto &a : sv.amplitudes()) {
        a = {g(rng), g(rng)};
        norm += std::norm(a);
    }
    for (auto &a : sv.amplitudes()) a /= std::sqrt(norm);
    return sv;
}

// k-qubit product of |H⟩ (or |H⊥⟩ where `perp` is set).
StateVector magic_product(size_t k, const std::vector<bool> &perp) {
    StateVector sv(k);
    for (size_t x = 0; x < sv.amplitudes().size(); x++) {
        double v = 1;
        for (size_t s = 0; s < k; s++) {
            bool bit = (x >> s) & 1;
            v *= perp[s] ? (bit ? kC8 : -kS8) : (bit ? kS8 : kC8);
        }
        sv.amplitudes()[x] = v;
    }
    return sv;
}

// Encoder applied to `logical` on wires 0..k−1 of an n-qubit register.
StateVector encode(const CssCode &code, const Circuit &enc, const StateVector &logical) {
    StateVector sv(code.n_inner);
    auto &a = sv.amplitudes();
    std::fill(a.begin(), a.end(), 0.0);
    for (size_t x = 0; x < logical.amplitudes().size(); x++) a[x] = logical.amplitudes()[x];
    sv.apply(enc);
    return sv;
}

Gate random_clifford(size_t n, std::mt19937_64 &rng) {
    const GateKind one[] = {GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S, GateKind::S_DAG};
    auto q0 = static_cast<uint32_t>(rng() % n);
    if (rng() % 3 == 0 && n > 1) {
        auto q1 = static_cast<uint32_t>((q0 + 1 + rng() % (n - 1)) % n);
        return {rng() & 1 ? GateKind::CX : GateKind::CZ, q0, q1, 0};
    }
    return {one[rng() % 6], q0, 0, 0};
}

}  // namespace

TEST_SUITE("simulate") {
    TEST_CASE("gates preserve the norm") {
        std::mt19937_64 rng(1);
        StateVector sv = random_state(5, rng);
        for (int i = 0; i < 300; i++) {
            Gate g = random_clifford(5, rng);
            if (i % 4 == 0) g = {GateKind::RY, static_cast<uint32_t>(rng() % 5), 0, 0.37 * i};
            sv.apply(g);
            CHECK(sv.norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
        }
    }

    TEST_CASE("circuit inverse undoes the circuit") {
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 20; trial++) {
            Circuit c{4, {}};
            for (int i = 0; i < 40; i++) {
                Gate g = random_clifford(4, rng);
                if (i % 5 == 0) g = {GateKind::RY, static_cast<uint32_t>(rng() % 4), 0, 0.1 * i};
                c.gates.push_back(g);
            }
            StateVector a = random_state(4, rng);
            StateVector b = a;
            b.apply(c);
            b.apply(c.inverse());
            CHECK(std::abs(a.inner(b)) == doctest::Approx(1.0).epsilon(1e-10));
        }
        Circuit bad{1, {}};
        bad.append(GateKind::POSTSELECT_ZERO, 0);
        CHECK_THROWS_AS(bad.inverse(), std::logic_error);
    }

    TEST_CASE("pauli conjugation matches the matrices") {
        std::mt19937_64 rng(3);
        const size_t n = 3;
        for (int trial = 0; trial < 300; trial++) {
            Gate g = random_clifford(n, rng);
            SignedPauli p{BitVector(n), BitVector(n), static_cast<bool>(rng() & 1)};
            for (size_t q = 0; q < n; q++) {
                p.x.set(q, rng() & 1);
                p.z.set(q, rng() & 1);
            }
            SignedPauli img = p;
            conjugate(img, g);
            StateVector psi = random_state(n, rng);
            // g P g† ψ
            StateVector lhs = psi;
            lhs.apply(Circuit{n, {g}}.inverse());
            apply_pauli(lhs, p);
            lhs.apply(g);
            StateVector rhs = psi;
            apply_pauli(rhs, img);
            CAPTURE(gate_name(g.kind));
            CHECK(lhs.inner(rhs).real() == doctest::Approx(1.0).epsilon(1e-10));
        }
        SignedPauli p{BitVector::from_string("1"), BitVector::from_string("0"), false};
        CHECK_THROWS(conjugate(p, Gate{GateKind::RY, 0, 0, 0.1}));
    }

    TEST_CASE("encoders for every library code") {
        for (const auto &name : library_names()) {
            const CssCode &c = library_code(name);
            Circuit enc = synthesize_encoder(c);
            CAPTURE(name);
            CHECK(encoder_matches(enc, encoder_spec(c)));
            CHECK(enc.count(GateKind::RY) == 0);
            CHECK(enc.count(GateKind::POSTSELECT_ZERO) == 0);
        }
    }

    TEST_CASE("encoders for random codes") {
        for (uint64_t seed = 0; seed < 30; seed++) {
            CssCode c = from_self_orthogonal(sample_random_inner(12, 1 + seed % 4, seed), "r");
            Circuit enc = synthesize_encoder(c);
            CHECK(encoder_matches(enc, encoder_spec(c)));
        }
    }

    TEST_CASE("encoded states are stabilized") {
        std::mt19937_64 rng(4);
        for (const char *name : {"4_2_2", "7_1_3", "15_7_3", "16_2_4", "16_6_4", "17_1_5"}) {
            const CssCode &c = library_code(name);
            Circuit enc = synthesize_encoder(c);
            StateVector sv = encode(c, enc, random_state(c.k_inner, rng));
            for (const auto &row : c.stabilizers.rows()) {
                for (bool x_type : {true, false}) {
                    SignedPauli s{x_type ? row : BitVector(c.n_inner), x_type ? BitVector(c.n_inner) : row, false};
                    StateVector t = sv;
                    apply_pauli(t, s);
                    CAPTURE(name);
                    CHECK(sv.inner(t).real() == doctest::Approx(1.0).epsilon(1e-10));
                }
            }
        }
    }

    TEST_CASE("[[4,2,2]] encoded |00> has X and Z parities +1") {
        const CssCode &c = library_code("4_2_2");
        StateVector sv = encode(c, synthesize_encoder(c), StateVector(2));
        for (auto [x, z] : {std::pair{"1111", "0000"}, {"0000", "1111"}}) {
            StateVector t = sv;
            apply_pauli(t, {BitVector::from_string(x), BitVector::from_string(z), false});
            CHECK(sv.inner(t).real() == doctest::Approx(1.0).epsilon(1e-10));
        }
    }

    TEST_CASE("steane encoder round trip") {
        const CssCode &c = library_code("7_1_3");
        Circuit enc = synthesize_encoder(c);
        Circuit dec = enc.inverse();
        std::mt19937_64 rng(5);
        for (int t = 0; t < 100; t++) {
            StateVector in = random_state(1, rng);
            StateVector sv = encode(c, enc, in);
            sv.apply(dec);
            StateVector back(1);
            back.amplitudes()[0] = sv.amplitudes()[0];
            back.amplitudes()[1] = sv.amplitudes()[1];
            CHECK(std::norm(in.inner(back)) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }

    TEST_CASE("[[17,1,5]] encoded |H> is fixed by transversal H") {
        const CssCode &c = library_code("17_1_5");
        StateVector sv = encode(c, synthesize_encoder(c), magic_product(1, {false}));
        StateVector t = sv;
        for (uint32_t q = 0; q < 17; q++) t.apply(Gate{GateKind::H, q});
        CHECK(sv.inner(t).real() == doctest::Approx(1.0).epsilon(1e-10));
    }

    TEST_CASE("steane check measures H") {
        Protocol p = preset("7");
        const CheckJob &job = *p.checks()[0];
        CheckCircuit cc = build_check_circuit(job);
        CHECK(cc.t_locations.size() == 14);
        StateVector in = magic_product(1, {false});
        StateVector out = run_check_circuit(cc, job, in, {});
        CHECK(out.norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::norm(in.inner(out)) == doctest::Approx(1.0).epsilon(1e-10));
        StateVector perp = magic_product(1, {true});
        CHECK(run_check_circuit(cc, job, perp, {}).norm_squared() < 1e-12);
    }

    TEST_CASE("[[4,2,2]] check measures H on both slots") {
        Protocol p = preset("4");
        const CheckJob &job = *p.checks()[0];
        CheckCircuit cc = build_check_circuit(job);
        CHECK(cc.t_locations.size() == 16);
        for (auto [a, b, accept] : {std::tuple{false, false, true}, {true, false, false}, {false, true, false},
                                    {true, true, true}}) {
            StateVector in = magic_product(2, {a, b});
            StateVector out = run_check_circuit(cc, job, in, {});
            CHECK(out.norm_squared() == doctest::Approx(accept ? 1.0 : 0.0).epsilon(1e-10).scale(1));
            if (accept) CHECK(std::norm(in.inner(out)) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }

    TEST_CASE("gate-level check circuit agrees with the fast simulator") {
        for (const char *name : {"4", "7"}) {
            Protocol p = preset(name);
            const CheckJob &job = *p.checks()[0];
            CheckCircuit cc = build_check_circuit(job);
            size_t k = job.inner->k_inner;
            size_t L = p.n_locations();
            for (size_t a = 0; a < L; a++) {
                for (size_t b = a + 1; b <= L; b++) {
                    std::vector<size_t> loc{a};
                    if (b < L) loc.push_back(b);
                    std::vector<bool> perp(k, false);
                    std::vector<size_t> local;
                    for (size_t l : loc) {
                        if (l < p.n_outer) {
                            perp[static_cast<size_t>(job.slot_qubit[l])] = !perp[static_cast<size_t>(job.slot_qubit[l])];
                        } else {
                            local.push_back(l - p.n_outer);
                        }
                    }
                    StateVector out = run_check_circuit(cc, job, magic_product(k, perp), local);
                    double p_acc = out.norm_squared();
                    double fid = std::norm(magic_product(k, std::vector<bool>(k, false)).inner(out));
                    PatternOutcome fast = inject_pauli(p, loc);
                    CHECK(fast.p_accept == doctest::Approx(p_acc).epsilon(1e-9).scale(1));
                    CHECK(fast.bad == doctest::Approx(p_acc - fid).epsilon(1e-9).scale(1));
                }
            }
        }
    }

    TEST_CASE("epsilon of theta") {
        CHECK(epsilon_of_theta(0) == 0);
        for (double t = 0.01; t <= 0.1; t += 0.01) CHECK(epsilon_of_theta(t) == doctest::Approx(t * t / 12).epsilon(0.01));
        CHECK(epsilon_of_theta(0.3) == doctest::Approx(0.5 - std::sin(0.3) / 0.6).epsilon(1e-14));
        double series = 0.09 / 12 - 0.0081 / 240 + 0.000729 / 10080;
        CHECK(epsilon_of_theta(0.3) == doctest::Approx(series).epsilon(1e-6));
        for (double e : {1e-4, 1e-3, 1e-2, 0.1, 0.3}) CHECK(epsilon_of_theta(theta_of_epsilon(e)) == doctest::Approx(e).epsilon(1e-12));
        CHECK_THROWS_AS(theta_of_epsilon(0.7), std::invalid_argument);
        CHECK_THROWS_AS(theta_of_epsilon(-0.1), std::invalid_argument);
    }

    TEST_CASE("inject pauli examples") {
        Protocol p = preset("7");
        PatternOutcome none = inject_pauli(p, {});
        CHECK(none.accepted());
        CHECK_FALSE(none.output_bad());
        for (size_t l = 0; l < p.n_locations(); l++) CHECK_FALSE(inject_pauli(p, {l}).accepted());
        PatternOutcome meas = inject_pauli(p, {0, 1 + 1, 1 + 7 + 1});
        CHECK(meas.accepted());
        CHECK(meas.output_bad());
        CHECK_THROWS_AS(inject_pauli(p, {15}), std::out_of_range);
        Protocol filled = pipeline(1, {{normal_check(shared_library_code("21_3_5"), {0})}}, 5);
        CHECK_THROWS_AS(inject_pauli(filled, {}), std::invalid_argument);
        CHECK(run(filled, SimConfig{0, 5, 1, 1}).accepted == 5);
    }

    TEST_CASE("inject pauli agrees with the routine algebra") {
        auto compare = [](const Protocol &p, const std::vector<size_t> &loc) {
            PatternOutcome a = inject_pauli(p, loc);
            PatternOutcome b = pattern_outcome(p, loc);
            CHECK(a.accepted() == b.accepted());
            CHECK(a.output_bad() == b.output_bad());
            CHECK(a.p_accept == doctest::Approx(b.p_accept).epsilon(1e-9).scale(1));
            CHECK(a.bad == doctest::Approx(b.bad).epsilon(1e-9).scale(1));
        };
        Protocol p7 = preset("7");
        for (size_t a = 0; a < 15; a++) {
            compare(p7, {a});
            for (size_t b = a + 1; b < 15; b++) {
                compare(p7, {a, b});
                for (size_t c = b + 1; c < 15; c++) compare(p7, {a, b, c});
            }
        }
        Protocol p4 = preset("4");
        for (size_t a = 0; a < 18; a++) {
            for (size_t b = a + 1; b < 18; b++) compare(p4, {a, b});
        }
        std::mt19937_64 rng(6);
        for (const char *name : {"16", "20", "17"}) {
            Protocol p = preset(name);
            for (int t = 0; t < 60; t++) {
                std::vector<size_t> loc;
                size_t w = 2 + rng() % 3;
                for (size_t i = 0; i < w; i++) loc.push_back(rng() % p.n_locations());
                compare(p, loc);
            }
        }
    }

    TEST_CASE("noiseless runs accept everything") {
        for (const char *name : {"4", "7", "16", "17", "21"}) {
            RunStats s = run(preset(name), SimConfig{0, 20, 1, 1});
            CAPTURE(name);
            CHECK(s.accepted == s.attempted);
            CHECK(s.mean_infidelity < 1e-10);
            CHECK(s.eps_in == 0);
        }
    }

    TEST_CASE("runs are reproducible and thread independent") {
        Protocol p = preset("4");
        RunStats a = run(p, SimConfig{0.4, 500, 11, 1});
        RunStats b = run(p, SimConfig{0.4, 500, 11, 3});
        RunStats c = run(p, SimConfig{0.4, 500, 11, 1});
        CHECK(a.accepted == b.accepted);
        CHECK(a.mean_infidelity == b.mean_infidelity);
        CHECK(a.stderr_infidelity == b.stderr_infidelity);
        CHECK(a.mean_infidelity == c.mean_infidelity);
        RunStats d = run(p, SimConfig{0.4, 500, 12, 1});
        CHECK(d.mean_infidelity != a.mean_infidelity);
    }

    TEST_CASE("preset 7 at eps 3e-3 matches 35 eps^3") {
        Protocol p = preset("7");
        double eps = 3e-3;
        RunStats s = run(p, SimConfig{theta_of_epsilon(eps), 10000, 21, 0});
        CHECK(s.eps_in == doctest::Approx(eps).epsilon(1e-10));
        CHECK(std::abs(s.mean_infidelity - 35 * std::pow(eps, 3)) <= 3 * s.stderr_infidelity);
        double acc = std::pow(1 - eps, 15);
        CHECK(std::abs(s.acceptance_rate() - acc) <= 3 * std::sqrt(acc * (1 - acc) / 1e4));
    }

    TEST_CASE("preset 4 at eps 1e-2 matches the enumerated series") {
        Protocol p = preset("4");
        double eps = 1e-2;
        WeightTally t = error_polynomial(p, 6);
        RunStats s = run(p, SimConfig{theta_of_epsilon(eps), 10000, 22, 0});
        CHECK(std::abs(s.mean_infidelity - t.output_error(eps)) <= 3 * s.stderr_infidelity);
        // Leading term alone: 45 eps^2, about 4% below the series at this eps.
        CHECK(s.mean_infidelity == doctest::Approx(45 * eps * eps).epsilon(0.1));
    }

    TEST_CASE("qubit cap") {
        CHECK(simulation_qubits(preset("4")) == 5);
        CHECK(simulation_qubits(preset("7")) == 8);
        CHECK(simulation_qubits(preset("16")) == 17);
        CHECK(simulation_qubits(preset("23")) == 24);
        SimConfig cfg{0.1, 10, 0, 1};
        cfg.qubit_cap = 10;
        CHECK_THROWS_AS(run(preset("16"), cfg), QubitCapExceeded);
        CHECK_THROWS_AS(StateVector(30), QubitCapExceeded);
    }

    TEST_CASE("power law fit") {
        std::vector<std::pair<double, double>> pts;
        for (double e : {1e-3, 3e-3, 1e-2}) pts.push_back({e, 35 * std::pow(e, 3)});
        PowerLaw f = fit_power_law(pts);
        CHECK(f.C == doctest::Approx(35).epsilon(1e-6));
        CHECK(f.d == doctest::Approx(3).epsilon(1e-6));
        PowerLaw two = fit_power_law({{1e-3, 2e-5}, {1e-2, 7e-4}});
        CHECK(two.C * std::pow(1e-3, two.d) == doctest::Approx(2e-5).epsilon(1e-9));
        CHECK(two.C * std::pow(1e-2, two.d) == doctest::Approx(7e-4).epsilon(1e-9));
        CHECK_THROWS_AS(fit_power_law({{1e-3, 1e-6}}), DegenerateInput);
        CHECK_THROWS_AS(fit_power_law({{1e-3, 1e-6}, {1e-3, 2e-6}}), DegenerateInput);
        CHECK_THROWS_AS(fit_power_law({{1e-3, 0}, {1e-2, 1e-6}}), DegenerateInput);
    }
}
