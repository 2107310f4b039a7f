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

#ifndef DISTILLERY_SIMULATE_HPP
#define DISTILLERY_SIMULATE_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "distillery/enumerate.hpp"
#include "distillery/protocol.hpp"

namespace distillery {

struct SynthesisFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QubitCapExceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DegenerateInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    S_DAG,
    CX,
    CZ,
    /// R_Y(angle); T = R_Y(π/4) and T† = R_Y(−π/4).
    RY,
    /// Projects q0 onto |0⟩ without renormalizing (post-selection).
    POSTSELECT_ZERO,
};

const char *gate_name(GateKind k);

struct Gate {
    GateKind kind = GateKind::I;
    uint32_t q0 = 0;
    uint32_t q1 = 0;
    double angle = 0;
};

struct Circuit {
    size_t n_qubits = 0;
    std::vector<Gate> gates;

    Circuit &append(GateKind k, uint32_t q0, uint32_t q1 = 0, double angle = 0) {
        gates.push_back({k, q0, q1, angle});
        return *this;
    }
    /// Unitary gates only; throws std::logic_error on POSTSELECT_ZERO.
    Circuit inverse() const;
    /// Wire i of this circuit acts on wire map[i] of the result.
    Circuit remapped(const std::vector<uint32_t> &map, size_t n_qubits) const;
    size_t count(GateKind k) const;
};

/// Hermitian Pauli string with a sign; Y is represented by x = z = 1.
struct SignedPauli {
    BitVector x;
    BitVector z;
    bool negative = false;
    bool operator==(const SignedPauli &o) const = default;
};

/// Conjugates p by a Clifford gate: p ← g p g†. Throws on RY and
/// POSTSELECT_ZERO.
void conjugate(SignedPauli &p, const Gate &g);

/// Targets of the encoder: U X_i U† = x_images[i], U Z_i U† = z_images[i].
/// Wires 0..k−1 carry the logical slots in magic-basis order. Wire k+j has
/// Z image X(s_j) and X image Z(u_j); wire k+r+j has Z image Z(s_j) and X
/// image X(t_j), where t_j, u_j are destabilizers commuting with every
/// logical representative.
struct EncoderSpec {
    size_t n = 0;
    size_t k = 0;
    size_t r = 0;
    std::vector<BitVector> t;
    std::vector<BitVector> u;
    std::vector<SignedPauli> x_images;
    std::vector<SignedPauli> z_images;
};

EncoderSpec encoder_spec(const CssCode &code);

/// Clifford encoder over {H, S, S_DAG, CX, CZ, Pauli}. The result is checked
/// symbolically against encoder_spec; throws SynthesisFailure on mismatch.
Circuit synthesize_encoder(const CssCode &code);

/// Whether conjugating every X_i, Z_i through `c` reproduces the spec.
bool encoder_matches(const Circuit &c, const EncoderSpec &spec);

/// Dense complex state vector; qubit q is bit q of the basis index.
class StateVector {
  public:
    explicit StateVector(size_t n_qubits, size_t cap = 24);
    size_t n_qubits() const { return n_; }
    std::vector<std::complex<double>> &amplitudes() { return amp_; }
    const std::vector<std::complex<double>> &amplitudes() const { return amp_; }
    void apply(const Gate &g);
    void apply(const Circuit &c);
    double norm_squared() const;
    std::complex<double> inner(const StateVector &o) const;

  private:
    void apply_1q(size_t q, std::complex<double> m00, std::complex<double> m01, std::complex<double> m10,
                  std::complex<double> m11);
    size_t n_;
    std::vector<std::complex<double>> amp_;
};

/// Full H-measurement routine on wires 0..n−1 (code block) and n (ancilla).
/// Input: logical content on wires 0..k−1, remaining code wires in |0⟩,
/// ancilla in |0⟩. Output: logical content on wires 0..k−1 after the
/// post-selections on the ancilla and check wires.
struct CheckCircuit {
    Circuit circuit;
    size_t ancilla = 0;
    /// Gate index of each RY fault location, in Protocol::locations() order
    /// within the check.
    std::vector<size_t> t_locations;
};

CheckCircuit build_check_circuit(const CheckJob &job);

/// Runs a check circuit with Y inserted after the listed local T locations on
/// the given logical input (k_inner qubits). Returns the unnormalized output.
StateVector run_check_circuit(const CheckCircuit &cc, const CheckJob &job, const StateVector &logical_in,
                              const std::vector<size_t> &faults);

/// 1/2 − sin θ / (2θ), with a series near zero.
double epsilon_of_theta(double theta);
/// Inverse on [0, θ*], θ* the first maximum. Throws std::invalid_argument.
double theta_of_epsilon(double eps);

struct SimConfig {
    double theta = 0;
    uint64_t runs = 1;
    uint64_t seed = 0;
    /// 0 selects std::thread::hardware_concurrency().
    size_t threads = 0;
    size_t qubit_cap = 24;
};

struct RunStats {
    double theta = 0;
    double eps_in = 0;
    uint64_t attempted = 0;
    uint64_t accepted = 0;
    /// Mean of 1 − F² over accepted runs.
    double mean_infidelity = 0;
    /// Standard error of mean_infidelity.
    double stderr_infidelity = 0;
    double acceptance_rate() const {
        return attempted ? static_cast<double>(accepted) / static_cast<double>(attempted) : 0;
    }
};

/// Peak qubit count of the fast simulator, ancilla included.
size_t simulation_qubits(const Protocol &p);

/// Monte Carlo over the over-rotation model. Bit-reproducible for a fixed
/// seed, independent of the thread count. Throws QubitCapExceeded.
RunStats run(const Protocol &p, const SimConfig &config);

/// Exact-angle circuit with Y faults at the listed location indices. Throws
/// std::invalid_argument when a check holds filler slots.
PatternOutcome inject_pauli(const Protocol &p, const std::vector<size_t> &locations);

struct PowerLaw {
    double C = 0;
    double d = 0;
};

/// Least squares on (log ε_in, log ε_out). Throws DegenerateInput.
PowerLaw fit_power_law(const std::vector<std::pair<double, double>> &points);

}  // namespace distillery

#endif
