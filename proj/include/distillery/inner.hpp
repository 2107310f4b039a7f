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

#ifndef DISTILLERY_INNER_HPP
#define DISTILLERY_INNER_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "distillery/f2.hpp"
#include "distillery/forms.hpp"

namespace distillery {

struct InvalidQubit : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonCommutingInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct LibraryCorrupt : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownCode : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
/// A code file whose header (k, d, kind) disagrees with the derived code.
struct HeaderMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CodeKind { Normal, Hyperbolic };
const char *kind_name(CodeKind k);

/// A Pauli operator up to phase: X part and Z part as bit vectors.
struct PauliString {
    BitVector x;
    BitVector z;
    /// Whether the two operators anticommute.
    bool anticommutes(const PauliString &o) const { return x.dot(o.z) ^ z.dot(o.x); }
    bool operator==(const PauliString &o) const = default;
};

/// Logical Pauli on the k slots of a code, written X^x Z^z per slot.
struct LogicalPauli {
    uint64_t x = 0;
    uint64_t z = 0;
    bool operator==(const LogicalPauli &o) const = default;
    bool is_identity() const { return x == 0 && z == 0; }
};

/// Weakly self-dual CSS code. X- and Z-type stabilizers both span the rows of
/// `stabilizers`. Logical slot i has representatives X̃_i and Z̃_i:
///   normal slot (vector v):          X̃ = X(v),  Z̃ = Z(v);
///   hyperbolic pair (w, w'):         X̃ = X(w),  Z̃ = Z(w')  on the first slot,
///                                    X̃ = Z(w),  Z̃ = X(w')  on the second.
/// Transversal Hadamard acts as H on normal slots and SWAP on each pair.
struct CssCode {
    std::string name;
    BitMatrix stabilizers;
    MagicBasis magic;
    size_t n_inner = 0;
    size_t k_inner = 0;
    CodeKind kind = CodeKind::Normal;
    size_t distance = 0;

    /// Vector underlying X̃_i and Z̃_i, per slot.
    std::vector<BitVector> x_vectors;
    std::vector<BitVector> z_vectors;
    /// X̃_i and Z̃_i as Pauli strings.
    std::vector<PauliString> logical_x;
    std::vector<PauliString> logical_z;

    size_t n_pairs() const { return kind == CodeKind::Hyperbolic ? k_inner / 2 : 0; }

    /// Whether e has zero syndrome, i.e. lies in S⊥.
    bool in_normalizer(const BitVector &e) const;
    /// Syndrome of e against the stabilizer rows, as a mask (rank(S) ≤ 64).
    uint64_t syndrome(const BitVector &e) const;
    /// Logical action of the physical operator Y(e). Slot i gets the X bit
    /// e·z_vectors[i] and the Z bit e·x_vectors[i]. Meaningful for e ∈ S⊥;
    /// for other e it is the frame used by decoders whose destabilizers
    /// commute with every logical representative.
    LogicalPauli logical_of_y(const BitVector &e) const;
};

/// Throws NotSelfOrthogonal.
CssCode from_self_orthogonal(const BitMatrix &rows, const std::string &name);

struct VerificationReport {
    bool self_orthogonal = false;
    bool commutation = false;
    bool hadamard_action = false;
    bool distance_ok = false;
    size_t certified_distance = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Never throws; collects failures.
VerificationReport verify_code(const CssCode &code);

/// Removes qubit i and the unique generator supported on it after re-echeloning.
/// Throws InvalidQubit when i is out of range or no generator touches i.
CssCode puncture(const CssCode &code, size_t qubit);

/// Weakly self-dual [[4n, 2k, 2d]] CSS code from an [[n, k, d]] stabilizer code
/// given as Pauli strings over {I,X,Y,Z}. Throws NonCommutingInput.
CssCode majorana_lift(const std::vector<std::string> &pauli_rows, size_t n, const std::string &name = "");

/// c×n self-orthogonal matrix: first row all ones, row j uniform over vectors
/// orthogonal to rows 0..j−1. Throws InvalidDimensions when n is odd.
BitMatrix sample_random_inner(size_t n, size_t c, uint64_t seed);

/// (2^{−n+c+1} + 2^{−c+1}) Σ_{w=1}^{d} C(n, w).
double ncd_bound(size_t n, size_t c, size_t d);

/// Same quantity as an exact reduced fraction.
struct Rational128 {
    unsigned __int128 num = 0;
    unsigned __int128 den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
Rational128 ncd_bound_exact(size_t n, size_t c, size_t d);

/// Extended Golay [24,12,8] as the greedy lexicode of length 24 and distance 8.
BitMatrix golay24_lexicode();

/// Codewords vanishing on bit i, with bit i deleted. Returns a basis.
BitMatrix shorten(const BitMatrix &code_basis, size_t bit);

/// Shipped inner codes, verified on first access. Throws LibraryCorrupt.
const std::map<std::string, CssCode> &library();
const CssCode &library_code(const std::string &name);
std::vector<std::string> library_names();

/// Named [[21,3,5]] obtained by puncturing [[23,1,7]] twice (cross-check only).
CssCode golay_21_3_5();

/// "n k d kind" header followed by one 0/1 row per stabilizer generator.
std::string format_code_file(const CssCode &code);
/// Parses the format above. Throws ParseError, or HeaderMismatch when the
/// header disagrees with the derived code.
CssCode parse_code_file(const std::string &text, const std::string &name);
CssCode load_code_file(const std::string &path);

/// Number of vectors of each weight in S⊥ \ S.
std::vector<uint64_t> logical_weight_distribution(const CssCode &code, uint64_t budget = 0);

}  // namespace distillery

#endif
