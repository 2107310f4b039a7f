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

#ifndef DISTILLERY_ENUMERATE_HPP
#define DISTILLERY_ENUMERATE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "distillery/protocol.hpp"

namespace distillery {

using u128 = unsigned __int128;

struct LengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct OrderMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RoutineStatus { Detected, Passed };

/// Result of one pass of the T† / controlled-Pauli / T column.
struct RoutineOutcome {
    RoutineStatus status = RoutineStatus::Passed;
    /// Parity of a; flips the observed eigenvalue.
    bool flip = false;
    /// Logical action of Y(a ⊕ b) on the slots.
    LogicalPauli logical;
    /// Slots with a nonidentity logical.
    BitVector logical_mask;
};

/// a: faults in the column applied before the controlled Paulis (the T†
/// column), b: faults in the column after it (the T column). Throws
/// LengthMismatch.
RoutineOutcome routine_outcome(const CssCode &inner, const BitVector &a_bits, const BitVector &b_bits);

/// Vectors of weight w in span(S⊥) \ span(S). Throws BudgetExceeded.
uint64_t logical_weight_count(const CssCode &code, size_t w);

/// One cell of a check's transfer table. `logical` is the net logical on the
/// occupied slots. Normal checks: `flip` is the measurement flip. Hyperbolic
/// checks: `flip` is the relative sign (|a1| + |a2| + |e1|) mod 2 between the
/// two terms of the checked operator, and `first_pass` marks the Hadamard
/// slots whose first-pass logical conjugates the mid Hadamard to (X − Z)/√2.
struct TransferEntry {
    size_t weight = 0;
    bool flip = false;
    LogicalPauli logical;
    LogicalPauli first_pass;
    u128 count = 0;
};

struct TransferTable {
    size_t w_max = 0;
    /// Fault locations of the check, 2 · passes · n_inner.
    size_t locations = 0;
    bool hyperbolic = false;
    /// Sorted by (weight, flip, logical, first_pass).
    std::vector<TransferEntry> passed;
    /// Detected patterns per weight.
    std::vector<u128> detected;

    u128 passed_count(size_t w) const;
    /// Sum over first_pass of the matching cells.
    u128 count(size_t w, bool flip, LogicalPauli logical) const;
};

/// Throws BudgetExceeded when more than the budget (default 10^8) fault
/// vectors per pass would be enumerated.
TransferTable check_transfer_table(const CheckJob &job, size_t w_max, uint64_t budget = 0);

/// Per-weight outcome counts over all patterns of weight w of the L locations.
/// Exact when every check uses a normal inner code (the flag DP). Otherwise
/// the density DP tracks accepted weight and infidelity, and the entries are
/// sums over patterns of the acceptance probability and of the accepted
/// infidelity; rounding error is of order 1e-9 relative.
struct WeightTally {
    size_t w_max = 0;
    uint64_t locations = 0;
    bool exact = false;
    std::vector<double> accepted_bad;
    std::vector<double> accepted_good;
    std::vector<double> rejected;
    std::vector<u128> accepted_bad_exact;
    std::vector<u128> accepted_good_exact;
    std::vector<u128> rejected_exact;

    bool bad_nonzero(size_t w) const;
    /// ε_out(ε) ≈ Σ_w accepted_bad(w) ε^w (1−ε)^{L−w} / Σ_w accepted(w) ε^w (1−ε)^{L−w}.
    double output_error(double eps) const;
    double acceptance(double eps) const;
};

enum class DpMethod { Auto, Flags, Density };

/// Throws BudgetExceeded. Flags requires normal checks only;
/// Density requires n_outer ≤ 10.
WeightTally error_polynomial(const Protocol &p, size_t w_max, DpMethod method = DpMethod::Auto);

struct LeadingCoefficient {
    size_t d = 0;
    double C = 0;
    bool exact = false;
    u128 C_exact = 0;
};

/// Smallest w with accepted_bad(w) > 0, searched up to claimed_order. Throws
/// OrderMismatch when it differs from claimed_order.
LeadingCoefficient leading_coefficient(const Protocol &p, DpMethod method = DpMethod::Auto);

struct PatternOutcome {
    /// Probability that every check accepts.
    double p_accept = 0;
    /// p_accept · (1 − F²) against the ideal output.
    double bad = 0;
    bool accepted() const { return p_accept > 1e-9; }
    bool output_bad() const { return accepted() && bad / p_accept > 1e-9; }
};

/// Discrete outcome of Y faults at the given location indices (as ordered by
/// Protocol::locations()). Filler slots are treated as ideal.
PatternOutcome pattern_outcome(const Protocol &p, const std::vector<size_t> &locations);

}  // namespace distillery

#endif
