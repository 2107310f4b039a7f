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

#ifndef DISTILLERY_PROTOCOL_HPP
#define DISTILLERY_PROTOCOL_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "distillery/inner.hpp"
#include "distillery/outer.hpp"

namespace distillery {

struct RowTooWide : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ParityMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConditionFails : std::invalid_argument {
    ConditionFails(const std::string &what, BitVector w) : std::invalid_argument(what), witness(std::move(w)) {}
    BitVector witness;
};
struct UnknownPreset : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InvalidJob : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Slot value for a logical slot loaded with half of a filler pair.
constexpr int kFiller = -1;

/// One H-measurement routine. `slot_qubit[i]` is the outer qubit held by
/// logical slot i, or kFiller. Normal codes: every non-filler slot is a target
/// and filler slots come in adjacent pairs. Hyperbolic codes: a pair whose
/// first or second slot is listed in `hadamard_slots` is a target pair; other
/// occupied pairs are passengers, transported through both passes unchanged.
struct CheckJob {
    std::shared_ptr<const CssCode> inner;
    std::vector<int> slot_qubit;
    std::vector<size_t> hadamard_slots;
    /// Hyperbolic only: read out the syndrome after the first pass.
    bool syndrome_between_passes = true;

    bool hyperbolic() const { return inner->kind == CodeKind::Hyperbolic; }
    size_t passes() const { return hyperbolic() ? 2 : 1; }
    size_t t_gates() const { return 2 * passes() * inner->n_inner; }
    std::vector<size_t> targets() const;
    std::vector<size_t> passengers() const;
    size_t filler_pairs() const;
    /// Outer qubits held anywhere in the code block.
    std::vector<size_t> encoded_qubits() const;
    /// Target slots, i.e. slots whose Hadamard enters the measured product.
    std::vector<size_t> target_slots() const;
};

/// Normal code: targets occupy slots 0..|targets|−1, the remainder is filled
/// with filler pairs. Throws RowTooWide, ParityMismatch.
CheckJob normal_check(std::shared_ptr<const CssCode> code, const std::vector<size_t> &targets);

/// Hyperbolic code: targets fill pairs in order; the Hadamard sits on the
/// first slot of each target pair; unused pairs hold fillers.
CheckJob hyperbolic_check(std::shared_ptr<const CssCode> code, const std::vector<size_t> &targets,
                          bool syndrome_between_passes);

/// Throws InvalidJob on inconsistent slot layouts.
void validate_job(const CheckJob &job, size_t n_outer);

using Stage = std::vector<CheckJob>;

enum class LocationKind { Input, TDagger, T };

struct Location {
    LocationKind kind = LocationKind::Input;
    /// Input: outer qubit. Otherwise: physical qubit in the code block.
    size_t qubit = 0;
    /// Global check index in execution order (stage by stage).
    size_t check = 0;
    size_t pass = 0;
};

struct Protocol {
    std::string name;
    size_t n_outer = 0;
    std::vector<Stage> stages;
    size_t claimed_order = 0;

    /// Checks in execution order.
    std::vector<const CheckJob *> checks() const;
    /// Inputs first, then per check and pass the T† column and the T column.
    std::vector<Location> locations() const;
    size_t n_locations() const;
    /// First location index of each check.
    std::vector<size_t> check_offsets() const;
};

/// One check per row of M; rows sharing a qubit run in later stages. `order`
/// defaults to the inner distance. Throws RowTooWide, ParityMismatch, ConditionFails.
Protocol assemble(std::shared_ptr<const CssCode> inner, const OuterCode &m, size_t order = 0,
                  const std::string &name = "");

/// Sequential composition. Throws InvalidJob.
Protocol pipeline(size_t n_outer, std::vector<Stage> stages, size_t claimed_order, const std::string &name = "");

struct ResourceReport {
    uint64_t n_T = 0;
    size_t n_outer = 0;
    uint64_t ratio_num = 0;
    uint64_t ratio_den = 1;
    size_t d = 0;
    /// Physical qubits excluding the ancilla.
    size_t qubit_estimate = 0;
    size_t ancillas = 1;
    double ratio() const { return static_cast<double>(ratio_num) / static_cast<double>(ratio_den); }
    double gamma(size_t order) const;
    double gamma() const { return gamma(d); }
};

ResourceReport resources(const Protocol &p);

/// n_outer (d + (d−1)(n_inner/k_inner − 1)) per output, evaluated exactly.
double closed_form_n_T_per_output(size_t d, size_t n_inner, size_t k_inner);

std::vector<std::string> preset_names();
/// Throws UnknownPreset.
Protocol preset(const std::string &name);

std::shared_ptr<const CssCode> shared_library_code(const std::string &name);

/// Declarative text: "name", "n_outer", "order", "stage", and
/// "check CODE slots q0 q1 ... [hadamard h ...] [mid on|off]" lines, or a single
/// "assemble CODE OUTER_FILE" line. '-' marks a filler slot.
Protocol parse_protocol(const std::string &text, const std::string &base_dir = ".");
Protocol load_protocol_file(const std::string &path);
std::string format_protocol(const Protocol &p);

}  // namespace distillery

#endif
