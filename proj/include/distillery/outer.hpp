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

#ifndef DISTILLERY_OUTER_HPP
#define DISTILLERY_OUTER_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "distillery/f2.hpp"

namespace distillery {

struct DependentBasis : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotBiregular : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct GirthTooSmall : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class RowParity { AllEven, AllOdd, Mixed };
const char *parity_name(RowParity p);

/// m × n_outer parity check matrix over the outer qubits.
struct OuterCode {
    BitMatrix M;
    std::vector<size_t> row_weights;
    RowParity parity = RowParity::AllEven;

    size_t m() const { return M.n_rows(); }
    size_t n_outer() const { return M.n_cols(); }
};

OuterCode make_outer(const BitMatrix &m);

struct SensitivityReport {
    size_t d_tilde = 0;
    /// min |Mv| over nonzero v with |v| ≤ d_tilde.
    size_t s = 0;
    BitVector s_witness;
    /// min 2|Mv| + |v| over all nonzero v.
    size_t min_2Mv_plus_v = 0;
    BitVector witness;
};

/// Brute force by increasing weight. Throws BudgetExceeded when more than
/// `budget` vectors would be evaluated (default 10^8).
SensitivityReport sensitivity(const OuterCode &code, size_t d_tilde, uint64_t budget = 0);

struct ConditionResult {
    bool holds = false;
    size_t value = 0;
    BitVector witness;
};

/// Whether 2|Mv| + |v| ≥ d for every nonzero v.
ConditionResult distillation_condition(const OuterCode &code, size_t d, uint64_t budget = 0);

/// Columns v_1..v_k of the n × (k+1) matrix are the basis codewords, the last
/// column is their sum. Throws DependentBasis.
OuterCode from_classical_transpose(const BitMatrix &codeword_basis);

/// Minimum nonzero weight of span(basis), by enumeration.
size_t classical_distance(const BitMatrix &basis, uint64_t budget = 0);

struct Graph {
    size_t n_vertices = 0;
    std::vector<std::pair<size_t, size_t>> edges;
};

/// Length of the shortest cycle; numeric_limits<size_t>::max() for forests.
size_t girth(const Graph &g);
constexpr size_t kInfiniteGirth = std::numeric_limits<size_t>::max();

Graph petersen_graph();
Graph cycle_graph(size_t n);
Graph parse_edge_list(const std::string &text);

/// Bipartite graph: vertices 0..n_bits−1 are bits, the rest are checks.
/// Requires bit degrees all s, check degrees all w, and girth > 2·d_tilde.
/// Throws NotBiregular, GirthTooSmall.
OuterCode from_bipartite_graph(size_t n_bits, const Graph &g, size_t d_tilde);

/// Plain graph with vertices as checks and edges as bits (the s = 2 case).
/// Requires a regular graph with girth > d_tilde.
OuterCode from_graph(const Graph &h, size_t d_tilde);

enum class ParityClass { Even, Odd };

/// Rows i.i.d. uniform over the requested parity class.
OuterCode sample_random_outer(size_t m, size_t n_outer, ParityClass parity, uint64_t seed);

/// 4×4 matrix used with the [[21,3,5]] code: every row has weight 3.
OuterCode outer_m4();
/// Six weight-2 checks (i, i+1 mod 6).
OuterCode outer_ring6();
OuterCode outer_petersen();

/// "m n_outer" header then m rows of 0/1.
std::string format_outer_file(const OuterCode &code);
OuterCode parse_outer_file(const std::string &text);
OuterCode load_outer_file(const std::string &path);

}  // namespace distillery

#endif
