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

#ifndef DISTILLERY_FORMS_HPP
#define DISTILLERY_FORMS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "distillery/f2.hpp"

namespace distillery {

struct DegenerateForm : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotSymmetric : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotSelfOrthogonal : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct EvenCharacteristic : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InvalidDimensions : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// I_p ⊕ λ_q, where λ_q is q/2 copies of [[0,1],[1,0]].
BitMatrix normal_form(size_t p, size_t q);

/// Normal form of a nondegenerate symmetric form over F_2.
/// Column j of `transform` is the j-th new basis vector in old coordinates.
struct F2FormClass {
    size_t p_count = 0;
    size_t q_count = 0;
    BitMatrix transform;
};

/// Throws NotSymmetric or DegenerateForm.
F2FormClass classify_f2(const BitMatrix &lambda);

/// Basis of S⊥/S with Gram matrix exactly I_p ⊕ λ_q. Hyperbolic vectors come
/// in pairs (w[2j], w[2j+1]) with w[2j]·w[2j+1] = 1.
struct MagicBasis {
    std::vector<BitVector> normal_vectors;
    std::vector<BitVector> hyperbolic_vectors;
    size_t p = 0;
    size_t q = 0;

    /// normal_vectors followed by hyperbolic_vectors.
    std::vector<BitVector> all() const;
};

/// Throws NotSelfOrthogonal. Prefers q = 0 whenever p > 0.
MagicBasis magic_basis(const BitMatrix &s);

/// Gram matrix of `vecs` under the ambient dot product.
BitMatrix gram(const std::vector<BitVector> &vecs);

// ---- Odd characteristic ----

using FpMatrix = std::vector<std::vector<uint32_t>>;

uint32_t fp_pow(uint32_t base, uint64_t e, uint32_t p);
uint32_t fp_inv(uint32_t a, uint32_t p);
bool fp_is_square(uint32_t a, uint32_t p);
bool is_prime(uint32_t p);
uint32_t fp_det(FpMatrix m, uint32_t p);
uint32_t fp_dot(const std::vector<uint32_t> &a, const std::vector<uint32_t> &b, uint32_t p);
/// M·a·Nᵀ style bilinear form xᵀ Λ y.
uint32_t fp_form(const FpMatrix &lambda, const std::vector<uint32_t> &x, const std::vector<uint32_t> &y,
                 uint32_t p);
/// Basis of {x : rows·x = 0}.
FpMatrix fp_nullspace(const FpMatrix &rows, size_t n, uint32_t p);
size_t fp_rank(FpMatrix rows, uint32_t p);
FpMatrix fp_mul(const FpMatrix &a, const FpMatrix &b, uint32_t p);
FpMatrix fp_transpose(const FpMatrix &a);

/// Congruence class of a nondegenerate symmetric form over F_p, p odd.
/// transformᵀ · Λ · transform = diagonal, with diagonal = (1, …, 1, last).
struct FpFormClass {
    uint32_t prime = 0;
    size_t dimension = 0;
    bool det_is_square = false;
    /// Dimension of a maximal null subspace.
    size_t witt_index = 0;
    std::string witt_residue;
    std::vector<uint32_t> diagonal;
    FpMatrix transform;
};

/// Throws EvenCharacteristic, NotSymmetric, DegenerateForm.
FpFormClass classify_fp(const FpMatrix &lambda, uint32_t p);

/// Whether two nondegenerate forms of equal dimension are congruent.
bool fp_congruent(const FpMatrix &a, const FpMatrix &b, uint32_t p);

/// Witt index of an n-dimensional nondegenerate form with the given
/// determinant class.
size_t fp_witt_index(size_t n, bool det_is_square, uint32_t p);

/// ζ(n, m, k) = p^{n−k−1} + p^m − p^{n−m−1}.
int64_t count_null_vectors(size_t n, size_t m, size_t k, uint32_t p);

/// Number of x ∈ F_p^n with xᵀΛx = 0 and xᵀΛu = 0 for every row u of `null_rows`.
/// Throws BudgetExceeded when p^n exceeds the budget.
uint64_t brute_force_null_count(const FpMatrix &lambda, const FpMatrix &null_rows, uint32_t p,
                                uint64_t budget = 0);

/// c×n matrix whose first row is all ones and whose row j is uniform over the
/// null vectors orthogonal to rows 0..j−1 (standard dot product).
/// Requires p odd prime, p | n, c < (n − 2)/2.
FpMatrix sample_fp_self_orthogonal(size_t n, size_t c, uint32_t p, uint64_t seed);

/// 20 (3/5)^{n−c} + (11/15)^{c−1}.
double fp_kernel_bound(size_t n, size_t c);

}  // namespace distillery

#endif
