#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cimset/imset.hpp"
#include "cimset/int_matrix.hpp"
#include "cimset/node_set.hpp"

namespace cimset {

// e_{A->b} + e_{A+b->c} - e_{A->c} - e_{A+c->b}: the exponent difference of the covered
// edge flip binomial for b -> c over common parents A.
struct FlipVector {
  NodeSet common;  // A
  NodeId b;
  NodeId c;

  FamilyVector to_family_vector(int n) const;
  friend auto operator<=>(const FlipVector&, const FlipVector&) = default;
};

void validate_flip(const FlipVector& f, int n);

// One generator per (A, {b,c}) with b < c, ordered by (A mask, b, c); C(n,2) * 2^(n-2) entries.
std::vector<FlipVector> flip_vectors(int n);

// An integer lattice given by generating columns over the family coordinates.
struct LatticeBasis {
  IntMatrix basis;  // ambient dimension = rows, one generator per column

  std::size_t dimension() const { return basis.rows(); }
  std::size_t generator_count() const { return basis.cols(); }
};

// Row-style Hermite normal form of the lattice spanned by the rows of m: nonzero rows only,
// pivots positive and increasing in column, entries above each pivot reduced into [0, pivot).
// Columns are scanned left to right (lowest family index first).
IntMatrix hermite_normal_form(const IntMatrix& m);

// Canonical generators of the lattice: its HNF rows, returned as columns.
LatticeBasis canonical_basis(const LatticeBasis& b);
std::size_t lattice_rank(const LatticeBasis& b);

// Basis of {v integer : M v = 0}, by unimodular row reduction of [M^T | I].
LatticeBasis integer_kernel_basis(const IntMatrix& m);

LatticeBasis flip_lattice(int n);
bool lattices_equal(const LatticeBasis& a, const LatticeBasis& b);

struct FlipTerm {
  std::int64_t coefficient;
  FlipVector flip;
};

struct KernelDecomposition {
  bool in_kernel = false;
  std::vector<FlipTerm> terms;  // sum of coefficient * flip equals the input when in_kernel
  FamilyVector residual;        // zero when in_kernel; otherwise supported on ordered families
  // Reduction statistic before the first step and after every step.
  std::vector<std::int64_t> statistic_trace;
};

// Sum over families F->g with max(F) > g and v(F->g) != 0 of |F|.
std::int64_t reduction_statistic(const FamilyVector& v);

// Clears every coordinate F->g with max(F) > g (choosing the largest F mask, then the smallest
// child) by adding multiples of flip vectors; a nonzero remainder is not in the kernel of phi_n.
KernelDecomposition decompose_kernel_vector(const FamilyVector& v);

FamilyVector recompose(const std::vector<FlipTerm>& terms, int n);

}  // namespace cimset
