#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cimset/graph.hpp"
#include "cimset/int_matrix.hpp"
#include "cimset/node_set.hpp"

namespace cimset {

// Dense integer vector over all subsets of [n]; index = subset mask, entry 0 is the empty set.
struct SubsetVector {
  int n = 0;
  std::vector<std::int64_t> values;

  SubsetVector() = default;
  explicit SubsetVector(int n_nodes) : n(n_nodes), values(std::size_t{1} << n_nodes, 0) {}

  std::int64_t at(NodeSet s) const { return values[s.mask()]; }
  std::int64_t& at(NodeSet s) { return values[s.mask()]; }
  bool is_zero() const;
  friend bool operator==(const SubsetVector&, const SubsetVector&) = default;
};

// Characteristic imset: c(A) = #{a in A : A \ {a} is contained in pa(a)} over nonempty A.
// Stored densely; the empty-set slot is kept at 0 and is not part of the vector.
class CharImset {
 public:
  // Checks 0 <= c(A) <= |A| for every nonempty A.
  explicit CharImset(SubsetVector values);

  int n() const { return values_.n; }
  std::int64_t at(NodeSet s) const { return values_.at(s); }
  const SubsetVector& values() const { return values_; }
  bool singletons_are_one() const;

  friend bool operator==(const CharImset&, const CharImset&) = default;

 private:
  SubsetVector values_;
};

// Standard imset: sparse signed vector over all subsets (including the empty set) with zero sum.
class StdImset {
 public:
  StdImset(int n, std::vector<std::pair<NodeSet, std::int64_t>> entries);
  static StdImset from_dense(const SubsetVector& dense);

  int n() const { return n_; }
  // Nonzero entries sorted by subset mask.
  const std::vector<std::pair<NodeSet, std::int64_t>>& entries() const { return entries_; }
  std::int64_t at(NodeSet s) const;
  SubsetVector dense() const;

  friend bool operator==(const StdImset&, const StdImset&) = default;

 private:
  int n_;
  std::vector<std::pair<NodeSet, std::int64_t>> entries_;
};

// Signed integer vector over the n*2^(n-1) families, indexed by family_index().
struct FamilyVector {
  int n = 0;
  std::vector<std::int64_t> values;

  FamilyVector() = default;
  explicit FamilyVector(int n_nodes) : n(n_nodes), values(family_space_size(n_nodes), 0) {}

  std::int64_t at(const Family& f) const { return values[family_index(f, n)]; }
  std::int64_t& at(const Family& f) { return values[family_index(f, n)]; }
  bool is_zero() const;
  FamilyVector& operator+=(const FamilyVector& o);
  FamilyVector& operator-=(const FamilyVector& o);
  friend FamilyVector operator-(FamilyVector a, const FamilyVector& b) { return a -= b; }
  friend bool operator==(const FamilyVector&, const FamilyVector&) = default;
};

// Nonnegative family exponent (monomial z^u); stored sparse, counts >= 1.
class FamilyExponent {
 public:
  FamilyExponent(int n, std::vector<std::pair<Family, std::int64_t>> entries);

  int n() const { return n_; }
  const std::vector<std::pair<Family, std::int64_t>>& entries() const { return entries_; }
  std::int64_t degree() const;
  FamilyVector dense() const;

  friend bool operator==(const FamilyExponent&, const FamilyExponent&) = default;

 private:
  int n_;
  std::vector<std::pair<Family, std::int64_t>> entries_;
};

CharImset char_imset(const DirectedGraph& g);
StdImset std_imset(const DirectedGraph& g);
FamilyExponent family_vector(const DirectedGraph& g);

// phi_n: (phi(u))(S) = sum over b in S, A containing S \ {b}, of u(A->b). Empty-set slot stays 0.
SubsetVector phi_apply(const FamilyVector& u);
SubsetVector phi_apply(const FamilyExponent& u);
// psi_n: e_{A->b} maps to delta_{A+b} - delta_A.
SubsetVector psi_apply(const FamilyVector& u);
SubsetVector psi_apply(const FamilyExponent& u);

// In-place superset sums v(A) <- sum_{B >= A} v(B), and the inverse (superset Mobius) transform.
void superset_zeta(SubsetVector& v);
void superset_mobius(SubsetVector& v);

CharImset char_from_std(const StdImset& s);
StdImset std_from_char(const CharImset& c);

// Dense matrices of phi_n ((2^n - 1) x n*2^(n-1)) and psi_n (2^n x n*2^(n-1)), 1 <= n <= 8.
// Rows follow subset masks, columns follow family_index().
inline constexpr int kMaxDenseMatrixNodes = 8;
IntMatrix phi_matrix(int n);
IntMatrix psi_matrix(int n);

struct ImsetDifference {
  NodeSet set;
  std::int64_t left;
  std::int64_t right;
};

bool imset_equivalent(const DirectedGraph& g, const DirectedGraph& h);
// Coordinates where the characteristic imsets disagree, by subset mask.
std::vector<ImsetDifference> imset_differences(const DirectedGraph& g, const DirectedGraph& h);

SkeletonMultiset skeleton_from_char(const CharImset& c);

}  // namespace cimset
