#include "cimset/lattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace cimset {

void validate_flip(const FlipVector& f, int n) {
  validate_family(Family{f.common, f.b}, n);
  validate_family(Family{f.common, f.c}, n);
  if (f.b == f.c) throw InvalidArgument("flip vector needs b != c");
}

FamilyVector FlipVector::to_family_vector(int n) const {
  validate_flip(*this, n);
  FamilyVector v(n);
  v.at(Family{common, b}) += 1;
  v.at(Family{common.with(b), c}) += 1;
  v.at(Family{common, c}) -= 1;
  v.at(Family{common.with(c), b}) -= 1;
  return v;
}

std::vector<FlipVector> flip_vectors(int n) {
  if (n < 2 || n > kMaxNodes) throw InvalidArgument("flip_vectors needs 2 <= n <= 16, got " + std::to_string(n));
  std::vector<FlipVector> out;
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    const auto a = NodeSet::from_mask(m);
    for (NodeId b = 1; b <= n; ++b)
      for (NodeId c = b + 1; c <= n; ++c)
        if (!a.contains(b) && !a.contains(c)) out.push_back({a, b, c});
  }
  return out;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// rows[dst] -= q * rows[src]
void axpy_row(std::vector<std::vector<std::int64_t>>& rows, std::size_t dst, std::size_t src, std::int64_t q) {
  if (q == 0) return;
  auto& d = rows[dst];
  const auto& s = rows[src];
  for (std::size_t c = 0; c < d.size(); ++c)
    if (s[c] != 0) d[c] = checked_sub(d[c], checked_mul(q, s[c]));
}

void negate_row(std::vector<std::int64_t>& row) {
  for (auto& x : row) x = checked_sub(0, x);
}

// Integer row echelon form on the first `active` columns using unimodular row operations.
// Returns the number of pivot rows; rows past that are zero on the active columns.
std::size_t echelonize(std::vector<std::vector<std::int64_t>>& rows, std::size_t active, bool reduce_above) {
  const std::size_t k = rows.size();
  std::size_t pivot = 0;
  for (std::size_t col = 0; col < active && pivot < k; ++col) {
    bool found = false;
    while (true) {
      std::size_t best = k;
      for (std::size_t r = pivot; r < k; ++r)
        if (rows[r][col] != 0 && (best == k || std::llabs(rows[r][col]) < std::llabs(rows[best][col]))) best = r;
      if (best == k) break;
      found = true;
      std::swap(rows[pivot], rows[best]);
      bool clean = true;
      for (std::size_t r = pivot + 1; r < k; ++r) {
        if (rows[r][col] == 0) continue;
        axpy_row(rows, r, pivot, floor_div(rows[r][col], rows[pivot][col]));
        if (rows[r][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (!found) continue;
    if (rows[pivot][col] < 0) negate_row(rows[pivot]);
    if (reduce_above)
      for (std::size_t r = 0; r < pivot; ++r) axpy_row(rows, r, pivot, floor_div(rows[r][col], rows[pivot][col]));
    ++pivot;
  }
  return pivot;
}

std::vector<std::vector<std::int64_t>> to_rows(const IntMatrix& m) {
  std::vector<std::vector<std::int64_t>> rows;
  rows.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  return rows;
}

}  // namespace

IntMatrix hermite_normal_form(const IntMatrix& m) {
  auto rows = to_rows(m);
  const std::size_t rank = echelonize(rows, m.cols(), /*reduce_above=*/true);
  rows.resize(rank);
  IntMatrix out = IntMatrix::from_rows(rows, m.cols());
  out.col_labels = m.col_labels;
  return out;
}

LatticeBasis canonical_basis(const LatticeBasis& b) {
  IntMatrix hnf = hermite_normal_form(b.basis.transposed());
  LatticeBasis out{hnf.transposed()};
  out.basis.row_labels = b.basis.row_labels;
  return out;
}

std::size_t lattice_rank(const LatticeBasis& b) { return hermite_normal_form(b.basis.transposed()).rows(); }

LatticeBasis integer_kernel_basis(const IntMatrix& m) {
  const std::size_t r = m.rows(), c = m.cols();
  // Row i of the augmented matrix is [column i of M | e_i].
  std::vector<std::vector<std::int64_t>> rows(c, std::vector<std::int64_t>(r + c, 0));
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < r; ++j) rows[i][j] = m(j, i);
    rows[i][r + i] = 1;
  }
  const std::size_t rank = echelonize(rows, r, /*reduce_above=*/false);
  std::vector<std::vector<std::int64_t>> kernel;
  for (std::size_t i = rank; i < c; ++i) kernel.emplace_back(rows[i].begin() + static_cast<std::ptrdiff_t>(r), rows[i].end());
  LatticeBasis out{IntMatrix::from_columns(kernel, c)};
  out.basis.row_labels = m.col_labels;
  return canonical_basis(out);
}

LatticeBasis flip_lattice(int n) {
  std::vector<std::vector<std::int64_t>> cols;
  for (const FlipVector& f : flip_vectors(n)) cols.push_back(f.to_family_vector(n).values);
  LatticeBasis out{IntMatrix::from_columns(cols, family_space_size(n))};
  for (std::size_t i = 0; i < family_space_size(n); ++i) out.basis.row_labels.push_back(to_string(family_at(i, n)));
  return out;
}

bool lattices_equal(const LatticeBasis& a, const LatticeBasis& b) {
  if (a.dimension() != b.dimension())
    throw InvalidArgument("lattices live in different dimensions: " + std::to_string(a.dimension()) + " vs " +
                          std::to_string(b.dimension()));
  return hermite_normal_form(a.basis.transposed()) == hermite_normal_form(b.basis.transposed());
}

std::int64_t reduction_statistic(const FamilyVector& v) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    if (v.values[i] == 0) continue;
    const Family f = family_at(i, v.n);
    if (f.parents.max() > f.child) s += f.parents.size();
  }
  return s;
}

KernelDecomposition decompose_kernel_vector(const FamilyVector& v) {
  KernelDecomposition out;
  FamilyVector cur = v;
  const int n = v.n;
  out.statistic_trace.push_back(reduction_statistic(cur));
  while (true) {
    // Eligible coordinates F->g with max(F) > g: largest F mask first, then smallest child.
    bool found = false;
    Family pick;
    for (std::size_t i = 0; i < cur.values.size(); ++i) {
      if (cur.values[i] == 0) continue;
      const Family f = family_at(i, n);
      if (f.parents.max() <= f.child) continue;
      if (!found || f.parents > pick.parents || (f.parents == pick.parents && f.child < pick.child)) {
        pick = f;
        found = true;
      }
    }
    if (!found) break;
    const NodeId c = pick.parents.max();
    const FlipVector flip{pick.parents.without(c), pick.child, c};
    const std::int64_t x = cur.at(pick);
    FamilyVector step = flip.to_family_vector(n);
    for (auto& e : step.values) e = checked_mul(e, x);
    cur += step;
    out.terms.push_back({checked_sub(0, x), flip});
    out.statistic_trace.push_back(reduction_statistic(cur));
  }
  out.in_kernel = cur.is_zero();
  out.residual = std::move(cur);
  return out;
}

FamilyVector recompose(const std::vector<FlipTerm>& terms, int n) {
  FamilyVector sum(n);
  for (const auto& t : terms) {
    FamilyVector f = t.flip.to_family_vector(n);
    for (auto& e : f.values) e = checked_mul(e, t.coefficient);
    sum += f;
  }
  return sum;
}

}  // namespace cimset
