#include "cimset/imset.hpp"

#include <algorithm>

namespace cimset {

namespace {

void check_n(int n) {
  if (n < 1 || n > kMaxNodes) throw InvalidArgument("node count " + std::to_string(n) + " out of range");
}

void require_same_n(int a, int b) {
  if (a != b) throw InvalidArgument("node-count mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

// Calls fn(T) for every subset T of s, including the empty set and s itself.
template <typename Fn>
void for_each_subset(NodeSet s, Fn&& fn) {
  const std::uint32_t m = s.mask();
  std::uint32_t t = m;
  while (true) {
    fn(NodeSet::from_mask(t));
    if (t == 0) break;
    t = (t - 1) & m;
  }
}

}  // namespace

bool SubsetVector::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](std::int64_t x) { return x == 0; });
}

CharImset::CharImset(SubsetVector values) : values_(std::move(values)) {
  check_n(values_.n);
  if (values_.values.size() != (std::size_t{1} << values_.n)) throw InvalidArgument("characteristic imset has wrong length");
  values_.values[0] = 0;
  for (std::uint32_t m = 1; m < values_.values.size(); ++m) {
    const auto v = values_.values[m];
    const auto s = NodeSet::from_mask(m);
    if (v < 0 || v > s.size())
      throw InvalidArgument("characteristic imset value " + std::to_string(v) + " at " + to_string(s) +
                            " outside 0..|A|");
  }
}

bool CharImset::singletons_are_one() const {
  for (NodeId b = 1; b <= n(); ++b)
    if (at(NodeSet::single(b)) != 1) return false;
  return true;
}

StdImset::StdImset(int n, std::vector<std::pair<NodeSet, std::int64_t>> entries) : n_(n) {
  check_n(n);
  std::sort(entries.begin(), entries.end());
  std::int64_t total = 0;
  for (const auto& [s, v] : entries) {
    if (!s.subset_of(NodeSet::full(n))) throw InvalidArgument("standard imset set " + to_string(s) + " out of range");
    if (!entries_.empty() && entries_.back().first == s) throw InvalidArgument("duplicate set " + to_string(s));
    total = checked_add(total, v);
    if (v != 0) entries_.emplace_back(s, v);
  }
  if (total != 0) throw InvalidArgument("standard imset values must sum to zero, got " + std::to_string(total));
}

StdImset StdImset::from_dense(const SubsetVector& dense) {
  std::vector<std::pair<NodeSet, std::int64_t>> entries;
  for (std::uint32_t m = 0; m < dense.values.size(); ++m)
    if (dense.values[m] != 0) entries.emplace_back(NodeSet::from_mask(m), dense.values[m]);
  return StdImset(dense.n, std::move(entries));
}

std::int64_t StdImset::at(NodeSet s) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const auto& e, NodeSet key) { return e.first < key; });
  return it != entries_.end() && it->first == s ? it->second : 0;
}

SubsetVector StdImset::dense() const {
  SubsetVector out(n_);
  for (const auto& [s, v] : entries_) out.at(s) = v;
  return out;
}

bool FamilyVector::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](std::int64_t x) { return x == 0; });
}

FamilyVector& FamilyVector::operator+=(const FamilyVector& o) {
  require_same_n(n, o.n);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = checked_add(values[i], o.values[i]);
  return *this;
}

FamilyVector& FamilyVector::operator-=(const FamilyVector& o) {
  require_same_n(n, o.n);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = checked_sub(values[i], o.values[i]);
  return *this;
}

FamilyExponent::FamilyExponent(int n, std::vector<std::pair<Family, std::int64_t>> entries) : n_(n) {
  check_n(n);
  std::sort(entries.begin(), entries.end());
  for (const auto& [f, count] : entries) {
    validate_family(f, n);
    if (count < 1) throw InvalidArgument("family exponent count must be >= 1 at " + to_string(f));
    if (!entries_.empty() && entries_.back().first == f)
      entries_.back().second = checked_add(entries_.back().second, count);
    else
      entries_.emplace_back(f, count);
  }
}

std::int64_t FamilyExponent::degree() const {
  std::int64_t d = 0;
  for (const auto& e : entries_) d = checked_add(d, e.second);
  return d;
}

FamilyVector FamilyExponent::dense() const {
  FamilyVector out(n_);
  for (const auto& [f, count] : entries_) out.at(f) = count;
  return out;
}

CharImset char_imset(const DirectedGraph& g) {
  SubsetVector c(g.n());
  for (std::uint32_t m = 1; m < c.values.size(); ++m) {
    const auto a = NodeSet::from_mask(m);
    std::int64_t count = 0;
    for (NodeId x : a.elements())
      if (a.without(x).subset_of(g.parents(x))) ++count;
    c.values[m] = count;
  }
  return CharImset(std::move(c));
}

StdImset std_imset(const DirectedGraph& g) {
  SubsetVector s(g.n());
  for (NodeId v = 1; v <= g.n(); ++v) {
    s.at(g.family_set(v)) += 1;
    s.at(g.parents(v)) -= 1;
  }
  return StdImset::from_dense(s);
}

FamilyExponent family_vector(const DirectedGraph& g) {
  std::vector<std::pair<Family, std::int64_t>> entries;
  for (const Family& f : families(g)) entries.emplace_back(f, 1);
  return FamilyExponent(g.n(), std::move(entries));
}

SubsetVector phi_apply(const FamilyVector& u) {
  check_n(u.n);
  SubsetVector out(u.n);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const auto x = u.values[i];
    if (x == 0) continue;
    const Family f = family_at(i, u.n);
    // S ranges over {b} + T with T a subset of A.
    for_each_subset(f.parents, [&](NodeSet t) { out.at(t.with(f.child)) = checked_add(out.at(t.with(f.child)), x); });
  }
  return out;
}

SubsetVector phi_apply(const FamilyExponent& u) { return phi_apply(u.dense()); }

SubsetVector psi_apply(const FamilyVector& u) {
  check_n(u.n);
  SubsetVector out(u.n);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const auto x = u.values[i];
    if (x == 0) continue;
    const Family f = family_at(i, u.n);
    out.at(f.support()) = checked_add(out.at(f.support()), x);
    out.at(f.parents) = checked_sub(out.at(f.parents), x);
  }
  return out;
}

SubsetVector psi_apply(const FamilyExponent& u) { return psi_apply(u.dense()); }

void superset_zeta(SubsetVector& v) {
  const std::uint32_t size = static_cast<std::uint32_t>(v.values.size());
  for (std::uint32_t bit = 1; bit < size; bit <<= 1)
    for (std::uint32_t m = 0; m < size; ++m)
      if (!(m & bit)) v.values[m] = checked_add(v.values[m], v.values[m | bit]);
}

void superset_mobius(SubsetVector& v) {
  const std::uint32_t size = static_cast<std::uint32_t>(v.values.size());
  for (std::uint32_t bit = 1; bit < size; bit <<= 1)
    for (std::uint32_t m = 0; m < size; ++m)
      if (!(m & bit)) v.values[m] = checked_sub(v.values[m], v.values[m | bit]);
}

CharImset char_from_std(const StdImset& s) {
  SubsetVector v = s.dense();
  superset_zeta(v);
  v.values[0] = 0;
  return CharImset(std::move(v));
}

StdImset std_from_char(const CharImset& c) {
  SubsetVector v = c.values();
  v.values[0] = 0;
  superset_mobius(v);
  // Nonempty coordinates never see the empty-set slot; fix it by the zero-sum rule.
  std::int64_t rest = 0;
  for (std::size_t m = 1; m < v.values.size(); ++m) rest = checked_add(rest, v.values[m]);
  v.values[0] = -rest;
  return StdImset::from_dense(v);
}

namespace {

void check_dense_n(int n) {
  if (n < 1 || n > kMaxDenseMatrixNodes)
    throw InvalidArgument("dense matrices need 1 <= n <= " + std::to_string(kMaxDenseMatrixNodes) + ", got " +
                          std::to_string(n));
}

std::vector<std::string> family_labels(int n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < family_space_size(n); ++i) out.push_back(to_string(family_at(i, n)));
  return out;
}

}  // namespace

IntMatrix phi_matrix(int n) {
  check_dense_n(n);
  const std::size_t rows = (std::size_t{1} << n) - 1;
  IntMatrix m(rows, family_space_size(n));
  for (std::size_t col = 0; col < m.cols(); ++col) {
    const Family f = family_at(col, n);
    for_each_subset(f.parents, [&](NodeSet t) { m(t.with(f.child).mask() - 1, col) = 1; });
  }
  for (std::uint32_t mask = 1; mask <= rows; ++mask) m.row_labels.push_back(to_string(NodeSet::from_mask(mask)));
  m.col_labels = family_labels(n);
  return m;
}

IntMatrix psi_matrix(int n) {
  check_dense_n(n);
  const std::size_t rows = std::size_t{1} << n;
  IntMatrix m(rows, family_space_size(n));
  for (std::size_t col = 0; col < m.cols(); ++col) {
    const Family f = family_at(col, n);
    m(f.support().mask(), col) += 1;
    m(f.parents.mask(), col) -= 1;
  }
  for (std::uint32_t mask = 0; mask < rows; ++mask) m.row_labels.push_back(to_string(NodeSet::from_mask(mask)));
  m.col_labels = family_labels(n);
  return m;
}

bool imset_equivalent(const DirectedGraph& g, const DirectedGraph& h) {
  require_same_n(g.n(), h.n());
  return char_imset(g) == char_imset(h);
}

std::vector<ImsetDifference> imset_differences(const DirectedGraph& g, const DirectedGraph& h) {
  require_same_n(g.n(), h.n());
  const auto cg = char_imset(g), ch = char_imset(h);
  std::vector<ImsetDifference> out;
  for (std::uint32_t m = 1; m < (1u << g.n()); ++m) {
    const auto s = NodeSet::from_mask(m);
    if (cg.at(s) != ch.at(s)) out.push_back({s, cg.at(s), ch.at(s)});
  }
  return out;
}

SkeletonMultiset skeleton_from_char(const CharImset& c) {
  if (!c.singletons_are_one()) throw InvalidArgument("singleton coordinates must all equal 1");
  SkeletonMultiset s;
  for (NodeId a = 1; a <= c.n(); ++a)
    for (NodeId b = a + 1; b <= c.n(); ++b)
      if (const auto m = c.at(NodeSet::of({a, b})); m > 0) s.counts[{a, b}] = static_cast<int>(m);
  return s;
}

}  // namespace cimset
