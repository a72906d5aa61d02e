#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cimset/graph.hpp"
#include "cimset/int_matrix.hpp"
#include "cimset/numeric.hpp"

namespace cimset::render {

// "123" style for n <= 9, "{10,11}" otherwise; the empty set prints as "{}".
std::string set_label(NodeSet s, int n);
std::string family_label(const Family& f, int n);

// Subsets ordered by size, then lexicographically by sorted elements.
std::vector<NodeSet> subsets_by_size(int n, bool include_empty);

struct TableRow {
  std::string name;
  std::vector<std::int64_t> values;  // indexed by subset mask
};
// Column headers are subset labels, one row per named vector, right-aligned cells.
std::string imset_table(int n, const std::vector<NodeSet>& columns, const std::vector<TableRow>& rows);

std::string int_matrix(const IntMatrix& m);
std::string factor(const FactorMatrix& q);
std::string pdag(const PartiallyDirectedGraph& p);

}  // namespace cimset::render
