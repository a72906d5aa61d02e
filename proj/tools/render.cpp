#include "render.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace cimset::render {

std::string set_label(NodeSet s, int n) {
  if (s.empty()) return "{}";
  if (n > 9) return to_string(s);
  std::string out;
  for (NodeId v : s.elements()) out += std::to_string(v);
  return out;
}

std::string family_label(const Family& f, int n) {
  return (f.parents.empty() ? std::string("{}") : set_label(f.parents, n)) + "->" + std::to_string(f.child);
}

std::vector<NodeSet> subsets_by_size(int n, bool include_empty) {
  std::vector<NodeSet> out;
  for (std::uint32_t m = include_empty ? 0 : 1; m < (1u << n); ++m) out.push_back(NodeSet::from_mask(m));
  std::sort(out.begin(), out.end(), [](NodeSet a, NodeSet b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.elements() < b.elements();
  });
  return out;
}

namespace {

std::string grid(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], row[c].size());
    }
  std::ostringstream out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0)
        line += row[c] + std::string(width[c] - row[c].size(), ' ');
      else
        line += "  " + std::string(width[c] - row[c].size(), ' ') + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

std::string imset_table(int n, const std::vector<NodeSet>& columns, const std::vector<TableRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{""};
  for (NodeSet s : columns) header.push_back(set_label(s, n));
  cells.push_back(std::move(header));
  for (const auto& r : rows) {
    std::vector<std::string> line{r.name};
    for (NodeSet s : columns) line.push_back(std::to_string(r.values[s.mask()]));
    cells.push_back(std::move(line));
  }
  return grid(cells);
}

std::string int_matrix(const IntMatrix& m) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{""};
  for (std::size_t c = 0; c < m.cols(); ++c) header.push_back(c < m.col_labels.size() ? m.col_labels[c] : std::to_string(c));
  cells.push_back(std::move(header));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<std::string> line{r < m.row_labels.size() ? m.row_labels[r] : std::to_string(r)};
    for (std::size_t c = 0; c < m.cols(); ++c) line.push_back(std::to_string(m(r, c)));
    cells.push_back(std::move(line));
  }
  return grid(cells);
}

std::string factor(const FactorMatrix& q) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{""};
  for (const auto& f : q.labels) header.push_back(family_label(f, q.n()));
  cells.push_back(std::move(header));
  for (int i = 0; i < q.n(); ++i) {
    std::vector<std::string> line{std::to_string(i + 1)};
    for (int j = 0; j < q.n(); ++j) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(6) << q.entries(i, j);
      line.push_back(q.entries(i, j) == 0.0 ? "0" : cell.str());
    }
    cells.push_back(std::move(line));
  }
  return grid(cells);
}

std::string pdag(const PartiallyDirectedGraph& p) {
  std::ostringstream out;
  out << "n=" << p.n << '\n';
  for (auto [u, v] : p.directed) out << u << " -> " << v << '\n';
  for (auto [u, v] : p.undirected) out << u << " -- " << v << '\n';
  return out.str();
}

}  // namespace cimset::render
