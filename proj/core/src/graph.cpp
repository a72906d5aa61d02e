#include "cimset/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace cimset {

DirectedGraph::DirectedGraph(int n) : n_(n), parents_(static_cast<std::size_t>(n > 0 ? n : 0)) {
  if (n < 1 || n > kMaxNodes)
    throw InvalidArgument("node count " + std::to_string(n) + " outside 1.." + std::to_string(kMaxNodes));
}

DirectedGraph::DirectedGraph(int n, std::vector<NodeSet> parents) : DirectedGraph(n) {
  if (parents.size() != static_cast<std::size_t>(n))
    throw InvalidArgument("expected " + std::to_string(n) + " parent sets, got " + std::to_string(parents.size()));
  for (NodeId v = 1; v <= n; ++v) set_parents(v, parents[v - 1]);
}

DirectedGraph DirectedGraph::from_edges(int n, const std::vector<Edge>& edges) {
  DirectedGraph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

void DirectedGraph::check_node(NodeId v) const {
  if (v < 1 || v > n_) throw InvalidArgument("node " + std::to_string(v) + " out of range 1.." + std::to_string(n_));
}

void DirectedGraph::add_edge(NodeId from, NodeId to) {
  check_node(from);
  check_node(to);
  if (from == to) throw InvalidArgument("self-loop at node " + std::to_string(from));
  parents_[to - 1] = parents_[to - 1].with(from);
}

void DirectedGraph::remove_edge(NodeId from, NodeId to) {
  check_node(from);
  check_node(to);
  parents_[to - 1] = parents_[to - 1].without(from);
}

void DirectedGraph::set_parents(NodeId v, NodeSet parents) {
  check_node(v);
  if (!parents.subset_of(NodeSet::full(n_)))
    throw InvalidArgument("parent set " + to_string(parents) + " of node " + std::to_string(v) + " out of range");
  if (parents.contains(v)) throw InvalidArgument("self-loop at node " + std::to_string(v));
  parents_[v - 1] = parents;
}

std::vector<Edge> DirectedGraph::edges() const {
  std::vector<Edge> out;
  for (NodeId u = 1; u <= n_; ++u)
    for (NodeId v = 1; v <= n_; ++v)
      if (has_edge(u, v)) out.emplace_back(u, v);
  return out;
}

std::size_t DirectedGraph::edge_count() const {
  std::size_t total = 0;
  for (NodeSet p : parents_) total += static_cast<std::size_t>(p.size());
  return total;
}

int SkeletonMultiset::multiplicity(NodeId a, NodeId b) const {
  auto it = counts.find({std::min(a, b), std::max(a, b)});
  return it == counts.end() ? 0 : it->second;
}

void validate_move(const MoveRecord& move, int n) {
  std::visit(
      [n](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CoveredFlipMove>) {
          validate_family(Family{m.common_parents, m.from}, n);
          validate_family(Family{m.common_parents, m.to}, n);
          if (m.from == m.to) throw InvalidArgument("covered flip needs two distinct nodes");
        } else if constexpr (std::is_same_v<T, CycleReversalMove>) {
          const auto& nodes = m.cycle.nodes;
          if (nodes.size() < 2) throw InvalidArgument("cycle needs at least two nodes");
          NodeSet seen;
          for (NodeId v : nodes) {
            if (v < 1 || v > n) throw InvalidArgument("cycle node " + std::to_string(v) + " out of range");
            if (seen.contains(v)) throw InvalidArgument("cycle repeats node " + std::to_string(v));
            seen = seen.with(v);
          }
        } else {
          validate_family(m.old_label, n);
          validate_family(m.new_label, n);
          if (m.old_label.support() != m.new_label.support())
            throw InvalidArgument("relabel " + to_string(m.old_label) + " => " + to_string(m.new_label) +
                                  " changes the column support");
        }
      },
      move);
}

std::string describe(const MoveRecord& move) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CoveredFlipMove>) {
          return "flip " + std::to_string(m.from) + "->" + std::to_string(m.to) + " over " + to_string(m.common_parents);
        } else if constexpr (std::is_same_v<T, CycleReversalMove>) {
          std::string s = "reverse cycle";
          for (NodeId v : m.cycle.nodes) s += " " + std::to_string(v);
          return s;
        } else {
          return "relabel " + to_string(m.old_label) + " => " + to_string(m.new_label);
        }
      },
      move);
}

std::vector<Family> families(const DirectedGraph& g) {
  std::vector<Family> out;
  out.reserve(static_cast<std::size_t>(g.n()));
  for (NodeId v = 1; v <= g.n(); ++v) out.push_back(Family{g.parents(v), v});
  return out;
}

SkeletonMultiset skeleton(const DirectedGraph& g) {
  SkeletonMultiset s;
  for (NodeId i = 1; i <= g.n(); ++i)
    for (NodeId j = i + 1; j <= g.n(); ++j) {
      const int m = int{g.has_edge(i, j)} + int{g.has_edge(j, i)};
      if (m > 0) s.counts[{i, j}] = m;
    }
  return s;
}

std::set<VStructure> v_structures(const DirectedGraph& g) {
  std::set<VStructure> out;
  for (NodeId k = 1; k <= g.n(); ++k) {
    const auto pa = g.parents(k).elements();
    for (std::size_t x = 0; x < pa.size(); ++x)
      for (std::size_t y = x + 1; y < pa.size(); ++y) {
        const NodeId i = pa[x], j = pa[y];
        if (!g.has_edge(i, j) && !g.has_edge(j, i)) out.emplace(i, k, j);
      }
  }
  return out;
}

bool is_acyclic(const DirectedGraph& g) {
  // Kahn's algorithm on parent masks.
  NodeSet placed;
  for (int round = 0; round < g.n(); ++round) {
    bool progressed = false;
    for (NodeId v = 1; v <= g.n(); ++v) {
      if (!placed.contains(v) && g.parents(v).subset_of(placed)) {
        placed = placed.with(v);
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return placed == NodeSet::full(g.n());
}

bool has_two_cycle(const DirectedGraph& g) {
  for (NodeId i = 1; i <= g.n(); ++i)
    for (NodeId j = i + 1; j <= g.n(); ++j)
      if (g.has_edge(i, j) && g.has_edge(j, i)) return true;
  return false;
}

bool is_covered(const DirectedGraph& g, Edge e) {
  auto [i, j] = e;
  return g.has_edge(i, j) && g.parents(j) == g.family_set(i);
}

std::set<Edge> covered_edges(const DirectedGraph& g) {
  std::set<Edge> out;
  for (const Edge& e : g.edges())
    if (is_covered(g, e)) out.insert(e);
  return out;
}

DirectedGraph apply_covered_flip(const DirectedGraph& g, Edge e) {
  auto [i, j] = e;
  if (i < 1 || i > g.n() || j < 1 || j > g.n() || i == j)
    throw InvalidArgument("edge " + std::to_string(i) + "->" + std::to_string(j) + " is not a valid edge");
  if (!g.has_edge(i, j))
    throw InvalidArgument("edge " + std::to_string(i) + "->" + std::to_string(j) + " is absent");
  if (!is_covered(g, e))
    throw InvalidArgument("edge " + std::to_string(i) + "->" + std::to_string(j) + " is not covered");
  DirectedGraph out = g;
  out.set_parents(j, g.parents(j).without(i));
  out.set_parents(i, g.parents(i).with(j));
  return out;
}

DirectedGraph reverse_cycle(const DirectedGraph& g, const Cycle& cycle) {
  validate_move(CycleReversalMove{cycle}, g.n());
  const auto& nodes = cycle.nodes;
  const std::size_t k = nodes.size();
  for (std::size_t i = 0; i < k; ++i) {
    const NodeId from = nodes[i], to = nodes[(i + 1) % k];
    if (!g.has_edge(from, to))
      throw InvalidArgument("not a directed cycle: edge " + std::to_string(from) + "->" + std::to_string(to) +
                            " is absent");
  }
  DirectedGraph out = g;
  for (std::size_t i = 0; i < k; ++i) {
    const NodeId v = nodes[i], next = nodes[(i + 1) % k];
    out.set_parents(v, g.family_set(next).without(v));
  }
  return out;
}

namespace {

void require_acyclic(const DirectedGraph& g, const char* what) {
  if (!is_acyclic(g)) throw InvalidArgument(std::string(what) + " requires an acyclic graph");
}

}  // namespace

bool markov_equivalent_dags(const DirectedGraph& g, const DirectedGraph& h) {
  require_acyclic(g, "markov_equivalent_dags");
  require_acyclic(h, "markov_equivalent_dags");
  if (g.n() != h.n()) throw InvalidArgument("graphs have different node counts");
  return skeleton(g) == skeleton(h) && v_structures(g) == v_structures(h);
}

std::vector<DirectedGraph> enumerate_dag_class(const DirectedGraph& g) {
  require_acyclic(g, "enumerate_dag_class");
  std::set<DirectedGraph> seen{g};
  std::deque<DirectedGraph> frontier{g};
  while (!frontier.empty()) {
    DirectedGraph cur = std::move(frontier.front());
    frontier.pop_front();
    for (const Edge& e : covered_edges(cur)) {
      DirectedGraph next = apply_covered_flip(cur, e);
      if (seen.insert(next).second) frontier.push_back(std::move(next));
    }
  }
  return {seen.begin(), seen.end()};
}

PartiallyDirectedGraph essential_graph(const DirectedGraph& g) {
  const auto members = enumerate_dag_class(g);
  PartiallyDirectedGraph out;
  out.n = g.n();
  for (const Edge& e : g.edges()) {
    auto [i, j] = e;
    const bool reversed_somewhere =
        std::any_of(members.begin(), members.end(), [&](const DirectedGraph& m) { return m.has_edge(j, i); });
    if (reversed_somewhere)
      out.undirected.insert({std::min(i, j), std::max(i, j)});
    else
      out.directed.insert(e);
  }
  return out;
}

DirectedGraph relabel(const DirectedGraph& g, const std::vector<NodeId>& perm) {
  if (perm.size() != static_cast<std::size_t>(g.n())) throw InvalidArgument("permutation has wrong length");
  NodeSet image;
  for (NodeId p : perm) {
    if (p < 1 || p > g.n() || image.contains(p)) throw InvalidArgument("not a permutation of 1..n");
    image = image.with(p);
  }
  DirectedGraph out(g.n());
  for (auto [u, v] : g.edges()) out.add_edge(perm[u - 1], perm[v - 1]);
  return out;
}

std::vector<std::uint8_t> canonical_form(const DirectedGraph& g) {
  const int n = g.n();
  if (n > kMaxCanonicalNodes)
    throw InvalidArgument("canonical_form supports at most " + std::to_string(kMaxCanonicalNodes) + " nodes, got " +
                          std::to_string(n));
  std::vector<NodeId> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<std::uint32_t> best, cur(static_cast<std::size_t>(n));
  do {
    std::fill(cur.begin(), cur.end(), 0u);
    for (NodeId v = 1; v <= n; ++v) {
      std::uint32_t m = 0;
      for (NodeId p : g.parents(v).elements()) m |= 1u << (perm[p - 1] - 1);
      cur[perm[v - 1] - 1] = m;
    }
    if (best.empty() || cur < best) best = cur;
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<std::uint8_t> bytes;
  bytes.reserve(2 * best.size() + 1);
  bytes.push_back(static_cast<std::uint8_t>(n));
  for (std::uint32_t m : best) {
    bytes.push_back(static_cast<std::uint8_t>(m & 0xffu));
    bytes.push_back(static_cast<std::uint8_t>(m >> 8));
  }
  return bytes;
}

}  // namespace cimset
