#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "cimset/node_set.hpp"

namespace cimset {

using Edge = std::pair<NodeId, NodeId>;  // (tail, head), i.e. tail -> head

// Loopless directed graph on nodes 1..n, n <= 16. Cycles (including 2-cycles) are allowed.
class DirectedGraph {
 public:
  explicit DirectedGraph(int n);
  DirectedGraph(int n, std::vector<NodeSet> parents);
  static DirectedGraph from_edges(int n, const std::vector<Edge>& edges);

  int n() const { return n_; }
  NodeSet parents(NodeId v) const { return parents_[v - 1]; }
  NodeSet family_set(NodeId v) const { return parents_[v - 1].with(v); }
  const std::vector<NodeSet>& parent_sets() const { return parents_; }
  bool has_edge(NodeId from, NodeId to) const { return parents_[to - 1].contains(from); }

  void add_edge(NodeId from, NodeId to);
  void remove_edge(NodeId from, NodeId to);
  void set_parents(NodeId v, NodeSet parents);

  // Edges sorted by (tail, head).
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  friend auto operator<=>(const DirectedGraph&, const DirectedGraph&) = default;

 private:
  void check_node(NodeId v) const;

  int n_;
  std::vector<NodeSet> parents_;
};

struct Cycle {
  std::vector<NodeId> nodes;  // v1 -> v2 -> ... -> vk -> v1
};

// Multiplicity of each unordered pair {i,j}, i < j. Absent pairs have multiplicity 0.
struct SkeletonMultiset {
  std::map<Edge, int> counts;
  int multiplicity(NodeId a, NodeId b) const;
  friend bool operator==(const SkeletonMultiset&, const SkeletonMultiset&) = default;
};

struct PartiallyDirectedGraph {
  int n = 0;
  std::set<Edge> directed;
  std::set<Edge> undirected;  // stored with first < second
  friend bool operator==(const PartiallyDirectedGraph&, const PartiallyDirectedGraph&) = default;
};

// (i, k, j) with i < j standing for i -> k <- j, i and j non-adjacent.
using VStructure = std::tuple<NodeId, NodeId, NodeId>;

struct CoveredFlipMove {
  NodeSet common_parents;
  NodeId from;  // the flip replaces A->from, A+from->to ...
  NodeId to;    // ... by A->to, A+to->from
  friend bool operator==(const CoveredFlipMove&, const CoveredFlipMove&) = default;
};
struct CycleReversalMove {
  Cycle cycle;
};
struct ColumnRelabelMove {
  Family old_label;
  Family new_label;
};
using MoveRecord = std::variant<CoveredFlipMove, CycleReversalMove, ColumnRelabelMove>;

// Throws InvalidArgument when a record violates its own invariants.
void validate_move(const MoveRecord& move, int n);
std::string describe(const MoveRecord& move);

std::vector<Family> families(const DirectedGraph& g);
SkeletonMultiset skeleton(const DirectedGraph& g);
std::set<VStructure> v_structures(const DirectedGraph& g);
bool is_acyclic(const DirectedGraph& g);
bool has_two_cycle(const DirectedGraph& g);

// Edges i->j with pa(j) = pa(i) + {i}.
std::set<Edge> covered_edges(const DirectedGraph& g);
bool is_covered(const DirectedGraph& g, Edge e);
DirectedGraph apply_covered_flip(const DirectedGraph& g, Edge e);

// Each cycle node v_i gets parents fa(v_{i+1}) \ {v_i}: the family sets of the cycle
// nodes are kept, and each one's child moves to its cycle predecessor.
DirectedGraph reverse_cycle(const DirectedGraph& g, const Cycle& cycle);

bool markov_equivalent_dags(const DirectedGraph& g, const DirectedGraph& h);

// Closure of {g} under covered edge flips, sorted by parent masks.
std::vector<DirectedGraph> enumerate_dag_class(const DirectedGraph& g);
PartiallyDirectedGraph essential_graph(const DirectedGraph& g);

// Lexicographically smallest parent-mask sequence over all relabelings (n <= 8):
// one byte holding n, then each node's parent mask as two little-endian bytes.
std::vector<std::uint8_t> canonical_form(const DirectedGraph& g);
inline constexpr int kMaxCanonicalNodes = 8;

// Image of g under v -> perm[v-1].
DirectedGraph relabel(const DirectedGraph& g, const std::vector<NodeId>& perm);

}  // namespace cimset
