#include "cimset/fixtures.hpp"

namespace cimset::fixtures {

namespace {

DirectedGraph from_parents(int n, std::vector<std::vector<NodeId>> parents) {
  std::vector<NodeSet> sets;
  for (const auto& p : parents) {
    NodeSet s;
    for (NodeId v : p) s = s.with(v);
    sets.push_back(s);
  }
  return DirectedGraph(n, std::move(sets));
}

}  // namespace

DirectedGraph two_cycle_example_g() { return from_parents(4, {{}, {4}, {1, 2}, {3}}); }
DirectedGraph two_cycle_example_h() { return from_parents(4, {{}, {1, 3}, {4}, {2}}); }

DirectedGraph dag_class_left() { return DirectedGraph::from_edges(4, {{2, 1}, {4, 1}, {3, 1}, {3, 2}, {4, 3}}); }
DirectedGraph dag_class_middle() { return DirectedGraph::from_edges(4, {{2, 1}, {4, 1}, {3, 1}, {3, 2}, {3, 4}}); }
DirectedGraph dag_class_right() { return DirectedGraph::from_edges(4, {{2, 1}, {4, 1}, {3, 1}, {2, 3}, {3, 4}}); }

DirectedGraph cyclic_pair_left() { return from_parents(4, {{4}, {1}, {1, 2}, {2, 3}}); }
DirectedGraph cyclic_pair_right() { return from_parents(4, {{2, 3}, {3, 4}, {4}, {1}}); }

DirectedGraph size_two_fiber_left() { return from_parents(5, {{2, 4}, {3, 5}, {1, 5}, {2, 5}, {1, 4}}); }
DirectedGraph size_two_fiber_right() { return from_parents(5, {{3, 5}, {1, 4}, {2, 5}, {1, 5}, {2, 4}}); }

DirectedGraph three_cycle() { return DirectedGraph::from_edges(3, {{1, 2}, {2, 3}, {3, 1}}); }
DirectedGraph three_cycle_reversed() { return DirectedGraph::from_edges(3, {{1, 3}, {3, 2}, {2, 1}}); }

DirectedGraph tournament_left() {
  return DirectedGraph::from_edges(6, {{1, 2}, {2, 3}, {3, 4}, {1, 6}, {6, 5}, {5, 4}, {2, 4}, {4, 6},
                                       {6, 2}, {1, 3}, {3, 5}, {5, 1}, {4, 1}, {3, 6}, {5, 2}});
}
DirectedGraph tournament_right() {
  return DirectedGraph::from_edges(6, {{2, 1}, {3, 2}, {3, 4}, {1, 6}, {5, 6}, {4, 5}, {4, 2}, {6, 4},
                                       {2, 6}, {3, 1}, {5, 3}, {1, 5}, {1, 4}, {6, 3}, {5, 2}});
}

const std::vector<NamedGraph>& all() {
  static const std::vector<NamedGraph> graphs = {
      {"fig2_g", two_cycle_example_g()},
      {"fig2_h", two_cycle_example_h()},
      {"fig3_left", dag_class_left()},
      {"fig3_middle", dag_class_middle()},
      {"fig3_right", dag_class_right()},
      {"fig4_left", cyclic_pair_left()},
      {"fig4_right", cyclic_pair_right()},
      {"fig5_left", size_two_fiber_left()},
      {"fig5_right", size_two_fiber_right()},
      {"fig6_g", three_cycle()},
      {"fig6_h", three_cycle_reversed()},
      {"fig7_left", tournament_left()},
      {"fig7_right", tournament_right()},
  };
  return graphs;
}

DirectedGraph by_name(std::string_view name) {
  for (const auto& g : all())
    if (g.name == name) return g.graph;
  throw InvalidArgument("unknown fixture '" + std::string(name) + "'");
}

}  // namespace cimset::fixtures
