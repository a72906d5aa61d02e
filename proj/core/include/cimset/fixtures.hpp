#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cimset/graph.hpp"

// Small named graphs used by the reproduction commands and the test suites.
namespace cimset::fixtures {

DirectedGraph two_cycle_example_g();  // pa(2)={4}, pa(3)={1,2}, pa(4)={3}
DirectedGraph two_cycle_example_h();  // pa(2)={1,3}, pa(3)={4}, pa(4)={2}
DirectedGraph dag_class_left();
DirectedGraph dag_class_middle();
DirectedGraph dag_class_right();
DirectedGraph cyclic_pair_left();
DirectedGraph cyclic_pair_right();
DirectedGraph size_two_fiber_left();
DirectedGraph size_two_fiber_right();
DirectedGraph three_cycle();           // 1->2->3->1
DirectedGraph three_cycle_reversed();  // 1->3->2->1
DirectedGraph tournament_left();
DirectedGraph tournament_right();

struct NamedGraph {
  std::string name;
  DirectedGraph graph;
};
const std::vector<NamedGraph>& all();
// Throws InvalidArgument for unknown names.
DirectedGraph by_name(std::string_view name);

}  // namespace cimset::fixtures
