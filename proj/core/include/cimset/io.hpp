#pragma once

#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "cimset/fiber.hpp"
#include "cimset/graph.hpp"
#include "cimset/imset.hpp"
#include "cimset/int_matrix.hpp"
#include "cimset/lattice.hpp"
#include "cimset/numeric.hpp"

namespace cimset {

using Json = nlohmann::ordered_json;

// Accepts either format; input whose first non-blank character is '{' is read as JSON.
//   text:  "n=<int>" then one "<u> -> <v>" per line, '#' starts a comment
//   JSON:  {"n": <int>, "edges": [[u, v], ...]}
// Repeated edges collapse.
DirectedGraph parse_graph(std::string_view input);
DirectedGraph graph_from_json(const Json& j);
std::string graph_to_text(const DirectedGraph& g);

// Sorted 1-based element list.
Json set_to_json(NodeSet s);
NodeSet set_from_json(const Json& j, int n);

Json to_json(const DirectedGraph& g);
Json to_json(const PartiallyDirectedGraph& p);
Json to_json(const SkeletonMultiset& s);
// Zero coordinates are left out unless include_zeros is set.
Json to_json(const CharImset& c, bool include_zeros = false);
Json to_json(const StdImset& s);
using AnyImset = std::variant<CharImset, StdImset>;
AnyImset imset_from_json(const Json& j);
Json to_json(const AnyImset& imset);

Json to_json(const IntMatrix& m);
Json to_json(const Family& f);
Family family_from_json(const Json& j, int n);
// Nonzero coordinates as [{"parents": [...], "child": b, "value": v}, ...] under {"n", "entries"}.
Json to_json(const FamilyVector& v);
FamilyVector family_vector_from_json(const Json& j);
Json to_json(const FamilyExponent& e);
Json to_json(const FlipVector& f);
Json to_json(const KernelDecomposition& d);

Json to_json(const Fiber& f, const MoveComponents* components = nullptr);
Json to_json(const EquivVerdict& v);
Json to_json(const FactorMatrix& q);
FactorMatrix factor_from_json(const Json& j);
Json to_json(const MoveRecord& m);

}  // namespace cimset
