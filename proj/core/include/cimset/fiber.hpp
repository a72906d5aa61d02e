#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cimset/graph.hpp"
#include "cimset/imset.hpp"

namespace cimset {

// All graphs sharing one characteristic imset, stored labelled and sorted by parent masks.
struct Fiber {
  CharImset imset;
  std::vector<DirectedGraph> graphs;

  bool contains(const DirectedGraph& g) const;
  std::size_t index_of(const DirectedGraph& g) const;  // graphs.size() when absent
};

inline constexpr int kMaxFiberNodes = 6;

struct FiberOptions {
  std::uint64_t max_candidates = 1'000'000'000;  // partial assignments visited before giving up
  int jobs = 1;
};

// Enumerates every graph whose characteristic imset equals c. Requires all singleton
// coordinates equal to 1 and n <= 6.
Fiber fiber_enumerate(const CharImset& c, const FiberOptions& options = {});

// One representative (the first in fiber order) per isomorphism class.
std::vector<DirectedGraph> collapse_isomorphic(const std::vector<DirectedGraph>& graphs);

struct MoveSet {
  bool covered_flips = false;
  bool cycle_reversals = false;
};

struct MoveComponents {
  // Indices into Fiber::graphs; each component sorted, components ordered by smallest index.
  std::vector<std::vector<std::size_t>> components;
};

// Connected components of the fiber under single moves that stay inside the fiber.
MoveComponents fiber_move_components(const Fiber& f, MoveSet moves);

// Every simple directed cycle (length >= 2), each listed once starting from its smallest node.
std::vector<Cycle> simple_cycles(const DirectedGraph& g);

// Both exponents of the cycle-reversal binomial z_{i1->i2}...z_{ik->i1} - z_{i1->ik}...z_{i2->i1}.
std::pair<FamilyExponent, FamilyExponent> cycle_generator_exponents(int n, const std::vector<NodeId>& seq);

// A size-2 fiber whose two graph monomials share no variable.
bool is_minimal_generator_witness(const Fiber& f);

}  // namespace cimset
