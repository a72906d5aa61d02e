#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "cimset/error.hpp"

namespace cimset {

// Node ids are 1-based everywhere in the public API.
using NodeId = int;

inline constexpr int kMaxNodes = 16;

// A subset of {1..n}; bit (i-1) represents element i.
class NodeSet {
 public:
  constexpr NodeSet() = default;
  static constexpr NodeSet from_mask(std::uint32_t mask) {
    NodeSet s;
    s.bits_ = mask;
    return s;
  }
  static constexpr NodeSet single(NodeId v) { return from_mask(1u << (v - 1)); }
  static NodeSet of(std::initializer_list<NodeId> ids) {
    NodeSet s;
    for (NodeId v : ids) s = s.with(v);
    return s;
  }
  // All of {1..n}.
  static constexpr NodeSet full(int n) { return from_mask((1u << n) - 1u); }

  constexpr std::uint32_t mask() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(NodeId v) const { return (bits_ >> (v - 1)) & 1u; }
  constexpr bool subset_of(NodeSet o) const { return (bits_ & ~o.bits_) == 0; }

  constexpr NodeSet with(NodeId v) const { return from_mask(bits_ | (1u << (v - 1))); }
  constexpr NodeSet without(NodeId v) const { return from_mask(bits_ & ~(1u << (v - 1))); }

  // Largest element, or 0 for the empty set.
  constexpr NodeId max() const { return bits_ == 0 ? 0 : 32 - std::countl_zero(bits_); }
  constexpr NodeId min() const { return bits_ == 0 ? 0 : std::countr_zero(bits_) + 1; }

  std::vector<NodeId> elements() const {
    std::vector<NodeId> out;
    for (std::uint32_t m = bits_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
    return out;
  }

  friend constexpr NodeSet operator|(NodeSet a, NodeSet b) { return from_mask(a.bits_ | b.bits_); }
  friend constexpr NodeSet operator&(NodeSet a, NodeSet b) { return from_mask(a.bits_ & b.bits_); }
  friend constexpr NodeSet operator-(NodeSet a, NodeSet b) { return from_mask(a.bits_ & ~b.bits_); }
  friend constexpr auto operator<=>(NodeSet, NodeSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

// "{1,2,3}" style rendering; "{}" for the empty set.
std::string to_string(NodeSet s);

// A parent set together with a distinguished child, written A->b.
struct Family {
  NodeSet parents;
  NodeId child = 1;

  NodeSet support() const { return parents.with(child); }
  friend auto operator<=>(const Family&, const Family&) = default;
};

// Throws InvalidArgument unless child is in 1..n, parents within 1..n and child not a parent.
void validate_family(const Family& f, int n);

std::string to_string(const Family& f);

// Dense coordinate of a family in the n*2^(n-1) family space: families are grouped
// by child, and within a child ordered by the parent mask with the child's bit removed.
std::size_t family_index(const Family& f, int n);
Family family_at(std::size_t index, int n);
inline std::size_t family_space_size(int n) { return static_cast<std::size_t>(n) << (n - 1); }

}  // namespace cimset
