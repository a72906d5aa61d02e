#include "cimset/node_set.hpp"

namespace cimset {

std::string to_string(NodeSet s) {
  std::string out = "{";
  bool first = true;
  for (NodeId v : s.elements()) {
    if (!first) out += ',';
    out += std::to_string(v);
    first = false;
  }
  return out + "}";
}

void validate_family(const Family& f, int n) {
  if (f.child < 1 || f.child > n)
    throw InvalidArgument("family child " + std::to_string(f.child) + " out of range 1.." + std::to_string(n));
  if (!f.parents.subset_of(NodeSet::full(n)))
    throw InvalidArgument("family parents " + to_string(f.parents) + " out of range 1.." + std::to_string(n));
  if (f.parents.contains(f.child)) throw InvalidArgument("family " + to_string(f) + " contains its child as a parent");
}

std::string to_string(const Family& f) { return to_string(f.parents) + "->" + std::to_string(f.child); }

std::size_t family_index(const Family& f, int n) {
  const std::uint32_t m = f.parents.mask();
  const std::uint32_t low = (1u << (f.child - 1)) - 1u;
  const std::uint32_t compressed = (m & low) | ((m >> 1) & ~low);
  return (static_cast<std::size_t>(f.child - 1) << (n - 1)) + compressed;
}

Family family_at(std::size_t index, int n) {
  const std::size_t per_child = std::size_t{1} << (n - 1);
  const NodeId child = static_cast<NodeId>(index / per_child) + 1;
  const auto compressed = static_cast<std::uint32_t>(index % per_child);
  const std::uint32_t low = (1u << (child - 1)) - 1u;
  const std::uint32_t m = (compressed & low) | ((compressed & ~low) << 1);
  return Family{NodeSet::from_mask(m), child};
}

}  // namespace cimset
