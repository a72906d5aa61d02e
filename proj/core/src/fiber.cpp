#include "cimset/fiber.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <thread>

namespace cimset {

bool Fiber::contains(const DirectedGraph& g) const { return index_of(g) != graphs.size(); }

std::size_t Fiber::index_of(const DirectedGraph& g) const {
  auto it = std::lower_bound(graphs.begin(), graphs.end(), g);
  return it != graphs.end() && *it == g ? static_cast<std::size_t>(it - graphs.begin()) : graphs.size();
}

namespace {

class FiberSearch {
 public:
  FiberSearch(const CharImset& c, std::uint64_t budget, std::atomic<std::uint64_t>& visited)
      : c_(c), n_(c.n()), budget_(budget), visited_(visited), candidates_(static_cast<std::size_t>(n_)) {
    for (NodeId b = 1; b <= n_; ++b) {
      NodeSet forced, optional;
      for (NodeId a = 1; a <= n_; ++a) {
        if (a == b) continue;
        const auto m = c.at(NodeSet::of({a, b}));
        if (m == 2) forced = forced.with(a);
        if (m == 1) optional = optional.with(a);
      }
      // forced + every subset of optional
      const std::uint32_t opt = optional.mask();
      std::uint32_t t = 0;
      while (true) {
        candidates_[b - 1].push_back(forced | NodeSet::from_mask(t));
        if (t == opt) break;
        t = (t - opt) & opt;
      }
    }
  }

  const std::vector<NodeSet>& candidates(NodeId v) const { return candidates_[v - 1]; }

  // Explores every completion with node 1 fixed to `first`.
  void run_from(NodeSet first, std::vector<DirectedGraph>& out) {
    std::vector<NodeSet> parents(static_cast<std::size_t>(n_));
    parents[0] = first;
    if (!tick() || !consistent(parents, 1)) return;
    extend(parents, 2, out);
  }

 private:
  bool tick() {
    if (visited_.fetch_add(1, std::memory_order_relaxed) + 1 > budget_)
      throw LimitExceeded("fiber search exceeded " + std::to_string(budget_) + " candidates");
    return true;
  }

  // Every coordinate S within {1..k} that contains k is now fully determined.
  bool consistent(const std::vector<NodeSet>& parents, NodeId k) const {
    const std::uint32_t below = (1u << (k - 1)) - 1u;
    std::uint32_t t = below;
    while (true) {
      const auto s = NodeSet::from_mask(t).with(k);
      if (s.size() >= 2) {
        std::int64_t count = 0;
        for (NodeId a : s.elements())
          if (s.without(a).subset_of(parents[a - 1])) ++count;
        if (count != c_.at(s)) return false;
      }
      if (t == 0) break;
      t = (t - 1) & below;
    }
    return true;
  }

  void extend(std::vector<NodeSet>& parents, NodeId k, std::vector<DirectedGraph>& out) {
    if (k > n_) {
      out.emplace_back(n_, parents);
      return;
    }
    for (NodeSet cand : candidates_[k - 1]) {
      parents[k - 1] = cand;
      tick();
      if (consistent(parents, k)) extend(parents, k + 1, out);
    }
    parents[k - 1] = NodeSet{};
  }

  const CharImset& c_;
  int n_;
  std::uint64_t budget_;
  std::atomic<std::uint64_t>& visited_;
  std::vector<std::vector<NodeSet>> candidates_;
};

}  // namespace

Fiber fiber_enumerate(const CharImset& c, const FiberOptions& options) {
  if (c.n() > kMaxFiberNodes)
    throw InvalidArgument("fiber enumeration supports n <= " + std::to_string(kMaxFiberNodes) + ", got " +
                          std::to_string(c.n()));
  if (!c.singletons_are_one()) throw InvalidArgument("singleton coordinates must all equal 1 for a graph fiber");

  std::atomic<std::uint64_t> visited{0};
  FiberSearch search(c, options.max_candidates, visited);
  const auto& firsts = search.candidates(1);
  const std::size_t jobs = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options.jobs, 1)), 1, firsts.size());

  std::vector<std::vector<DirectedGraph>> shards(jobs);
  if (jobs == 1) {
    for (NodeSet f : firsts) search.run_from(f, shards[0]);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < firsts.size(); i += jobs) search.run_from(firsts[i], shards[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : workers) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Fiber out{c, {}};
  for (auto& shard : shards) out.graphs.insert(out.graphs.end(), shard.begin(), shard.end());
  std::sort(out.graphs.begin(), out.graphs.end());
  out.graphs.erase(std::unique(out.graphs.begin(), out.graphs.end()), out.graphs.end());
  return out;
}

std::vector<DirectedGraph> collapse_isomorphic(const std::vector<DirectedGraph>& graphs) {
  std::vector<DirectedGraph> out;
  std::set<std::vector<std::uint8_t>> seen;
  for (const auto& g : graphs)
    if (seen.insert(canonical_form(g)).second) out.push_back(g);
  return out;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

void find_cycles_from(const DirectedGraph& g, NodeId start, std::vector<NodeId>& path, NodeSet on_path,
                      std::vector<Cycle>& out) {
  const NodeId last = path.back();
  for (NodeId next = start; next <= g.n(); ++next) {
    if (!g.has_edge(last, next)) continue;
    if (next == start) {
      if (path.size() >= 2) out.push_back(Cycle{path});
    } else if (!on_path.contains(next)) {
      path.push_back(next);
      find_cycles_from(g, start, path, on_path.with(next), out);
      path.pop_back();
    }
  }
}

}  // namespace

std::vector<Cycle> simple_cycles(const DirectedGraph& g) {
  std::vector<Cycle> out;
  for (NodeId s = 1; s <= g.n(); ++s) {
    std::vector<NodeId> path{s};
    find_cycles_from(g, s, path, NodeSet::single(s), out);
  }
  return out;
}

MoveComponents fiber_move_components(const Fiber& f, MoveSet moves) {
  if (f.graphs.empty()) throw InvalidArgument("fiber is empty");
  DisjointSets sets(f.graphs.size());
  for (std::size_t i = 0; i < f.graphs.size(); ++i) {
    const DirectedGraph& g = f.graphs[i];
    auto link = [&](const DirectedGraph& h) {
      if (const std::size_t j = f.index_of(h); j != f.graphs.size()) sets.unite(i, j);
    };
    if (moves.covered_flips)
      for (const Edge& e : covered_edges(g)) link(apply_covered_flip(g, e));
    if (moves.cycle_reversals)
      for (const Cycle& cyc : simple_cycles(g)) link(reverse_cycle(g, cyc));
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < f.graphs.size(); ++i) groups[sets.find(i)].push_back(i);
  MoveComponents out;
  for (auto& [root, members] : groups) out.components.push_back(std::move(members));
  return out;
}

std::pair<FamilyExponent, FamilyExponent> cycle_generator_exponents(int n, const std::vector<NodeId>& seq) {
  const std::size_t k = seq.size();
  if (k < 3) throw InvalidArgument("cycle generator needs at least 3 nodes");
  if (k > static_cast<std::size_t>(n)) throw InvalidArgument("cycle longer than the node count");
  NodeSet seen;
  for (NodeId v : seq) {
    if (v < 1 || v > n) throw InvalidArgument("cycle node " + std::to_string(v) + " out of range");
    if (seen.contains(v)) throw InvalidArgument("cycle repeats node " + std::to_string(v));
    seen = seen.with(v);
  }
  std::vector<std::pair<Family, std::int64_t>> forward, backward;
  for (std::size_t i = 0; i < k; ++i) {
    const NodeId a = seq[i], b = seq[(i + 1) % k];
    forward.emplace_back(Family{NodeSet::single(a), b}, 1);
    backward.emplace_back(Family{NodeSet::single(b), a}, 1);
  }
  return {FamilyExponent(n, std::move(forward)), FamilyExponent(n, std::move(backward))};
}

bool is_minimal_generator_witness(const Fiber& f) {
  if (f.graphs.size() != 2) return false;
  const auto a = families(f.graphs[0]), b = families(f.graphs[1]);
  for (const Family& x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return false;
  return true;
}

}  // namespace cimset
