// Acceptance checks, one line per criterion. Run all, or one with --only <k|substitute>.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cimset/fiber.hpp"
#include "cimset/fixtures.hpp"
#include "cimset/io.hpp"
#include "cimset/lattice.hpp"
#include "cimset/numeric.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace cimset;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

struct CliResult {
  int code;
  std::string out;
};

CliResult cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str() + err.str()};
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

// ---- 1: golden imset tables of the cyclic pair ----

const std::map<oracle::Subset, std::int64_t> kCharTable = {
    {{1}, 1},      {{2}, 1},      {{3}, 1},      {{4}, 1},      {{1, 2}, 1},    {{1, 3}, 1},
    {{1, 4}, 1},   {{2, 3}, 1},   {{2, 4}, 1},   {{3, 4}, 1},   {{1, 2, 3}, 1}, {{1, 3, 4}, 0},
    {{1, 2, 4}, 0}, {{2, 3, 4}, 1}, {{1, 2, 3, 4}, 0}};
const std::map<oracle::Subset, std::int64_t> kStdNonzero = {{{1}, -1},       {{4}, -1},      {{1, 4}, 1},
                                                            {{2, 3}, -1},    {{1, 2, 3}, 1}, {{2, 3, 4}, 1}};

std::map<oracle::Subset, std::int64_t> entries_of(const Json& doc) {
  std::map<oracle::Subset, std::int64_t> out;
  for (const auto& e : doc["entries"]) out[e["set"].get<oracle::Subset>()] = e["value"].get<std::int64_t>();
  return out;
}

Outcome criterion_1() {
  Outcome o;
  for (const char* name : {"fixture:fig4_left", "fixture:fig4_right"}) {
    const auto c = cli_run({"imset", "char", name});
    o.require(c.code == cli::kOk, "imset char failed");
    if (c.code != cli::kOk) return o;
    const auto ce = entries_of(Json::parse(c.out));
    o.require(ce.size() == 15 && ce == kCharTable, std::string("c table mismatch for ") + name);

    const auto s = cli_run({"imset", "std", "--dense", name});
    o.require(s.code == cli::kOk, "imset std failed");
    if (s.code != cli::kOk) return o;
    const auto se = entries_of(Json::parse(s.out));
    bool match = se.size() == 16;
    for (const auto& [set, v] : se) {
      const auto it = kStdNonzero.find(set);
      match = match && v == (it == kStdNonzero.end() ? 0 : it->second);
    }
    o.require(match, std::string("s table mismatch for ") + name);
  }
  o.require(cli_run({"equiv", "imset", "fixture:fig4_left", "fixture:fig4_right"}).code == cli::kOk,
            "pair not imset-equivalent");
  if (o.pass) o.detail = "15 c and 16 s coordinates exact for both graphs; equivalent";
  return o;
}

// ---- 2: the counterexample pair ----

Outcome criterion_2() {
  Outcome o;
  const auto g = fixtures::tournament_left(), h = fixtures::tournament_right();
  o.require(skeleton(g) == skeleton(h), "skeleton multisets differ");

  const auto e = cli_run({"equiv", "imset", "fixture:fig7_left", "fixture:fig7_right"});
  o.require(e.code == cli::kNegative, "equiv imset exit code " + std::to_string(e.code));
  if (e.code == cli::kNegative) {
    const auto doc = Json::parse(e.out);
    bool pinned = false;
    for (const auto& d : doc["differences"])
      if (d["set"] == Json::parse("[2,3,5]")) pinned = d["left"] == 0 && d["right"] == 1;
    o.require(pinned, "c(235) not reported as 0 vs 1");
  }

  const auto n = cli_run({"equiv", "numeric", "fixture:fig7_left", "fixture:fig7_right", "--trials", "5",
                          "--restarts", "50", "--jobs", "4"});
  o.require(n.code == cli::kOk, "equiv numeric exit code " + std::to_string(n.code));
  if (n.code == cli::kOk || n.code == cli::kNegative) {
    const auto j = Json::parse(n.out);
    double worst = 0.0;
    for (const char* dir : {"g_to_h", "h_to_g"}) {
      o.require(j["residuals"][dir].size() == 5, "expected 5 trials per direction");
      for (const auto& r : j["residuals"][dir]) worst = std::max(worst, r.get<double>());
    }
    o.require(j["verdict"] == "EvidenceEquivalent" && worst < 1e-8, "worst residual " + fmt(worst));
    if (o.pass) o.detail = "c(235) 0 vs 1 reported; numeric EvidenceEquivalent, worst residual " + fmt(worst);
  }
  return o;
}

// ---- 3: flip lattice equals the integer kernel ----

Outcome criterion_3() {
  Outcome o;
  // n*2^(n-1) - (2^n - 1); at n=2 this is 1 (the single flip spans the kernel).
  const std::map<int, std::size_t> expected = {{2, 1}, {3, 5}, {4, 17}, {5, 49}};
  std::string ranks;
  for (const auto& [n, want] : expected) {
    const auto flips = flip_lattice(n);
    const auto kernel = integer_kernel_basis(phi_matrix(n));
    const std::size_t formula = static_cast<std::size_t>((n << (n - 1)) - ((1 << n) - 1));
    o.require(lattices_equal(flips, kernel), "lattices differ at n=" + std::to_string(n));
    o.require(lattice_rank(kernel) == want && formula == want && lattice_rank(flips) == want,
              "rank mismatch at n=" + std::to_string(n));
    ranks += (ranks.empty() ? "" : ", ") + std::to_string(lattice_rank(kernel));
  }
  if (o.pass) o.detail = "HNF equal for n=2..5, ranks " + ranks;
  return o;
}

// ---- 4: decomposition soundness ----

Outcome criterion_4() {
  Outcome o;
  constexpr int n = 4;
  const auto flips = flip_vectors(n);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coef(-3, 3), count(1, 6);
  std::uniform_int_distribution<std::size_t> pick(0, flips.size() - 1);
  std::size_t steps = 0;
  for (int t = 0; t < 1000 && o.pass; ++t) {
    FamilyVector v(n);
    for (int k = count(rng); k > 0; --k) {
      const auto f = flips[pick(rng)].to_family_vector(n);
      const int x = coef(rng);
      for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] += x * f.values[i];
    }
    const auto d = decompose_kernel_vector(v);
    o.require(d.in_kernel, "combination rejected");
    o.require(recompose(d.terms, n) == v, "recomposition differs");
    for (std::size_t k = 1; k < d.statistic_trace.size(); ++k)
      o.require(d.statistic_trace[k] < d.statistic_trace[k - 1], "statistic did not strictly decrease");
    o.require(d.statistic_trace.back() == 0, "statistic did not reach 0");
    steps += d.terms.size();
  }

  const auto tmp = std::filesystem::temp_directory_path() / "cimset_acceptance_unit.json";
  for (std::size_t i = 0; i < family_space_size(n) && o.pass; ++i) {
    FamilyVector e(n);
    e.values[i] = 1;
    o.require(!decompose_kernel_vector(e).in_kernel, "unit vector accepted");
    std::ofstream(tmp) << to_json(e).dump();
    const auto r = cli_run({"--format", "text", "decompose", tmp.string()});
    o.require(r.code == cli::kNegative && r.out.starts_with("not in kernel"), "CLI did not report 'not in kernel'");
  }
  std::filesystem::remove(tmp);
  if (o.pass)
    o.detail = "1000 combinations recomposed (" + std::to_string(steps) + " steps), 32 unit vectors rejected";
  return o;
}

// ---- 5: Mobius duality and phi/psi ----

Outcome criterion_5() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size(2, 7);
  std::uniform_real_distribution<double> density(0.1, 0.7);
  for (int t = 0; t < 10000 && o.pass; ++t) {
    const auto a = oracle::random_graph(size(rng), rng, density(rng));
    const auto g = oracle::to_graph(a);
    const auto c = char_imset(g);
    const auto s = std_imset(g);
    o.require(std_from_char(c) == s && char_from_std(s) == c, "round trip failed");
    const auto v = family_vector(g);
    o.require(phi_apply(v) == c.values(), "phi(v) != c");
    o.require(psi_apply(v) == s.dense(), "psi(v) != s");
    SubsetVector z = s.dense();
    superset_zeta(z);
    o.require(z == c.values(), "superset sum of s != c");
    if (t % 10 == 0)
      for (const auto& [set, value] : oracle::char_imset(a))
        o.require(c.at(oracle::to_set(set)) == value, "c disagrees with the definition");
  }
  if (o.pass) o.detail = "10000 graphs, n in 2..7, exact";
  return o;
}

// ---- 6: Givens conservation and solver gradient ----

Outcome criterion_6() {
  Outcome o;
  std::mt19937_64 rng(6);
  int triples = 0;
  double worst = 0.0;
  while (triples < 1000 && o.pass) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const auto g = oracle::to_graph(triples % 2 ? oracle::random_dag(n, rng, 0.5) : oracle::random_graph(n, rng, 0.45));
    const auto covered = covered_edges(g);
    if (covered.empty()) continue;
    auto it = covered.begin();
    std::advance(it, static_cast<long>(rng() % covered.size()));
    const auto q = random_factor(g, rng());
    const auto out = givens_flip_factor(q, CoveredFlipMove{g.parents(it->first), it->first, it->second});
    const auto flipped = apply_covered_flip(g, *it);
    const auto as = out.as_graph();
    o.require(as && *as == flipped && out.support_violation() == 0.0, "factor sparsity differs from flipped graph");
    const double diff =
        (out.entries * out.entries.transpose() - q.entries * q.entries.transpose()).cwiseAbs().maxCoeff();
    worst = std::max(worst, diff);
    o.require(diff <= 1e-10, "precision changed by " + fmt(diff));
    ++triples;
  }

  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  double worst_rel = 0.0;
  for (int t = 0; t < 100 && o.pass; ++t) {
    const int n = 3 + t % 3;
    const auto g = oracle::to_graph(oracle::random_graph(n, rng, 0.5));
    const auto h = oracle::to_graph(oracle::random_graph(n, rng, 0.5));
    const auto q = random_factor(g, rng());
    std::vector<double> a(static_cast<std::size_t>(n * (n - 1) / 2));
    for (auto& x : a) x = angle(rng);
    std::vector<int> sg(static_cast<std::size_t>(n));
    for (auto& x : sg) x = rng() % 2 ? 1 : -1;
    const auto ev = feasibility_objective(q.entries, h, a, sg);
    for (std::size_t k = 0; k < a.size(); ++k) {
      auto up = a, dn = a;
      const double step = 1e-6;
      up[k] += step;
      dn[k] -= step;
      const double fd = (feasibility_objective(q.entries, h, up, sg).value -
                         feasibility_objective(q.entries, h, dn, sg).value) / (2 * step);
      const double rel = std::abs(ev.gradient(static_cast<Eigen::Index>(k)) - fd) / std::max(1.0, std::abs(fd));
      worst_rel = std::max(worst_rel, rel);
    }
  }
  o.require(worst_rel <= 1e-5, "gradient relative error " + fmt(worst_rel));
  if (o.pass)
    o.detail = "1000 flips, max precision change " + fmt(worst) + "; gradient max rel. error " + fmt(worst_rel);
  return o;
}

// ---- 7: fiber facts ----

Outcome criterion_7() {
  Outcome o;
  const auto tri = fiber_enumerate(char_imset(fixtures::three_cycle()));
  o.require(tri.graphs.size() == 2, "3-cycle fiber size " + std::to_string(tri.graphs.size()));
  o.require(fiber_move_components(tri, {true, false}).components.size() == 2, "3-cycle fiber connected by flips");
  o.require(fiber_move_components(tri, {true, true}).components.size() == 1,
            "3-cycle fiber disconnected with reversals");

  const auto five = fiber_enumerate(char_imset(fixtures::size_two_fiber_left()));
  o.require(five.graphs.size() == 2, "n=5 fiber size " + std::to_string(five.graphs.size()));
  o.require(five.contains(fixtures::size_two_fiber_right()), "n=5 fiber misses the partner graph");
  o.require(fiber_move_components(five, {true, true}).components.size() == 2, "n=5 fiber connected by moves");
  if (o.pass) o.detail = "3-cycle: size 2, 2 components by flips, 1 with reversals; n=5: size 2, 2 components";
  return o;
}

// ---- 8: DAG coherence ----

template <class Key>
std::set<std::set<std::size_t>> partition_by(const std::vector<oracle::Adj>& dags, const std::function<Key(const oracle::Adj&)>& key) {
  std::map<Key, std::set<std::size_t>> groups;
  for (std::size_t i = 0; i < dags.size(); ++i) groups[key(dags[i])].insert(i);
  std::set<std::set<std::size_t>> out;
  for (auto& [k, v] : groups) out.insert(v);
  return out;
}

Outcome criterion_8() {
  Outcome o;
  std::vector<oracle::Adj> dags;
  for (const auto& a : oracle::all_graphs(3))
    if (oracle::is_acyclic(a)) dags.push_back(a);
  o.require(dags.size() == 25, "expected 25 DAGs, found " + std::to_string(dags.size()));

  using Vs = std::set<std::tuple<int, int, int>>;
  const auto by_imset = partition_by<std::map<oracle::Subset, std::int64_t>>(
      dags, [](const oracle::Adj& a) { return oracle::char_imset(a); });
  const auto by_pattern = partition_by<std::pair<std::map<std::pair<int, int>, int>, Vs>>(
      dags, [](const oracle::Adj& a) { return std::pair{oracle::skeleton(a), oracle::v_structures(a)}; });
  const auto by_essential = partition_by<std::pair<std::set<Edge>, std::set<Edge>>>(dags, [](const oracle::Adj& a) {
    const auto e = essential_graph(oracle::to_graph(a));
    return std::pair{e.directed, e.undirected};
  });
  o.require(by_imset == by_pattern && by_pattern == by_essential, "partitions differ");

  const auto cls = enumerate_dag_class(fixtures::dag_class_left());
  const std::set<DirectedGraph> got(cls.begin(), cls.end());
  const std::set<DirectedGraph> want{fixtures::dag_class_left(), fixtures::dag_class_middle(), fixtures::dag_class_right()};
  o.require(got == want, "four-node class is not the three listed DAGs");
  const PartiallyDirectedGraph essential{4, {{2, 1}, {3, 1}, {4, 1}}, {{2, 3}, {3, 4}}};
  for (const auto& g : want) o.require(essential_graph(g) == essential, "essential graph mismatch");
  if (o.pass) o.detail = "25 DAGs, " + std::to_string(by_imset.size()) + " classes under all three keys; 4-node class of 3";
  return o;
}

// ---- 9: imset-equivalent pairs are numerically equivalent ----

OrthSolverConfig cli_defaults(std::uint64_t seed) {
  OrthSolverConfig c;
  c.restarts = 50;
  c.seed = seed;
  return c;
}

Outcome criterion_9() {
  Outcome o;
  std::vector<CharImset> imsets;
  {
    std::set<std::vector<std::int64_t>> seen;
    for (const auto& a : oracle::all_graphs(3)) {
      const auto c = char_imset(oracle::to_graph(a));
      if (seen.insert(c.values().values).second) imsets.push_back(c);
    }
  }
  const std::size_t small = imsets.size();
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) imsets.push_back(char_imset(oracle::to_graph(oracle::random_graph(4, rng, 0.45))));

  std::size_t pairs = 0;
  double worst = 0.0;
  for (const auto& c : imsets) {
    const auto f = fiber_enumerate(c);
    for (std::size_t i = 0; i < f.graphs.size(); ++i)
      for (std::size_t j = i + 1; j < f.graphs.size(); ++j) {
        const auto v = covariance_equiv_numeric(f.graphs[i], f.graphs[j], cli_defaults(0), 5, 4);
        for (double r : v.g_to_h) worst = std::max(worst, r);
        for (double r : v.h_to_g) worst = std::max(worst, r);
        if (v.verdict != Verdict::EvidenceEquivalent)
          o.require(false, "pair " + graph_to_text(f.graphs[i]) + " / " + graph_to_text(f.graphs[j]) + " not evidenced");
        ++pairs;
      }
  }
  if (o.pass)
    o.detail = std::to_string(small) + " fibers at n=3 and 200 at n=4, " + std::to_string(pairs) +
               " pairs EvidenceEquivalent, worst residual " + fmt(worst);
  return o;
}

// ---- 10: negative control ----

Outcome criterion_10() {
  Outcome o;
  const auto tmp = std::filesystem::temp_directory_path();
  const auto chain = tmp / "cimset_acceptance_chain.txt", collider = tmp / "cimset_acceptance_collider.txt";
  std::ofstream(chain) << "n=3\n1 -> 2\n2 -> 3\n";
  std::ofstream(collider) << "n=3\n1 -> 2\n3 -> 2\n";
  const auto r = cli_run({"equiv", "numeric", chain.string(), collider.string(), "--trials", "5", "--restarts", "50"});
  std::filesystem::remove(chain);
  std::filesystem::remove(collider);
  o.require(r.code == cli::kNegative, "exit code " + std::to_string(r.code));
  if (r.code != cli::kNegative && r.code != cli::kOk) return o;
  const auto j = Json::parse(r.out);
  double smallest = INFINITY;
  for (const char* dir : {"g_to_h", "h_to_g"})
    for (const auto& x : j["residuals"][dir]) smallest = std::min(smallest, x.get<double>());
  o.require(j["verdict"] == "EvidenceInequivalent", "verdict " + j["verdict"].get<std::string>());
  o.require(smallest >= 0.05, "EvidenceInequivalent, but smallest residual " + fmt(smallest) + " < 0.05 (g->h " +
                                  j["residuals"]["g_to_h"].dump() + ")");
  if (o.pass) o.detail = "EvidenceInequivalent, smallest residual " + fmt(smallest);
  return o;
}

// ---- substitute for the uniqueness claim at small n ----

constexpr int kSubstituteTrials = 50;

Outcome substitute_small_n() {
  Outcome o;
  std::size_t pairs = 0;
  for (int n = 2; n <= 4; ++n) {
    std::map<std::map<std::pair<int, int>, int>, std::vector<DirectedGraph>> by_skeleton;
    for (const auto& a : oracle::all_graphs(n)) {
      const auto g = oracle::to_graph(a);
      if (!has_two_cycle(g)) by_skeleton[oracle::skeleton(a)].push_back(g);
    }
    for (const auto& [skel, graphs] : by_skeleton)
      for (std::size_t i = 0; i < graphs.size(); ++i)
        for (std::size_t j = i + 1; j < graphs.size(); ++j) {
          if (imset_equivalent(graphs[i], graphs[j])) continue;
          ++pairs;
          // The equiv numeric protocol with 50 trials instead of 5, stopping at the first infeasible draw.
          // Five draws are too few here: a model whose precision set is a full-dimensional proper subset
          // of a saturated one is hit by most draws, so a few lucky trials prove nothing.
          bool evidenced = true;
          for (int t = 0; t < kSubstituteTrials && evidenced; ++t) {
            const OrthSolverConfig cfg = cli_defaults(static_cast<std::uint64_t>(t));
            evidenced = orth_feasibility(random_factor(graphs[i], cfg.seed), graphs[j], cfg).residual < cfg.tau &&
                        orth_feasibility(random_factor(graphs[j], cfg.seed), graphs[i], cfg).residual < cfg.tau;
          }
          if (evidenced)
            o.require(false, "imset-inequivalent pair evidenced equivalent: " + graph_to_text(graphs[i]) + " / " +
                                 graph_to_text(graphs[j]));
        }
  }
  if (o.pass)
    o.detail = std::to_string(pairs) + " same-skeleton, 2-cycle-free, imset-inequivalent pairs at n<=4; none evidenced over " +
               std::to_string(kSubstituteTrials) + " trials per direction";
  return o;
}

struct Criterion {
  std::string id;
  std::string title;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"1", "golden imset tables", 1, criterion_1},
      {"2", "counterexample pair", 120, criterion_2},
      {"3", "kernel identity", 30, criterion_3},
      {"4", "decomposition soundness", 10, criterion_4},
      {"5", "Mobius duality", 60, criterion_5},
      {"6", "Givens conservation", 60, criterion_6},
      {"7", "fiber facts", 60, criterion_7},
      {"8", "DAG coherence", 5, criterion_8},
      {"9", "sampling check on fibers", 900, criterion_9},
      {"10", "negative control", 60, criterion_10},
      {"substitute", "small-n uniqueness substitute", 1500, substitute_small_n},
  };

  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: cimset_acceptance [--only <1..10|substitute>]\n";
      return 2;
    }
  }

  bool all_pass = true, ran = false;
  for (const auto& c : all) {
    if (!only.empty() && c.id != only) continue;
    ran = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) o = {false, o.detail + "; took " + fmt(secs) + " s, limit " + fmt(c.limit_s) + " s"};
    const std::string label = c.id == "substitute" ? "substitute" : "criterion " + c.id;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << label << ": " << c.title << " - " << o.detail << " ("
              << fmt(secs) << " s)" << std::endl;
    all_pass = all_pass && o.pass;
  }
  if (!ran) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
