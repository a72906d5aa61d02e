#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "cimset/fixtures.hpp"
#include "cimset/io.hpp"
#include "render.hpp"

namespace cimset::cli {

namespace {

const char* const kHeuristicNote =
    "EvidenceInequivalent is heuristic: the solver is non-convex and a large residual is not a proof";

struct Report {
  Json doc;
  std::string text;
  int code = kOk;
};

std::string read_source(const std::string& spec) {
  std::ostringstream buf;
  if (spec == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(spec, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + spec + "'");
  buf << in.rdbuf();
  return buf.str();
}

std::optional<Json> try_json(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') return std::nullopt;
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

DirectedGraph load_graph(const std::string& spec) {
  if (spec.starts_with("fixture:")) return fixtures::by_name(spec.substr(8));
  return parse_graph(read_source(spec));
}

// A graph (its characteristic imset is taken) or an imset document of either kind.
CharImset load_char_imset(const std::string& spec) {
  if (spec.starts_with("fixture:")) return char_imset(fixtures::by_name(spec.substr(8)));
  const std::string text = read_source(spec);
  if (auto j = try_json(text); j && j->contains("kind")) {
    const AnyImset any = imset_from_json(*j);
    if (const auto* c = std::get_if<CharImset>(&any)) return *c;
    return char_from_std(std::get<StdImset>(any));
  }
  return char_imset(parse_graph(text));
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw InvalidArgument("expected a node id, got '" + token + "'");
    }
    token.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char ch = s[i];
    if (ch == ',' || ch == ' ' || ch == '>' || (ch == '-' && i + 1 < s.size() && s[i + 1] == '>'))
      flush();
    else
      token += ch;
  }
  flush();
  return out;
}

Edge parse_edge(const std::string& s) {
  const auto ids = parse_int_list(s);
  if (ids.size() != 2) throw InvalidArgument("an edge is written 'u,v' or 'u->v', got '" + s + "'");
  return {ids[0], ids[1]};
}

std::string set_text(NodeSet s, int n) { return render::set_label(s, n); }

Json checks_json(const std::vector<std::pair<std::string, bool>>& checks) {
  Json out = Json::array();
  for (const auto& [name, pass] : checks) out.push_back(Json{{"check", name}, {"pass", pass}});
  return out;
}

std::string checks_text(const std::vector<std::pair<std::string, bool>>& checks) {
  std::string out;
  for (const auto& [name, pass] : checks) out += std::string(pass ? "[pass] " : "[FAIL] ") + name + "\n";
  return out;
}

int checks_code(const std::vector<std::pair<std::string, bool>>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; }) ? kOk : kNegative;
}

// ---- imset ----

std::vector<std::int64_t> dense_char(const CharImset& c) { return c.values().values; }

Report imset_char_cmd(const DirectedGraph& g) {
  const CharImset c = char_imset(g);
  Report r;
  r.doc = to_json(c, /*include_zeros=*/true);
  r.text = render::imset_table(g.n(), render::subsets_by_size(g.n(), false), {{"c", dense_char(c)}});
  return r;
}

Json dense_std_json(const StdImset& s) {
  Json out = to_json(s);
  Json entries = Json::array();
  for (NodeSet set : render::subsets_by_size(s.n(), true))
    entries.push_back(Json{{"set", set_to_json(set)}, {"value", s.at(set)}});
  out["entries"] = std::move(entries);
  return out;
}

Report imset_std_cmd(const DirectedGraph& g, bool dense) {
  const StdImset s = std_imset(g);
  Report r;
  r.doc = dense ? dense_std_json(s) : to_json(s);
  r.text = render::imset_table(g.n(), render::subsets_by_size(g.n(), true), {{"s", s.dense().values}});
  return r;
}

Report imset_convert_cmd(const std::string& spec) {
  const auto j = try_json(read_source(spec));
  if (!j) throw InvalidArgument("imset convert expects an imset JSON document");
  const AnyImset any = imset_from_json(*j);
  Report r;
  if (const auto* given = std::get_if<CharImset>(&any)) {
    const StdImset s = std_from_char(*given);
    r.doc = to_json(s);
    r.text = render::imset_table(s.n(), render::subsets_by_size(s.n(), true), {{"s", s.dense().values}});
  } else {
    const CharImset c = char_from_std(std::get<StdImset>(any));
    r.doc = to_json(c, true);
    r.text = render::imset_table(c.n(), render::subsets_by_size(c.n(), false), {{"c", dense_char(c)}});
  }
  return r;
}

// ---- equiv ----

Report equiv_imset_cmd(const DirectedGraph& g, const DirectedGraph& h) {
  const auto diffs = imset_differences(g, h);
  Report r;
  Json list = Json::array();
  std::string text = diffs.empty() ? "imset-equivalent\n" : "not imset-equivalent; coordinates that differ:\n";
  for (const auto& d : diffs) {
    list.push_back(Json{{"set", set_to_json(d.set)}, {"left", d.left}, {"right", d.right}});
    text += "  c(" + set_text(d.set, g.n()) + "): " + std::to_string(d.left) + " vs " + std::to_string(d.right) + "\n";
  }
  r.doc = Json{{"equivalent", diffs.empty()}, {"differences", std::move(list)}};
  r.text = std::move(text);
  r.code = diffs.empty() ? kOk : kNegative;
  return r;
}

Json v_structure_json(const std::set<VStructure>& vs) {
  Json out = Json::array();
  for (auto [i, k, j] : vs) out.push_back(Json::array({i, k, j}));
  return out;
}

Report equiv_dag_cmd(const DirectedGraph& g, const DirectedGraph& h) {
  const bool eq = markov_equivalent_dags(g, h);
  const auto vg = v_structures(g), vh = v_structures(h);
  Report r;
  r.doc = Json{{"equivalent", eq},
               {"same_skeleton", skeleton(g) == skeleton(h)},
               {"v_structures", Json{{"left", v_structure_json(vg)}, {"right", v_structure_json(vh)}}}};
  r.text = std::string(eq ? "Markov equivalent" : "not Markov equivalent") +
           "\nsame skeleton: " + (skeleton(g) == skeleton(h) ? "yes" : "no") +
           "\nv-structures: " + std::to_string(vg.size()) + " vs " + std::to_string(vh.size()) + "\n";
  r.code = eq ? kOk : kNegative;
  return r;
}

struct NumericOptions {
  int trials = 5;
  int restarts = 50;
  int max_iters = 2000;
  double tau = 1e-8;
  int jobs = 1;

  OrthSolverConfig config(std::uint64_t seed) const {
    OrthSolverConfig c;
    c.restarts = restarts;
    c.max_iters = max_iters;
    c.tau = tau;
    c.seed = seed;
    return c;
  }
};

std::string residual_list(const std::vector<double>& xs) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific;
  for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? " " : "") << xs[i];
  return out.str();
}

std::string verdict_text(const EquivVerdict& v) {
  std::string text = to_string(v.verdict) + "\n";
  text += "g->h residuals: " + residual_list(v.g_to_h) + "\n";
  text += "h->g residuals: " + residual_list(v.h_to_g) + "\n";
  if (v.verdict == Verdict::EvidenceInequivalent) text += std::string(kHeuristicNote) + "\n";
  return text;
}

Json verdict_json(const EquivVerdict& v) {
  Json j = to_json(v);
  if (v.verdict == Verdict::EvidenceInequivalent) j["note"] = kHeuristicNote;
  return j;
}

Report equiv_numeric_cmd(const DirectedGraph& g, const DirectedGraph& h, const NumericOptions& o, std::uint64_t seed) {
  const EquivVerdict v = covariance_equiv_numeric(g, h, o.config(seed), o.trials, o.jobs);
  Report r;
  r.doc = verdict_json(v);
  r.text = verdict_text(v);
  r.code = v.verdict == Verdict::EvidenceEquivalent ? kOk : kNegative;
  return r;
}

// ---- structure ----

Report essential_cmd(const DirectedGraph& g) {
  const auto p = essential_graph(g);
  return {to_json(p), render::pdag(p), kOk};
}

struct FiberArgs {
  std::string input;
  std::string moves;
  bool upto_iso = false;
  int jobs = 1;
  std::uint64_t max_candidates = FiberOptions{}.max_candidates;
};

MoveSet parse_moves(const std::string& s) {
  MoveSet m;
  std::stringstream in(s);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token == "flips")
      m.covered_flips = true;
    else if (token == "cycles")
      m.cycle_reversals = true;
    else if (!token.empty())
      throw InvalidArgument("unknown move '" + token + "' (expected flips, cycles)");
  }
  return m;
}

Report fiber_cmd(const FiberArgs& a) {
  const CharImset c = load_char_imset(a.input);
  const Fiber f = fiber_enumerate(c, FiberOptions{a.max_candidates, a.jobs});
  std::optional<MoveComponents> comps;
  if (!a.moves.empty()) comps = fiber_move_components(f, parse_moves(a.moves));

  Report r;
  r.doc = to_json(f, comps ? &*comps : nullptr);
  std::ostringstream text;
  text << "fiber size " << f.graphs.size() << "\n";
  if (a.upto_iso) {
    const auto reps = collapse_isomorphic(f.graphs);
    Json idx = Json::array();
    for (const auto& g : reps) idx.push_back(f.index_of(g));
    r.doc["representatives"] = std::move(idx);
    text << "isomorphism classes " << reps.size() << "\n";
  }
  if (comps) text << "components under " << a.moves << ": " << comps->components.size() << "\n";
  for (std::size_t i = 0; i < f.graphs.size(); ++i) {
    text << "[" << i << "]";
    for (auto [u, v] : f.graphs[i].edges()) text << " " << u << "->" << v;
    text << "\n";
  }
  r.text = text.str();
  return r;
}

Report kernel_verify_cmd(int n) {
  if (n < 2 || n > kMaxDenseMatrixNodes)
    throw InvalidArgument("kernel verify needs 2 <= n <= " + std::to_string(kMaxDenseMatrixNodes));
  const LatticeBasis kernel = integer_kernel_basis(phi_matrix(n));
  const LatticeBasis flips = flip_lattice(n);
  const bool equal = lattices_equal(kernel, flips);
  const std::size_t rank = lattice_rank(flips);
  const std::size_t expected = family_space_size(n) - ((std::size_t{1} << n) - 1);
  const bool ok = equal && rank == expected && kernel.generator_count() == expected;
  const std::string message = equal ? "flip lattice = integer kernel, rank " + std::to_string(rank)
                                    : "flip lattice != integer kernel (flip rank " + std::to_string(rank) +
                                          ", kernel rank " + std::to_string(kernel.generator_count()) + ")";
  Report r;
  r.doc = Json{{"n", n}, {"equal", equal}, {"rank", rank}, {"expected_rank", expected}, {"message", message}};
  r.text = message + "\n";
  r.code = ok ? kOk : kNegative;
  return r;
}

Report decompose_cmd(const std::string& input, const std::vector<std::string>& diff) {
  FamilyVector v;
  if (!diff.empty()) {
    const auto g = load_graph(diff[0]), h = load_graph(diff[1]);
    if (g.n() != h.n()) throw InvalidArgument("graphs have different node counts");
    v = family_vector(g).dense() - family_vector(h).dense();
  } else if (!input.empty()) {
    const auto j = try_json(read_source(input));
    if (!j) throw InvalidArgument("decompose expects a family-vector JSON document");
    v = family_vector_from_json(*j);
  } else {
    throw InvalidArgument("decompose needs an input vector or --diff G H");
  }
  const KernelDecomposition d = decompose_kernel_vector(v);
  Report r;
  r.doc = to_json(d);
  std::string text;
  if (d.in_kernel) {
    text = "in kernel; " + std::to_string(d.terms.size()) + " flip terms\n";
    for (const auto& t : d.terms)
      text += "  " + std::to_string(t.coefficient) + " * flip(A=" + to_string(t.flip.common) + ", b=" +
              std::to_string(t.flip.b) + ", c=" + std::to_string(t.flip.c) + ")\n";
  } else {
    text = "not in kernel; residual on ordered families:\n";
    for (std::size_t i = 0; i < d.residual.values.size(); ++i)
      if (d.residual.values[i] != 0)
        text += "  " + render::family_label(family_at(i, v.n), v.n) + ": " + std::to_string(d.residual.values[i]) + "\n";
  }
  r.text = std::move(text);
  r.code = d.in_kernel ? kOk : kNegative;
  return r;
}

Report flip_cmd(const DirectedGraph& g, const std::string& edge) {
  Report r;
  if (edge.empty()) {
    Json list = Json::array();
    std::string text = "covered edges:\n";
    for (auto [u, v] : covered_edges(g)) {
      list.push_back(Json::array({u, v}));
      text += "  " + std::to_string(u) + " -> " + std::to_string(v) + "\n";
    }
    r.doc = Json{{"covered_edges", std::move(list)}};
    r.text = std::move(text);
    return r;
  }
  const DirectedGraph h = apply_covered_flip(g, parse_edge(edge));
  r.doc = Json{{"graph", to_json(h)}, {"imset_preserved", imset_equivalent(g, h)}};
  r.text = graph_to_text(h);
  return r;
}

Report reverse_cycle_cmd(const DirectedGraph& g, const std::string& cycle) {
  Report r;
  if (cycle.empty()) {
    Json list = Json::array();
    std::string text = "simple cycles:\n";
    for (const auto& c : simple_cycles(g)) {
      list.push_back(c.nodes);
      text += " ";
      for (NodeId v : c.nodes) text += " " + std::to_string(v);
      text += "\n";
    }
    r.doc = Json{{"cycles", std::move(list)}};
    r.text = std::move(text);
    return r;
  }
  const DirectedGraph h = reverse_cycle(g, Cycle{parse_int_list(cycle)});
  r.doc = Json{{"graph", to_json(h)}, {"imset_preserved", imset_equivalent(g, h)}};
  r.text = graph_to_text(h);
  return r;
}

// ---- factor ----

Report factor_sample_cmd(const DirectedGraph& g, bool from_sem, std::uint64_t seed) {
  const FactorMatrix q = from_sem ? factor_from_sem(g, random_sem(g, seed)) : random_factor(g, seed);
  return {to_json(q), render::factor(q), kOk};
}

Report factor_givens_cmd(const std::string& input, const std::string& edge, std::uint64_t seed) {
  FactorMatrix q;
  if (input.starts_with("fixture:")) {
    q = random_factor(load_graph(input), seed);
  } else {
    const std::string text = read_source(input);
    const auto j = try_json(text);
    q = j && j->contains("labels") ? factor_from_json(*j) : random_factor(parse_graph(text), seed);
  }
  const auto g = q.as_graph();
  if (!g) throw InvalidArgument("factor labels do not describe a graph");
  const Edge e = parse_edge(edge);
  if (!is_covered(*g, e))
    throw InvalidArgument("edge " + std::to_string(e.first) + "->" + std::to_string(e.second) + " is not covered");
  const FactorMatrix out = givens_flip_factor(q, CoveredFlipMove{g->parents(e.first), e.first, e.second});
  const double change = (precision_from_factor(out) - precision_from_factor(q)).cwiseAbs().maxCoeff();
  Report r;
  r.doc = Json{{"factor", to_json(out)}, {"precision_max_change", change}, {"support_violation", out.support_violation()}};
  std::ostringstream text;
  text << render::factor(out) << "max |Q'Q'^T - QQ^T| = " << change << "\n";
  r.text = text.str();
  return r;
}

// ---- repro ----

using Checks = std::vector<std::pair<std::string, bool>>;

Report finish(Json doc, std::string text, const Checks& checks) {
  doc["checks"] = checks_json(checks);
  return {std::move(doc), std::move(text) + checks_text(checks), checks_code(checks)};
}

Report repro_fig2(const NumericOptions& o, std::uint64_t seed) {
  const auto g = fixtures::two_cycle_example_g(), h = fixtures::two_cycle_example_h();
  const Cycle cycle{{2, 3, 4}};
  const FactorMatrix q = random_factor(g, seed);
  const FactorMatrix moved = reverse_cycle_factor(q, cycle);
  const auto moved_graph = moved.as_graph();
  const EquivVerdict v = covariance_equiv_numeric(g, h, o.config(seed), 1, o.jobs);
  Checks checks{
      {"H is G with the cycle 2->3->4->2 reversed", reverse_cycle(g, cycle) == h},
      {"skeletons differ", !(skeleton(g) == skeleton(h))},
      {"relabelled factor columns have H's sparsity", moved_graph && *moved_graph == h && moved.support_violation() == 0.0},
      {"column {1,2}->3 becomes {1,3}->2",
       std::find(moved.labels.begin(), moved.labels.end(), Family{NodeSet::of({1, 3}), 2}) != moved.labels.end()},
      {"numeric evidence of covariance equivalence", v.verdict == Verdict::EvidenceEquivalent},
  };
  Json doc{{"g", to_json(g)}, {"h", to_json(h)}, {"factor", to_json(q)}, {"relabelled", to_json(moved)},
           {"numeric", verdict_json(v)}};
  std::string text = "Q_G:\n" + render::factor(q) + "after the column permutation:\n" + render::factor(moved);
  return finish(std::move(doc), std::move(text), checks);
}

Report repro_fig3() {
  const auto left = fixtures::dag_class_left(), middle = fixtures::dag_class_middle(), right = fixtures::dag_class_right();
  const auto cls = enumerate_dag_class(left);
  const auto ess = essential_graph(left);
  PartiallyDirectedGraph expected{4, {{2, 1}, {3, 1}, {4, 1}}, {{2, 3}, {3, 4}}};
  Checks checks{
      {"middle = left with 4->3 flipped", apply_covered_flip(left, {4, 3}) == middle},
      {"right = middle with 3->2 flipped", apply_covered_flip(middle, {3, 2}) == right},
      {"the Markov class is exactly the three graphs",
       cls.size() == 3 && std::find(cls.begin(), cls.end(), middle) != cls.end() &&
           std::find(cls.begin(), cls.end(), right) != cls.end()},
      {"essential graph directs 2->1, 3->1, 4->1 and leaves 2-3, 3-4 undirected", ess == expected},
      {"all three share one characteristic imset", imset_equivalent(left, middle) && imset_equivalent(left, right)},
  };
  Json graphs = Json::array();
  for (const auto& g : cls) graphs.push_back(to_json(g));
  Json doc{{"class", std::move(graphs)}, {"essential", to_json(ess)}};
  return finish(std::move(doc), "essential graph:\n" + render::pdag(ess), checks);
}

Report repro_fig4() {
  const auto g = fixtures::cyclic_pair_left(), h = fixtures::cyclic_pair_right();
  const auto cg = char_imset(g), ch = char_imset(h);
  const auto sg = std_imset(g), sh = std_imset(h);
  const auto fiber = fiber_enumerate(cg);
  const auto comps = fiber_move_components(fiber, MoveSet{true, true});
  const bool joined = [&] {
    for (const auto& comp : comps.components) {
      const bool has_g = std::find(comp.begin(), comp.end(), fiber.index_of(g)) != comp.end();
      const bool has_h = std::find(comp.begin(), comp.end(), fiber.index_of(h)) != comp.end();
      if (has_g || has_h) return has_g && has_h;
    }
    return false;
  }();
  Checks checks{
      {"c_G = c_H", cg == ch},
      {"s_G = s_H", sg == sh},
      {"s has at most 2n nonzero entries", sg.entries().size() <= 8},
      {"both graphs lie in one fiber", fiber.contains(g) && fiber.contains(h)},
  };
  Json doc{{"c_g", to_json(cg, true)}, {"c_h", to_json(ch, true)}, {"s_g", dense_std_json(sg)}, {"s_h", dense_std_json(sh)},
           {"fiber_size", fiber.graphs.size()}, {"joined_by_flips_and_cycle_reversals", joined}};
  std::string text = render::imset_table(4, render::subsets_by_size(4, false), {{"c_G", dense_char(cg)}, {"c_H", dense_char(ch)}}) +
                     "\n" +
                     render::imset_table(4, render::subsets_by_size(4, true), {{"s_G", sg.dense().values}, {"s_H", sh.dense().values}}) +
                     "\nfiber size " + std::to_string(fiber.graphs.size()) + "; G and H joined by flips and cycle reversals: " +
                     (joined ? "yes" : "no") + "\n";
  return finish(std::move(doc), std::move(text), checks);
}

Report repro_fig5() {
  const auto g = fixtures::size_two_fiber_left(), h = fixtures::size_two_fiber_right();
  const auto fiber = fiber_enumerate(char_imset(g));
  const auto flips = fiber_move_components(fiber, MoveSet{true, false});
  const auto both = fiber_move_components(fiber, MoveSet{true, true});
  Checks checks{
      {"fiber has exactly two graphs", fiber.graphs.size() == 2 && fiber.contains(g) && fiber.contains(h)},
      {"disconnected under covered flips", flips.components.size() == 2},
      {"disconnected under flips and cycle reversals", both.components.size() == 2},
      {"the two monomials share no variable", is_minimal_generator_witness(fiber)},
  };
  Json doc{{"fiber", to_json(fiber, &both)}, {"left_monomial", to_json(family_vector(g))},
           {"right_monomial", to_json(family_vector(h))}};
  std::string text;
  for (const auto* x : {&g, &h}) {
    text += "z";
    for (const auto& f : families(*x)) text += " " + render::family_label(f, 5);
    text += "\n";
  }
  return finish(std::move(doc), std::move(text), checks);
}

Report repro_fig6(std::uint64_t seed) {
  const auto g = fixtures::three_cycle(), h = fixtures::three_cycle_reversed();
  const auto f = [](NodeId parent, NodeId child) { return Family{NodeSet::single(parent), child}; };
  const std::vector<ColumnRelabelMove> chain{{f(1, 2), f(2, 1)}, {f(2, 3), f(3, 2)}, {f(3, 1), f(1, 3)}};
  FactorMatrix q = random_factor(g, seed);
  const Eigen::MatrixXd precision = precision_from_factor(q);
  Json steps = Json::array();
  std::string text = render::factor(q);
  bool sparsity_kept = true;
  for (const auto& m : chain) {
    q = apply_factor_move(q, m);
    sparsity_kept = sparsity_kept && q.support_violation() == 0.0;
    steps.push_back(Json{{"move", to_json(MoveRecord{m})}, {"factor", to_json(q)}});
    text += describe(m) + "\n" + render::factor(q);
  }
  const auto final_graph = q.as_graph();
  const auto fiber = fiber_enumerate(char_imset(g));
  Checks checks{
      {"every relabelled column still agrees with its sparsity", sparsity_kept},
      {"the final labels describe the reversed cycle", final_graph && *final_graph == h},
      {"QQ^T is untouched", (precision_from_factor(q) - precision).cwiseAbs().maxCoeff() == 0.0},
      {"the reversal equals the cycle-reversal move", reverse_cycle(g, Cycle{{1, 2, 3}}) == h},
      {"covered flips alone do not connect the pair", fiber_move_components(fiber, MoveSet{true, false}).components.size() == 2},
  };
  return finish(Json{{"steps", std::move(steps)}}, std::move(text), checks);
}

Report repro_fig7(const NumericOptions& o, std::uint64_t seed) {
  const auto g = fixtures::tournament_left(), h = fixtures::tournament_right();
  const auto diffs = imset_differences(g, h);
  const auto at235 = std::find_if(diffs.begin(), diffs.end(), [](const auto& d) { return d.set == NodeSet::of({2, 3, 5}); });
  const EquivVerdict v = covariance_equiv_numeric(g, h, o.config(seed), o.trials, o.jobs);
  const auto via_cycles = reverse_cycle(reverse_cycle(g, Cycle{{1, 3, 5}}), Cycle{{2, 4, 6}});
  Checks checks{
      {"same skeleton multiset", skeleton(g) == skeleton(h)},
      {"neither graph has a 2-cycle", !has_two_cycle(g) && !has_two_cycle(h)},
      {"c_G(235) = 0 and c_H(235) = 1", at235 != diffs.end() && at235->left == 0 && at235->right == 1},
      {"H = G with cycles 1->3->5 and 2->4->6 reversed", via_cycles == h},
      {"numeric evidence of covariance equivalence", v.verdict == Verdict::EvidenceEquivalent},
  };
  Json d = Json::array();
  for (const auto& x : diffs) d.push_back(Json{{"set", set_to_json(x.set)}, {"left", x.left}, {"right", x.right}});
  Json doc{{"differences", std::move(d)}, {"numeric", verdict_json(v)}};
  return finish(std::move(doc), verdict_text(v), checks);
}

Report repro_table_cs() {
  struct Binomial {
    std::string name;
    DirectedGraph plus, minus;
  };
  const auto fam = [](std::vector<std::pair<NodeSet, NodeId>> fs) {
    std::vector<NodeSet> parents(3);
    for (auto [a, b] : fs) parents[static_cast<std::size_t>(b - 1)] = a;
    return DirectedGraph(3, parents);
  };
  const NodeSet e{}, s1 = NodeSet::single(1), s2 = NodeSet::single(2), s3 = NodeSet::single(3);
  std::vector<Binomial> table;
  for (const FlipVector& fv : flip_vectors(3)) {
    // The third node keeps the empty parent set on both sides.
    const NodeSet a = fv.common;
    const NodeId other = 6 - fv.b - fv.c;
    std::vector<std::pair<NodeSet, NodeId>> p{{a, fv.b}, {a.with(fv.b), fv.c}, {e, other}};
    std::vector<std::pair<NodeSet, NodeId>> m{{a, fv.c}, {a.with(fv.c), fv.b}, {e, other}};
    table.push_back({"flip " + std::to_string(fv.b) + "," + std::to_string(fv.c) + " over " + to_string(a), fam(p), fam(m)});
  }
  table.push_back({"cycle reversal", fam({{s3, 1}, {s1, 2}, {s2, 3}}), fam({{s2, 1}, {s3, 2}, {s1, 3}})});
  table.push_back({"cubic 2", fam({{e, 1}, {s3, 2}, {s1, 3}}), fam({{e, 2}, {s2, 3}, {s3, 1}})});
  table.push_back({"cubic 3", fam({{s3, 1}, {s1.with(3), 2}, {s2, 3}}), fam({{s2, 1}, {s3, 2}, {s1.with(2), 3}})});

  Checks checks;
  Json rows = Json::array();
  std::string text;
  bool all_phi = true;
  for (const auto& b : table) {
    const bool phi_equal = char_imset(b.plus) == char_imset(b.minus);
    all_phi = all_phi && phi_equal;
    const auto fiber = fiber_enumerate(char_imset(b.plus));
    const auto comps = fiber_move_components(fiber, MoveSet{true, false});
    bool flip_connected = false;
    for (const auto& c : comps.components)
      if (std::find(c.begin(), c.end(), fiber.index_of(b.plus)) != c.end())
        flip_connected = std::find(c.begin(), c.end(), fiber.index_of(b.minus)) != c.end();
    rows.push_back(Json{{"name", b.name},
                        {"plus", to_json(family_vector(b.plus))},
                        {"minus", to_json(family_vector(b.minus))},
                        {"phi_equal", phi_equal},
                        {"fiber_size", fiber.graphs.size()},
                        {"joined_by_covered_flips", flip_connected}});
    std::string line = b.name + ":";
    for (const auto& f : families(b.plus)) line += " " + render::family_label(f, 3);
    line += "  -  ";
    for (const auto& f : families(b.minus)) line += " " + render::family_label(f, 3);
    text += line + (flip_connected ? "  [flip-connected]" : "  [not flip-connected]") + "\n";
    if (b.name == "cycle reversal") checks.emplace_back("the cycle reversal is not reachable by covered flips", !flip_connected);
  }
  checks.emplace_back("all nine binomials lie in the kernel of phi_3", all_phi);
  checks.emplace_back("six quadratic flip binomials", flip_vectors(3).size() == 6);
  return finish(Json{{"binomials", std::move(rows)}}, std::move(text), checks);
}

Report repro_cmd(const std::string& which, const NumericOptions& o, std::uint64_t seed) {
  if (which == "fig2") return repro_fig2(o, seed);
  if (which == "fig3") return repro_fig3();
  if (which == "fig4") return repro_fig4();
  if (which == "fig5") return repro_fig5();
  if (which == "fig6") return repro_fig6(seed);
  if (which == "fig7") return repro_fig7(o, seed);
  return repro_table_cs();
}

void add_numeric_options(CLI::App* cmd, NumericOptions& o) {
  cmd->add_option("--trials", o.trials, "Trials per direction")->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", o.restarts, "Solver restarts per trial")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", o.max_iters, "Iterations per restart")->check(CLI::PositiveNumber);
  cmd->add_option("--tau", o.tau, "Residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Imsets, fibers and covariance equivalence for directed graphs"};
  app.name("cimset");
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "json";
  std::uint64_t seed = 0;
  std::string output;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", seed, "Seed for every random draw");
  app.add_option("-o,--output", output, "Write the document to this file");

  std::function<Report()> action;
  std::string g_path, h_path, input, edge, cycle;
  bool dense = false, from_sem = false;
  NumericOptions numeric;
  FiberArgs fiber;
  int kernel_n = 0;
  std::vector<std::string> diff;
  std::string repro_name;

  auto* imset = app.add_subcommand("imset", "Characteristic and standard imsets");
  imset->require_subcommand(1);
  auto* ichar = imset->add_subcommand("char", "Characteristic imset of a graph");
  ichar->add_option("graph", g_path)->required();
  ichar->callback([&] { action = [&] { return imset_char_cmd(load_graph(g_path)); }; });
  auto* istd = imset->add_subcommand("std", "Standard imset of a graph");
  istd->add_option("graph", g_path)->required();
  istd->add_flag("--dense", dense, "List every coordinate, zeros included");
  istd->callback([&] { action = [&] { return imset_std_cmd(load_graph(g_path), dense); }; });
  auto* iconv = imset->add_subcommand("convert", "Convert between characteristic and standard imsets");
  iconv->add_option("imset", input)->required();
  iconv->callback([&] { action = [&] { return imset_convert_cmd(input); }; });

  auto* equiv = app.add_subcommand("equiv", "Equivalence tests (exit 0 equivalent, 1 not, 2 error)");
  equiv->require_subcommand(1);
  auto* eimset = equiv->add_subcommand("imset", "Equal characteristic imsets");
  eimset->add_option("left", g_path)->required();
  eimset->add_option("right", h_path)->required();
  eimset->callback([&] { action = [&] { return equiv_imset_cmd(load_graph(g_path), load_graph(h_path)); }; });
  auto* edag = equiv->add_subcommand("dag", "Markov equivalence of two DAGs");
  edag->add_option("left", g_path)->required();
  edag->add_option("right", h_path)->required();
  edag->callback([&] { action = [&] { return equiv_dag_cmd(load_graph(g_path), load_graph(h_path)); }; });
  auto* enumeric = equiv->add_subcommand("numeric", "Numeric covariance-equivalence evidence");
  enumeric->add_option("left", g_path)->required();
  enumeric->add_option("right", h_path)->required();
  add_numeric_options(enumeric, numeric);
  enumeric->callback([&] {
    action = [&] { return equiv_numeric_cmd(load_graph(g_path), load_graph(h_path), numeric, seed); };
  });

  auto* ess = app.add_subcommand("essential", "Essential graph of a DAG");
  ess->add_option("graph", g_path)->required();
  ess->callback([&] { action = [&] { return essential_cmd(load_graph(g_path)); }; });

  auto* fib = app.add_subcommand("fiber", "All graphs sharing a characteristic imset");
  fib->add_option("input", fiber.input, "Graph or imset document")->required();
  fib->add_option("--moves", fiber.moves, "Move set for components: flips, cycles or flips,cycles");
  fib->add_flag("--upto-iso", fiber.upto_iso, "Also list one representative per isomorphism class");
  fib->add_option("--jobs", fiber.jobs, "Worker threads")->check(CLI::PositiveNumber);
  fib->add_option("--max-candidates", fiber.max_candidates, "Search budget")->check(CLI::PositiveNumber);
  fib->callback([&] { action = [&] { return fiber_cmd(fiber); }; });

  auto* kernel = app.add_subcommand("kernel", "Flip lattice and the integer kernel of phi_n");
  kernel->require_subcommand(1);
  auto* kverify = kernel->add_subcommand("verify", "Compare the two lattices by Hermite normal form");
  kverify->add_option("--n", kernel_n, "Node count")->required();
  kverify->callback([&] { action = [&] { return kernel_verify_cmd(kernel_n); }; });

  auto* dec = app.add_subcommand("decompose", "Write a kernel vector as a combination of flip vectors");
  dec->add_option("vector", input, "Family vector document");
  dec->add_option("--diff", diff, "Use v_G - v_H for two graphs")->expected(2);
  dec->callback([&] { action = [&] { return decompose_cmd(input, diff); }; });

  auto* flip = app.add_subcommand("flip", "Flip a covered edge, or list covered edges");
  flip->add_option("graph", g_path)->required();
  flip->add_option("--edge", edge, "Edge u,v");
  flip->callback([&] { action = [&] { return flip_cmd(load_graph(g_path), edge); }; });

  auto* rev = app.add_subcommand("reverse-cycle", "Reverse a directed cycle, or list cycles");
  rev->add_option("graph", g_path)->required();
  rev->add_option("--cycle", cycle, "Cycle nodes in order, e.g. 1,2,3");
  rev->callback([&] { action = [&] { return reverse_cycle_cmd(load_graph(g_path), cycle); }; });

  auto* factor = app.add_subcommand("factor", "Sparse precision-matrix factors");
  factor->require_subcommand(1);
  auto* fsample = factor->add_subcommand("sample", "Random factor with the graph's sparsity");
  fsample->add_option("graph", g_path)->required();
  fsample->add_flag("--sem", from_sem, "Draw SEM parameters and factor them instead");
  fsample->callback([&] { action = [&] { return factor_sample_cmd(load_graph(g_path), from_sem, seed); }; });
  auto* fgivens = factor->add_subcommand("givens-flip", "Realize a covered flip by a Givens rotation");
  fgivens->add_option("factor", input, "Factor document, or a graph to sample from")->required();
  fgivens->add_option("--edge", edge, "Covered edge u,v")->required();
  fgivens->callback([&] { action = [&] { return factor_givens_cmd(input, edge, seed); }; });

  auto* repro = app.add_subcommand("repro", "Reproduce a figure or table from embedded fixtures");
  repro->add_option("name", repro_name)
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "table-cs"}));
  add_numeric_options(repro, numeric);
  repro->callback([&] { action = [&] { return repro_cmd(repro_name, numeric, seed); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }

  Report report;
  try {
    report = action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }

  const std::string body = format == "text" ? report.text : report.doc.dump(2) + "\n";
  if (output.empty()) {
    out << body;
  } else {
    std::ofstream file(output, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << output << "'\n";
      return kError;
    }
    file << body;
  }
  return report.code;
}

}  // namespace cimset::cli
