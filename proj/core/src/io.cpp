#include "cimset/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace cimset {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s, std::size_t line) {
  s = trim(s);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw InvalidArgument("line " + std::to_string(line) + ": expected an integer, got '" + std::string(s) + "'");
  return value;
}

void check_node_count(int n) {
  if (n < 1 || n > kMaxNodes)
    throw InvalidArgument("node count " + std::to_string(n) + " outside 1.." + std::to_string(kMaxNodes));
}

DirectedGraph parse_text_graph(std::string_view input) {
  std::optional<DirectedGraph> g;
  std::size_t line_no = 0;
  while (!input.empty()) {
    const auto eol = input.find('\n');
    std::string_view line = input.substr(0, eol);
    input = eol == std::string_view::npos ? std::string_view{} : input.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (!g) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos || trim(line.substr(0, eq)) != "n")
        throw InvalidArgument("line " + std::to_string(line_no) + ": expected 'n=<int>' header");
      const int n = parse_int(line.substr(eq + 1), line_no);
      check_node_count(n);
      g.emplace(n);
      continue;
    }
    const auto arrow = line.find("->");
    if (arrow == std::string_view::npos)
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected '<u> -> <v>'");
    const int u = parse_int(line.substr(0, arrow), line_no);
    const int v = parse_int(line.substr(arrow + 2), line_no);
    try {
      g->add_edge(u, v);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!g) throw InvalidArgument("graph text is missing the 'n=<int>' header");
  return *g;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing JSON field '") + key + "'");
  return j.at(key);
}

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw InvalidArgument(std::string("JSON field '") + key + "' must be an integer");
  return v.get<int>();
}

std::int64_t as_int64(const Json& v) {
  if (!v.is_number_integer()) throw InvalidArgument("expected an integer, got " + v.dump());
  return v.get<std::int64_t>();
}

}  // namespace

DirectedGraph graph_from_json(const Json& j) {
  const int n = int_field(j, "n");
  check_node_count(n);
  DirectedGraph g(n);
  const Json& edges = field(j, "edges");
  if (!edges.is_array()) throw InvalidArgument("'edges' must be an array");
  for (const Json& e : edges) {
    if (!e.is_array() || e.size() != 2) throw InvalidArgument("each edge must be a [u, v] pair");
    g.add_edge(static_cast<NodeId>(as_int64(e[0])), static_cast<NodeId>(as_int64(e[1])));
  }
  return g;
}

DirectedGraph parse_graph(std::string_view input) {
  const std::string_view body = trim(input);
  if (!body.empty() && body.front() == '{') {
    Json j;
    try {
      j = Json::parse(body);
    } catch (const Json::parse_error& e) {
      throw InvalidArgument(std::string("malformed graph JSON: ") + e.what());
    }
    return graph_from_json(j);
  }
  return parse_text_graph(input);
}

std::string graph_to_text(const DirectedGraph& g) {
  std::ostringstream out;
  out << "n=" << g.n() << '\n';
  for (auto [u, v] : g.edges()) out << u << " -> " << v << '\n';
  return out.str();
}

Json set_to_json(NodeSet s) {
  Json out = Json::array();
  for (NodeId v : s.elements()) out.push_back(v);
  return out;
}

NodeSet set_from_json(const Json& j, int n) {
  if (!j.is_array()) throw InvalidArgument("a set must be a JSON array, got " + j.dump());
  NodeSet s;
  for (const Json& e : j) {
    const auto v = as_int64(e);
    if (v < 1 || v > n) throw InvalidArgument("set element " + std::to_string(v) + " out of range 1.." + std::to_string(n));
    if (s.contains(static_cast<NodeId>(v))) throw InvalidArgument("set element " + std::to_string(v) + " repeated");
    s = s.with(static_cast<NodeId>(v));
  }
  return s;
}

namespace {

Json edge_list(const auto& edges) {
  Json out = Json::array();
  for (auto [u, v] : edges) out.push_back(Json::array({u, v}));
  return out;
}

}  // namespace

Json to_json(const DirectedGraph& g) {
  Json out;
  out["n"] = g.n();
  out["edges"] = edge_list(g.edges());
  return out;
}

Json to_json(const PartiallyDirectedGraph& p) {
  Json out;
  out["n"] = p.n;
  out["directed"] = edge_list(p.directed);
  out["undirected"] = edge_list(p.undirected);
  return out;
}

Json to_json(const SkeletonMultiset& s) {
  Json out = Json::array();
  for (const auto& [pair, count] : s.counts)
    out.push_back(Json{{"pair", Json::array({pair.first, pair.second})}, {"multiplicity", count}});
  return out;
}

Json to_json(const CharImset& c, bool include_zeros) {
  Json out;
  out["n"] = c.n();
  out["kind"] = "char";
  Json entries = Json::array();
  for (std::uint32_t m = 1; m < (1u << c.n()); ++m) {
    const auto s = NodeSet::from_mask(m);
    if (include_zeros || c.at(s) != 0) entries.push_back(Json{{"set", set_to_json(s)}, {"value", c.at(s)}});
  }
  out["entries"] = std::move(entries);
  return out;
}

Json to_json(const StdImset& s) {
  Json out;
  out["n"] = s.n();
  out["kind"] = "std";
  Json entries = Json::array();
  for (const auto& [set, value] : s.entries()) entries.push_back(Json{{"set", set_to_json(set)}, {"value", value}});
  out["entries"] = std::move(entries);
  return out;
}

AnyImset imset_from_json(const Json& j) {
  const int n = int_field(j, "n");
  check_node_count(n);
  const Json& kind = field(j, "kind");
  const Json& entries = field(j, "entries");
  if (!entries.is_array()) throw InvalidArgument("'entries' must be an array");
  SubsetVector dense(n);
  std::vector<bool> seen(dense.values.size(), false);
  for (const Json& e : entries) {
    const NodeSet s = set_from_json(field(e, "set"), n);
    if (seen[s.mask()]) throw InvalidArgument("imset entry " + to_string(s) + " listed twice");
    seen[s.mask()] = true;
    dense.at(s) = as_int64(field(e, "value"));
  }
  if (kind == "char") {
    if (dense.values[0] != 0) throw InvalidArgument("characteristic imsets have no empty-set coordinate");
    return CharImset(std::move(dense));
  }
  if (kind == "std") return StdImset::from_dense(dense);
  throw InvalidArgument("imset kind must be \"char\" or \"std\", got " + kind.dump());
}

Json to_json(const AnyImset& imset) {
  return std::visit([](const auto& x) { return to_json(x); }, imset);
}

Json to_json(const IntMatrix& m) {
  Json out;
  out["rows"] = m.row_labels;
  out["cols"] = m.col_labels;
  Json data = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) data.push_back(m.row(r));
  out["data"] = std::move(data);
  return out;
}

Json to_json(const Family& f) { return Json{{"parents", set_to_json(f.parents)}, {"child", f.child}}; }

Family family_from_json(const Json& j, int n) {
  Family f{set_from_json(field(j, "parents"), n), int_field(j, "child")};
  validate_family(f, n);
  return f;
}

Json to_json(const FamilyVector& v) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    if (v.values[i] == 0) continue;
    Json e = to_json(family_at(i, v.n));
    e["value"] = v.values[i];
    entries.push_back(std::move(e));
  }
  return Json{{"n", v.n}, {"entries", std::move(entries)}};
}

FamilyVector family_vector_from_json(const Json& j) {
  const int n = int_field(j, "n");
  check_node_count(n);
  FamilyVector v(n);
  const Json& entries = field(j, "entries");
  if (!entries.is_array()) throw InvalidArgument("'entries' must be an array");
  for (const Json& e : entries) v.at(family_from_json(e, n)) = checked_add(v.at(family_from_json(e, n)), as_int64(field(e, "value")));
  return v;
}

Json to_json(const FamilyExponent& e) {
  Json entries = Json::array();
  for (const auto& [f, count] : e.entries()) {
    Json x = to_json(f);
    x["value"] = count;
    entries.push_back(std::move(x));
  }
  return Json{{"n", e.n()}, {"entries", std::move(entries)}};
}

Json to_json(const FlipVector& f) {
  return Json{{"common", set_to_json(f.common)}, {"b", f.b}, {"c", f.c}};
}

Json to_json(const KernelDecomposition& d) {
  Json terms = Json::array();
  for (const auto& t : d.terms) {
    Json x = to_json(t.flip);
    x["coefficient"] = t.coefficient;
    terms.push_back(std::move(x));
  }
  Json out;
  out["in_kernel"] = d.in_kernel;
  out["terms"] = std::move(terms);
  out["statistic_trace"] = d.statistic_trace;
  if (!d.in_kernel) out["residual"] = to_json(d.residual);
  return out;
}

Json to_json(const Fiber& f, const MoveComponents* components) {
  Json graphs = Json::array();
  for (const auto& g : f.graphs) graphs.push_back(to_json(g));
  Json out;
  out["imset"] = to_json(f.imset);
  out["graphs"] = std::move(graphs);
  if (components) out["components"] = components->components;
  return out;
}

Json to_json(const EquivVerdict& v) {
  Json out;
  out["verdict"] = to_string(v.verdict);
  out["tau"] = v.tau;
  out["trials"] = v.trials;
  out["residuals"] = Json{{"g_to_h", v.g_to_h}, {"h_to_g", v.h_to_g}};
  out["seed"] = v.seed;
  return out;
}

Json to_json(const FactorMatrix& q) {
  Json labels = Json::array();
  for (const auto& f : q.labels) labels.push_back(to_json(f));
  Json data = Json::array();
  for (Eigen::Index i = 0; i < q.entries.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < q.entries.cols(); ++j) row.push_back(q.entries(i, j));
    data.push_back(std::move(row));
  }
  return Json{{"labels", std::move(labels)}, {"data", std::move(data)}};
}

FactorMatrix factor_from_json(const Json& j) {
  const Json& data = field(j, "data");
  const Json& labels = field(j, "labels");
  if (!data.is_array() || !labels.is_array()) throw InvalidArgument("factor 'data' and 'labels' must be arrays");
  const auto n = static_cast<int>(data.size());
  check_node_count(n);
  if (labels.size() != data.size()) throw InvalidArgument("factor needs one label per column");
  FactorMatrix q{Eigen::MatrixXd(n, n), {}};
  for (int i = 0; i < n; ++i) {
    const Json& row = data[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) throw InvalidArgument("factor data must be square");
    for (int k = 0; k < n; ++k) {
      const Json& x = row[static_cast<std::size_t>(k)];
      if (!x.is_number()) throw InvalidArgument("factor entries must be numbers");
      q.entries(i, k) = x.get<double>();
    }
  }
  for (const Json& l : labels) q.labels.push_back(family_from_json(l, n));
  return q;
}

Json to_json(const MoveRecord& m) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CoveredFlipMove>)
          return Json{{"move", "flip"}, {"common", set_to_json(x.common_parents)}, {"from", x.from}, {"to", x.to}};
        else if constexpr (std::is_same_v<T, CycleReversalMove>)
          return Json{{"move", "reverse_cycle"}, {"cycle", x.cycle.nodes}};
        else
          return Json{{"move", "relabel"}, {"old", to_json(x.old_label)}, {"new", to_json(x.new_label)}};
      },
      m);
}

}  // namespace cimset
