#pragma once

// Serialization and file plumbing for the CLI: JSON schemas (universe.v1,
// setsep.v1, orientation.v1, family.v1, stree.v1, nested.v1, duality.v1),
// edge-list parsing, DOT export, run manifests, and environment overrides
// for the size caps. All JSON output goes through nlohmann::json with its
// sorted object keys, so equal data always serializes to equal bytes.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tangles/core.hpp"
#include "tangles/duality.hpp"
#include "tangles/orientations.hpp"
#include "tangles/stars.hpp"
#include "tangles/strees.hpp"
#include "tangles/tot.hpp"

namespace tangles {

using json = nlohmann::json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- canonical bytes and digests ------------------------------------------

inline std::string canonical_bytes(const json& j) { return j.dump(2) + "\n"; }

// FNV-1a, as a short stable content digest for manifests.
inline std::string digest_bytes(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << bytes;
}

// --- cap overrides ---------------------------------------------------------

// TANGLE_CAP_MAX_UNORIENTED, TANGLE_CAP_MAX_CLOSURE and
// TANGLE_CAP_MAX_ENUM_UNORIENTED override the corresponding default caps.
inline void apply_env_caps() {
  auto get = [](const char* name, int& slot) {
    if (const char* v = std::getenv(name)) {
      char* end = nullptr;
      long parsed = std::strtol(v, &end, 10);
      if (end == v || *end != '\0' || parsed <= 0)
        throw ParseError(std::string(name) + ": expected a positive integer");
      slot = static_cast<int>(parsed);
    }
  };
  get("TANGLE_CAP_MAX_UNORIENTED", default_caps().max_unoriented);
  get("TANGLE_CAP_MAX_CLOSURE", default_caps().max_closure);
  get("TANGLE_CAP_MAX_ENUM_UNORIENTED", default_caps().max_enum_unoriented);
}

// --- universe.v1 -----------------------------------------------------------

namespace io_detail {

inline const json& field(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

inline int int_at(const json& j, const std::string& where) {
  if (!j.is_number_integer())
    throw ParseError(where + ": expected an integer");
  return j.get<int>();
}

}  // namespace io_detail

inline Universe parse_universe_v1(const json& j) {
  using io_detail::field;
  using io_detail::int_at;
  TableUniverseSpec spec;
  const json& elems = field(j, "elements", "universe.v1");
  if (!elems.is_array()) throw ParseError("universe.v1: elements: expected an array");
  for (size_t i = 0; i < elems.size(); ++i) {
    std::string where = "universe.v1: elements[" + std::to_string(i) + "]";
    const json& e = elems[i];
    if (!e.is_object()) throw ParseError(where + ": expected an object");
    TableUniverseSpec::Element el;
    el.id = int_at(field(e, "id", where.c_str()), where + ".id");
    el.inv = int_at(field(e, "inv", where.c_str()), where + ".inv");
    if (e.contains("order")) el.order = int_at(e["order"], where + ".order");
    spec.elements.push_back(el);
  }
  if (j.contains("leq")) {
    const json& lq = j["leq"];
    if (!lq.is_array()) throw ParseError("universe.v1: leq: expected an array");
    for (size_t i = 0; i < lq.size(); ++i) {
      std::string where = "universe.v1: leq[" + std::to_string(i) + "]";
      if (!lq[i].is_array() || lq[i].size() != 2)
        throw ParseError(where + ": expected [id, id]");
      spec.leq.push_back({int_at(lq[i][0], where), int_at(lq[i][1], where)});
    }
  }
  auto triples = [&](const char* key, std::vector<std::array<int, 3>>& out) {
    if (!j.contains(key)) return;
    const json& t = j[key];
    if (!t.is_array())
      throw ParseError(std::string("universe.v1: ") + key + ": expected an array");
    for (size_t i = 0; i < t.size(); ++i) {
      std::string where =
          std::string("universe.v1: ") + key + "[" + std::to_string(i) + "]";
      if (!t[i].is_array() || t[i].size() != 3)
        throw ParseError(where + ": expected [id, id, id]");
      out.push_back({int_at(t[i][0], where), int_at(t[i][1], where),
                     int_at(t[i][2], where)});
    }
  };
  triples("join", spec.join);
  triples("meet", spec.meet);
  if (j.contains("generate")) {
    if (j["generate"] != "closure")
      throw ParseError("universe.v1: generate: only \"closure\" is supported");
    spec.derive_lattice = true;
  }
  try {
    return build_table_universe(spec);
  } catch (const UniverseError& e) {
    throw ParseError(std::string("universe.v1: ") + e.what());
  }
}

inline json universe_to_json(const Universe& u) {
  json j;
  j["schema"] = "universe.v1";
  json elems = json::array();
  for (Sep s = 0; s < u.size(); ++s) {
    json e;
    e["id"] = s;
    e["inv"] = u.inv(s);
    if (u.has_order()) e["order"] = u.order(s);
    elems.push_back(std::move(e));
  }
  j["elements"] = std::move(elems);
  json leq = json::array(), join = json::array(), meet = json::array();
  for (Sep a = 0; a < u.size(); ++a)
    for (Sep b = 0; b < u.size(); ++b) {
      if (u.leq(a, b)) leq.push_back(json::array({a, b}));
      join.push_back(json::array({a, b, u.join(a, b)}));
      meet.push_back(json::array({a, b, u.meet(a, b)}));
    }
  j["leq"] = std::move(leq);
  j["join"] = std::move(join);
  j["meet"] = std::move(meet);
  return j;
}

// --- setsep.v1 -------------------------------------------------------------

struct SetSepFile {
  std::vector<std::string> ground;
  std::vector<SetSeparation> seps;  // the listed separations
  bool with_order = true;           // order: "intersection" vs "none"
  bool close = true;                // close under the lattice operations
};

inline SetSepFile parse_setsep_v1(const json& j) {
  using io_detail::field;
  SetSepFile f;
  const json& ground = field(j, "ground", "setsep.v1");
  if (!ground.is_array()) throw ParseError("setsep.v1: ground: expected an array");
  for (const auto& g : ground) {
    if (!g.is_string()) throw ParseError("setsep.v1: ground: expected strings");
    f.ground.push_back(g.get<std::string>());
  }
  if (f.ground.empty() || f.ground.size() > 64)
    throw ParseError("setsep.v1: ground: 1..64 names required");
  auto bit_of = [&](const std::string& name, const std::string& where) {
    for (size_t i = 0; i < f.ground.size(); ++i)
      if (f.ground[i] == name) return std::uint64_t{1} << i;
    throw ParseError(where + ": unknown ground name '" + name + "'");
  };
  const json& seps = field(j, "seps", "setsep.v1");
  if (!seps.is_array()) throw ParseError("setsep.v1: seps: expected an array");
  for (size_t i = 0; i < seps.size(); ++i) {
    std::string where = "setsep.v1: seps[" + std::to_string(i) + "]";
    const json& e = seps[i];
    if (!e.is_object()) throw ParseError(where + ": expected an object");
    SetSeparation s;
    for (const char* side : {"a", "b"}) {
      const json& lst = field(e, side, where.c_str());
      if (!lst.is_array()) throw ParseError(where + "." + side + ": expected an array");
      std::uint64_t m = 0;
      for (const auto& name : lst) {
        if (!name.is_string())
          throw ParseError(where + "." + side + ": expected strings");
        m |= bit_of(name.get<std::string>(), where + "." + side);
      }
      (side[0] == 'a' ? s.side_a : s.side_b) = m;
    }
    f.seps.push_back(s);
  }
  const json& ord = field(j, "order", "setsep.v1");
  if (ord == "intersection") f.with_order = true;
  else if (ord == "none") f.with_order = false;
  else throw ParseError("setsep.v1: order: expected \"intersection\" or \"none\"");
  if (j.contains("close")) {
    if (!j["close"].is_boolean())
      throw ParseError("setsep.v1: close: expected a boolean");
    f.close = j["close"].get<bool>();
  }
  return f;
}

inline json setsep_to_json(const SetSepFile& f) {
  json j;
  j["schema"] = "setsep.v1";
  j["ground"] = f.ground;
  json seps = json::array();
  for (const auto& s : f.seps) {
    auto names = [&](std::uint64_t m) {
      json out = json::array();
      for (size_t i = 0; i < f.ground.size(); ++i)
        if (m >> i & 1) out.push_back(f.ground[i]);
      return out;
    };
    seps.push_back(json{{"a", names(s.side_a)}, {"b", names(s.side_b)}});
  }
  j["seps"] = std::move(seps);
  j["order"] = f.with_order ? "intersection" : "none";
  j["close"] = f.close;
  return j;
}

// --- edge lists ------------------------------------------------------------

inline std::vector<std::pair<int, int>> parse_edge_list(const std::string& text) {
  std::vector<std::pair<int, int>> edges;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    int a, b;
    if (!(ls >> a)) continue;  // blank or comment-only line
    std::string rest;
    if (!(ls >> b) || (ls >> rest))
      throw ParseError("edge list line " + std::to_string(lineno) +
                       ": expected \"u v\"");
    if (a < 0 || b < 0)
      throw ParseError("edge list line " + std::to_string(lineno) +
                       ": negative vertex");
    edges.push_back({a, b});
  }
  return edges;
}

// --- format detection and the combined parse entry point -------------------

struct ParsedInput {
  std::string format;  // "universe.v1" | "setsep.v1" | "edge-list"
  Universe u;
  // For setsep.v1: the listed separations, resolved inside u. The system
  // view lets the file describe a subsystem of a larger (closed) universe.
  std::vector<Sep> listed;

  SepSystem system() const {
    if (listed.empty()) return SepSystem::whole(u);
    return SepSystem::of(u, listed);
  }
};

inline ParsedInput parse_input_text(const std::string& text,
                                    const std::string& path_hint) {
  auto looks_json = [&] {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) return c == '{';
    return false;
  };
  bool is_json = path_hint.size() >= 5 &&
                 path_hint.rfind(".json") == path_hint.size() - 5;
  if (!is_json) is_json = looks_json();

  ParsedInput out;
  if (!is_json) {
    auto edges = parse_edge_list(text);
    if (edges.empty()) throw ParseError(path_hint + ": empty edge list");
    int n = 0;
    for (auto [a, b] : edges) n = std::max({n, a + 1, b + 1});
    out.format = "edge-list";
    try {
      out.u = build_graph_universe(n, edges);
    } catch (const UniverseError& e) {
      throw ParseError(path_hint + ": " + e.what());
    }
    return out;
  }

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path_hint + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path_hint + ": expected a JSON object");
  std::string schema;
  if (j.contains("schema") && j["schema"].is_string())
    schema = j["schema"].get<std::string>();
  else if (j.contains("elements"))
    schema = "universe.v1";
  else if (j.contains("ground"))
    schema = "setsep.v1";
  if (schema == "universe.v1") {
    out.format = schema;
    out.u = parse_universe_v1(j);
  } else if (schema == "setsep.v1") {
    out.format = schema;
    SetSepFile f = parse_setsep_v1(j);
    try {
      out.u = build_set_universe(static_cast<int>(f.ground.size()), f.seps,
                                 f.close, f.with_order, default_caps(), f.ground);
    } catch (const UniverseError& e) {
      throw ParseError(path_hint + ": " + e.what());
    }
    // Resolve the listed separations (and their inverses) inside the universe.
    for (const auto& g : f.seps)
      for (Sep s = 0; s < out.u.size(); ++s)
        if (out.u.sides(s) == g) out.listed.push_back(s);
    std::sort(out.listed.begin(), out.listed.end());
    out.listed.erase(std::unique(out.listed.begin(), out.listed.end()),
                     out.listed.end());
    std::vector<Sep> with_inv = out.listed;
    for (Sep s : out.listed) with_inv.push_back(out.u.inv(s));
    std::sort(with_inv.begin(), with_inv.end());
    with_inv.erase(std::unique(with_inv.begin(), with_inv.end()), with_inv.end());
    out.listed = std::move(with_inv);
    if (static_cast<int>(out.listed.size()) == out.u.size()) out.listed.clear();
  } else {
    throw ParseError(path_hint + ": unrecognized schema");
  }
  // Laws are validated eagerly; finalize() already threw on any breach, so
  // reaching this point means the object passed check_laws.
  return out;
}

inline ParsedInput parse_input(const std::string& path) {
  return parse_input_text(read_file(path), path);
}

// --- result schemas --------------------------------------------------------

inline json orientation_to_json(const Orientation& o) {
  json j;
  j["schema"] = "orientation.v1";
  j["ids"] = o.elems;  // already sorted (order, id)
  return j;
}

inline json family_to_json(const StarFamily& fam) {
  json j;
  j["schema"] = "family.v1";
  switch (fam.kind) {
    case FamilyKind::ProfileTriples: j["kind"] = "profile-triples"; break;
    case FamilyKind::Cosmall: j["kind"] = "cosmall"; break;
    case FamilyKind::MaxSets: j["kind"] = "max-sets"; break;
    case FamilyKind::DeltaSets: j["kind"] = "delta-sets"; break;
    case FamilyKind::UniqueProfile: j["kind"] = "unique-profile"; break;
    case FamilyKind::ShiftClosure: j["kind"] = "shift-closure"; break;
    case FamilyKind::EfficientUnique: j["kind"] = "efficient-unique"; break;
    case FamilyKind::EfficientSized: j["kind"] = "efficient-sized"; break;
    case FamilyKind::WeaklyOriented: j["kind"] = "weakly-oriented"; break;
    case FamilyKind::Explicit: j["kind"] = "explicit"; break;
  }
  j["params"] = json{{"profiles", fam.profiles.size()}};
  json members = json::array();
  for (const auto& m : fam.all_members()) members.push_back(m);
  j["members"] = std::move(members);
  return j;
}

inline StarFamily family_from_json(const json& j, const SepSystem& sys) {
  using io_detail::field;
  if (field(j, "kind", "family.v1") != "explicit")
    throw ParseError("family.v1: only explicit families round-trip");
  std::vector<Star> members;
  for (const auto& m : field(j, "members", "family.v1")) {
    Star star;
    for (const auto& s : m) star.push_back(s.get<Sep>());
    members.push_back(make_star(std::move(star)));
  }
  return build_explicit(sys, members);
}

inline json stree_to_json(const STree& t) {
  json j;
  j["schema"] = "stree.v1";
  j["nodes"] = t.n_nodes;
  json edges = json::array();
  for (const auto& e : t.edges)
    edges.push_back(json{{"u", e.a}, {"v", e.b}, {"label_uv", e.label_ab}});
  j["edges"] = std::move(edges);
  return j;
}

inline STree stree_from_json(const json& j) {
  using io_detail::field;
  STree t;
  t.n_nodes = field(j, "nodes", "stree.v1").get<int>();
  for (const auto& e : field(j, "edges", "stree.v1"))
    t.edges.push_back({field(e, "u", "stree.v1 edge").get<int>(),
                       field(e, "v", "stree.v1 edge").get<int>(),
                       field(e, "label_uv", "stree.v1 edge").get<Sep>()});
  return t;
}

inline json nested_to_json(const NestedSet& n) {
  json j;
  j["schema"] = "nested.v1";
  j["labels"] = n.labels;
  json pairs = json::array();
  for (const auto& c : n.certs)
    pairs.push_back(json{{"p", c.p},
                         {"q", c.q},
                         {"sep", c.sep},
                         {"order", c.order},
                         {"efficient", c.efficient}});
  j["pairs"] = std::move(pairs);
  return j;
}

inline NestedSet nested_from_json(const json& j) {
  using io_detail::field;
  NestedSet n;
  for (const auto& l : field(j, "labels", "nested.v1")) n.labels.push_back(l.get<Sep>());
  for (const auto& p : field(j, "pairs", "nested.v1")) {
    PairCertificate c;
    c.p = field(p, "p", "nested.v1 pair").get<int>();
    c.q = field(p, "q", "nested.v1 pair").get<int>();
    c.sep = field(p, "sep", "nested.v1 pair").get<Sep>();
    c.order = field(p, "order", "nested.v1 pair").get<int>();
    c.efficient = field(p, "efficient", "nested.v1 pair").get<bool>();
    n.certs.push_back(c);
  }
  return n;
}

inline json duality_to_json(const DualityResult& res) {
  json j;
  j["schema"] = "duality.v1";
  j["outcome"] = res.outcome == DualityResult::Outcome::Tree ? "tree" : "tangle";
  if (res.tree) j["tree"] = stree_to_json(*res.tree);
  if (res.tangle) j["tangle"] = orientation_to_json(*res.tangle);
  json certs;
  certs["exactly_one_checked"] = res.exactly_one_checked;
  if (res.standard) certs["standard"] = *res.standard;
  if (res.critically_separable)
    certs["critically_separable"] = *res.critically_separable;
  j["certificates"] = std::move(certs);
  return j;
}

// --- DOT -------------------------------------------------------------------

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// Undirected DOT rendering; every node is annotated with its incoming star.
inline std::string stree_to_dot(const STree& t, const Universe& u) {
  std::ostringstream out;
  out << "graph stree {\n";
  for (int v = 0; v < t.n_nodes; ++v) {
    std::string label = "n" + std::to_string(v);
    for (Sep s : node_star(t, u, v)) label += "\\n" + dot_escape(u.describe(s));
    out << "  n" << v << " [label=\"" << label << "\"];\n";
  }
  for (const auto& e : t.edges)
    out << "  n" << e.a << " -- n" << e.b << " [label=\""
        << dot_escape(u.describe(e.label_ab)) << "\"];\n";
  out << "}\n";
  return out.str();
}

// --- run manifests ---------------------------------------------------------

struct RunManifest {
  std::vector<std::string> command;
  std::string input_path;
  std::string input_digest;
  json config;                                        // caps, flags, seeds
  std::vector<std::pair<std::string, std::string>> outputs;  // name -> digest
  long long timing_ms = 0;

  json to_json() const {
    json j;
    j["schema"] = "manifest.v1";
    j["command"] = command;
    j["input"] = json{{"path", input_path}, {"digest", input_digest}};
    j["config"] = config;
    json outs;
    for (const auto& [name, dig] : outputs) outs[name] = dig;
    j["outputs"] = std::move(outs);
    j["timing_ms"] = timing_ms;
    return j;
  }
};

inline json caps_to_json(const Caps& caps) {
  return json{{"max_unoriented", caps.max_unoriented},
              {"max_closure", caps.max_closure},
              {"max_enum_unoriented", caps.max_enum_unoriented}};
}

}  // namespace tangles
