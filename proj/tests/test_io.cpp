#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "tangles/io.hpp"

using namespace tangles;

namespace {

// Locate the shipped fixtures relative to the test binary or the source tree.
std::string fixture(const std::string& name) {
  namespace fs = std::filesystem;
  for (fs::path base : {fs::path("fixtures"), fs::path("../fixtures"),
                        fs::path(__FILE__).parent_path().parent_path() / "fixtures"})
    if (fs::exists(base / name)) return (base / name).string();
  return name;
}

}  // namespace

TEST_CASE("example42 fixture: setsep.v1, 14-element system, 6 regular profiles") {
  ParsedInput in = parse_input(fixture("example42.json"));
  CHECK(in.format == "setsep.v1");
  SepSystem sys = in.system();
  CHECK(sys.elems.size() == 14);
  CHECK(in.u.check_laws(true).ok());
  auto profiles = enumerate_profiles(sys);
  CHECK(profiles.size() == 6);
}

TEST_CASE("universe.v1 round trip preserves the whole structure") {
  Universe u = fixtures::chain(2);
  json j = universe_to_json(u);
  Universe v = parse_universe_v1(j);
  REQUIRE(v.size() == u.size());
  for (Sep a = 0; a < u.size(); ++a) {
    CHECK(v.inv(a) == u.inv(a));
    if (u.has_order()) CHECK(v.order(a) == u.order(a));
    for (Sep b = 0; b < u.size(); ++b) {
      CHECK(v.leq(a, b) == u.leq(a, b));
      CHECK(v.join(a, b) == u.join(a, b));
      CHECK(v.meet(a, b) == u.meet(a, b));
    }
  }
  // Canonical bytes are stable across emissions.
  CHECK(canonical_bytes(j) == canonical_bytes(universe_to_json(u)));
}

TEST_CASE("setsep.v1 round trip and edge-list parsing") {
  json j = json::parse(read_file(fixture("example42.json")));
  SetSepFile f = parse_setsep_v1(j);
  CHECK(f.ground.size() == 6);
  CHECK(f.seps.size() == 7);
  CHECK(setsep_to_json(parse_setsep_v1(setsep_to_json(f))) == setsep_to_json(f));

  ParsedInput p3 = parse_input(fixture("p3.edges"));
  CHECK(p3.format == "edge-list");
  CHECK(p3.u.ground_size() == 3);
  CHECK(p3.u.size() == fixtures::path_graph(3).size());
}

TEST_CASE("schema violations carry a field pointer") {
  CHECK_THROWS_AS(parse_input_text("{\"elements\": [{\"id\": 0}]}", "bad.json"),
                  ParseError);
  try {
    parse_input_text("{\"elements\": [{\"id\": 0}]}", "bad.json");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("elements[0]") != std::string::npos);
  }
  // Malformed involution pair: 0* = 1 but 1* = 1.
  CHECK_THROWS_AS(
      parse_input_text("{\"elements\": [{\"id\": 0, \"inv\": 1},"
                       "{\"id\": 1, \"inv\": 1}], \"leq\": [[0, 0], [1, 1]]}",
                       "bad.json"),
      ParseError);
  CHECK_THROWS_AS(parse_edge_list("0 1\n2\n"), ParseError);
  CHECK_THROWS_AS(parse_input_text("{\"what\": 1}", "odd.json"), ParseError);
}

TEST_CASE("nested.v1 certificates re-verify after a reload") {
  ParsedInput in = parse_input(fixture("example42.json"));
  SepSystem sys = in.system();
  auto res = tot_submodular(sys);
  json j = nested_to_json(res.nested);
  NestedSet back = nested_from_json(j);
  REQUIRE(back.labels == res.nested.labels);
  REQUIRE(back.certs.size() == res.nested.certs.size());
  auto profiles = enumerate_profiles(sys);
  for (const auto& c : back.certs) {
    CHECK(profiles[c.p].o.contains(c.sep));
    CHECK(profiles[c.q].o.contains(in.u.inv(c.sep)));
    CHECK(in.u.order(c.sep) == c.order);
  }
  CHECK(canonical_bytes(j) == canonical_bytes(nested_to_json(back)));
}

TEST_CASE("stree.v1 round trip and DOT export parse-back") {
  ParsedInput in = parse_input(fixture("example42.json"));
  auto res = tot_submodular(in.system());
  json j = stree_to_json(res.tree);
  STree back = stree_from_json(j);
  CHECK(back.n_nodes == res.tree.n_nodes);
  REQUIRE(back.n_edges() == res.tree.n_edges());
  for (int i = 0; i < back.n_edges(); ++i) {
    CHECK(back.edges[i].a == res.tree.edges[i].a);
    CHECK(back.edges[i].b == res.tree.edges[i].b);
    CHECK(back.edges[i].label_ab == res.tree.edges[i].label_ab);
  }

  std::string dot = stree_to_dot(res.tree, in.u);
  CHECK(dot.rfind("graph stree {", 0) == 0);
  int nodes = 0, edges = 0;
  std::istringstream ss(dot);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.find(" -- ") != std::string::npos) ++edges;
    else if (line.find("[label=") != std::string::npos) ++nodes;
  }
  CHECK(nodes == res.tree.n_nodes);
  CHECK(edges == res.tree.n_edges());
  // Node annotations carry the star descriptions.
  CHECK(dot.find(in.u.describe(res.tree.edges[0].label_ab)) != std::string::npos);
}

TEST_CASE("duality.v1 and family.v1 serialization") {
  ParsedInput in = parse_input(fixture("chain2.json"));
  SepSystem sys = in.system();
  std::vector<Star> members;
  for (Sep s : sys.elems) members.push_back({s});
  StarFamily fam = build_explicit(sys, members);
  auto res = solve_duality(sys, fam, DualityMode::Verify);
  json j = duality_to_json(res);
  CHECK(j["outcome"] == "tree");
  CHECK(j["certificates"]["exactly_one_checked"] == true);
  CHECK(j.contains("tree"));

  json fj = family_to_json(fam);
  StarFamily back = family_from_json(fj, sys);
  CHECK(family_to_json(back) == fj);
}

TEST_CASE("emission is deterministic byte for byte") {
  ParsedInput in = parse_input(fixture("mixed.json"));
  EnumOptions eo;
  eo.guard_override = 64;
  auto mp1 = collect_mixed_profiles(in.u, {1, 2}, eo);
  auto r1 = tot_mixed(in.u, mp1.profiles, /*efficient=*/true);
  auto mp2 = collect_mixed_profiles(in.u, {1, 2}, eo);
  auto r2 = tot_mixed(in.u, mp2.profiles, /*efficient=*/true);
  CHECK(canonical_bytes(nested_to_json(r1.nested)) ==
        canonical_bytes(nested_to_json(r2.nested)));
  CHECK(canonical_bytes(stree_to_json(r1.tree)) ==
        canonical_bytes(stree_to_json(r2.tree)));
  CHECK(digest_bytes(canonical_bytes(nested_to_json(r1.nested))) ==
        digest_bytes(canonical_bytes(nested_to_json(r2.nested))));
  // Two distinct orders survive the trip through the file format.
  bool low = false, high = false;
  for (const auto& p : mp1.profiles) (p.k == 1 ? low : high) = true;
  CHECK(low);
  CHECK(high);
}

TEST_CASE("cap overrides reject garbage and apply cleanly") {
  Caps saved = default_caps();
  setenv("TANGLE_CAP_MAX_UNORIENTED", "123", 1);
  apply_env_caps();
  CHECK(default_caps().max_unoriented == 123);
  setenv("TANGLE_CAP_MAX_UNORIENTED", "nope", 1);
  CHECK_THROWS_AS(apply_env_caps(), ParseError);
  unsetenv("TANGLE_CAP_MAX_UNORIENTED");
  default_caps() = saved;
}
