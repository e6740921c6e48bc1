#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "tangles/orientations.hpp"

using namespace tangles;

namespace {

// Brute-force reference: try all 2^m orientation choices.
std::vector<Orientation> brute_orientations(const SepSystem& sys,
                                            bool regular, bool profile) {
  const Universe& u = sys.u();
  auto reps = sys.unoriented_elems();
  std::vector<Orientation> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << reps.size()); ++bits) {
    std::vector<Sep> elems;
    bool skip = false;
    for (size_t i = 0; i < reps.size(); ++i) {
      Sep c = (bits >> i & 1) ? u.inv(reps[i]) : reps[i];
      if (u.is_degenerate(reps[i]) && (bits >> i & 1)) skip = true;  // dedupe
      elems.push_back(c);
    }
    if (skip) continue;
    Orientation o = Orientation::of(sys, elems);
    auto c = classify_orientation(o);
    if (!c.consistent) continue;
    if (regular && !c.regular) continue;
    if (profile && !c.profile) continue;
    out.push_back(std::move(o));
  }
  return out;
}

std::set<std::vector<Sep>> as_set(const std::vector<Orientation>& os) {
  std::set<std::vector<Sep>> s;
  for (const auto& o : os) s.insert(o.elems);
  return s;
}

}  // namespace

TEST_CASE("six point system has exactly six regular profiles, one per point") {
  Universe u = fixtures::six_points(false, /*closed=*/true);
  SepSystem sys = fixtures::six_point_system(u);
  REQUIRE(sys.unoriented_elems().size() == 7);
  auto profiles = enumerate_profiles(sys, /*regular_only=*/true);
  REQUIRE(profiles.size() == 6);

  // Independent construction: orient every bipartition towards the point.
  std::set<std::vector<Sep>> expected;
  for (int v = 0; v < 6; ++v) {
    std::vector<Sep> elems;
    for (Sep s : sys.elems)
      if (u.sides(s).side_b >> v & 1) elems.push_back(s);
    // Exactly one orientation per unoriented separation (proper bipartitions).
    REQUIRE(elems.size() == 7);
    std::sort(elems.begin(), elems.end());
    expected.insert(elems);
  }
  CHECK(as_set([&] {
          std::vector<Orientation> os;
          for (auto& p : profiles) os.push_back(p.o);
          return os;
        }()) == expected);

  for (const auto& p : profiles) {
    auto c = classify_orientation(p.o);
    CHECK(c.total);
    CHECK(c.antisymmetric);
    CHECK(c.consistent);
    CHECK(c.regular);
    CHECK(c.profile);
  }
}

TEST_CASE("backtracking enumeration matches brute force on random universes") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    Universe u = fixtures::random_set_universe(rng, 8);
    SepSystem sys = SepSystem::whole(u);
    for (bool regular : {false, true}) {
      EnumOptions opts;
      opts.require_regular = regular;
      auto fast = enumerate_consistent_orientations(sys, opts);
      auto slow = brute_orientations(sys, regular, false);
      CHECK(as_set(fast) == as_set(slow));

      opts.require_profile = true;
      auto fastp = enumerate_consistent_orientations(sys, opts);
      auto slowp = brute_orientations(sys, regular, true);
      CHECK(as_set(fastp) == as_set(slowp));
    }
  }
}

TEST_CASE("enumeration guard triggers and can be overridden") {
  Universe u = fixtures::path_graph(5);
  SepSystem sys = SepSystem::whole(u);
  REQUIRE(static_cast<int>(sys.unoriented_elems().size()) > 26);
  CHECK_THROWS_AS(enumerate_consistent_orientations(sys), EnumGuardError);
  EnumOptions opts;
  opts.guard_override = 1000;
  opts.require_profile = true;
  opts.require_regular = true;
  CHECK_NOTHROW(enumerate_consistent_orientations(sys, opts));
}

TEST_CASE("profiles of a chain are its consistent cut orientations") {
  Universe u = fixtures::chain(3);
  SepSystem sys = SepSystem::whole(u);
  auto all = enumerate_consistent_orientations(sys);
  // Orienting below a threshold forward and above backward; the all-backward
  // choice is inconsistent because the bottom points below everything.
  CHECK(all.size() == 4);
  for (const auto& o : all) CHECK(classify_orientation(o).consistent);
}

TEST_CASE("weak orientation: witnesses live in the orientation") {
  Universe u = fixtures::six_points(false, /*closed=*/true);
  SepSystem sys = fixtures::six_point_system(u);
  auto profiles = enumerate_profiles(sys);
  for (const auto& p : profiles) {
    for (Sep s = 0; s < u.size(); ++s) {
      auto w = weak_orientation(p.o, s);
      if (p.o.contains(s)) CHECK(w.forward);  // witnessed by itself
      if (w.forward) CHECK(u.leq(s, w.witness_forward));
      if (w.backward) CHECK(u.leq(u.inv(s), w.witness_backward));
    }
  }
}

TEST_CASE("distinguishers are symmetric and efficient ones have minimum order") {
  // Two disjoint triangles: one regular 2-profile per triangle.
  Universe u = tangles::build_graph_universe(
      6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  SepSystem sk = restrict_Sk(u, 2);
  EnumOptions opts;
  opts.guard_override = 1000;
  auto profiles = enumerate_profiles(sk, true, opts);
  REQUIRE(profiles.size() >= 2);
  for (size_t i = 0; i < profiles.size(); ++i)
    for (size_t j = i + 1; j < profiles.size(); ++j) {
      auto d12 = distinguishers(profiles[i].o, profiles[j].o);
      auto d21 = distinguishers(profiles[j].o, profiles[i].o);
      REQUIRE(!d12.empty());
      CHECK(d12.size() == d21.size());
      std::set<Sep> inv12;
      for (Sep s : d12) inv12.insert(u.inv(s));
      CHECK(inv12 == std::set<Sep>(d21.begin(), d21.end()));

      auto eff = efficient_distinguishers(profiles[i].o, profiles[j].o);
      REQUIRE(!eff.empty());
      int best = u.order(eff.front());
      for (Sep s : d12) CHECK(u.order(s) >= best);
      for (Sep s : eff) CHECK(u.order(s) == best);
    }
}

TEST_CASE("K3 has a unique regular 2-profile") {
  // S_2 of the triangle consists of the cuts ({v},V) and the trivial split;
  // pointing at a single vertex would use the cosmall (V,{v}), so the only
  // regular profile is the one pointing at the triangle itself.
  Universe u = fixtures::complete_graph(3);
  SepSystem sk = restrict_Sk(u, 2);
  auto profiles = enumerate_profiles(sk);
  REQUIRE(profiles.size() == 1);
  for (Sep s : profiles[0].o.elems) CHECK(u.small(s));
}
