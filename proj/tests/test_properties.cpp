// Property-based checks for the structural lemmas the constructions rely
// on. Each case is one sampled instance of a lemma's hypothesis; every
// suite runs at least a thousand of them with zero tolerated failures.

#include "doctest.h"
#include "fixtures.hpp"
#include "tangles/tot.hpp"

using namespace tangles;

namespace {

bool includes_set(const Orientation& o, const Star& sigma) {
  for (Sep s : sigma)
    if (!o.contains(s)) return false;
  return true;
}

}  // namespace

TEST_CASE("corners of crossing pairs stay nested with common nestings") {
  std::mt19937 rng(101);
  long cases = 0, failures = 0;
  while (cases < 1000) {
    Universe u = fixtures::random_set_universe(rng, 8, /*with_order=*/false);
    for (Sep r = 0; r < u.size(); ++r)
      for (Sep s = 0; s < u.size(); ++s) {
        if (u.nested(r, s)) continue;
        auto cs = corners(r, s, u);
        for (Sep t = 0; t < u.size(); ++t) {
          if (!u.nested(t, r) || !u.nested(t, s)) continue;
          ++cases;
          for (Sep c : cs)
            if (!u.nested(t, c)) ++failures;
        }
      }
  }
  CHECK(cases >= 1000);
  CHECK(failures == 0);
}

TEST_CASE("splices keep joins cheap and emulate their base") {
  std::mt19937 rng(202);
  long cases = 0, failures = 0;
  while (cases < 1000) {
    Universe u = fixtures::random_set_universe(rng, 8);
    int kmax = 0;
    for (Sep s = 0; s < u.size(); ++s) kmax = std::max(kmax, u.order(s) + 1);
    for (int k = 1; k <= kmax; ++k) {
      SepSystem sk = restrict_Sk(u, k);
      for (Sep r : sk.elems) {
        auto cls = classify_separation(r, sk);
        if (cls.trivial || u.is_degenerate(r)) continue;
        for (Sep s : sk.elems) {
          if (!is_splice_for(s, r, u)) continue;
          bool emu = emulates(s, r, sk);
          for (Sep t = 0; t < u.size(); ++t) {
            if (!u.leq(r, t)) continue;
            ++cases;
            if (u.order(u.join(t, s)) > u.order(t)) ++failures;
            if (!emu) ++failures;
          }
        }
      }
    }
  }
  CHECK(cases >= 1000);
  CHECK(failures == 0);
}

TEST_CASE("a regular profile includes a set iff it includes its uncrossing") {
  std::mt19937 rng(303);
  long cases = 0, failures = 0;
  while (cases < 1000) {
    Universe u = fixtures::random_set_universe(rng, 8);
    SepSystem sys = SepSystem::whole(u);
    if (!is_structurally_submodular(sys)) continue;
    auto profiles = enumerate_profiles(sys);
    if (profiles.empty()) continue;
    for (int draw = 0; draw < 40; ++draw) {
      size_t size = 2 + rng() % 3;
      Star sigma;
      for (size_t i = 0; i < size; ++i)
        sigma.push_back(sys.elems[rng() % sys.elems.size()]);
      std::sort(sigma.begin(), sigma.end());
      sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
      Star star = uncross(sigma, sys);
      for (const auto& p : profiles) {
        ++cases;
        if (includes_set(p.o, star) && !includes_set(p.o, sigma)) ++failures;
        if (includes_set(p.o, sigma) && !includes_set(p.o, star)) ++failures;
      }
    }
  }
  CHECK(cases >= 1000);
  CHECK(failures == 0);
}

TEST_CASE("a regular profile including a star's shift includes the star") {
  std::mt19937 rng(404);
  long cases = 0, failures = 0;
  while (cases < 1000) {
    Universe u = fixtures::random_set_universe(rng, 8);
    SepSystem sys = SepSystem::whole(u);
    if (!is_structurally_submodular(sys)) continue;
    auto profiles = enumerate_profiles(sys);
    if (profiles.empty()) continue;
    for (int draw = 0; draw < 60; ++draw) {
      Star seed;
      size_t size = 2 + rng() % 2;
      for (size_t i = 0; i < size; ++i)
        seed.push_back(sys.elems[rng() % sys.elems.size()]);
      Star sigma = uncross(seed, sys);
      if (!is_star(sigma, u) || sigma.empty()) continue;
      Sep x = sigma[rng() % sigma.size()];
      Sep s0 = sys.elems[rng() % sys.elems.size()];
      Star shifted = shift_star(sigma, x, s0, u);
      if (!is_star(shifted, u)) continue;
      for (const auto& p : profiles) {
        if (!includes_set(p.o, shifted)) continue;
        ++cases;
        if (!includes_set(p.o, sigma)) ++failures;
      }
    }
  }
  CHECK(cases >= 1000);
  CHECK(failures == 0);
}

TEST_CASE("splice-shifts preserve the efficiency condition inside a profile") {
  std::mt19937 rng(505);
  long cases = 0, failures = 0;
  while (cases < 1000) {
    Universe u = fixtures::random_set_universe(rng, 8);
    int kmax = 0;
    for (Sep s = 0; s < u.size(); ++s) kmax = std::max(kmax, u.order(s) + 1);
    for (int k = 1; k <= kmax; ++k) {
      SepSystem sk = restrict_Sk(u, k);
      if (!is_structurally_submodular(sk)) continue;
      std::vector<Profile> profiles;
      try {
        profiles = enumerate_profiles(sk);
      } catch (const EnumGuardError&) {
        break;
      }
      for (const auto& p : profiles) {
        for (int draw = 0; draw < 20; ++draw) {
          Star seed;
          size_t size = 2 + rng() % 2;
          for (size_t i = 0; i < size; ++i)
            seed.push_back(p.o.elems[rng() % p.o.elems.size()]);
          Star sigma = uncross(seed, sk);
          if (!is_star(sigma, u) || sigma.empty()) continue;
          if (!includes_set(p.o, sigma) || !eff_ok(sigma, p.o)) continue;
          Sep x = sigma[rng() % sigma.size()];
          for (Sep r : sk.elems) {
            if (!u.leq(r, x) || u.is_degenerate(r)) continue;
            if (classify_separation(r, sk).trivial) continue;
            for (Sep s : sk.elems) {
              if (!u.leq(r, s) || !is_splice_for(s, r, u)) continue;
              Star shifted = shift_star(sigma, x, s, u);
              if (!is_star(shifted, u)) continue;
              bool inside = true;
              for (Sep y : shifted) inside &= sk.contains(y);
              if (!inside || !includes_set(p.o, shifted)) continue;
              ++cases;
              if (!eff_ok(shifted, p.o)) ++failures;
            }
          }
        }
      }
    }
  }
  CHECK(cases >= 1000);
  CHECK(failures == 0);
}

TEST_CASE("profiles of distributive universes never orient above two inverses") {
  std::mt19937 rng(606);
  long cases = 0, failures = 0;
  while (cases < 1000) {
    Universe u = fixtures::random_set_universe(rng, 8);
    if (!u.check_laws(true).ok()) continue;
    SepSystem sys = SepSystem::whole(u);
    if (!is_structurally_submodular(sys)) continue;
    // Regular profiles only: an irregular profile may contain a cosmall
    // separation r, and t = r then sits above inv(r) = inv(r) v inv(r).
    for (const auto& p : enumerate_profiles(sys)) {
      CHECK(check_strong_profile_property(p.o).first);
      for (Sep r : p.o.elems)
        for (Sep s : p.o.elems) {
          Sep top = u.join(u.inv(r), u.inv(s));
          ++cases;
          for (Sep t : p.o.elems)
            if (u.leq(top, t)) ++failures;
        }
    }
  }
  CHECK(cases >= 1000);
  CHECK(failures == 0);
}
