#pragma once

// Stars of separations and families of them: uncrossing, shifting,
// emulation, splices, the efficiency filter, and the family kinds used by
// the duality solver and the tree-of-tangles constructions.

#include <functional>
#include <optional>
#include <set>

#include "tangles/core.hpp"
#include "tangles/orientations.hpp"

namespace tangles {

// A star (or, for the raw family kinds, just a set) of oriented
// separations, sorted by id, no duplicates.
using Star = std::vector<Sep>;

inline Star make_star(std::vector<Sep> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return elems;
}

struct StarReport {
  bool pairwise = false;       // s <= t* for all distinct members
  bool antisymmetric = false;  // no s together with s*
  bool in_system = false;
  bool ok() const { return pairwise && antisymmetric; }
};

inline StarReport validate_star(const Star& sigma, const SepSystem& sys) {
  const Universe& u = sys.u();
  StarReport rep;
  rep.pairwise = true;
  rep.antisymmetric = true;
  rep.in_system = true;
  for (Sep s : sigma) {
    if (!sys.contains(s)) rep.in_system = false;
    for (Sep t : sigma) {
      if (s == t) continue;
      if (t == u.inv(s) && !u.is_degenerate(s)) rep.antisymmetric = false;
      if (!u.leq(s, u.inv(t))) rep.pairwise = false;
    }
  }
  return rep;
}

inline bool is_star(const Star& sigma, const Universe& u) {
  for (Sep s : sigma)
    for (Sep t : sigma)
      if (s != t && !u.leq(s, u.inv(t))) return false;
  return true;
}

// Drop non-maximal elements (ties keep the smaller id, but equal elements
// were deduplicated already).
inline Star max_elements(const Star& sigma, const Universe& u) {
  Star out;
  for (Sep s : sigma) {
    bool dominated = false;
    for (Sep t : sigma)
      if (s != t && u.leq(s, t)) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(s);
  }
  return out;
}

struct StarError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Repeatedly uncross the first crossing pair (in id order): replace r by
// r ^ s* or s by r* ^ s, whichever lies in the system (first preferred).
// Terminates because each replacement is strictly decreasing. The result is
// normalized to its maximal elements.
inline Star uncross(Star sigma, const SepSystem& sys) {
  const Universe& u = sys.u();
  sigma = make_star(std::move(sigma));
  for (;;) {
    bool changed = false;
    for (size_t i = 0; i < sigma.size() && !changed; ++i)
      for (size_t j = i + 1; j < sigma.size() && !changed; ++j) {
        Sep r = sigma[i], s = sigma[j];
        if (u.nested(r, s)) continue;
        Sep c1 = u.meet(r, u.inv(s));  // replaces r
        Sep c2 = u.meet(u.inv(r), s);  // replaces s
        if (sys.contains(c1))
          sigma[i] = c1;
        else if (sys.contains(c2))
          sigma[j] = c2;
        else
          throw StarError("uncross: neither corner lies in the system");
        sigma = make_star(std::move(sigma));
        changed = true;
      }
    if (!changed) break;
  }
  return max_elements(sigma, u);
}

// sigma_x^{s0}: x joins with s0, every other member meets with s0*.
inline Star shift_star(const Star& sigma, Sep x, Sep s0, const Universe& u) {
  Star out;
  for (Sep y : sigma) out.push_back(y == x ? u.join(x, s0) : u.meet(y, u.inv(s0)));
  return make_star(std::move(out));
}

// s emulates r in the system: s >= r and joining s with anything >= r
// (except r*) stays inside.
inline bool emulates(Sep s, Sep r, const SepSystem& sys) {
  const Universe& u = sys.u();
  if (!u.leq(r, s)) return false;
  for (Sep t : sys.elems) {
    if (t == u.inv(r)) continue;
    if (u.leq(r, t) && !sys.contains(u.join(s, t))) return false;
  }
  return true;
}

// Splices: s >= r with no strictly cheaper separation between them.
inline bool is_splice_for(Sep s, Sep r, const Universe& u) {
  if (!u.leq(r, s) || !u.has_order()) return false;
  for (Sep t = 0; t < u.size(); ++t)
    if (u.leq(r, t) && u.leq(t, s) && u.order(t) < u.order(s)) return false;
  return true;
}

// Minimum-order (then lowest-id) element of the interval [r, s].
inline std::optional<Sep> splice_between(Sep r, Sep s, const Universe& u) {
  std::optional<Sep> best;
  for (Sep t = 0; t < u.size(); ++t) {
    if (!u.leq(r, t) || !u.leq(t, s)) continue;
    if (!best || u.order(t) < u.order(*best)) best = t;
  }
  return best;
}

// Fatness of a star inside S_k: how many members of each order, listed from
// order k-1 down to 0. Compared lexicographically.
inline std::vector<int> fatness(const Star& sigma, const Universe& u, int k) {
  std::vector<int> counts(k, 0);
  for (Sep s : sigma) counts[k - 1 - u.order(s)] += 1;
  return counts;
}

// The efficiency condition on a star inside a profile: no member is beaten
// by a cheaper profile member above it.
inline bool eff_ok(const Star& sigma, const Orientation& p) {
  const Universe& u = p.u();
  for (Sep s : sigma)
    for (Sep t : p.elems)
      if (u.leq(s, t) && u.order(t) < u.order(s)) return false;
  return true;
}

// --- families ------------------------------------------------------------

enum class FamilyKind {
  ProfileTriples,   // {r, s, (r v s)*} inside the system
  Cosmall,          // {s} for cosmall s
  MaxSets,          // maximal elements of each profile
  DeltaSets,        // minimum distinguishing subsets (computed upstream)
  UniqueProfile,    // stars included in at most one profile
  ShiftClosure,     // explicit uncrossed-and-shift-closed family
  EfficientUnique,  // unique-profile stars that are efficient in their profile
  EfficientSized,   // ditto with per-profile size pins
  WeaklyOriented,   // mixed-order stars over the whole universe
  Explicit,
};

struct StarFamily {
  FamilyKind kind = FamilyKind::Explicit;
  const SepSystem* sys = nullptr;       // ambient system (vS)
  std::vector<Profile> profiles;        // kinds that reference profiles
  std::vector<Star> members;            // explicit kinds, sorted
  std::vector<std::vector<int>> origins;  // ShiftClosure: indices into base
  std::vector<Star> base;                 // ShiftClosure: the seed family
  std::vector<int> size_pins;           // EfficientSized: per-profile sizes
  int nonprofile_size_cap = 3;          // EfficientSized: max(delta_e_max, 3)

  const Universe& u() const { return sys->u(); }

  bool is_explicit() const {
    return kind == FamilyKind::ProfileTriples || kind == FamilyKind::Cosmall ||
           kind == FamilyKind::MaxSets || kind == FamilyKind::DeltaSets ||
           kind == FamilyKind::ShiftClosure || kind == FamilyKind::Explicit;
  }

  // How many profiles include sigma as a subset of their orientation.
  int including_profiles(const Star& sigma) const {
    int n = 0;
    for (const auto& p : profiles) {
      bool inc = true;
      for (Sep s : sigma)
        if (!p.o.contains(s)) {
          inc = false;
          break;
        }
      if (inc) ++n;
    }
    return n;
  }

  // Index of the unique including profile, or -1.
  int including_profile(const Star& sigma) const {
    for (size_t i = 0; i < profiles.size(); ++i) {
      bool inc = true;
      for (Sep s : sigma)
        if (!profiles[i].o.contains(s)) {
          inc = false;
          break;
        }
      if (inc) return static_cast<int>(i);
    }
    return -1;
  }

  bool contains(const Star& sigma) const {
    if (sigma.empty()) return false;
    if (is_explicit())
      return std::binary_search(members.begin(), members.end(), sigma);

    const Universe& uu = u();
    for (Sep s : sigma)
      if (!sys->contains(s)) return false;
    auto rep = validate_star(sigma, *sys);
    if (!rep.pairwise || !rep.antisymmetric) return false;

    switch (kind) {
      case FamilyKind::UniqueProfile:
        return including_profiles(sigma) <= 1;
      case FamilyKind::EfficientUnique: {
        if (including_profiles(sigma) > 1) return false;
        int p = including_profile(sigma);
        return p < 0 || eff_ok(sigma, profiles[p].o);
      }
      case FamilyKind::EfficientSized: {
        if (including_profiles(sigma) > 1) return false;
        int p = including_profile(sigma);
        if (p < 0) return static_cast<int>(sigma.size()) <= nonprofile_size_cap;
        return eff_ok(sigma, profiles[p].o) &&
               static_cast<int>(sigma.size()) == size_pins[p];
      }
      case FamilyKind::WeaklyOriented: {
        if (including_profiles(sigma) > 1) return false;
        int p = including_profile(sigma);
        for (size_t i = 0; i < profiles.size(); ++i) {
          if (static_cast<int>(i) == p) continue;
          bool some_outward = false;
          for (Sep s : sigma)
            if (weak_orientation(profiles[i].o, uu.inv(s)).forward) {
              some_outward = true;
              break;
            }
          if (!some_outward) return false;
        }
        if (p >= 0) {
          // Only compare against cheaper profile members the profile's own
          // system knows about; mixed orders mean sigma need not sit in it.
          for (Sep s : sigma)
            for (Sep t : profiles[p].o.elems)
              if (uu.leq(s, t) && uu.order(t) < uu.order(s)) return false;
        }
        return true;
      }
      default:
        return false;
    }
  }

  // Visit every member containing r whose other elements pass elem_filter.
  // visit returns true to stop early; the function returns true if stopped.
  bool for_each_member_containing(
      Sep r, const std::function<bool(const Star&)>& visit,
      const std::function<bool(Sep)>& elem_filter = {}) const {
    auto pass = [&](Sep s) { return !elem_filter || elem_filter(s); };
    if (is_explicit()) {
      for (const auto& m : members) {
        if (!std::binary_search(m.begin(), m.end(), r)) continue;
        bool ok = true;
        for (Sep s : m)
          if (s != r && !pass(s)) {
            ok = false;
            break;
          }
        if (ok && visit(m)) return true;
      }
      return false;
    }

    const Universe& uu = u();
    if (!sys->contains(r)) return false;
    // Candidates compatible with r as a star partner.
    std::vector<Sep> cand;
    for (Sep s : sys->elems) {
      if (s == r || s == uu.inv(r)) continue;
      if (!pass(s)) continue;
      if (u().leq(s, uu.inv(r)) && u().leq(r, uu.inv(s))) cand.push_back(s);
    }
    Star cur{r};
    auto rec = [&](auto&& self, size_t i) -> bool {
      Star sorted = make_star(cur);
      if (contains(sorted) && visit(sorted)) return true;
      for (size_t j = i; j < cand.size(); ++j) {
        Sep s = cand[j];
        bool compatible = true;
        for (Sep t : cur)
          if (t == uu.inv(s) || !uu.leq(s, uu.inv(t)) || !uu.leq(t, uu.inv(s))) {
            compatible = false;
            break;
          }
        if (!compatible) continue;
        cur.push_back(s);
        if (self(self, j + 1)) return true;
        cur.pop_back();
      }
      return false;
    };
    return rec(rec, 0);
  }

  // All members, each once, sorted. For predicate kinds this enumerates
  // anchored at every minimum element; feasible only at desk scale.
  std::vector<Star> all_members() const {
    if (is_explicit()) return members;
    std::set<Star> seen;
    for (Sep r : sys->elems) {
      for_each_member_containing(r, [&](const Star& sigma) {
        if (sigma.front() == r) seen.insert(sigma);
        return false;
      });
    }
    return {seen.begin(), seen.end()};
  }
};

// s emulates r in the system for the family: every shift of a member at an
// element above r (with r* not in the member) stays in the family.
inline bool emulates_for(Sep s, Sep r, const SepSystem& sys,
                         const StarFamily& fam) {
  const Universe& u = sys.u();
  if (!emulates(s, r, sys)) return false;
  for (Sep x : sys.elems) {
    if (!u.leq(r, x) || x == u.inv(r)) continue;
    bool bad = fam.for_each_member_containing(x, [&](const Star& sigma) {
      if (std::binary_search(sigma.begin(), sigma.end(), u.inv(r)))
        return false;
      Star shifted = shift_star(sigma, x, s, u);
      return !fam.contains(shifted);
    });
    if (bad) return false;
  }
  return true;
}

// --- building the concrete kinds ----------------------------------------

inline std::vector<Star> dedupe_members(std::vector<Star> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return members;
}

inline StarFamily build_profile_triples(const SepSystem& sys) {
  const Universe& u = sys.u();
  StarFamily fam;
  fam.kind = FamilyKind::ProfileTriples;
  fam.sys = &sys;
  std::vector<Star> members;
  for (Sep r : sys.elems)
    for (Sep s : sys.elems) {
      Sep third = u.inv(u.join(r, s));
      if (sys.contains(third)) members.push_back(make_star({r, s, third}));
    }
  fam.members = dedupe_members(std::move(members));
  return fam;
}

inline StarFamily build_cosmall_singletons(const SepSystem& sys) {
  StarFamily fam;
  fam.kind = FamilyKind::Cosmall;
  fam.sys = &sys;
  for (Sep s : sys.elems)
    if (sys.u().cosmall(s)) fam.members.push_back({s});
  fam.members = dedupe_members(std::move(fam.members));
  return fam;
}

inline StarFamily build_max_sets(const SepSystem& sys,
                                 const std::vector<Profile>& profiles) {
  StarFamily fam;
  fam.kind = FamilyKind::MaxSets;
  fam.sys = &sys;
  fam.profiles = profiles;
  for (const auto& p : profiles)
    fam.members.push_back(max_elements(make_star(p.o.elems), sys.u()));
  fam.members = dedupe_members(std::move(fam.members));
  return fam;
}

inline StarFamily build_explicit(const SepSystem& sys, std::vector<Star> members,
                                 FamilyKind tag = FamilyKind::Explicit) {
  StarFamily fam;
  fam.kind = tag;
  fam.sys = &sys;
  fam.members = dedupe_members(std::move(members));
  return fam;
}

inline StarFamily build_unique_profile(const SepSystem& sys,
                                       std::vector<Profile> profiles) {
  StarFamily fam;
  fam.kind = FamilyKind::UniqueProfile;
  fam.sys = &sys;
  fam.profiles = std::move(profiles);
  return fam;
}

inline StarFamily build_efficient_unique(const SepSystem& sys,
                                         std::vector<Profile> profiles) {
  StarFamily fam;
  fam.kind = FamilyKind::EfficientUnique;
  fam.sys = &sys;
  fam.profiles = std::move(profiles);
  return fam;
}

inline StarFamily build_efficient_sized(const SepSystem& sys,
                                        std::vector<Profile> profiles,
                                        std::vector<int> size_pins) {
  StarFamily fam;
  fam.kind = FamilyKind::EfficientSized;
  fam.sys = &sys;
  fam.profiles = std::move(profiles);
  fam.size_pins = std::move(size_pins);
  int mx = 0;
  for (int d : fam.size_pins) mx = std::max(mx, d);
  fam.nonprofile_size_cap = std::max(mx, 3);
  return fam;
}

inline StarFamily build_weakly_oriented(const SepSystem& whole,
                                        std::vector<Profile> profiles) {
  StarFamily fam;
  fam.kind = FamilyKind::WeaklyOriented;
  fam.sys = &whole;
  fam.profiles = std::move(profiles);
  return fam;
}

// Uncross every member of an explicit family.
inline std::vector<Star> uncross_members(const std::vector<Star>& members,
                                         const SepSystem& sys) {
  std::vector<Star> out;
  for (const auto& m : members) out.push_back(uncross(m, sys));
  return dedupe_members(std::move(out));
}

// Materialized shift closure with origin tracking: every shift (any anchor, any
// target in the system) that stays inside the system is added. Origins track
// which seed members a star descends from; sizes never grow along the way.
inline StarFamily build_shift_closure(const SepSystem& sys,
                                      const std::vector<Star>& seed,
                                      int max_rounds = 64) {
  const Universe& u = sys.u();
  StarFamily fam;
  fam.kind = FamilyKind::ShiftClosure;
  fam.sys = &sys;
  fam.base = dedupe_members(seed);

  std::map<Star, std::set<int>> origin_of;
  for (size_t i = 0; i < fam.base.size(); ++i)
    origin_of[fam.base[i]].insert(static_cast<int>(i));

  auto in_system = [&](const Star& sigma) {
    for (Sep s : sigma)
      if (!sys.contains(s)) return false;
    auto rep = validate_star(sigma, sys);
    return rep.pairwise && rep.antisymmetric;
  };

  std::vector<Star> frontier = fam.base;
  for (int round = 0; !frontier.empty(); ++round) {
    if (round >= max_rounds) throw StarError("shift closure did not stabilize");
    std::vector<Star> next;
    for (const auto& sigma : frontier) {
      const auto& orig = origin_of[sigma];
      for (Sep x : sigma)
        for (Sep s0 : sys.elems) {
          Star shifted = shift_star(sigma, x, s0, u);
          if (!in_system(shifted)) continue;
          auto& dst = origin_of[shifted];
          size_t before = dst.size();
          bool existed = !dst.empty();
          dst.insert(orig.begin(), orig.end());
          if (!existed || dst.size() != before) next.push_back(shifted);
        }
    }
    frontier = dedupe_members(std::move(next));
  }

  for (auto& [sigma, orig] : origin_of) {
    fam.members.push_back(sigma);
    fam.origins.emplace_back(orig.begin(), orig.end());
  }
  return fam;
}

struct FamilyDiagnostics {
  bool standard = false;            // contains {r*} for every trivial r
  bool closed_under_shifting = false;
  std::vector<Sep> non_standard_witness;
  std::optional<Star> shift_witness;
};

inline FamilyDiagnostics family_diagnostics(const StarFamily& fam) {
  const SepSystem& sys = *fam.sys;
  const Universe& u = sys.u();
  FamilyDiagnostics d;
  d.standard = true;
  for (Sep r : sys.elems) {
    auto c = classify_separation(r, sys);
    if (c.trivial && !fam.contains({u.inv(r)})) {
      d.standard = false;
      d.non_standard_witness.push_back(r);
    }
  }
  d.closed_under_shifting = true;
  for (const auto& sigma : fam.all_members()) {
    for (Sep x : sigma)
      for (Sep s0 : sys.elems) {
        Star shifted = shift_star(sigma, x, s0, u);
        bool inside = true;
        for (Sep s : shifted)
          if (!sys.contains(s)) inside = false;
        auto rep = validate_star(shifted, sys);
        if (!inside || !rep.pairwise || !rep.antisymmetric) continue;
        if (!fam.contains(shifted)) {
          d.closed_under_shifting = false;
          d.shift_witness = sigma;
          return d;
        }
      }
  }
  return d;
}

// F-critical: r sits in some member, but no member meets {r, r*} in exactly
// {r*}.
inline bool is_critical(Sep r, const StarFamily& fam) {
  const Universe& u = fam.u();
  bool in_some = fam.for_each_member_containing(r, [](const Star&) { return true; });
  if (!in_some) return false;
  bool has_counter = fam.for_each_member_containing(u.inv(r), [&](const Star& sigma) {
    return !std::binary_search(sigma.begin(), sigma.end(), r);
  });
  return !has_counter;
}

inline std::vector<Sep> critical_separations(const StarFamily& fam) {
  std::vector<Sep> out;
  for (Sep r : fam.sys->elems)
    if (is_critical(r, fam)) out.push_back(r);
  return out;
}

struct SeparabilityWitness {
  bool separable = true;
  Sep r1 = kNoSep, r2 = kNoSep;  // failing pair if not
};

// Critically separable: for critical r <= r' (with r and (r')* critical),
// some s0 between them emulates r forwards and r' backwards, both for the
// family.
inline SeparabilityWitness check_critically_separable(const StarFamily& fam) {
  const SepSystem& sys = *fam.sys;
  const Universe& u = sys.u();
  std::vector<Sep> crit = critical_separations(fam);
  std::vector<std::uint8_t> is_crit(u.size(), 0);
  for (Sep s : crit) is_crit[s] = 1;

  for (Sep r : crit)
    for (Sep rp : sys.elems) {
      if (!is_crit[u.inv(rp)]) continue;
      if (!u.leq(r, rp)) continue;
      bool found = false;
      for (Sep s0 : sys.elems) {
        if (!u.leq(r, s0) || !u.leq(s0, rp)) continue;
        if (emulates_for(s0, r, sys, fam) &&
            emulates_for(u.inv(s0), u.inv(rp), sys, fam)) {
          found = true;
          break;
        }
      }
      if (!found) return {false, r, rp};
    }
  return {};
}

// Tangle check: consistent antisymmetric total orientation avoiding every
// member of the family.
inline bool avoids_family(const Orientation& o, const StarFamily& fam) {
  for (Sep r : o.elems) {
    bool hit = fam.for_each_member_containing(
        r, [](const Star&) { return true; },
        [&](Sep s) { return o.contains(s); });
    if (hit) return false;
  }
  return true;
}

inline bool is_F_tangle(const Orientation& o, const StarFamily& fam) {
  auto c = classify_orientation(o);
  return c.total && c.antisymmetric && c.consistent && avoids_family(o, fam);
}

}  // namespace tangles
