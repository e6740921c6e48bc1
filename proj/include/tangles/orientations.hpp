#pragma once

// Orientations of a separation system: backtracking enumeration with
// consistency / profile-property pruning, classification predicates,
// distinguishers and weak orientations.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tangles/core.hpp"

namespace tangles {

struct EnumGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An antisymmetric total orientation of a separation system.
struct Orientation {
  const SepSystem* sys = nullptr;
  std::vector<Sep> elems;          // sorted by id
  std::vector<std::uint8_t> has;   // indexed by universe handle

  bool contains(Sep s) const { return has[s] != 0; }
  const Universe& u() const { return sys->u(); }

  static Orientation of(const SepSystem& sys, std::vector<Sep> elems) {
    Orientation o;
    o.sys = &sys;
    o.has.assign(sys.u().size(), 0);
    for (Sep s : elems) o.has[s] = 1;
    std::sort(elems.begin(), elems.end());
    o.elems = std::move(elems);
    return o;
  }

  friend bool operator==(const Orientation& a, const Orientation& b) {
    return a.elems == b.elems;
  }
};

// A profile remembers the order bound of the system it orients. For systems
// without an order function k is meaningless and left at -1.
struct Profile {
  Orientation o;
  int k = -1;
};

struct OrientationClass {
  bool total = false;
  bool antisymmetric = false;
  bool consistent = false;
  bool regular = false;             // no cosmall member
  bool profile = false;             // consistency + the profile property
  std::optional<bool> robust;       // only with an order function
  std::optional<bool> strongly_robust;
};

namespace detail {

inline bool pair_consistent(const Universe& u, Sep a, Sep b) {
  // Forbidden: distinct underlying separations with a* <= b or b* <= a.
  if (u.canonical(a) == u.canonical(b)) return true;
  return !u.leq(u.inv(a), b) && !u.leq(u.inv(b), a);
}

}  // namespace detail

inline bool is_consistent(const Orientation& o) {
  const Universe& u = o.u();
  for (size_t i = 0; i < o.elems.size(); ++i)
    for (size_t j = i + 1; j < o.elems.size(); ++j)
      if (!detail::pair_consistent(u, o.elems[i], o.elems[j])) return false;
  return true;
}

inline bool has_profile_property(const Orientation& o) {
  const Universe& u = o.u();
  for (Sep a : o.elems)
    for (Sep b : o.elems)
      if (o.contains(u.meet(u.inv(a), u.inv(b)))) return false;
  return true;
}

inline OrientationClass classify_orientation(const Orientation& o) {
  const Universe& u = o.u();
  OrientationClass c;
  c.total = true;
  c.antisymmetric = true;
  for (Sep s : o.sys->elems)
    if (!o.contains(s) && !o.contains(u.inv(s))) c.total = false;
  for (Sep s : o.elems)
    if (!u.is_degenerate(s) && o.contains(u.inv(s))) c.antisymmetric = false;
  c.consistent = is_consistent(o);
  c.regular = true;
  for (Sep s : o.elems)
    if (u.cosmall(s)) c.regular = false;
  c.profile = c.consistent && has_profile_property(o);

  if (u.has_order()) {
    // Robust: for s in P and any r in the universe whose two corners with s
    // both have order below |s|, one of those corners lies in P.
    bool rob = true, strong = true;
    for (Sep s : o.elems) {
      for (Sep r = 0; r < u.size() && (rob || strong); ++r) {
        Sep c1 = u.join(s, r), c2 = u.join(s, u.inv(r));
        if (u.order(c1) < u.order(s) && u.order(c2) < u.order(s))
          if (!o.contains(c1) && !o.contains(c2)) rob = false;
        if (u.order(c1) <= u.order(s) && u.order(c2) <= u.order(s))
          if (!o.contains(c1) && !o.contains(c2)) strong = false;
      }
      if (!rob && !strong) break;
    }
    c.robust = rob;
    c.strongly_robust = strong;
  }
  return c;
}

struct EnumOptions {
  bool require_regular = false;
  bool require_profile = false;
  std::optional<int> guard_override;  // max unoriented separations to enumerate
};

// All antisymmetric total consistent orientations, in the deterministic
// order given by orienting separations sorted by (order, id), canonical
// orientation first. Degenerate separations admit a single self-inverse
// orientation, which breaks antisymmetry for no one but the profile check.
inline std::vector<Orientation> enumerate_consistent_orientations(
    const SepSystem& sys, const EnumOptions& opts = {}) {
  const Universe& u = sys.u();
  std::vector<Sep> reps = sys.unoriented_elems();
  int guard = opts.guard_override.value_or(default_caps().max_enum_unoriented);
  if (static_cast<int>(reps.size()) > guard)
    throw EnumGuardError("orientation enumeration guard: " +
                         std::to_string(reps.size()) + " unoriented separations " +
                         "(limit " + std::to_string(guard) + ")");

  std::vector<Orientation> out;
  std::vector<Sep> chosen;
  chosen.reserve(reps.size());

  auto ok_to_add = [&](Sep c) {
    for (Sep a : chosen)
      if (!detail::pair_consistent(u, a, c)) return false;
    if (opts.require_regular && u.cosmall(c)) return false;
    if (opts.require_profile) {
      // The profile property must survive on the extended set.
      if (u.is_degenerate(c)) return false;  // {c} alone already violates it
      auto in_chosen = [&](Sep x) {
        return std::find(chosen.begin(), chosen.end(), x) != chosen.end();
      };
      for (Sep a : chosen) {
        Sep m1 = u.meet(u.inv(a), u.inv(c));
        if (m1 == c || in_chosen(m1)) return false;
      }
      for (Sep a : chosen)
        for (Sep b : chosen)
          if (u.meet(u.inv(a), u.inv(b)) == c) return false;
    }
    return true;
  };

  auto rec = [&](auto&& self, size_t i) -> void {
    if (i == reps.size()) {
      out.push_back(Orientation::of(sys, chosen));
      return;
    }
    Sep r = reps[i];
    if (u.is_degenerate(r)) {
      if (ok_to_add(r)) {
        chosen.push_back(r);
        self(self, i + 1);
        chosen.pop_back();
      }
      return;
    }
    for (Sep c : {r, u.inv(r)}) {
      if (ok_to_add(c)) {
        chosen.push_back(c);
        self(self, i + 1);
        chosen.pop_back();
      }
    }
  };
  rec(rec, 0);
  return out;
}

inline std::vector<Profile> enumerate_profiles(const SepSystem& sys,
                                               bool regular_only = true,
                                               const EnumOptions& base = {}) {
  EnumOptions opts = base;
  opts.require_regular = regular_only;
  opts.require_profile = true;
  std::vector<Profile> out;
  int k = -1;
  if (sys.u().has_order()) {
    // Smallest k with S_k containing the system: 1 + max member order.
    for (Sep s : sys.elems) k = std::max(k, sys.u().order(s));
    k += 1;
  }
  for (auto& o : enumerate_consistent_orientations(sys, opts))
    out.push_back({std::move(o), k});
  return out;
}

struct WeakOrientationResult {
  bool forward = false, backward = false;
  Sep witness_forward = kNoSep, witness_backward = kNoSep;
};

// O weakly orients s forwards if some r in O has s <= r.
inline WeakOrientationResult weak_orientation(const Orientation& o, Sep s) {
  const Universe& u = o.u();
  WeakOrientationResult res;
  for (Sep r : o.elems) {
    if (!res.forward && u.leq(s, r)) {
      res.forward = true;
      res.witness_forward = r;
    }
    if (!res.backward && u.leq(u.inv(s), r)) {
      res.backward = true;
      res.witness_backward = r;
    }
  }
  return res;
}

// Separations oriented oppositely by the two orientations, reported with the
// orientation chosen by o1 and sorted by (order, id).
inline std::vector<Sep> distinguishers(const Orientation& o1,
                                       const Orientation& o2) {
  const Universe& u = o1.u();
  std::vector<Sep> out;
  for (Sep s : o1.elems)
    if (o2.contains(u.inv(s)) && !u.is_degenerate(s)) out.push_back(s);
  if (u.has_order())
    std::stable_sort(out.begin(), out.end(), [&](Sep a, Sep b) {
      return std::pair(u.order(a), a) < std::pair(u.order(b), b);
    });
  return out;
}

inline std::vector<Sep> efficient_distinguishers(const Orientation& o1,
                                                 const Orientation& o2) {
  const Universe& u = o1.u();
  std::vector<Sep> all = distinguishers(o1, o2);
  if (all.empty() || !u.has_order()) return all;
  int best = u.order(all.front());
  std::vector<Sep> out;
  for (Sep s : all)
    if (u.order(s) == best) out.push_back(s);
  return out;
}

// Strong profile property: every separation of the universe is weakly
// oriented by the profile. Holds for profiles of distributive submodular
// universes; returns the first failing separation otherwise.
inline std::pair<bool, Sep> check_strong_profile_property(const Orientation& o) {
  const Universe& u = o.u();
  for (Sep s = 0; s < u.size(); ++s) {
    if (u.canonical(s) != s) continue;
    auto w = weak_orientation(o, s);
    if (!w.forward && !w.backward) return {false, s};
  }
  return {true, kNoSep};
}

}  // namespace tangles
