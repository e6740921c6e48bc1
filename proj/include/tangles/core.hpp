#pragma once

// Finite universes of oriented separations: interned handles, dense
// leq/join/meet tables, classification predicates and the concrete
// constructors (explicit table, set separations, graph separations).

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tangles {

using Sep = int;  // oriented separation handle, 0..size()-1
constexpr Sep kNoSep = -1;

struct UniverseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Caps {
  // Size guards; env overrides live in io.hpp (TANGLE_CAP_*).
  int max_unoriented = 64;       // table/set builders
  int max_closure = 4096;        // lattice closure fixpoint
  int max_enum_unoriented = 26;  // orientation enumeration guard
};

inline Caps& default_caps() {
  static Caps caps;
  return caps;
}

struct LawReport {
  bool poset_ok = true;
  bool involution_ok = true;
  bool lattice_ok = true;
  bool demorgan_ok = true;
  std::optional<bool> order_ok;         // involution-invariance of the order
  std::optional<bool> submodular_ok;    // only when an order function exists
  std::optional<bool> distributive_ok;  // only when requested
  std::string detail;                   // first violation, human readable

  bool ok() const {
    return poset_ok && involution_ok && lattice_ok && demorgan_ok &&
           order_ok.value_or(true) && submodular_ok.value_or(true) &&
           distributive_ok.value_or(true);
  }
};

// A set separation (A,B) with A, B subsets of a ground set, A u B = V.
// Sides are bitmasks over ground elements (ground size <= 64).
struct SetSeparation {
  std::uint64_t side_a = 0;
  std::uint64_t side_b = 0;

  friend bool operator==(const SetSeparation&, const SetSeparation&) = default;
  friend auto operator<=>(const SetSeparation&, const SetSeparation&) = default;
};

class Universe {
 public:
  int size() const { return n_; }
  Sep inv(Sep s) const { return inv_[s]; }
  bool leq(Sep a, Sep b) const { return leq_[a * n_ + b] != 0; }
  Sep join(Sep a, Sep b) const { return join_[a * n_ + b]; }
  Sep meet(Sep a, Sep b) const { return meet_[a * n_ + b]; }

  bool has_order() const { return !order_.empty(); }
  int order(Sep s) const { return order_[s]; }

  bool is_degenerate(Sep s) const { return inv_[s] == s; }
  Sep canonical(Sep s) const { return std::min(s, inv_[s]); }

  // Canonical representatives of all unoriented separations, sorted by
  // (order, id) when an order function exists, else by id.
  std::vector<Sep> unoriented() const {
    std::vector<Sep> out;
    for (Sep s = 0; s < n_; ++s)
      if (canonical(s) == s) out.push_back(s);
    if (has_order()) {
      std::stable_sort(out.begin(), out.end(), [&](Sep a, Sep b) {
        return std::pair(order_[a], a) < std::pair(order_[b], b);
      });
    }
    return out;
  }

  bool comparable(Sep a, Sep b) const { return leq(a, b) || leq(b, a); }

  // Nested iff some orientation pair is comparable; crossing otherwise.
  bool nested(Sep r, Sep s) const {
    return comparable(r, s) || comparable(r, inv(s));
  }

  std::array<Sep, 4> corners(Sep r, Sep s) const {
    return {join(r, s), join(r, inv(s)), join(inv(r), s), join(inv(r), inv(s))};
  }

  bool small(Sep s) const { return leq(s, inv(s)); }
  bool cosmall(Sep s) const { return leq(inv(s), s); }

  // Optional set-separation payload (set and graph universes).
  bool has_sides() const { return !sides_.empty(); }
  const SetSeparation& sides(Sep s) const { return sides_[s]; }
  int ground_size() const { return static_cast<int>(ground_names_.size()); }
  const std::vector<std::string>& ground_names() const { return ground_names_; }

  std::string describe(Sep s) const {
    if (!has_sides()) return "#" + std::to_string(s);
    auto side = [&](std::uint64_t m) {
      std::string out = "{";
      bool first = true;
      for (int v = 0; v < ground_size(); ++v)
        if (m >> v & 1) {
          if (!first) out += ",";
          out += ground_names_[v];
          first = false;
        }
      return out + "}";
    };
    return "(" + side(sides_[s].side_a) + "," + side(sides_[s].side_b) + ")";
  }

  // --- construction ------------------------------------------------------

  // Raw ingredients; finalize() computes missing tables and validates.
  struct Builder {
    std::vector<Sep> inv;
    std::vector<std::uint8_t> leq;  // n*n, required
    std::vector<Sep> join, meet;    // n*n each, or empty to derive from leq
    std::vector<int> order;         // empty = no order function
    std::vector<SetSeparation> sides;
    std::vector<std::string> ground_names;
  };

  // Throws UniverseError naming the first violated law.
  static Universe finalize(Builder b);

  LawReport check_laws(bool check_distributive = false) const;

 private:
  int n_ = 0;
  std::vector<Sep> inv_;
  std::vector<std::uint8_t> leq_;
  std::vector<Sep> join_, meet_;
  std::vector<int> order_;
  std::vector<SetSeparation> sides_;
  std::vector<std::string> ground_names_;
};

// A separation system inside a universe: involution-closed member set.
struct SepSystem {
  const Universe* universe = nullptr;
  std::vector<std::uint8_t> member;  // size universe->size()
  std::vector<Sep> elems;            // all oriented members, sorted (order, id)

  bool contains(Sep s) const { return member[s] != 0; }
  const Universe& u() const { return *universe; }

  std::vector<Sep> unoriented_elems() const {
    std::vector<Sep> out;
    for (Sep s : elems)
      if (universe->canonical(s) == s) out.push_back(s);
    return out;
  }

  static SepSystem of(const Universe& u, const std::vector<Sep>& members) {
    SepSystem sys;
    sys.universe = &u;
    sys.member.assign(u.size(), 0);
    for (Sep s : members) {
      sys.member[s] = 1;
      sys.member[u.inv(s)] = 1;  // close under involution
    }
    for (Sep s = 0; s < u.size(); ++s)
      if (sys.member[s]) sys.elems.push_back(s);
    if (u.has_order()) {
      std::stable_sort(sys.elems.begin(), sys.elems.end(), [&](Sep a, Sep b) {
        return std::pair(u.order(a), a) < std::pair(u.order(b), b);
      });
    }
    return sys;
  }

  static SepSystem whole(const Universe& u) {
    std::vector<Sep> all(u.size());
    for (Sep s = 0; s < u.size(); ++s) all[s] = s;
    return of(u, all);
  }
};

struct SepClassification {
  bool small = false;
  bool cosmall = false;
  bool trivial = false;
  bool cotrivial = false;
  bool degenerate = false;
};

inline SepClassification classify_separation(Sep s, const SepSystem& sys) {
  const Universe& u = sys.u();
  SepClassification c;
  c.degenerate = u.is_degenerate(s);
  c.small = u.small(s);
  c.cosmall = u.cosmall(s);
  // Trivial: some unoriented r != s in the system with s <= r and s <= r*.
  for (Sep r : sys.elems) {
    if (u.canonical(r) == u.canonical(s)) continue;
    if (u.leq(s, r) && u.leq(s, u.inv(r))) {
      c.trivial = true;
      break;
    }
  }
  for (Sep r : sys.elems) {
    if (u.canonical(r) == u.canonical(s)) continue;
    if (u.leq(u.inv(s), r) && u.leq(u.inv(s), u.inv(r))) {
      c.cotrivial = true;
      break;
    }
  }
  return c;
}

inline bool is_nested(Sep r, Sep s, const Universe& u) { return u.nested(r, s); }

// At least one of join/meet of every member pair stays in the system.
inline bool is_structurally_submodular(const SepSystem& sys) {
  const Universe& u = sys.u();
  for (Sep a : sys.elems)
    for (Sep b : sys.elems)
      if (!sys.contains(u.join(a, b)) && !sys.contains(u.meet(a, b)))
        return false;
  return true;
}

inline SepSystem restrict_Sk(const Universe& u, int k) {
  if (!u.has_order())
    throw UniverseError("restrict_Sk: universe has no order function");
  std::vector<Sep> members;
  for (Sep s = 0; s < u.size(); ++s)
    if (u.order(s) < k) members.push_back(s);
  return SepSystem::of(u, members);
}

// --- Universe::finalize --------------------------------------------------

inline Universe Universe::finalize(Builder b) {
  Universe u;
  const int n = static_cast<int>(b.inv.size());
  u.n_ = n;
  if (static_cast<int>(b.leq.size()) != n * n)
    throw UniverseError("leq table has wrong size");

  auto leq = [&](Sep a, Sep c) { return b.leq[a * n + c] != 0; };

  // Involution sanity and poset laws first; everything else builds on them.
  for (Sep s = 0; s < n; ++s) {
    if (b.inv[s] < 0 || b.inv[s] >= n || b.inv[b.inv[s]] != s)
      throw UniverseError("involution is not an involution at element " +
                          std::to_string(s));
  }
  for (Sep a = 0; a < n; ++a) {
    if (!leq(a, a)) throw UniverseError("leq not reflexive");
    for (Sep c = 0; c < n; ++c) {
      if (a != c && leq(a, c) && leq(c, a))
        throw UniverseError("leq not antisymmetric");
      for (Sep d = 0; d < n; ++d)
        if (leq(a, c) && leq(c, d) && !leq(a, d))
          throw UniverseError("leq not transitive");
    }
  }
  for (Sep a = 0; a < n; ++a)
    for (Sep c = 0; c < n; ++c)
      if (leq(a, c) != leq(b.inv[c], b.inv[a]))
        throw UniverseError("involution is not order-reversing");

  // Derive join/meet as lub/glb when not given.
  auto derive = [&](bool join_op) {
    std::vector<Sep> table(n * n, kNoSep);
    for (Sep a = 0; a < n; ++a)
      for (Sep c = 0; c < n; ++c) {
        Sep best = kNoSep;
        for (Sep x = 0; x < n; ++x) {
          bool bound = join_op ? (leq(a, x) && leq(c, x))
                               : (leq(x, a) && leq(x, c));
          if (!bound) continue;
          if (best == kNoSep)
            best = x;
          else if (join_op ? leq(x, best) : leq(best, x))
            best = x;
        }
        if (best == kNoSep)
          throw UniverseError(std::string(join_op ? "join" : "meet") +
                              " undefined: no bound for a pair");
        // best must actually be least/greatest, not just minimal/maximal.
        for (Sep x = 0; x < n; ++x) {
          bool bound = join_op ? (leq(a, x) && leq(c, x))
                               : (leq(x, a) && leq(x, c));
          if (bound && !(join_op ? leq(best, x) : leq(x, best)))
            throw UniverseError(std::string(join_op ? "join" : "meet") +
                                " undefined: bounds have no extremum");
        }
        table[a * n + c] = best;
      }
    return table;
  };

  if (b.join.empty()) b.join = derive(true);
  if (b.meet.empty()) b.meet = derive(false);
  if (static_cast<int>(b.join.size()) != n * n ||
      static_cast<int>(b.meet.size()) != n * n)
    throw UniverseError("join/meet table has wrong size");

  u.inv_ = std::move(b.inv);
  u.leq_ = std::move(b.leq);
  u.join_ = std::move(b.join);
  u.meet_ = std::move(b.meet);
  u.order_ = std::move(b.order);
  u.sides_ = std::move(b.sides);
  u.ground_names_ = std::move(b.ground_names);

  if (!u.order_.empty() && static_cast<int>(u.order_.size()) != n)
    throw UniverseError("order function has wrong size");

  LawReport rep = u.check_laws();
  if (!rep.lattice_ok) throw UniverseError("non-lattice join/meet: " + rep.detail);
  if (!rep.involution_ok)
    throw UniverseError("non-order-reversing involution: " + rep.detail);
  if (!rep.demorgan_ok) throw UniverseError("DeMorgan failure: " + rep.detail);
  if (rep.order_ok && !*rep.order_ok)
    throw UniverseError("order not involution-invariant: " + rep.detail);
  return u;
}

inline LawReport Universe::check_laws(bool check_distributive) const {
  LawReport rep;
  const int n = n_;
  auto fail = [&](bool& flag, const std::string& msg) {
    if (rep.detail.empty()) rep.detail = msg;
    flag = false;
  };

  for (Sep a = 0; a < n && rep.poset_ok; ++a) {
    if (!leq(a, a)) fail(rep.poset_ok, "leq not reflexive");
    for (Sep c = 0; c < n && rep.poset_ok; ++c) {
      if (a != c && leq(a, c) && leq(c, a))
        fail(rep.poset_ok, "leq not antisymmetric");
      for (Sep d = 0; d < n; ++d)
        if (leq(a, c) && leq(c, d) && !leq(a, d)) {
          fail(rep.poset_ok, "leq not transitive");
          break;
        }
    }
  }

  for (Sep a = 0; a < n && rep.involution_ok; ++a) {
    if (inv_[inv_[a]] != a) fail(rep.involution_ok, "inv(inv) != id");
    for (Sep c = 0; c < n; ++c)
      if (leq(a, c) != leq(inv_[c], inv_[a])) {
        fail(rep.involution_ok, "involution not order-reversing at (" +
                                    std::to_string(a) + "," + std::to_string(c) + ")");
        break;
      }
  }

  for (Sep a = 0; a < n && rep.lattice_ok; ++a)
    for (Sep c = 0; c < n && rep.lattice_ok; ++c) {
      Sep j = join(a, c), m = meet(a, c);
      if (!(leq(a, j) && leq(c, j)))
        fail(rep.lattice_ok, "join is not an upper bound");
      if (!(leq(m, a) && leq(m, c)))
        fail(rep.lattice_ok, "meet is not a lower bound");
      for (Sep x = 0; x < n && rep.lattice_ok; ++x) {
        if (leq(a, x) && leq(c, x) && !leq(j, x))
          fail(rep.lattice_ok, "join is not least");
        if (leq(x, a) && leq(x, c) && !leq(x, m))
          fail(rep.lattice_ok, "meet is not greatest");
      }
    }

  for (Sep a = 0; a < n && rep.demorgan_ok; ++a)
    for (Sep c = 0; c < n; ++c)
      if (inv_[join(a, c)] != meet(inv_[a], inv_[c])) {
        fail(rep.demorgan_ok, "(s v t)* != s* ^ t* at (" + std::to_string(a) +
                                  "," + std::to_string(c) + ")");
        break;
      }

  if (has_order()) {
    rep.order_ok = true;
    for (Sep a = 0; a < n; ++a) {
      if (order_[a] < 0) fail(*rep.order_ok, "negative order");
      if (order_[a] != order_[inv_[a]]) {
        fail(*rep.order_ok, "order not involution-invariant at " + std::to_string(a));
        break;
      }
    }
    rep.submodular_ok = true;
    for (Sep a = 0; a < n && *rep.submodular_ok; ++a)
      for (Sep c = 0; c < n; ++c)
        if (order_[a] + order_[c] < order_[join(a, c)] + order_[meet(a, c)]) {
          fail(*rep.submodular_ok, "submodularity fails at (" + std::to_string(a) +
                                       "," + std::to_string(c) + ")");
          break;
        }
  }

  if (check_distributive) {
    rep.distributive_ok = true;
    for (Sep a = 0; a < n && *rep.distributive_ok; ++a)
      for (Sep c = 0; c < n && *rep.distributive_ok; ++c)
        for (Sep d = 0; d < n; ++d)
          if (join(a, meet(c, d)) != meet(join(a, c), join(a, d))) {
            fail(*rep.distributive_ok, "distributivity fails");
            break;
          }
  }
  return rep;
}

inline LawReport check_universe_laws(const Universe& u,
                                     bool check_distributive = false) {
  return u.check_laws(check_distributive);
}

// --- builders ------------------------------------------------------------

struct TableUniverseSpec {
  struct Element {
    int id = 0;
    int inv = 0;
    std::optional<int> order;
  };
  std::vector<Element> elements;
  std::vector<std::pair<int, int>> leq;        // generating pairs; closure taken
  std::vector<std::array<int, 3>> join, meet;  // explicit tables, else derived
  bool derive_lattice = false;                 // "generate by closure"
};

inline Universe build_table_universe(const TableUniverseSpec& spec,
                                     const Caps& caps = default_caps()) {
  const int n = static_cast<int>(spec.elements.size());
  std::map<int, Sep> by_id;
  for (int i = 0; i < n; ++i) {
    if (by_id.count(spec.elements[i].id))
      throw UniverseError("duplicate element id");
    by_id[spec.elements[i].id] = i;
  }
  int unoriented = 0;
  for (const auto& e : spec.elements)
    if (e.id <= e.inv) ++unoriented;
  if (unoriented > caps.max_unoriented)
    throw UniverseError("universe exceeds the unoriented-separation cap");

  Universe::Builder b;
  b.inv.resize(n);
  bool any_order = false;
  for (const auto& e : spec.elements) any_order |= e.order.has_value();
  if (any_order) b.order.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const auto& e = spec.elements[i];
    if (!by_id.count(e.inv)) throw UniverseError("inverse refers to unknown id");
    b.inv[i] = by_id[e.inv];
    if (any_order) {
      if (!e.order) throw UniverseError("order given for some elements only");
      b.order[i] = *e.order;
    }
  }

  b.leq.assign(n * n, 0);
  for (int i = 0; i < n; ++i) b.leq[i * n + i] = 1;
  for (auto [lo, hi] : spec.leq) {
    if (!by_id.count(lo) || !by_id.count(hi))
      throw UniverseError("leq pair refers to unknown id");
    b.leq[by_id[lo] * n + by_id[hi]] = 1;
  }
  // Transitive closure of the generating relation.
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (b.leq[i * n + k])
        for (int j = 0; j < n; ++j)
          if (b.leq[k * n + j]) b.leq[i * n + j] = 1;

  auto load = [&](const std::vector<std::array<int, 3>>& triples,
                  std::vector<Sep>& table) {
    if (triples.empty()) return;
    table.assign(n * n, kNoSep);
    for (const auto& t : triples) {
      if (!by_id.count(t[0]) || !by_id.count(t[1]) || !by_id.count(t[2]))
        throw UniverseError("join/meet triple refers to unknown id");
      table[by_id[t[0]] * n + by_id[t[1]]] = by_id[t[2]];
    }
    for (Sep v : table)
      if (v == kNoSep) throw UniverseError("partial join/meet table");
  };
  if (!spec.derive_lattice) {
    load(spec.join, b.join);
    load(spec.meet, b.meet);
  }
  return Universe::finalize(std::move(b));
}

namespace detail {

inline Universe finalize_set_universe(std::vector<SetSeparation> elems,
                                      std::vector<std::string> names,
                                      bool with_order) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  const int n = static_cast<int>(elems.size());
  auto index_of = [&](const SetSeparation& s) {
    auto it = std::lower_bound(elems.begin(), elems.end(), s);
    return static_cast<Sep>(it - elems.begin());
  };

  Universe::Builder b;
  b.inv.resize(n);
  b.leq.assign(n * n, 0);
  for (int i = 0; i < n; ++i)
    b.inv[i] = index_of({elems[i].side_b, elems[i].side_a});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool le = (elems[i].side_a & ~elems[j].side_a) == 0 &&
                (elems[j].side_b & ~elems[i].side_b) == 0;
      b.leq[i * n + j] = le ? 1 : 0;
    }
  if (with_order) {
    b.order.resize(n);
    for (int i = 0; i < n; ++i)
      b.order[i] = std::popcount(elems[i].side_a & elems[i].side_b);
  }
  b.sides = std::move(elems);
  b.ground_names = std::move(names);
  // join/meet derived as lub/glb of the induced poset; for lattice-closed
  // element sets this coincides with the componentwise operations.
  return Universe::finalize(std::move(b));
}

}  // namespace detail

inline Universe build_set_universe(int ground_set_size,
                                   std::vector<SetSeparation> generators,
                                   bool close_under_lattice, bool with_order,
                                   const Caps& caps = default_caps(),
                                   std::vector<std::string> names = {}) {
  if (ground_set_size <= 0 || ground_set_size > 64)
    throw UniverseError("ground set size must be in 1..64");
  const std::uint64_t full = ground_set_size == 64
                                 ? ~std::uint64_t{0}
                                 : (std::uint64_t{1} << ground_set_size) - 1;
  std::vector<SetSeparation> elems;
  for (const auto& g : generators) {
    if ((g.side_a | g.side_b) != full)
      throw UniverseError("generator sides do not cover the ground set");
    elems.push_back(g);
    elems.push_back({g.side_b, g.side_a});
  }
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());

  if (close_under_lattice) {
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<SetSeparation> add;
      for (const auto& x : elems)
        for (const auto& y : elems) {
          SetSeparation j{x.side_a | y.side_a, x.side_b & y.side_b};
          SetSeparation m{x.side_a & y.side_a, x.side_b | y.side_b};
          for (const auto& c : {j, m})
            if (!std::binary_search(elems.begin(), elems.end(), c))
              add.push_back(c);
        }
      if (!add.empty()) {
        grew = true;
        elems.insert(elems.end(), add.begin(), add.end());
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        if (static_cast<int>(elems.size()) > caps.max_closure)
          throw UniverseError("lattice closure overflow");
      }
    }
  }
  if (static_cast<int>(elems.size()) > 2 * caps.max_unoriented)
    throw UniverseError("universe exceeds the unoriented-separation cap");

  if (names.empty())
    for (int v = 0; v < ground_set_size; ++v) names.push_back(std::to_string(v + 1));
  return detail::finalize_set_universe(std::move(elems), std::move(names), with_order);
}

// All vertex separations (A,B) of a simple graph: A u B = V(G), no edge
// between A\B and B\A, order |A n B|.
inline Universe build_graph_universe(int num_vertices,
                                     const std::vector<std::pair<int, int>>& edges,
                                     std::vector<std::string> names = {}) {
  if (num_vertices <= 0 || num_vertices > 20)
    throw UniverseError("graph universe supports 1..20 vertices");
  const std::uint64_t full = (std::uint64_t{1} << num_vertices) - 1;
  std::vector<SetSeparation> elems;
  // Each vertex goes to A only, B only, or both: iterate over (A,B) pairs.
  for (std::uint64_t a = 0; a <= full; ++a) {
    // B must contain the complement of A; the overlap ranges over subsets of A.
    for (std::uint64_t extra = a;; extra = (extra - 1) & a) {
      std::uint64_t bset = (full & ~a) | extra;
      std::uint64_t a_only = a & ~bset, b_only = bset & ~a;
      bool ok = true;
      for (auto [u, v] : edges) {
        bool across = ((a_only >> u & 1) && (b_only >> v & 1)) ||
                      ((a_only >> v & 1) && (b_only >> u & 1));
        if (across) {
          ok = false;
          break;
        }
      }
      if (ok) elems.push_back({a, bset});
      if (extra == 0) break;
    }
  }
  if (names.empty())
    for (int v = 0; v < num_vertices; ++v) names.push_back(std::to_string(v + 1));
  return detail::finalize_set_universe(std::move(elems), std::move(names), true);
}

inline std::array<Sep, 4> corners(Sep r, Sep s, const Universe& u) {
  return u.corners(r, s);
}

}  // namespace tangles
