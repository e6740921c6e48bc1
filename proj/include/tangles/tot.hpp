#pragma once

// Tree-of-tangles constructions: the submodular pipeline, the degree-exact
// variant, the efficient-distinguisher surgery and the mixed-order builder,
// together with the quantitative companions delta and delta_e. Every
// construction returns the nested label set with per-pair distinguisher
// certificates.

#include <deque>

#include "tangles/duality.hpp"

namespace tangles {

// A certificate names, for one profile pair, a label orientation contained
// in the first profile whose inverse lies in the second. min_order is the
// cheapest distinguisher anywhere in the universe (-1 without an order
// function), so efficient means the label already achieves that minimum.
struct PairCertificate {
  int p = -1, q = -1;
  Sep sep = kNoSep;
  int order = -1;
  int min_order = -1;
  bool efficient = false;
};

struct NestedSet {
  std::vector<Sep> labels;  // canonical orientations, sorted by id
  std::vector<PairCertificate> certs;
};

inline std::vector<Sep> canonical_labels(const std::vector<Sep>& raw,
                                         const Universe& u) {
  std::vector<Sep> out;
  for (Sep s : raw) out.push_back(u.canonical(s));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline bool pairwise_nested(const std::vector<Sep>& labels, const Universe& u) {
  for (size_t i = 0; i < labels.size(); ++i)
    for (size_t j = i + 1; j < labels.size(); ++j)
      if (!u.nested(labels[i], labels[j])) return false;
  return true;
}

// Cheapest separation oriented oppositely by the two orientations; -1 when
// none exists or there is no order function.
inline int min_distinguisher_order(const Orientation& a, const Orientation& b,
                                   const Universe& u) {
  int best = -1;
  for (Sep s = 0; s < u.size(); ++s) {
    if (u.is_degenerate(s)) continue;
    if (!a.contains(s) || !b.contains(u.inv(s))) continue;
    if (!u.has_order()) return -1;
    if (best < 0 || u.order(s) < best) best = u.order(s);
  }
  return best;
}

// Min-(order, id) label orientation with s in a and s* in b, or kNoSep.
inline Sep best_label_distinguisher(const std::vector<Sep>& labels,
                                    const Orientation& a, const Orientation& b,
                                    const Universe& u) {
  Sep best = kNoSep;
  auto better = [&](Sep x, Sep y) {
    if (y == kNoSep) return true;
    if (!u.has_order()) return x < y;
    return std::pair(u.order(x), x) < std::pair(u.order(y), y);
  };
  for (Sep c : labels)
    for (Sep s : {c, u.inv(c)}) {
      if (s != c && u.is_degenerate(c)) continue;
      if (u.is_degenerate(s)) continue;
      if (a.contains(s) && b.contains(u.inv(s)) && better(s, best)) best = s;
    }
  return best;
}

// Assemble a NestedSet: canonicalize, check nestedness, certify every pair.
inline NestedSet make_nested(const std::vector<Sep>& labels_raw,
                             const std::vector<Profile>& profiles,
                             const Universe& u) {
  NestedSet ns;
  ns.labels = canonical_labels(labels_raw, u);
  if (!pairwise_nested(ns.labels, u))
    throw InternalError("nested set has a crossing pair");
  for (size_t i = 0; i < profiles.size(); ++i)
    for (size_t j = i + 1; j < profiles.size(); ++j) {
      Sep best = best_label_distinguisher(ns.labels, profiles[i].o,
                                          profiles[j].o, u);
      if (best == kNoSep)
        throw InternalError("profile pair not distinguished by the labels");
      PairCertificate c;
      c.p = static_cast<int>(i);
      c.q = static_cast<int>(j);
      c.sep = best;
      c.order = u.has_order() ? u.order(best) : -1;
      c.min_order = min_distinguisher_order(profiles[i].o, profiles[j].o, u);
      c.efficient = u.has_order() && c.order == c.min_order;
      ns.certs.push_back(c);
    }
  return ns;
}

// --- delta and delta_e ----------------------------------------------------

struct DeltaResult {
  int value = 0;
  std::vector<Sep> witness;
};

struct DeltaEResult {
  int value = 0;
  Star witness;
  int m = 0;  // |max D_P| for a greedy choice of efficient distinguishers
};

namespace tot_detail {

// Visit subsets of 0..n-1 of the given size in lexicographic order; visit
// returns true to stop.
inline bool for_each_combination(int n, int size,
                                 const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  if (size > n) return false;
  for (;;) {
    if (visit(idx)) return true;
    int i = size - 1;
    while (i >= 0 && idx[i] == n - size + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace tot_detail

// Minimum size of a subset of p that distinguishes it from every peer,
// found by subset search in increasing size with lexicographic tie-break.
inline DeltaResult compute_delta(const Profile& p,
                                 const std::vector<Profile>& peers,
                                 const SepSystem& sys) {
  const Universe& u = sys.u();
  if (peers.empty()) return {};
  std::vector<Sep> cand;
  std::vector<std::uint64_t> covers;  // peer mask per candidate
  if (peers.size() > 64) throw HypothesisError("too many peers for delta");
  for (Sep s : p.o.elems) {
    if (u.is_degenerate(s)) continue;
    std::uint64_t cov = 0;
    for (size_t j = 0; j < peers.size(); ++j)
      if (peers[j].o.contains(u.inv(s))) cov |= std::uint64_t{1} << j;
    if (cov) {
      cand.push_back(s);
      covers.push_back(cov);
    }
  }
  const std::uint64_t all = peers.size() == 64
                                ? ~std::uint64_t{0}
                                : (std::uint64_t{1} << peers.size()) - 1;
  std::uint64_t reachable = 0;
  for (std::uint64_t c : covers) reachable |= c;
  if (reachable != all)
    throw HypothesisError("a peer is indistinguishable from the profile");

  DeltaResult res;
  for (int size = 1; size <= static_cast<int>(cand.size()); ++size) {
    bool found = tot_detail::for_each_combination(
        static_cast<int>(cand.size()), size, [&](const std::vector<int>& idx) {
          std::uint64_t cov = 0;
          for (int i : idx) cov |= covers[i];
          if (cov != all) return false;
          res.value = size;
          res.witness.clear();
          for (int i : idx) res.witness.push_back(cand[i]);
          return true;
        });
    if (found) return res;
  }
  throw InternalError("delta search exhausted without a cover");
}

// Minimum size of a star inside p, efficient in p, distinguishing it from
// every peer; also reports m = |max D_P| for the greedy efficient picks.
inline DeltaEResult compute_delta_e(const Profile& p,
                                    const std::vector<Profile>& peers,
                                    const Universe& u) {
  if (!u.has_order()) throw HypothesisError("delta_e needs an order function");
  DeltaEResult res;
  if (peers.empty()) return res;
  if (peers.size() > 64) throw HypothesisError("too many peers for delta_e");

  std::vector<Sep> picks;
  for (const auto& q : peers) {
    auto d = distinguishers(p.o, q.o);
    if (d.empty())
      throw HypothesisError("a peer is indistinguishable from the profile");
    picks.push_back(d.front());  // cheapest, lowest id
  }
  res.m = static_cast<int>(max_elements(make_star(picks), u).size());

  // Members beaten by a cheaper profile member above them can never sit in
  // an efficient star; members distinguishing no peer never need to.
  std::vector<Sep> cand;
  std::vector<std::uint64_t> covers;
  for (Sep s : p.o.elems) {
    if (u.is_degenerate(s)) continue;
    bool beaten = false;
    for (Sep t : p.o.elems)
      if (u.leq(s, t) && u.order(t) < u.order(s)) {
        beaten = true;
        break;
      }
    if (beaten) continue;
    std::uint64_t cov = 0;
    for (size_t j = 0; j < peers.size(); ++j)
      if (peers[j].o.contains(u.inv(s))) cov |= std::uint64_t{1} << j;
    if (cov) {
      cand.push_back(s);
      covers.push_back(cov);
    }
  }
  const std::uint64_t all = peers.size() == 64
                                ? ~std::uint64_t{0}
                                : (std::uint64_t{1} << peers.size()) - 1;
  for (int size = 1; size <= static_cast<int>(cand.size()); ++size) {
    bool found = tot_detail::for_each_combination(
        static_cast<int>(cand.size()), size, [&](const std::vector<int>& idx) {
          std::uint64_t cov = 0;
          for (int i : idx) cov |= covers[i];
          if (cov != all) return false;
          Star sigma;
          for (int i : idx) sigma.push_back(cand[i]);
          sigma = make_star(std::move(sigma));
          if (static_cast<int>(sigma.size()) != size || !is_star(sigma, u))
            return false;
          res.value = size;
          res.witness = sigma;
          return true;
        });
    if (found) return res;
  }
  throw InternalError("no efficient distinguishing star exists");
}

// --- shared result shape --------------------------------------------------

struct ToTResult {
  STree tree;
  NestedSet nested;
  std::vector<std::vector<Sep>> profile_elems;  // enumeration order
  std::vector<int> profile_order;               // k per profile
  std::vector<int> sink_of;                     // node hosting each profile
  std::vector<int> degree_of;                   // degree of that node
  int max_degree = 0;                           // over all tree nodes
  std::vector<int> delta;  // per-profile delta / delta_e where applicable
  int iterations = 0;      // efficiency improvement rounds
};

namespace tot_detail {

inline void fill_profile_meta(ToTResult& res,
                              const std::vector<Profile>& profiles) {
  for (const auto& p : profiles) {
    res.profile_elems.push_back(p.o.elems);
    res.profile_order.push_back(p.k);
  }
}

inline ToTResult trivial_result(const std::vector<Profile>& profiles) {
  ToTResult res;
  fill_profile_meta(res, profiles);
  res.tree.n_nodes = 1;
  res.sink_of.assign(profiles.size(), 0);
  res.degree_of.assign(profiles.size(), 0);
  return res;
}

inline std::vector<Sep> tree_label_list(const STree& t) {
  std::vector<Sep> out;
  for (const auto& e : t.edges) out.push_back(e.label_ab);
  return out;
}

inline std::vector<int> node_degrees(const STree& t) {
  std::vector<int> deg(t.n_nodes, 0);
  for (const auto& e : t.edges) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

// Sinks, degrees and certificates for a finished tree.
inline void finish_tree_result(ToTResult& res, const Universe& u,
                               const std::vector<Profile>& profiles,
                               bool weak = false) {
  auto deg = node_degrees(res.tree);
  res.max_degree = 0;
  for (int d : deg) res.max_degree = std::max(res.max_degree, d);
  res.sink_of.assign(profiles.size(), -1);
  res.degree_of.assign(profiles.size(), 0);
  for (size_t i = 0; i < profiles.size(); ++i) {
    auto orp = orient_by_profile(res.tree, u, profiles[i].o, weak);
    if (!orp.total) {
      if (weak)
        throw HypothesisError("a label is not weakly oriented by some profile");
      throw InternalError("a profile does not orient every tree label");
    }
    if (orp.sink < 0)
      throw InternalError("a profile orientation of the tree has no sink");
    res.sink_of[i] = orp.sink;
    res.degree_of[i] = deg[orp.sink];
  }
  for (size_t i = 0; i < profiles.size(); ++i)
    for (size_t j = i + 1; j < profiles.size(); ++j)
      if (res.sink_of[i] == res.sink_of[j])
        throw InternalError("two profiles share a tree node");
  res.nested = make_nested(tree_label_list(res.tree), profiles, u);
}

}  // namespace tot_detail

// --- submodular and degree pipelines --------------------------------------

inline ToTResult tot_submodular(const SepSystem& sys,
                                const EnumOptions& enum_opts = {}) {
  const Universe& u = sys.u();
  for (Sep s : sys.elems)
    if (u.is_degenerate(s))
      throw HypothesisError("degenerate separation in the system");
  if (!is_structurally_submodular(sys))
    throw HypothesisError("system is not structurally submodular");
  auto profiles = enumerate_profiles(sys, /*regular_only=*/true, enum_opts);
  if (profiles.size() <= 1) return tot_detail::trivial_result(profiles);

  std::vector<Star> seed = build_profile_triples(sys).members;
  for (auto& m : build_cosmall_singletons(sys).members) seed.push_back(m);
  for (auto& m : build_max_sets(sys, profiles).members) seed.push_back(m);
  StarFamily fam = build_shift_closure(sys, uncross_members(seed, sys));

  auto sol = solve_duality(sys, fam);
  if (sol.outcome != DualityResult::Outcome::Tree || !sol.tree)
    throw InternalError("submodular construction produced no tree");

  ToTResult res;
  tot_detail::fill_profile_meta(res, profiles);
  res.tree = *sol.tree;
  tot_detail::finish_tree_result(res, u, profiles);
  return res;
}

inline ToTResult tot_degree(const SepSystem& sys,
                            const EnumOptions& enum_opts = {}) {
  const Universe& u = sys.u();
  for (Sep s : sys.elems)
    if (u.is_degenerate(s))
      throw HypothesisError("degenerate separation in the system");
  if (!is_structurally_submodular(sys))
    throw HypothesisError("system is not structurally submodular");
  auto profiles = enumerate_profiles(sys, /*regular_only=*/true, enum_opts);
  ToTResult res;
  if (profiles.size() <= 1) return tot_detail::trivial_result(profiles);

  std::vector<Star> seed = build_profile_triples(sys).members;
  for (auto& m : build_cosmall_singletons(sys).members) seed.push_back(m);
  std::vector<int> delta;
  for (size_t i = 0; i < profiles.size(); ++i) {
    std::vector<Profile> peers;
    for (size_t j = 0; j < profiles.size(); ++j)
      if (j != i) peers.push_back(profiles[j]);
    auto dr = compute_delta(profiles[i], peers, sys);
    delta.push_back(dr.value);
    seed.push_back(make_star(dr.witness));
  }
  StarFamily fam = build_shift_closure(sys, uncross_members(seed, sys));

  auto sol = solve_duality(sys, fam);
  if (sol.outcome != DualityResult::Outcome::Tree || !sol.tree)
    throw InternalError("degree construction produced no tree");

  tot_detail::fill_profile_meta(res, profiles);
  res.tree = *sol.tree;
  res.delta = delta;
  tot_detail::finish_tree_result(res, u, profiles);
  for (size_t i = 0; i < profiles.size(); ++i)
    if (res.degree_of[i] != delta[i])
      throw InternalError("profile degree differs from its distinguisher number");
  if (res.max_degree > 3) {
    bool hit = false;
    for (int d : delta) hit |= d == res.max_degree;
    if (!hit)
      throw InternalError("maximum degree above 3 is not a profile degree");
  }
  return res;
}

// --- efficient pipeline ---------------------------------------------------

namespace tot_detail {

// Nodes on the far side of v when removing it, entered through neighbor w,
// plus v itself as a leaf.
inline std::pair<STree, int> cut_at_sink(const STree& t, int v, int w) {
  stree_detail::Adjacency adj(t);
  std::vector<std::uint8_t> keep(t.n_nodes, 0);
  std::deque<int> q{w};
  keep[w] = 1;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    for (auto [ei, y] : adj.at[x]) {
      (void)ei;
      if (y == v || keep[y]) continue;
      keep[y] = 1;
      q.push_back(y);
    }
  }
  keep[v] = 1;
  std::vector<int> map;
  STree sub = stree_detail::subtree(t, keep, map);
  return {sub, map[v]};
}

}  // namespace tot_detail

// Tree over the efficiency family plus the improvement surgery: while some
// profile pair lacks a minimum-order distinguisher among the labels, splice
// a cheapest separation between the pair's boundary labels, shift both side
// trees onto it and glue them back along it.
inline ToTResult efficient_tree(const SepSystem& sys,
                                const std::vector<Profile>& profiles,
                                const std::vector<int>* size_pins = nullptr) {
  const Universe& u = sys.u();
  if (!u.has_order())
    throw HypothesisError("efficient construction needs an order function");
  if (profiles.size() <= 1) return tot_detail::trivial_result(profiles);

  StarFamily fam = size_pins ? build_efficient_sized(sys, profiles, *size_pins)
                             : build_efficient_unique(sys, profiles);
  auto sol = solve_duality(sys, fam);
  if (sol.outcome != DualityResult::Outcome::Tree || !sol.tree)
    throw InternalError("efficiency construction produced no tree");
  STree t = *sol.tree;

  const int n = static_cast<int>(profiles.size());
  const int npairs = n * (n - 1) / 2;
  ToTResult res;
  tot_detail::fill_profile_meta(res, profiles);
  int prev_eff = -1;

  for (res.iterations = 0;; ++res.iterations) {
    std::vector<int> sink(n, -1);
    for (int i = 0; i < n; ++i) {
      auto orp = orient_by_profile(t, u, profiles[i].o);
      if (!orp.total || orp.sink < 0)
        throw InternalError("a profile does not sink in the working tree");
      sink[i] = orp.sink;
    }
    auto labels = tot_detail::tree_label_list(t);
    int eff_count = 0;
    std::vector<std::pair<int, int>> bad;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Sep best = best_label_distinguisher(labels, profiles[i].o,
                                            profiles[j].o, u);
        if (best == kNoSep)
          throw InternalError("working tree misses a pair distinguisher");
        int mino = min_distinguisher_order(profiles[i].o, profiles[j].o, u);
        if (u.order(best) == mino)
          ++eff_count;
        else
          bad.push_back({i, j});
      }
    if (bad.empty()) break;
    if (res.iterations >= npairs)
      throw InternalError("efficiency loop did not terminate");
    if (prev_eff >= 0 && eff_count <= prev_eff)
      throw InternalError("efficiency count failed to increase");
    prev_eff = eff_count;

    // Shortest-path inefficient pair; its path interior holds no profile.
    stree_detail::Adjacency adj(t);
    auto path_between = [&](int a, int b) {
      std::vector<int> par(t.n_nodes, -2);
      std::deque<int> q{a};
      par[a] = -1;
      while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (auto [ei, w] : adj.at[v]) {
          (void)ei;
          if (par[w] == -2) {
            par[w] = v;
            q.push_back(w);
          }
        }
      }
      std::vector<int> path;
      for (int v = b; v != -1; v = par[v]) path.push_back(v);
      std::reverse(path.begin(), path.end());
      return path;  // a .. b
    };
    std::vector<int> path;
    std::pair<int, int> pick{-1, -1};
    for (auto [i, j] : bad) {
      auto pth = path_between(sink[i], sink[j]);
      if (pick.first < 0 || pth.size() < path.size()) {
        pick = {i, j};
        path = pth;
      }
    }
    for (size_t x = 1; x + 1 < path.size(); ++x)
      for (int i = 0; i < n; ++i)
        if (sink[i] == path[x])
          throw InternalError("profile inside the improvement path");
    if (path.size() < 3)
      throw InternalError("adjacent sinks cannot be inefficiently distinguished");

    int v1 = path.front(), v2 = path.back();
    auto edge_between = [&](int a, int b) {
      for (auto [ei, w] : adj.at[a])
        if (w == b) return ei;
      throw InternalError("path edge missing");
    };
    Sep s1 = edge_label(t, u, edge_between(v1, path[1]), v1);
    Sep s2 = edge_label(t, u, edge_between(v2, path[path.size() - 2]), v2);

    Sep t0 = kNoSep;  // sys.elems is sorted by (order, id)
    for (Sep x : sys.elems)
      if (u.leq(s1, x) && u.leq(x, u.inv(s2))) {
        t0 = x;
        break;
      }
    if (t0 == kNoSep) throw InternalError("empty splice interval");
    if (u.order(t0) !=
        min_distinguisher_order(profiles[pick.first].o, profiles[pick.second].o, u))
      throw InternalError("splice is not an efficient distinguisher");

    auto [sub1, root1] = tot_detail::cut_at_sink(t, v1, path[1]);
    auto [sub2, root2] = tot_detail::cut_at_sink(t, v2, path[path.size() - 2]);
    STree tr = shift_stree(sub1, u, root1, t0);
    STree ts = shift_stree(sub2, u, root2, u.inv(t0));
    STree merged = merge_shifted(tr, ts, u, t0, nullptr, nullptr, root1, root2);
    merged = prune_irredundant(std::move(merged), u, -1);
    auto rep = validate_stree(merged, sys, &fam);
    if (!rep.tree_ok || !rep.labels_in_system || !rep.order_respecting ||
        !rep.over_family.value_or(false))
      throw InternalError("surgery produced an invalid tree");
    t = std::move(merged);
  }

  res.tree = std::move(t);
  tot_detail::finish_tree_result(res, u, profiles);
  return res;
}

inline ToTResult tot_efficient(const Universe& u, int k,
                               const EnumOptions& enum_opts = {}) {
  SepSystem sysk = restrict_Sk(u, k);
  auto profiles = enumerate_profiles(sysk, /*regular_only=*/true, enum_opts);
  return efficient_tree(sysk, profiles);
}

inline ToTResult tot_efficient_degrees(const Universe& u, int k,
                                       const EnumOptions& enum_opts = {}) {
  SepSystem sysk = restrict_Sk(u, k);
  auto profiles = enumerate_profiles(sysk, /*regular_only=*/true, enum_opts);
  std::vector<int> pins;
  for (size_t i = 0; i < profiles.size(); ++i) {
    std::vector<Profile> peers;
    for (size_t j = 0; j < profiles.size(); ++j)
      if (j != i) peers.push_back(profiles[j]);
    pins.push_back(compute_delta_e(profiles[i], peers, u).value);
  }
  ToTResult res = efficient_tree(sysk, profiles, profiles.size() > 1 ? &pins : nullptr);
  res.delta = pins;
  int pin_max = 0;
  for (size_t i = 0; i < pins.size(); ++i) {
    pin_max = std::max(pin_max, pins[i]);
    if (profiles.size() > 1 && res.degree_of[i] != pins[i])
      throw InternalError("profile degree differs from delta_e");
  }
  if (profiles.size() > 1 && res.max_degree > std::max(pin_max, 3))
    throw InternalError("maximum degree exceeds max(delta_e, 3)");
  return res;
}

// --- mixed orders ---------------------------------------------------------

// Strongly robust regular profiles at mixed orders: enumerate them at the
// largest requested order, then restrict each to the smallest order at which
// it still differs from every other on a separation both can orient and the
// restriction is itself a strongly robust profile. Pairs distinguished only
// by expensive separations thus keep a high order while the rest drop low.
// The deque keeps the per-order systems alive for the returned orientations.
struct MixedProfileSet {
  std::deque<SepSystem> systems;
  std::vector<Profile> profiles;
};

inline MixedProfileSet collect_mixed_profiles(const Universe& u,
                                              std::vector<int> orders,
                                              const EnumOptions& enum_opts = {}) {
  MixedProfileSet out;
  if (orders.empty()) return out;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  const int kmax = orders.back();

  out.systems.push_back(restrict_Sk(u, kmax));
  const SepSystem& top = out.systems.front();
  std::vector<Profile> atoms;
  for (auto& p : enumerate_profiles(top, /*regular_only=*/true, enum_opts)) {
    auto c = classify_orientation(p.o);
    if (c.strongly_robust.value_or(false)) {
      p.k = kmax;
      atoms.push_back(std::move(p));
    }
  }

  std::map<int, const SepSystem*> sys_of;
  sys_of[kmax] = &top;
  for (int k : orders)
    if (!sys_of.count(k)) {
      out.systems.push_back(restrict_Sk(u, k));
      sys_of[k] = &out.systems.back();
    }

  for (size_t i = 0; i < atoms.size(); ++i) {
    for (int k : orders) {
      bool separated = true;
      for (size_t j = 0; j < atoms.size() && separated; ++j) {
        if (j == i) continue;
        bool dist = false;
        for (Sep s : atoms[i].o.elems)
          if (u.order(s) < k && !u.is_degenerate(s) &&
              atoms[j].o.contains(u.inv(s)))
            dist = true;
        separated = dist;
      }
      if (!separated) continue;
      const SepSystem& sk = *sys_of[k];
      std::vector<Sep> elems;
      for (Sep s : atoms[i].o.elems)
        if (u.order(s) < k) elems.push_back(s);
      Orientation o = Orientation::of(sk, std::move(elems));
      auto c = classify_orientation(o);
      if (!c.total || !c.strongly_robust.value_or(false)) continue;
      out.profiles.push_back({std::move(o), k});
      break;
    }
  }
  return out;
}

namespace tot_detail {

struct SubUniverse {
  Universe u;
  std::vector<Sep> parent_of;  // sub handle -> parent handle
};

// The separations lying above every element of the boundary star, both
// orientations, as a stand-alone universe. Join/meet closure is verified.
inline SubUniverse interior_universe(const Universe& u,
                                     const std::vector<Sep>& boundary) {
  // x lies inside the boundary star when every boundary element fits under
  // one of its orientations; the orientation may differ per element.
  auto qualifies = [&](Sep x) {
    for (Sep s : boundary)
      if (!u.leq(s, x) && !u.leq(s, u.inv(x))) return false;
    return true;
  };
  std::vector<std::uint8_t> keep(u.size(), 0);
  for (Sep x = 0; x < u.size(); ++x)
    if (qualifies(x)) keep[x] = 1;

  SubUniverse sub;
  std::vector<int> idx(u.size(), -1);
  for (Sep x = 0; x < u.size(); ++x)
    if (keep[x]) {
      idx[x] = static_cast<int>(sub.parent_of.size());
      sub.parent_of.push_back(x);
    }
  const int m = static_cast<int>(sub.parent_of.size());
  if (m == 0) throw InternalError("empty interior universe");

  Universe::Builder b;
  b.inv.resize(m);
  b.leq.assign(m * m, 0);
  b.join.assign(m * m, kNoSep);
  b.meet.assign(m * m, kNoSep);
  if (u.has_order()) b.order.resize(m);
  for (int i = 0; i < m; ++i) {
    Sep pi = sub.parent_of[i];
    b.inv[i] = idx[u.inv(pi)];
    if (u.has_order()) b.order[i] = u.order(pi);
    for (int j = 0; j < m; ++j) {
      Sep pj = sub.parent_of[j];
      b.leq[i * m + j] = u.leq(pi, pj) ? 1 : 0;
      Sep jn = u.join(pi, pj), mt = u.meet(pi, pj);
      if (idx[jn] < 0 || idx[mt] < 0)
        throw InternalError("interior universe is not lattice-closed");
      b.join[i * m + j] = idx[jn];
      b.meet[i * m + j] = idx[mt];
    }
  }
  if (u.has_sides()) {
    for (Sep p : sub.parent_of) b.sides.push_back(u.sides(p));
    b.ground_names = u.ground_names();
  }
  try {
    sub.u = Universe::finalize(std::move(b));
  } catch (const UniverseError& e) {
    throw InternalError(std::string("interior universe invalid: ") + e.what());
  }
  return sub;
}

}  // namespace tot_detail

// Tree of tangles for strongly robust profiles of possibly different orders
// over a distributive submodular universe. In efficient mode the tree is
// post-processed per profile-free subtree so that every certificate reaches
// the minimum distinguisher order.
inline ToTResult tot_mixed(const Universe& u,
                           const std::vector<Profile>& profiles,
                           bool efficient = false) {
  if (!u.has_order())
    throw HypothesisError("mixed construction needs an order function");
  auto law = u.check_laws(true);
  if (!law.ok())
    throw HypothesisError("universe is not submodular and distributive: " +
                          law.detail);
  for (const auto& p : profiles) {
    auto c = classify_orientation(p.o);
    if (!c.total || !c.antisymmetric || !c.profile)
      throw HypothesisError("input orientation is not a profile");
    if (!c.strongly_robust.value_or(false))
      throw HypothesisError("profile is not strongly robust");
  }
  for (size_t i = 0; i < profiles.size(); ++i)
    for (size_t j = i + 1; j < profiles.size(); ++j) {
      bool dist = false;
      for (Sep s = 0; s < u.size() && !dist; ++s)
        if (!u.is_degenerate(s) && profiles[i].o.contains(s) &&
            profiles[j].o.contains(u.inv(s)))
          dist = true;
      if (!dist) throw HypothesisError("profiles are not pairwise distinguishable");
    }
  if (profiles.size() <= 1) return tot_detail::trivial_result(profiles);

  SepSystem whole = SepSystem::whole(u);
  StarFamily fd = build_weakly_oriented(whole, profiles);
  auto sol = solve_duality(whole, fd);
  if (sol.outcome != DualityResult::Outcome::Tree || !sol.tree)
    throw InternalError("no tree over the weak-orientation family");

  ToTResult res;
  tot_detail::fill_profile_meta(res, profiles);
  res.tree = *sol.tree;
  tot_detail::finish_tree_result(res, u, profiles, /*weak=*/true);
  if (!efficient) return res;

  int k = 0;
  for (const auto& p : profiles) {
    int pk = p.k;
    if (pk <= 0) {
      for (Sep s : p.o.elems) pk = std::max(pk, u.order(s) + 1);
    }
    k = std::max(k, pk);
  }

  // Components of the edge set, split at profile nodes.
  const STree& t = res.tree;
  const int n = static_cast<int>(profiles.size());
  std::vector<std::uint8_t> is_prof(t.n_nodes, 0);
  for (int v : res.sink_of) is_prof[v] = 1;
  std::vector<int> comp(t.n_edges(), -1);
  int ncomp = 0;
  stree_detail::Adjacency adj(t);
  for (int e = 0; e < t.n_edges(); ++e) {
    if (comp[e] >= 0) continue;
    comp[e] = ncomp;
    std::deque<int> q{e};
    while (!q.empty()) {
      int f = q.front();
      q.pop_front();
      for (int v : {t.edges[f].a, t.edges[f].b}) {
        if (is_prof[v]) continue;
        for (auto [g, w] : adj.at[v]) {
          (void)w;
          if (comp[g] < 0) {
            comp[g] = ncomp;
            q.push_back(g);
          }
        }
      }
    }
    ++ncomp;
  }

  std::vector<Sep> big_n;
  for (int c = 0; c < ncomp; ++c) {
    // Profiles whose node meets this component, with the boundary label
    // pointing away from them into the component.
    std::vector<int> profs_here;
    std::vector<Sep> boundary;
    for (int i = 0; i < n; ++i) {
      int v = res.sink_of[i];
      for (auto [e, w] : adj.at[v]) {
        (void)w;
        if (comp[e] == c) {
          profs_here.push_back(i);
          boundary.push_back(edge_label(t, u, e, v));
          break;  // a profile node meets each component in at most one edge
        }
      }
    }
    if (profs_here.size() < 2) continue;
    bool has_interior = false;
    for (int e = 0; e < t.n_edges(); ++e)
      if (comp[e] == c)
        has_interior |= !is_prof[t.edges[e].a] || !is_prof[t.edges[e].b];
    if (!has_interior) {
      // A single edge joining two profile nodes: both node stars satisfy the
      // efficiency condition, so the shared label already distinguishes the
      // pair at minimum order.
      for (Sep s : boundary) big_n.push_back(s);
      continue;
    }

    auto sub = tot_detail::interior_universe(u, boundary);
    std::vector<int> idx(u.size(), -1);
    for (size_t i = 0; i < sub.parent_of.size(); ++i)
      idx[sub.parent_of[i]] = static_cast<int>(i);
    SepSystem sysk = restrict_Sk(sub.u, k);

    std::vector<Profile> bps;
    for (Sep s : boundary) {
      std::vector<Sep> elems;
      for (Sep x : sysk.elems)
        if (u.leq(sub.parent_of[x], u.inv(s))) elems.push_back(x);
      Orientation o = Orientation::of(sysk, std::move(elems));
      auto cls = classify_orientation(o);
      if (!cls.total || !cls.antisymmetric || !cls.profile || !cls.regular)
        throw InternalError("boundary orientation is not a regular profile");
      bps.push_back({std::move(o), k});
    }
    for (size_t i = 0; i < bps.size(); ++i)
      for (size_t j = i + 1; j < bps.size(); ++j)
        if (bps[i].o == bps[j].o)
          throw InternalError("coinciding boundary profiles");

    ToTResult inner = efficient_tree(sysk, bps);
    for (Sep l : inner.nested.labels) big_n.push_back(sub.parent_of[l]);
    for (Sep s : boundary) big_n.push_back(s);
  }

  res.nested = make_nested(big_n, profiles, u);
  return res;
}

}  // namespace tangles
