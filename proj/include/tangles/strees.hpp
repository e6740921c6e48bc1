#pragma once

// S-trees: trees whose directed edges carry oriented separations, with the
// involution tying the two directions of an edge together. Includes
// validation, irredundancy pruning, tightening, the shift-and-merge surgery
// and profile-driven orientation.

#include <deque>

#include "tangles/stars.hpp"

namespace tangles {

struct STreeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct STree {
  struct Edge {
    int a = 0, b = 0;
    Sep label_ab = kNoSep;  // label of the direction a -> b; b -> a carries *
  };
  int n_nodes = 0;
  std::vector<Edge> edges;

  int n_edges() const { return static_cast<int>(edges.size()); }
};

namespace stree_detail {

struct Adjacency {
  // per node: (edge index, neighbor)
  std::vector<std::vector<std::pair<int, int>>> at;

  explicit Adjacency(const STree& t) : at(t.n_nodes) {
    for (int i = 0; i < t.n_edges(); ++i) {
      at[t.edges[i].a].push_back({i, t.edges[i].b});
      at[t.edges[i].b].push_back({i, t.edges[i].a});
    }
  }
};

// Nodes on the far side of the directed edge from -> to (the side holding
// `to`, not crossing back over that edge).
inline std::vector<std::uint8_t> side_of(const STree& t, const Adjacency& adj,
                                         int from, int to) {
  std::vector<std::uint8_t> seen(t.n_nodes, 0);
  std::deque<int> q{to};
  seen[to] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (auto [ei, w] : adj.at[v]) {
      (void)ei;
      if (v == to && w == from) continue;
      if (!seen[w]) {
        seen[w] = 1;
        q.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace stree_detail

inline Sep edge_label(const STree& t, const Universe& u, int ei, int from) {
  const auto& e = t.edges[ei];
  return from == e.a ? e.label_ab : u.inv(e.label_ab);
}

// Incoming labels of a node, as a set.
inline Star node_star(const STree& t, const Universe& u, int node) {
  Star out;
  for (const auto& e : t.edges) {
    if (e.b == node) out.push_back(e.label_ab);
    if (e.a == node) out.push_back(u.inv(e.label_ab));
  }
  return make_star(std::move(out));
}

struct STreeReport {
  bool tree_ok = false;         // connected and acyclic
  bool labels_in_system = false;
  bool commutes = true;         // by construction of the representation
  bool irredundant = false;     // no node with duplicate incoming labels
  bool order_respecting = false;
  std::optional<bool> over_family;  // all node stars in the family
  std::optional<bool> attempt;      // internal node stars in the family
  bool ok() const { return tree_ok && labels_in_system; }
};

inline std::vector<int> leaves_of(const STree& t) {
  std::vector<int> deg(t.n_nodes, 0);
  for (const auto& e : t.edges) {
    ++deg[e.a];
    ++deg[e.b];
  }
  std::vector<int> out;
  for (int v = 0; v < t.n_nodes; ++v)
    if (deg[v] <= 1) out.push_back(v);
  return out;
}

// Tree partial order on directed edges: e (towards its head) lies below f
// iff e's tail side is contained in f's tail side.
inline bool edge_leq(const STree& t, const stree_detail::Adjacency& adj,
                     int ei, int from_i, int fj, int from_j) {
  if (ei == fj) return from_i == from_j;
  // tail side of e = nodes on from_i's side.
  int to_i = t.edges[ei].a == from_i ? t.edges[ei].b : t.edges[ei].a;
  int to_j = t.edges[fj].a == from_j ? t.edges[fj].b : t.edges[fj].a;
  auto tail_i = stree_detail::side_of(t, adj, to_i, from_i);
  auto tail_j = stree_detail::side_of(t, adj, to_j, from_j);
  for (int v = 0; v < t.n_nodes; ++v)
    if (tail_i[v] && !tail_j[v]) return false;
  return true;
}

inline STreeReport validate_stree(const STree& t, const SepSystem& sys,
                                  const StarFamily* fam = nullptr) {
  const Universe& u = sys.u();
  STreeReport rep;

  // Tree shape.
  if (t.n_nodes >= 1 && t.n_edges() == t.n_nodes - 1) {
    stree_detail::Adjacency adj(t);
    std::vector<std::uint8_t> seen(t.n_nodes, 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (auto [ei, w] : adj.at[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          q.push_back(w);
        }
    }
    rep.tree_ok = count == t.n_nodes;
  }
  if (!rep.tree_ok) return rep;

  rep.labels_in_system = true;
  for (const auto& e : t.edges)
    if (!sys.contains(e.label_ab)) rep.labels_in_system = false;

  rep.irredundant = true;
  for (int v = 0; v < t.n_nodes; ++v) {
    std::vector<Sep> incoming;
    for (int ei = 0; ei < t.n_edges(); ++ei) {
      const auto& e = t.edges[ei];
      if (e.a == v) incoming.push_back(u.inv(e.label_ab));
      if (e.b == v) incoming.push_back(e.label_ab);
    }
    std::sort(incoming.begin(), incoming.end());
    if (std::adjacent_find(incoming.begin(), incoming.end()) != incoming.end())
      rep.irredundant = false;
  }

  stree_detail::Adjacency adj(t);
  rep.order_respecting = true;
  for (int ei = 0; ei < t.n_edges() && rep.order_respecting; ++ei)
    for (int fj = 0; fj < t.n_edges(); ++fj) {
      if (ei == fj) continue;
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj) {
          int from_i = di == 0 ? t.edges[ei].a : t.edges[ei].b;
          int from_j = dj == 0 ? t.edges[fj].a : t.edges[fj].b;
          if (edge_leq(t, adj, ei, from_i, fj, from_j)) {
            Sep li = edge_label(t, u, ei, from_i);
            Sep lj = edge_label(t, u, fj, from_j);
            if (!u.leq(li, lj)) rep.order_respecting = false;
          }
        }
    }

  if (fam) {
    bool over = true, att = t.n_edges() >= 1;
    auto leaves = leaves_of(t);
    std::vector<std::uint8_t> is_leaf(t.n_nodes, 0);
    for (int v : leaves) is_leaf[v] = 1;
    for (int v = 0; v < t.n_nodes; ++v) {
      Star sigma = node_star(t, u, v);
      if (!fam->contains(sigma)) {
        over = false;
        if (!is_leaf[v]) att = false;
      }
    }
    rep.over_family = over;
    rep.attempt = att;
  }
  return rep;
}

// Petals of an attempt: incoming labels of leaves whose singleton is not in
// the family. (The one-edge tree labelled s has petals at both ends unless
// the singletons lie in the family.)
inline std::vector<std::pair<int, Sep>> petals(const STree& t, const Universe& u,
                                               const StarFamily& fam) {
  std::vector<std::pair<int, Sep>> out;
  for (int v : leaves_of(t)) {
    Star sigma = node_star(t, u, v);
    if (sigma.size() != 1) continue;
    if (!fam.contains(sigma)) out.push_back({v, sigma[0]});
  }
  return out;
}

namespace stree_detail {

// Rebuild a tree keeping only the marked nodes; node_map reports new ids
// (-1 for dropped nodes). Extra edges may be appended by the caller.
inline STree subtree(const STree& t, const std::vector<std::uint8_t>& keep,
                     std::vector<int>& node_map) {
  STree out;
  node_map.assign(t.n_nodes, -1);
  for (int v = 0; v < t.n_nodes; ++v)
    if (keep[v]) node_map[v] = out.n_nodes++;
  for (const auto& e : t.edges)
    if (keep[e.a] && keep[e.b])
      out.edges.push_back({node_map[e.a], node_map[e.b], e.label_ab});
  return out;
}

}  // namespace stree_detail

// Remove duplicate branches: while some node sees the same incoming label
// from two neighbors, drop the branch through one of them (never the branch
// containing keep_node). node_map maps old node ids to new, -1 if removed.
inline STree prune_irredundant(STree t, const Universe& u, int keep_node,
                               std::vector<int>* node_map_out = nullptr) {
  std::vector<int> total_map(t.n_nodes);
  for (int v = 0; v < t.n_nodes; ++v) total_map[v] = v;
  int keep = keep_node;

  for (;;) {
    stree_detail::Adjacency adj(t);
    int node = -1, drop_nbr = -1;
    for (int v = 0; v < t.n_nodes && node < 0; ++v)
      for (size_t i = 0; i < adj.at[v].size() && node < 0; ++i)
        for (size_t j = i + 1; j < adj.at[v].size(); ++j) {
          auto [ei, wi] = adj.at[v][i];
          auto [ej, wj] = adj.at[v][j];
          if (edge_label(t, u, ei, wi) != edge_label(t, u, ej, wj)) continue;
          // Drop the duplicate branch that does not hold keep.
          auto side_i = stree_detail::side_of(t, adj, v, wi);
          node = v;
          drop_nbr = (keep >= 0 && side_i[keep]) ? wj : wi;
          break;
        }
    if (node < 0) break;

    auto drop_side = stree_detail::side_of(t, adj, node, drop_nbr);
    std::vector<std::uint8_t> keep_mask(t.n_nodes);
    for (int v = 0; v < t.n_nodes; ++v) keep_mask[v] = !drop_side[v];
    std::vector<int> m;
    t = stree_detail::subtree(t, keep_mask, m);
    for (int v = 0; v < static_cast<int>(total_map.size()); ++v)
      if (total_map[v] >= 0) total_map[v] = m[total_map[v]];
    if (keep >= 0) keep = keep >= 0 && m[keep] >= 0 ? m[keep] : -1;
  }
  if (node_map_out) *node_map_out = total_map;
  return t;
}

// Contract repeated labels along root-directed paths, then prune. The root
// leaf survives and ends up incident to the unique edge carrying its label.
inline STree tighten(STree t, const Universe& u, int root_leaf,
                     std::vector<int>* node_map_out = nullptr) {
  std::vector<int> total_map(t.n_nodes);
  for (int v = 0; v < t.n_nodes; ++v) total_map[v] = v;
  int root = root_leaf;

  for (;;) {
    stree_detail::Adjacency adj(t);
    // Directed edges pointing away from the root: tail closer to root.
    std::vector<int> parent(t.n_nodes, -2), parent_edge(t.n_nodes, -1);
    std::deque<int> q{root};
    parent[root] = -1;
    std::vector<int> bfs;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      bfs.push_back(v);
      for (auto [ei, w] : adj.at[v])
        if (parent[w] == -2) {
          parent[w] = v;
          parent_edge[w] = ei;
          q.push_back(w);
        }
    }
    // Away-directed edge per non-root node: parent -> node.
    bool contracted = false;
    for (int x : bfs) {
      if (x == root || contracted) continue;
      for (int y : bfs) {
        if (y == root || y == x || contracted) continue;
        // x's edge must lie on the root-to-y path strictly above y's edge.
        Sep lx = edge_label(t, u, parent_edge[x], parent[x]);
        Sep ly = edge_label(t, u, parent_edge[y], parent[y]);
        if (lx != ly) continue;
        // Check ancestry: x strictly between root and y.
        bool anc = false;
        for (int v = parent[y]; v >= 0; v = parent[v])
          if (v == x) {
            anc = true;
            break;
          }
        if (!anc) continue;
        // Remove everything strictly between x's edge and y's edge: nodes on
        // the path x..parent(y) inclusive and their hanging branches, then
        // reconnect parent(x) -> y with the shared label.
        std::vector<std::uint8_t> keep_mask(t.n_nodes, 1);
        auto below_x = stree_detail::side_of(t, adj, parent[x], x);
        auto below_y = stree_detail::side_of(t, adj, parent[y], y);
        for (int v = 0; v < t.n_nodes; ++v)
          if (below_x[v] && !below_y[v]) keep_mask[v] = 0;
        int px = parent[x];
        std::vector<int> m;
        STree nt = stree_detail::subtree(t, keep_mask, m);
        nt.edges.push_back({m[px], m[y], lx});
        t = std::move(nt);
        for (int v = 0; v < static_cast<int>(total_map.size()); ++v)
          if (total_map[v] >= 0)
            total_map[v] = total_map[v] < static_cast<int>(m.size()) &&
                                   m[total_map[v]] >= 0
                               ? m[total_map[v]]
                               : -1;
        root = m[root];
        contracted = true;
      }
    }
    if (!contracted) break;
  }

  std::vector<int> m2;
  t = prune_irredundant(std::move(t), u, root, &m2);
  for (int v = 0; v < static_cast<int>(total_map.size()); ++v)
    if (total_map[v] >= 0) total_map[v] = m2[total_map[v]];
  if (node_map_out) *node_map_out = total_map;
  return t;
}

// Shift a tree rooted at a leaf: every label pointing away from the root
// joins with s0 (the root's own outgoing label becomes s0 itself when the
// root label lies below s0).
inline STree shift_stree(const STree& t, const Universe& u, int root_leaf,
                         Sep s0) {
  stree_detail::Adjacency adj(t);
  if (adj.at[root_leaf].size() != 1)
    throw STreeError("shift_stree: root is not a leaf");
  std::vector<int> parent(t.n_nodes, -2);
  std::deque<int> q{root_leaf};
  parent[root_leaf] = -1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (auto [ei, w] : adj.at[v])
      if (parent[w] == -2) {
        parent[w] = v;
        q.push_back(w);
      }
  }
  STree out = t;
  for (auto& e : out.edges) {
    // Away direction: from the node closer to the root to the farther one.
    if (parent[e.b] == e.a) {
      e.label_ab = u.join(e.label_ab, s0);
    } else {
      Sep away = u.join(u.inv(e.label_ab), s0);
      e.label_ab = u.inv(away);
    }
  }
  return out;
}

// Glue two shifted trees along their s0 edges: tr must have a unique leaf
// whose incoming label is s0*, ts a unique leaf with incoming label s0. The
// leaves are removed and their neighbor nodes joined by one edge labelled
// s0 towards tr's side.
inline STree merge_shifted(const STree& tr, const STree& ts, const Universe& u,
                           Sep s0, std::vector<int>* map_r = nullptr,
                           std::vector<int>* map_s = nullptr, int leaf_r_hint = -1,
                           int leaf_s_hint = -1) {
  auto find_unique_leaf = [&](const STree& t, Sep incoming, int hint) {
    if (hint >= 0) {
      Star sigma = node_star(t, u, hint);
      if (sigma.size() != 1 || sigma[0] != incoming)
        throw STreeError("merge_shifted: hinted leaf has the wrong label");
      return hint;
    }
    int found = -1;
    for (int v : leaves_of(t)) {
      Star sigma = node_star(t, u, v);
      if (sigma.size() == 1 && sigma[0] == incoming) {
        if (found >= 0) throw STreeError("merge_shifted: leaf not unique");
        found = v;
      }
    }
    if (found < 0) throw STreeError("merge_shifted: no leaf with given label");
    return found;
  };
  int leaf_r = find_unique_leaf(tr, u.inv(s0), leaf_r_hint);
  int leaf_s = find_unique_leaf(ts, s0, leaf_s_hint);
  stree_detail::Adjacency ar(tr), as(ts);
  int wr = ar.at[leaf_r][0].second;
  int ws = as.at[leaf_s][0].second;

  STree out;
  std::vector<int> mr(tr.n_nodes, -1), ms(ts.n_nodes, -1);
  for (int v = 0; v < tr.n_nodes; ++v)
    if (v != leaf_r) mr[v] = out.n_nodes++;
  for (int v = 0; v < ts.n_nodes; ++v)
    if (v != leaf_s) ms[v] = out.n_nodes++;
  for (const auto& e : tr.edges)
    if (e.a != leaf_r && e.b != leaf_r)
      out.edges.push_back({mr[e.a], mr[e.b], e.label_ab});
  for (const auto& e : ts.edges)
    if (e.a != leaf_s && e.b != leaf_s)
      out.edges.push_back({ms[e.a], ms[e.b], e.label_ab});
  out.edges.push_back({ms[ws], mr[wr], s0});
  if (map_r) *map_r = mr;
  if (map_s) *map_s = ms;
  return out;
}

struct ProfileOrientationResult {
  bool total = true;        // every edge got a direction
  bool conflict = false;    // weak mode only: both directions witnessed
  int sink = -1;            // node all of whose edges point at it
  Star sink_star;           // its incoming labels
  std::vector<int> towards; // per edge: node the edge points at, or -1
};

inline ProfileOrientationResult orient_by_profile(const STree& t,
                                                  const Universe& u,
                                                  const Orientation& p,
                                                  bool weak = false) {
  ProfileOrientationResult res;
  res.towards.assign(t.n_edges(), -1);
  for (int ei = 0; ei < t.n_edges(); ++ei) {
    const auto& e = t.edges[ei];
    if (!weak) {
      bool fwd = p.contains(e.label_ab);
      bool bwd = p.contains(u.inv(e.label_ab));
      if (fwd && !bwd) res.towards[ei] = e.b;
      else if (bwd && !fwd) res.towards[ei] = e.a;
      else if (fwd && bwd) res.towards[ei] = e.b;  // degenerate label
      else res.total = false;
    } else {
      auto w = weak_orientation(p, e.label_ab);
      if (w.forward && w.backward) {
        res.conflict = true;
        res.towards[ei] = e.b;
      } else if (w.forward) {
        res.towards[ei] = e.b;
      } else if (w.backward) {
        res.towards[ei] = e.a;
      } else {
        res.total = false;
      }
    }
  }
  if (!res.total) return res;
  std::vector<int> indeg(t.n_nodes, 0), deg(t.n_nodes, 0);
  for (int ei = 0; ei < t.n_edges(); ++ei) {
    ++deg[t.edges[ei].a];
    ++deg[t.edges[ei].b];
    if (res.towards[ei] >= 0) ++indeg[res.towards[ei]];
  }
  for (int v = 0; v < t.n_nodes; ++v)
    if (indeg[v] == deg[v]) {
      res.sink = v;
      break;
    }
  if (res.sink >= 0) res.sink_star = node_star(t, u, res.sink);
  return res;
}

}  // namespace tangles
