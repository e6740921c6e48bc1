#pragma once

// Shared test universes: the six-point bipartition example, chains,
// small graphs, and seeded random set universes.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "tangles/core.hpp"

namespace fixtures {

using tangles::SetSeparation;
using tangles::Universe;

inline std::uint64_t mask(std::initializer_list<int> bits) {
  std::uint64_t m = 0;
  for (int b : bits) m |= std::uint64_t{1} << b;
  return m;
}

// Six points: inner 0,1,2 and outer 3,4,5 (outer i paired with inner i-3).
// Seven unoriented bipartitions: {outer_i} vs rest, {inner_i, outer_i} vs
// rest, and the empty/full split; fourteen oriented separations. They sit
// inside the lattice closure of the bipartitions, where joins and meets are
// the componentwise ones.
inline std::vector<SetSeparation> six_point_generators() {
  const std::uint64_t full = (1u << 6) - 1;
  std::vector<SetSeparation> gens;
  for (int i = 0; i < 3; ++i) {
    std::uint64_t outer = mask({i + 3});
    std::uint64_t sector = mask({i, i + 3});
    gens.push_back({outer, full & ~outer});
    gens.push_back({sector, full & ~sector});
  }
  gens.push_back({0, full});
  return gens;
}

inline Universe six_points(bool with_order = false, bool closed = false) {
  tangles::Caps caps;
  caps.max_unoriented = 256;
  return tangles::build_set_universe(6, six_point_generators(), closed,
                                     with_order, caps);
}

// The 14 generator orientations as a system inside a (usually closed)
// six-point universe.
inline tangles::SepSystem six_point_system(const Universe& u) {
  std::vector<tangles::Sep> members;
  auto gens = six_point_generators();
  for (tangles::Sep s = 0; s < u.size(); ++s)
    for (const auto& g : gens)
      if (u.sides(s) == g) members.push_back(s);
  return tangles::SepSystem::of(u, members);
}

// A chain of nested bipartitions of {0..n}: {0..i} vs the rest.
inline Universe chain(int n, bool with_order = true) {
  const std::uint64_t full = (std::uint64_t{1} << (n + 1)) - 1;
  std::vector<SetSeparation> gens;
  gens.push_back({0, full});
  for (int i = 0; i < n; ++i) {
    std::uint64_t a = (std::uint64_t{1} << (i + 1)) - 1;
    gens.push_back({a, full & ~a});
  }
  return tangles::build_set_universe(n + 1, gens, false, with_order);
}

inline Universe path_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return tangles::build_graph_universe(n, edges);
}

inline Universe cycle_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return tangles::build_graph_universe(n, edges);
}

inline Universe complete_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  return tangles::build_graph_universe(n, edges);
}

// Two-region set universe whose robust orientations come in two orders.
// Ground: left points 0..left-1, right points left..left+right-1, and a
// shared hub block at the end. The left region is split by order-0
// bipartitions (a nested chain of prefixes, or one singleton per point);
// the right region is split only by separations that keep the hub block on
// both sides, each of order `hubs`. Lattice-closed and distributive.
inline Universe two_region_universe(int left, int right, int hubs,
                                    bool chain_cuts) {
  const int ground = left + right + hubs;
  const std::uint64_t full = (std::uint64_t{1} << ground) - 1;
  std::uint64_t hub = 0;
  for (int i = 0; i < hubs; ++i) hub |= std::uint64_t{1} << (left + right + i);
  std::vector<SetSeparation> gens;
  gens.push_back({0, full});
  for (int i = 0; i < left; ++i) {
    std::uint64_t a = chain_cuts ? (std::uint64_t{1} << (i + 1)) - 1
                                 : std::uint64_t{1} << i;
    gens.push_back({a, full & ~a});
  }
  for (int x = left; x < left + right; ++x) {
    std::uint64_t a = (std::uint64_t{1} << x) | hub;
    gens.push_back({a, full & ~(std::uint64_t{1} << x)});
  }
  tangles::Caps caps;
  caps.max_unoriented = 256;
  caps.max_closure = 2048;
  return tangles::build_set_universe(ground, gens, /*close=*/true,
                                     /*with_order=*/true, caps);
}

// Parameter grid (left, right, hubs, chain_cuts) for two_region_universe.
// Every entry yields a distinct distributive universe whose strongly robust
// orientations come in two orders (1 and hubs+1). With left == 2 the chain
// and singleton cuts close to the same lattice, so only one style appears.
inline std::vector<std::array<int, 4>> mixed_universe_params() {
  return {
      {2, 2, 1, 1}, {2, 2, 2, 1}, {2, 2, 3, 1}, {2, 3, 1, 1},
      {2, 3, 2, 1}, {2, 3, 3, 1}, {2, 4, 1, 1}, {2, 4, 2, 1},
      {3, 2, 1, 0}, {3, 2, 1, 1}, {3, 2, 2, 0}, {3, 2, 2, 1},
      {3, 3, 1, 0}, {3, 3, 1, 1}, {3, 3, 2, 0}, {3, 3, 2, 1},
      {4, 2, 1, 0}, {4, 2, 1, 1}, {4, 2, 2, 0}, {4, 2, 2, 1},
      {4, 3, 1, 1}, {4, 3, 2, 1}, {5, 2, 1, 1}, {5, 2, 2, 1},
  };
}

// Random lattice-closed set universe with at most max_unoriented unoriented
// separations; retries until the cap holds. Deterministic in the seed.
inline Universe random_set_universe(std::mt19937& rng, int max_unoriented = 8,
                                    bool with_order = true) {
  for (;;) {
    int ground = 3 + static_cast<int>(rng() % 3);  // 3..5
    const std::uint64_t full = (std::uint64_t{1} << ground) - 1;
    int n_gens = 2 + static_cast<int>(rng() % 3);  // 2..4
    std::vector<SetSeparation> gens;
    gens.push_back({0, full});
    for (int i = 0; i < n_gens; ++i) {
      std::uint64_t a = rng() & full;
      std::uint64_t b = full & ~a;
      // Optionally grow the overlap a little.
      std::uint64_t overlap = rng() & a;
      if (rng() % 2) b |= overlap;
      gens.push_back({a, b});
    }
    tangles::Caps caps;
    caps.max_unoriented = max_unoriented;
    caps.max_closure = 4 * max_unoriented;
    try {
      return tangles::build_set_universe(ground, gens, /*close=*/true,
                                         with_order, caps);
    } catch (const tangles::UniverseError&) {
      continue;  // closure overflowed the cap; draw again
    }
  }
}

}  // namespace fixtures
