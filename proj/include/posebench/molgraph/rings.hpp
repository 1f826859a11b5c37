#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <vector>

#include "posebench/molgraph/graph.hpp"

namespace posebench::molgraph {

using Ring = std::vector<int>;

namespace detail {

// Edge-incidence vector over GF(2).
struct EdgeSet {
  std::vector<std::uint64_t> words;
  explicit EdgeSet(std::size_t nbits = 0) : words((nbits + 63) / 64, 0) {}
  void flip(std::size_t k) { words[k / 64] ^= std::uint64_t{1} << (k % 64); }
  bool test(std::size_t k) const { return (words[k / 64] >> (k % 64)) & 1U; }
  bool none() const {
    return std::all_of(words.begin(), words.end(), [](std::uint64_t w) { return w == 0; });
  }
  void xor_with(const EdgeSet& o) {
    for (std::size_t i = 0; i < words.size(); ++i) words[i] ^= o.words[i];
  }
  std::size_t lowest() const {
    for (std::size_t i = 0; i < words.size(); ++i)
      if (words[i]) return i * 64 + static_cast<std::size_t>(__builtin_ctzll(words[i]));
    return words.size() * 64;
  }
  bool operator<(const EdgeSet& o) const { return words < o.words; }
};

// Rotate so the smallest atom comes first, then pick the direction whose
// second atom is smaller.
inline Ring canonical_ring(Ring r) {
  auto it = std::min_element(r.begin(), r.end());
  std::rotate(r.begin(), it, r.end());
  if (r.size() > 2 && r.back() < r[1]) std::reverse(r.begin() + 1, r.end());
  return r;
}

}  // namespace detail

// Minimum cycle basis (Horton): candidate cycles P(v,x) + (x,y) + P(y,v)
// from shortest-path trees, sorted by length, greedily kept when linearly
// independent over GF(2). Each ring is an ordered atom walk; the result is
// sorted by (size, atoms).
inline std::vector<Ring> perceive_rings(const MolecularGraph& g) {
  const std::size_t n = g.size();
  const std::size_t m = g.bonds().size();
  const std::size_t rank = m + static_cast<std::size_t>(g.fragment_count()) - n;
  if (n == 0 || rank == 0) return {};

  struct Candidate {
    Ring atoms;
    detail::EdgeSet edges;
  };
  std::vector<Candidate> candidates;
  std::set<detail::EdgeSet> seen;

  for (std::size_t v = 0; v < n; ++v) {
    std::vector<int> parent(n, -1), dist(n, -1);
    std::queue<int> q;
    dist[v] = 0;
    q.push(static_cast<int>(v));
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const auto& nb : g.neighbors(u))
        if (dist[static_cast<std::size_t>(nb.atom)] < 0) {
          dist[static_cast<std::size_t>(nb.atom)] = dist[static_cast<std::size_t>(u)] + 1;
          parent[static_cast<std::size_t>(nb.atom)] = u;
          q.push(nb.atom);
        }
    }
    auto path_to_root = [&](int x) {
      std::vector<int> p;
      for (int u = x; u >= 0; u = parent[static_cast<std::size_t>(u)]) p.push_back(u);
      return p;  // x ... v
    };
    for (std::size_t k = 0; k < m; ++k) {
      const auto& b = g.bond(static_cast<int>(k));
      if (dist[static_cast<std::size_t>(b.a)] < 0 || dist[static_cast<std::size_t>(b.b)] < 0) continue;
      if (parent[static_cast<std::size_t>(b.a)] == b.b || parent[static_cast<std::size_t>(b.b)] == b.a) continue;
      auto px = path_to_root(b.a);
      auto py = path_to_root(b.b);
      std::vector<int> sx(px.begin(), px.end() - 1), sy(py.begin(), py.end() - 1);
      std::sort(sx.begin(), sx.end());
      std::sort(sy.begin(), sy.end());
      std::vector<int> common;
      std::set_intersection(sx.begin(), sx.end(), sy.begin(), sy.end(), std::back_inserter(common));
      if (!common.empty()) continue;

      Ring ring(px.rbegin(), px.rend());  // v ... x
      for (int u : py)
        if (u != static_cast<int>(v)) ring.push_back(u);  // y ... (before v)
      detail::EdgeSet es(m);
      for (std::size_t i = 0; i < ring.size(); ++i) {
        auto e = g.bond_between(ring[i], ring[(i + 1) % ring.size()]);
        es.flip(static_cast<std::size_t>(*e));
      }
      if (!seen.insert(es).second) continue;
      candidates.push_back({detail::canonical_ring(std::move(ring)), std::move(es)});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.atoms.size() != y.atoms.size()) return x.atoms.size() < y.atoms.size();
    return x.atoms < y.atoms;
  });

  // Incremental GF(2) elimination, basis kept reduced by pivot column.
  std::vector<std::pair<std::size_t, detail::EdgeSet>> basis;
  std::vector<Ring> rings;
  for (auto& c : candidates) {
    detail::EdgeSet r = c.edges;
    for (const auto& [pivot, row] : basis)
      if (r.test(pivot)) r.xor_with(row);
    if (r.none()) continue;
    basis.emplace_back(r.lowest(), r);
    rings.push_back(c.atoms);
    if (rings.size() == rank) break;
  }
  std::sort(rings.begin(), rings.end(), [](const Ring& x, const Ring& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  });
  return rings;
}

}  // namespace posebench::molgraph
