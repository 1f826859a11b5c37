#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "posebench/molgraph/graph.hpp"

namespace posebench::molgraph {

inline constexpr std::size_t kDefaultMaxAutomorphisms = 10000;

// Colour refinement (1-dimensional Weisfeiler-Leman) run jointly over a set
// of graphs so colour ids are comparable between them. Initial colours are
// (element, formal charge); each round appends the sorted multiset of
// (bond order, neighbour colour). Stops when the partition is stable.
inline std::vector<std::vector<int>> refine_colors(std::span<const MolecularGraph* const> graphs) {
  using Signature = std::vector<int>;
  std::vector<std::vector<int>> colors(graphs.size());
  std::vector<std::vector<Signature>> sigs(graphs.size());

  auto relabel = [&]() {
    std::map<Signature, int> ids;
    for (const auto& gs : sigs)
      for (const auto& s : gs) ids.emplace(s, 0);
    int next = 0;
    for (auto& [s, id] : ids) id = next++;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      colors[gi].resize(sigs[gi].size());
      for (std::size_t i = 0; i < sigs[gi].size(); ++i) colors[gi][i] = ids.at(sigs[gi][i]);
    }
    return static_cast<int>(ids.size());
  };

  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const auto& g = *graphs[gi];
    sigs[gi].resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      sigs[gi][i] = {static_cast<int>(g.atom(static_cast<int>(i)).element),
                     g.atom(static_cast<int>(i)).formal_charge};
  }
  int classes = relabel();
  for (;;) {
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      const auto& g = *graphs[gi];
      for (std::size_t i = 0; i < g.size(); ++i) {
        std::vector<std::pair<int, int>> env;
        for (const auto& nb : g.neighbors(static_cast<int>(i)))
          env.emplace_back(static_cast<int>(g.bond(nb.bond).order), colors[gi][static_cast<std::size_t>(nb.atom)]);
        std::sort(env.begin(), env.end());
        Signature s{colors[gi][i]};
        for (auto [o, c] : env) {
          s.push_back(o);
          s.push_back(c);
        }
        sigs[gi][i] = std::move(s);
      }
    }
    const int refined = relabel();
    if (refined == classes) break;
    classes = refined;
  }
  return colors;
}

inline std::vector<int> refine_colors(const MolecularGraph& g) {
  const MolecularGraph* gs[] = {&g};
  return refine_colors(gs).front();
}

namespace detail {

// Backtracking matcher over refined colour classes. Atoms of `a` are placed
// in BFS order starting from the rarest colour so each new atom (except
// component roots) already has a mapped neighbour to anchor its candidates.
class Matcher {
 public:
  Matcher(const MolecularGraph& a, const MolecularGraph& b, bool identity_first)
      : a_(a), b_(b), identity_first_(identity_first) {
    const MolecularGraph* gs[] = {&a, &b};
    auto colors = refine_colors(gs);
    ca_ = std::move(colors[0]);
    cb_ = std::move(colors[1]);
    compatible_ = a.size() == b.size() && a.bonds().size() == b.bonds().size();
    if (compatible_) {
      auto ha = ca_, hb = cb_;
      std::sort(ha.begin(), ha.end());
      std::sort(hb.begin(), hb.end());
      compatible_ = ha == hb;
    }
    if (compatible_) build_order();
  }

  // Calls on_match(mapping) for each isomorphism a -> b until it returns
  // false or max_count mappings were produced. Returns true when the search
  // stopped because of max_count with more mappings possibly remaining.
  bool run(std::size_t max_count, const std::function<bool(const std::vector<int>&)>& on_match) {
    if (!compatible_) return false;
    map_.assign(a_.size(), -1);
    used_.assign(b_.size(), false);
    found_ = 0;
    max_count_ = max_count;
    stopped_ = false;
    truncated_ = false;
    on_match_ = &on_match;
    if (a_.size() == 0) {
      on_match(map_);
      return false;
    }
    search(0);
    return truncated_;
  }

 private:
  void build_order() {
    const std::size_t n = a_.size();
    if (n == 0) return;
    std::vector<int> class_size(static_cast<std::size_t>(*std::max_element(ca_.begin(), ca_.end()) + 1), 0);
    for (int c : ca_) ++class_size[static_cast<std::size_t>(c)];
    auto rank = [&](int v) { return std::make_pair(class_size[static_cast<std::size_t>(ca_[static_cast<std::size_t>(v)])], v); };
    std::vector<bool> seen(n, false);
    parent_.assign(n, -1);
    for (;;) {
      int root = -1;
      for (std::size_t v = 0; v < n; ++v)
        if (!seen[v] && (root < 0 || rank(static_cast<int>(v)) < rank(root))) root = static_cast<int>(v);
      if (root < 0) break;
      std::queue<int> q;
      q.push(root);
      seen[static_cast<std::size_t>(root)] = true;
      while (!q.empty()) {
        int v = q.front();
        q.pop();
        order_.push_back(v);
        std::vector<int> next;
        for (const auto& nb : a_.neighbors(v))
          if (!seen[static_cast<std::size_t>(nb.atom)]) next.push_back(nb.atom);
        std::sort(next.begin(), next.end(), [&](int x, int y) { return rank(x) < rank(y); });
        for (int w : next) {
          seen[static_cast<std::size_t>(w)] = true;
          parent_[static_cast<std::size_t>(w)] = v;
          q.push(w);
        }
      }
    }
  }

  bool feasible(int v, int w) const {
    if (ca_[static_cast<std::size_t>(v)] != cb_[static_cast<std::size_t>(w)]) return false;
    int mapped_nbrs = 0;
    for (const auto& nb : a_.neighbors(v)) {
      const int mu = map_[static_cast<std::size_t>(nb.atom)];
      if (mu < 0) continue;
      ++mapped_nbrs;
      auto kb = b_.bond_between(w, mu);
      if (!kb || b_.bond(*kb).order != a_.bond(nb.bond).order) return false;
    }
    int used_nbrs = 0;
    for (const auto& nb : b_.neighbors(w))
      if (used_[static_cast<std::size_t>(nb.atom)]) ++used_nbrs;
    return used_nbrs == mapped_nbrs;
  }

  void search(std::size_t depth) {
    if (stopped_) return;
    if (depth == order_.size()) {
      if (found_ == max_count_) {
        truncated_ = true;
        stopped_ = true;
        return;
      }
      ++found_;
      if (!(*on_match_)(map_)) stopped_ = true;
      return;
    }
    const int v = order_[depth];
    std::vector<int> candidates;
    const int p = parent_[static_cast<std::size_t>(v)];
    if (p >= 0) {
      for (const auto& nb : b_.neighbors(map_[static_cast<std::size_t>(p)]))
        if (!used_[static_cast<std::size_t>(nb.atom)]) candidates.push_back(nb.atom);
    } else {
      for (std::size_t w = 0; w < b_.size(); ++w)
        if (!used_[w]) candidates.push_back(static_cast<int>(w));
    }
    if (identity_first_) {
      auto it = std::find(candidates.begin(), candidates.end(), v);
      if (it != candidates.end()) std::rotate(candidates.begin(), it, it + 1);
    }
    for (int w : candidates) {
      if (!feasible(v, w)) continue;
      map_[static_cast<std::size_t>(v)] = w;
      used_[static_cast<std::size_t>(w)] = true;
      search(depth + 1);
      map_[static_cast<std::size_t>(v)] = -1;
      used_[static_cast<std::size_t>(w)] = false;
      if (stopped_) return;
    }
  }

  const MolecularGraph& a_;
  const MolecularGraph& b_;
  bool identity_first_;
  bool compatible_ = false;
  std::vector<int> ca_, cb_, order_, parent_, map_;
  std::vector<bool> used_;
  std::size_t found_ = 0, max_count_ = 0;
  bool stopped_ = false, truncated_ = false;
  const std::function<bool(const std::vector<int>&)>* on_match_ = nullptr;
};

}  // namespace detail

// Enumerates element/charge/bond-order preserving bijections a -> b
// (mapping[i] is the atom of b matched to atom i of a). Returns true when
// the enumeration was cut at max_count.
inline bool for_each_isomorphism(const MolecularGraph& a, const MolecularGraph& b, std::size_t max_count,
                                 const std::function<bool(const std::vector<int>&)>& on_match) {
  detail::Matcher m(a, b, &a == &b);
  return m.run(max_count, on_match);
}

struct AutomorphismGroup {
  std::vector<std::vector<int>> permutations;  // permutations.front() is the identity
  bool truncated = false;
};

inline AutomorphismGroup automorphisms(const MolecularGraph& g,
                                       std::size_t max_count = kDefaultMaxAutomorphisms) {
  if (max_count == 0) throw InvalidArgument("max_count must be positive");
  AutomorphismGroup out;
  out.truncated = for_each_isomorphism(g, g, max_count, [&](const std::vector<int>& p) {
    out.permutations.push_back(p);
    return true;
  });
  return out;
}

inline std::optional<std::vector<int>> graphs_match(const MolecularGraph& a, const MolecularGraph& b) {
  std::optional<std::vector<int>> found;
  for_each_isomorphism(a, b, 1, [&](const std::vector<int>& m) {
    found = m;
    return false;
  });
  return found;
}

struct IsomorphismSet {
  std::vector<std::vector<int>> mappings;
  bool truncated = false;
};

inline IsomorphismSet isomorphisms(const MolecularGraph& a, const MolecularGraph& b,
                                   std::size_t max_count = kDefaultMaxAutomorphisms) {
  IsomorphismSet out;
  out.truncated = for_each_isomorphism(a, b, max_count, [&](const std::vector<int>& m) {
    out.mappings.push_back(m);
    return true;
  });
  return out;
}

}  // namespace posebench::molgraph
