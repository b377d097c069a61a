#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gmnl/errors.hpp"

namespace gmnl {

/// Undirected, unweighted, connected graph on N >= 2 parties, given by a
/// symmetric 0/1 adjacency matrix with zero diagonal. Disconnected graphs
/// are rejected: their min-cut capacity is 0 and every bound trivializes.
class NetworkGraph {
 public:
  NetworkGraph(int n, const std::vector<std::pair<int, int>>& edge_list) : n_(n) {
    if (n < 2) throw InputError("NetworkGraph: at least 2 parties required");
    adj_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
    for (auto [i, j] : edge_list) {
      if (i < 0 || j < 0 || i >= n || j >= n)
        throw InputError("NetworkGraph: edge endpoint out of range");
      if (i == j) throw InputError("NetworkGraph: self-loops are not allowed");
      adj_[idx(i, j)] = 1;
      adj_[idx(j, i)] = 1;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (adj_[idx(i, j)]) edges_.emplace_back(i, j);
    if (!connected()) throw InputError("NetworkGraph: graph must be connected");
  }

  static NetworkGraph triangle() { return NetworkGraph(3, {{0, 1}, {0, 2}, {1, 2}}); }

  static NetworkGraph star(int leaves) {
    if (leaves < 1) throw InputError("NetworkGraph: star needs at least 1 leaf");
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return NetworkGraph(leaves + 1, e);
  }

  static NetworkGraph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return NetworkGraph(n, e);
  }

  static NetworkGraph path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return NetworkGraph(n, e);
  }

  int parties() const { return n_; }
  bool adjacent(int i, int j) const { return adj_[idx(i, j)] != 0; }
  /// Edges {i, j} with i < j, sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int degree(int i) const {
    int d = 0;
    for (int j = 0; j < n_; ++j) d += adj_[idx(i, j)];
    return d;
  }
  /// Neighbors of i in ascending order (defines the slot order of party i).
  std::vector<int> neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < n_; ++j)
      if (adj_[idx(i, j)]) out.push_back(j);
    return out;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  bool connected() const {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int j = 0; j < n_; ++j)
        if (adj_[idx(v, j)] && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          stack.push_back(j);
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  }

  int n_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::pair<int, int>> edges_;
};

/// A bipartition witness: the subset S (nonempty, proper, sorted) and the
/// number of crossing edges.
struct Cut {
  std::vector<int> subset;
  int capacity = 0;
};

/// Number of edges with exactly one endpoint in S.
inline int cut_capacity(const NetworkGraph& g, const std::vector<int>& subset) {
  std::vector<char> in_s(static_cast<std::size_t>(g.parties()), 0);
  for (int v : subset) {
    if (v < 0 || v >= g.parties()) throw InputError("cut_capacity: vertex out of range");
    in_s[static_cast<std::size_t>(v)] = 1;
  }
  const int size = static_cast<int>(std::count(in_s.begin(), in_s.end(), 1));
  if (size == 0 || size == g.parties())
    throw InputError("cut_capacity: subset must be nonempty and proper");
  int c = 0;
  for (auto [i, j] : g.edges())
    if (in_s[static_cast<std::size_t>(i)] != in_s[static_cast<std::size_t>(j)]) ++c;
  return c;
}

/// Global minimum cut by the Stoer-Wagner contraction algorithm with unit
/// weights. Among equal-capacity cuts the first one found is returned;
/// callers needing a deterministic witness order use min_cut_bruteforce.
inline Cut min_cut(const NetworkGraph& g) {
  const int n = g.parties();
  std::vector<std::vector<int>> w(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  for (auto [i, j] : g.edges()) {
    w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1;
  }
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) groups[static_cast<std::size_t>(i)] = {i};
  std::vector<int> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), 0);

  Cut best;
  best.capacity = -1;
  while (active.size() > 1) {
    // maximum-adjacency search over the active super-vertices
    std::vector<int> weight_to_a(static_cast<std::size_t>(n), 0);
    std::vector<char> in_a(static_cast<std::size_t>(n), 0);
    int prev = -1, last = -1;
    for (std::size_t step = 0; step < active.size(); ++step) {
      int pick = -1;
      for (int v : active)
        if (!in_a[static_cast<std::size_t>(v)] &&
            (pick == -1 || weight_to_a[static_cast<std::size_t>(v)] > weight_to_a[static_cast<std::size_t>(pick)]))
          pick = v;
      if (pick < 0) break;  // unreachable on a connected graph
      in_a[static_cast<std::size_t>(pick)] = 1;
      prev = last;
      last = pick;
      for (int v : active)
        if (!in_a[static_cast<std::size_t>(v)])
          weight_to_a[static_cast<std::size_t>(v)] += w[static_cast<std::size_t>(pick)][static_cast<std::size_t>(v)];
    }
    // cut of the phase: group(last) vs the rest
    const int phase_capacity = weight_to_a[static_cast<std::size_t>(last)];
    if (best.capacity < 0 || phase_capacity < best.capacity) {
      best.capacity = phase_capacity;
      best.subset = groups[static_cast<std::size_t>(last)];
      std::sort(best.subset.begin(), best.subset.end());
    }
    // contract last into prev
    for (int v : active) {
      if (v == last || v == prev) continue;
      w[static_cast<std::size_t>(prev)][static_cast<std::size_t>(v)] += w[static_cast<std::size_t>(last)][static_cast<std::size_t>(v)];
      w[static_cast<std::size_t>(v)][static_cast<std::size_t>(prev)] = w[static_cast<std::size_t>(prev)][static_cast<std::size_t>(v)];
    }
    auto& gp = groups[static_cast<std::size_t>(prev)];
    auto& gl = groups[static_cast<std::size_t>(last)];
    gp.insert(gp.end(), gl.begin(), gl.end());
    active.erase(std::find(active.begin(), active.end(), last));
  }
  return best;
}

/// Exhaustive minimum over all 2^(N-1) - 1 bipartitions (vertex 0 pinned to
/// S). Serves as the oracle for min_cut; subsets scan in ascending bitmask
/// order and strictly smaller capacity is required to replace the incumbent.
inline Cut min_cut_bruteforce(const NetworkGraph& g) {
  const int n = g.parties();
  if (n > 20) throw CapacityError("min_cut_bruteforce: capped at N <= 20 parties");
  Cut best;
  best.capacity = -1;
  const std::uint32_t limit = 1u << (n - 1);
  for (std::uint32_t mask = 0; mask + 1 < limit; ++mask) {
    std::vector<int> subset{0};
    for (int v = 1; v < n; ++v)
      if (mask & (1u << (v - 1))) subset.push_back(v);
    const int c = cut_capacity(g, subset);
    if (best.capacity < 0 || c < best.capacity) {
      best.capacity = c;
      best.subset = std::move(subset);
    }
  }
  return best;
}

}  // namespace gmnl
