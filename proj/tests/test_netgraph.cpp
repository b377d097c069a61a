#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "gmnl/netgraph.hpp"
#include "gmnl/rng.hpp"

using namespace gmnl;

namespace {

NetworkGraph random_connected(RngStream& rng, int max_parties) {
  for (;;) {
    const int n = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_parties - 1)));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.next_bernoulli(0.5)) edges.emplace_back(i, j);
    try {
      return NetworkGraph(n, edges);
    } catch (const InputError&) {
    }
  }
}

bool connected_after_removal(const NetworkGraph& g, const std::vector<std::pair<int, int>>& removed) {
  const int n = g.parties();
  auto is_removed = [&](int i, int j) {
    return std::find(removed.begin(), removed.end(), std::make_pair(std::min(i, j), std::max(i, j))) !=
           removed.end();
  };
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j)
      if (g.adjacent(v, j) && !is_removed(v, j) && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        stack.push_back(j);
      }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace

TEST_CASE("graph construction and validation", "[netgraph]") {
  const NetworkGraph tri = NetworkGraph::triangle();
  CHECK(tri.parties() == 3);
  CHECK(tri.edges().size() == 3);
  CHECK(tri.degree(0) == 2);
  CHECK(tri.neighbors(1) == std::vector<int>{0, 2});

  CHECK_THROWS_AS(NetworkGraph(4, {{0, 1}, {2, 3}}), InputError);  // disconnected
  CHECK_THROWS_AS(NetworkGraph(2, {{0, 0}}), InputError);          // self-loop
  CHECK_THROWS_AS(NetworkGraph(1, {}), InputError);                // too few parties
  CHECK_THROWS_AS(NetworkGraph(3, {{0, 5}, {0, 1}}), InputError);  // endpoint range
}

TEST_CASE("named capacities: star, triangle, complete, path", "[netgraph]") {
  CHECK(min_cut(NetworkGraph::star(2)).capacity == 1);
  CHECK(min_cut(NetworkGraph::star(6)).capacity == 1);
  CHECK(min_cut(NetworkGraph::triangle()).capacity == 2);
  for (int n : {3, 4, 5, 6}) CHECK(min_cut(NetworkGraph::complete(n)).capacity == n - 1);
  CHECK(min_cut(NetworkGraph::path(4)).capacity == 1);
  CHECK(min_cut_bruteforce(NetworkGraph::path(4)).capacity == 1);
  CHECK(min_cut_bruteforce(NetworkGraph::complete(4)).capacity == 3);
}

TEST_CASE("cut capacity of explicit subsets", "[netgraph]") {
  const NetworkGraph tri = NetworkGraph::triangle();
  CHECK(cut_capacity(tri, {0}) == 2);
  CHECK(cut_capacity(tri, {1, 2}) == 2);  // complement invariance
  const NetworkGraph star = NetworkGraph::star(4);
  CHECK(cut_capacity(star, {0}) == 4);
  CHECK(cut_capacity(star, {1, 2, 3, 4}) == 4);
  CHECK_THROWS_AS(cut_capacity(tri, {}), InputError);
  CHECK_THROWS_AS(cut_capacity(tri, {0, 1, 2}), InputError);
  CHECK_THROWS_AS(cut_capacity(tri, {7}), InputError);
}

TEST_CASE("contraction min-cut equals the exhaustive minimum", "[netgraph]") {
  RngStream rng(0xBEEF);
  for (int trial = 0; trial < 80; ++trial) {
    const NetworkGraph g = random_connected(rng, 8);
    const Cut fast = min_cut(g);
    const Cut slow = min_cut_bruteforce(g);
    CHECK(fast.capacity == slow.capacity);
    CHECK(cut_capacity(g, fast.subset) == fast.capacity);  // witness is consistent
    CHECK(cut_capacity(g, slow.subset) == slow.capacity);
  }
}

TEST_CASE("removing a minimum cut disconnects the graph", "[netgraph]") {
  RngStream rng(0xD15C);
  for (int trial = 0; trial < 30; ++trial) {
    const NetworkGraph g = random_connected(rng, 7);
    const Cut cut = min_cut(g);
    std::vector<char> in_s(static_cast<std::size_t>(g.parties()), 0);
    for (int v : cut.subset) in_s[static_cast<std::size_t>(v)] = 1;
    std::vector<std::pair<int, int>> crossing;
    for (auto [i, j] : g.edges())
      if (in_s[static_cast<std::size_t>(i)] != in_s[static_cast<std::size_t>(j)])
        crossing.emplace_back(i, j);
    CHECK(static_cast<int>(crossing.size()) == cut.capacity);
    CHECK_FALSE(connected_after_removal(g, crossing));
  }
}

TEST_CASE("adding an edge never decreases the min-cut capacity", "[netgraph]") {
  RngStream rng(0xADD);
  int grown = 0;
  for (int trial = 0; trial < 60 && grown < 25; ++trial) {
    const NetworkGraph g = random_connected(rng, 7);
    std::vector<std::pair<int, int>> missing;
    for (int i = 0; i < g.parties(); ++i)
      for (int j = i + 1; j < g.parties(); ++j)
        if (!g.adjacent(i, j)) missing.emplace_back(i, j);
    if (missing.empty()) continue;
    auto edges = g.edges();
    edges.push_back(missing[rng.next_below(missing.size())]);
    const NetworkGraph bigger(g.parties(), edges);
    CHECK(min_cut(bigger).capacity >= min_cut(g).capacity);
    ++grown;
  }
  CHECK(grown > 0);
}

TEST_CASE("brute-force party cap", "[netgraph]") {
  CHECK_THROWS_AS(min_cut_bruteforce(NetworkGraph::path(21)), CapacityError);
}
