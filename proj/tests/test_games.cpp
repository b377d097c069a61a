#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gmnl/bellgame.hpp"
#include "gmnl/network_game.hpp"

using namespace gmnl;

namespace {

Behavior constant_zero_behavior(const BellGame& g) {
  return Behavior::deterministic({g.num_x(), g.num_y()}, {g.num_a(), g.num_b()},
                                 [](int, int) { return 0; });
}

BellGame all_weights_one(int nx, int na) {
  std::vector<double> w(static_cast<std::size_t>(nx) * nx * na * na, 1.0);
  std::vector<double> p(static_cast<std::size_t>(nx) * nx, 1.0 / (nx * nx));
  return BellGame(nx, nx, na, na, std::move(w), std::move(p));
}

}  // namespace

TEST_CASE("the binary game table and its constant-strategy score", "[games]") {
  const BellGame g = chsh();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      CHECK(g.p(x, y) == 0.25);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double w = g.weight(a, b, x, y);
          CHECK((w == 0.0 || w == 1.0));
          CHECK(w == (((a ^ b) == (x & y)) ? 1.0 : 0.0));
        }
    }
  CHECK(score(g, constant_zero_behavior(g)) == 0.75);
  CHECK(g.is_symmetric());
}

TEST_CASE("score is affine in the behavior", "[games]") {
  const BellGame g = chsh();
  const Behavior p0 = constant_zero_behavior(g);
  const Behavior p1 = Behavior::deterministic({2, 2}, {2, 2}, [](int party, int x) {
    return party == 0 ? x : 1 - x;
  });
  std::vector<double> mixed(p0.table().size());
  for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] = 0.5 * p0.table()[i] + 0.5 * p1.table()[i];
  const Behavior pm({2, 2}, {2, 2}, std::move(mixed));
  CHECK(score(g, pm) == Catch::Approx(0.5 * score(g, p0) + 0.5 * score(g, p1)).margin(1e-15));
}

TEST_CASE("behavior validation", "[games]") {
  std::vector<double> bad(16, 0.0);  // rows do not sum to 1
  CHECK_THROWS_AS(Behavior({2, 2}, {2, 2}, bad), InputError);
  std::vector<double> negative(16, 0.25);
  negative[0] = -0.25;
  negative[1] = 0.75;
  CHECK_THROWS_AS(Behavior({2, 2}, {2, 2}, negative), InputError);
  CHECK_THROWS_AS(score(chsh(), Behavior::deterministic({3, 2}, {2, 2}, [](int, int) { return 0; })),
                  InputError);
}

TEST_CASE("local bound by brute force is exactly 3/4, repetition 5/8", "[games]") {
  const BellGame g = chsh();
  const LocalBound b = local_bound_bruteforce(g);
  CHECK(b.value == 0.75);
  REQUIRE(b.exact.has_value());
  CHECK(*b.exact == Frac(3, 4));
  // The returned strategies attain the bound.
  const Behavior best = Behavior::deterministic({2, 2}, {2, 2}, [&](int party, int x) {
    return party == 0 ? b.strategy_a[static_cast<std::size_t>(x)]
                      : b.strategy_b[static_cast<std::size_t>(x)];
  });
  CHECK(score(g, best) == 0.75);

  const LocalBound b2 = local_bound_bruteforce(krep(g, 2));
  CHECK(b2.value == 0.625);
  REQUIRE(b2.exact.has_value());
  CHECK(*b2.exact == Frac(5, 8));
  // Correlated repetition strictly beats the independent square.
  CHECK(b2.value > 0.75 * 0.75);

  CHECK(local_bound_bruteforce(all_weights_one(2, 2)).value == 1.0);
  CHECK_THROWS_AS(local_bound_bruteforce(krep(chsh(), 2), /*ops_budget=*/10), CapacityError);
}

TEST_CASE("k-repetition structure", "[games]") {
  const BellGame g = chsh();
  const BellGame g1 = krep(g, 1);
  CHECK(g1.num_x() == g.num_x());
  CHECK(g1.weight(1, 0, 1, 1) == g.weight(1, 0, 1, 1));
  const BellGame g2 = krep(g, 2);
  CHECK(g2.num_x() == 4);
  // Input distribution multiplies.
  for (int xf = 0; xf < 4; ++xf)
    for (int yf = 0; yf < 4; ++yf) CHECK(g2.p(xf, yf) == 0.0625);
  // Weight is the product of the per-instance weights.
  CHECK(g2.weight(0, 0, 3, 3) == g.weight(0, 0, 1, 1) * g.weight(0, 0, 1, 1));
  CHECK_THROWS_AS(krep(g, 20), CapacityError);
  // Repetition never loses to independent play.
  const double single = local_bound_bruteforce(g).value;
  CHECK(local_bound_bruteforce(g2).value >= single * single - 1e-15);
}

TEST_CASE("network slot bookkeeping", "[games]") {
  const NetworkGame tri = network_game(chsh(), NetworkGraph::triangle());
  for (int p = 0; p < 3; ++p) {
    CHECK(tri.slots_of(p) == 2);
    CHECK(tri.party_input_sizes()[static_cast<std::size_t>(p)] == 4);
    CHECK(tri.party_output_sizes()[static_cast<std::size_t>(p)] == 4);
  }
  const NetworkGame star = network_game(chsh(), NetworkGraph::star(3));
  CHECK(star.slots_of(0) == 3);
  CHECK(star.slots_of(1) == 1);
  CHECK(star.party_input_sizes()[0] == 8);

  // Asymmetric weights are rejected.
  std::vector<double> w(16, 0.0);
  BellGame sym = chsh();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          w[static_cast<std::size_t>(((x * 2 + y) * 2 + a) * 2 + b)] =
              (a == 0 && x == 1) ? 0.5 : sym.weight(a, b, x, y) * 0.5;
  const BellGame asym(2, 2, 2, 2, std::move(w), {0.25, 0.25, 0.25, 0.25});
  CHECK_THROWS_AS(network_game(asym, NetworkGraph::triangle()), UnsupportedError);
}

TEST_CASE("network score on the triangle and on a single edge", "[games]") {
  const NetworkGame tri = network_game(chsh(), NetworkGraph::triangle());
  const Behavior zeros = Behavior::deterministic(tri.party_input_sizes(), tri.party_output_sizes(),
                                                 [](int, int) { return 0; });
  CHECK(network_score(tri, zeros) == Catch::Approx(0.421875).margin(1e-15));  // (3/4)^3

  // Single edge: the network score reduces to the bipartite score.
  const NetworkGame edge = network_game(chsh(), NetworkGraph(2, {{0, 1}}));
  const Behavior zeros2 = Behavior::deterministic({2, 2}, {2, 2}, [](int, int) { return 0; });
  CHECK(network_score(edge, zeros2) == score(chsh(), zeros2));

  // A behavior winning every edge with certainty scores 1.
  const NetworkGame ones = network_game(all_weights_one(2, 2), NetworkGraph::triangle());
  const Behavior any = Behavior::deterministic(ones.party_input_sizes(), ones.party_output_sizes(),
                                               [](int, int) { return 1; });
  CHECK(network_score(ones, any) == 1.0);
}

TEST_CASE("network score is affine in the behavior", "[games]") {
  const NetworkGame tri = network_game(chsh(), NetworkGraph::triangle());
  const Behavior p0 = Behavior::deterministic(tri.party_input_sizes(), tri.party_output_sizes(),
                                              [](int, int) { return 0; });
  const Behavior p1 = Behavior::deterministic(tri.party_input_sizes(), tri.party_output_sizes(),
                                              [](int, int x) { return x; });
  std::vector<double> mixed(p0.table().size());
  for (std::size_t i = 0; i < mixed.size(); ++i)
    mixed[i] = 0.25 * p0.table()[i] + 0.75 * p1.table()[i];
  const Behavior pm(tri.party_input_sizes(), tri.party_output_sizes(), std::move(mixed));
  CHECK(network_score(tri, pm) ==
        Catch::Approx(0.25 * network_score(tri, p0) + 0.75 * network_score(tri, p1)).margin(1e-14));
}

TEST_CASE("biseparable bound: triangle equals the 2-repetition bound", "[games]") {
  const NetworkGame tri = network_game(chsh(), NetworkGraph::triangle());
  const BiseparableBound bound = biseparable_bound_bruteforce(tri);
  CHECK(bound.value == 0.625);
  REQUIRE(bound.exact.has_value());
  CHECK(*bound.exact == Frac(5, 8));
  CHECK(bound.witness == std::vector<int>{0});

  const NetworkGame edge = network_game(chsh(), NetworkGraph(2, {{0, 1}}));
  const BiseparableBound single = biseparable_bound_bruteforce(edge);
  CHECK(single.value == 0.75);

  const NetworkGame ones = network_game(all_weights_one(2, 2), NetworkGraph::triangle());
  CHECK(biseparable_bound_bruteforce(ones).value == 1.0);

  // Denser graphs cannot raise the biseparable bound of this game.
  const NetworkGame path = network_game(chsh(), NetworkGraph::path(3));
  CHECK(biseparable_bound_bruteforce(path).value >= bound.value);
}

TEST_CASE("score certification against the cut bound", "[games]") {
  const NetworkGame tri = network_game(chsh(), NetworkGraph::triangle());
  // A global deterministic responder that wins every edge: outputs 0 on the
  // smaller endpoint, x_i * x_j on the larger one. As a conditional
  // distribution this is a valid (signaling) behavior with score 1.
  const MixedRadix in(tri.party_input_sizes()), out(tri.party_output_sizes());
  std::vector<double> table(in.total() * out.total(), 0.0);
  for (std::size_t xf = 0; xf < in.total(); ++xf) {
    const auto joint = in.decode(xf);
    std::vector<std::vector<int>> slot_in(3, std::vector<int>(2));
    for (int p = 0; p < 3; ++p) {
      slot_in[p][0] = joint[p] / 2;
      slot_in[p][1] = joint[p] % 2;
    }
    std::vector<std::vector<int>> slot_out(3, std::vector<int>(2, 0));
    for (const auto& es : tri.edge_slots()) {
      const int xi = slot_in[es.party_i][es.slot_i];
      const int xj = slot_in[es.party_j][es.slot_j];
      slot_out[es.party_i][es.slot_i] = 0;
      slot_out[es.party_j][es.slot_j] = xi & xj;
    }
    std::vector<int> a(3);
    for (int p = 0; p < 3; ++p) a[p] = slot_out[p][0] * 2 + slot_out[p][1];
    table[xf * out.total() + out.encode(a)] = 1.0;
  }
  const Behavior winner(tri.party_input_sizes(), tri.party_output_sizes(), std::move(table));
  REQUIRE(network_score(tri, winner) == 1.0);

  const ScoreCertificate cert = certify_network_score(tri, winner);
  CHECK(cert.certified);
  CHECK(cert.min_cut_capacity == 2);
  CHECK(cert.threshold == 0.625);
  CHECK(cert.margin == 0.375);

  // Boundary: a score exactly at the supplied bound is not certified.
  const ScoreCertificate boundary = certify_network_score(tri, winner, 1.0);
  CHECK_FALSE(boundary.certified);
  CHECK(boundary.margin == 0.0);
}

TEST_CASE("exact rational arithmetic", "[games]") {
  CHECK(Frac(3, 4) + Frac(1, 8) == Frac(7, 8));
  CHECK(Frac(2, 4) == Frac(1, 2));
  CHECK(Frac(1, 3) * Frac(3, 5) == Frac(1, 5));
  CHECK(Frac(-1, -2) == Frac(1, 2));
  CHECK(Frac(1, 2) > Frac(1, 3));
  CHECK(Frac(1, 2).to_double() == 0.5);
  CHECK_THROWS_AS(Frac(1, 0), InputError);
}
