#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <map>

#include "gmnl/kv.hpp"

using namespace gmnl;

namespace {

/// Independent oracle: the winning probability by enumeration of the full
/// (x, z) cube with binomial noise weights, no representative shortcut.
double naive_score(int k, double eta, const KVStrategy& sa, const KVStrategy& sb) {
  const HadamardCode code(k);
  const int n = code.n();
  const std::uint64_t cube = 1ULL << n;
  double total = 0.0;
  for (std::uint64_t x = 0; x < cube; ++x) {
    const std::uint64_t a = sa.choose_value(x);
    for (std::uint64_t z = 0; z < cube; ++z) {
      const std::uint64_t b = sb.choose_value(x ^ z);
      if ((a ^ b) != z) continue;
      total += std::pow(eta, std::popcount(z)) * std::pow(1.0 - eta, n - std::popcount(z));
    }
  }
  return total / static_cast<double>(cube);
}

}  // namespace

TEST_CASE("parameter validation and the default noise bias", "[kvgame]") {
  CHECK_THROWS_AS(KVParams(2, 1, 0.0), InputError);
  CHECK_THROWS_AS(KVParams(2, 1, 0.5), InputError);
  CHECK_THROWS_AS(KVParams(2, 0, 0.25), InputError);
  CHECK_THROWS_AS(KVParams(7, 1, 0.25), CapacityError);
  CHECK(KVParams::with_default_eta(3, 1).eta == Catch::Approx(1.0 / 6.0).margin(1e-15));
  CHECK(KVParams::with_default_eta(4, 1).eta == Catch::Approx(0.25).margin(1e-15));
  CHECK_THROWS_AS(KVParams::with_default_eta(2, 1), InputError);  // degenerates to 0 at n = 4
}

TEST_CASE("round sampling: determinism and noise statistics", "[kvgame]") {
  const KVParams params(3, 2, 0.25);
  RngStream s1(99), s2(99);
  const KVRound r1 = sample_round(params, s1);
  const KVRound r2 = sample_round(params, s2);
  for (int s = 0; s < params.L; ++s) {
    CHECK(r1.x[s] == r2.x[s]);
    CHECK(r1.z[s] == r2.z[s]);
    CHECK((r1.x[s] ^ r1.z[s]) == r1.y[s]);
  }
  // Empirical bit frequency of z within 4 sigma of eta.
  RngStream stream(123);
  std::uint64_t ones = 0, bits = 0;
  for (int round = 0; round < 20000; ++round) {
    RngStream lane = stream.derive(round);
    const KVRound r = sample_round(params, lane);
    for (const auto& z : r.z) {
      ones += static_cast<std::uint64_t>(z.hamming_weight());
      bits += static_cast<std::uint64_t>(z.length());
    }
  }
  const double freq = static_cast<double>(ones) / static_cast<double>(bits);
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(bits));
  CHECK(std::abs(freq - 0.25) < 4.0 * sigma);
}

TEST_CASE("win predicate", "[kvgame]") {
  const std::vector<BitString> a{BitString::parse("0101")};
  const std::vector<BitString> zero{BitString::parse("0000")};
  CHECK(win(a, a, zero));
  CHECK_FALSE(win(a, {BitString::parse("0100")}, zero));
  // Two slots: the win is the conjunction of per-slot wins.
  const std::vector<BitString> a2{BitString::parse("0101"), BitString::parse("0011")};
  const std::vector<BitString> b2{BitString::parse("0100"), BitString::parse("0011")};
  const std::vector<BitString> z2{BitString::parse("0001"), BitString::parse("0000")};
  CHECK(win(a2, b2, z2));
  CHECK_FALSE(win(a2, b2, {BitString::parse("0001"), BitString::parse("1000")}));
  CHECK_THROWS_AS(win(a2, a, z2), InputError);
}

TEST_CASE("closed-form local bound", "[kvgame]") {
  CHECK(classical_bound(KVParams(4, 1, 0.25)) == Catch::Approx(0.3968502629920499).margin(1e-15));
  CHECK(classical_bound(KVParams(4, 2, 0.25)) == Catch::Approx(0.15749013123685915).margin(1e-15));
  const double b1 = classical_bound(KVParams(4, 1, 0.25));
  const double b2 = classical_bound(KVParams(4, 2, 0.25));
  CHECK(std::abs(b2 - b1 * b1) <= 1e-15);
  CHECK(classical_bound(KVParams(4, 1, 1e-12)) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("exact score matches the naive oracle and the frozen constant", "[kvgame]") {
  const KVParams params(2, 1, 0.25);
  const KVStrategy mw = KVStrategy::max_weight(2);
  const double value = exact_score(mw, mw, params).value;
  CHECK(value == Catch::Approx(0.5625).margin(1e-12));  // frozen: 9/16
  CHECK(value == Catch::Approx(naive_score(2, 0.25, mw, mw)).margin(1e-14));

  const KVStrategy rnd = KVStrategy::random_orbit(2, 2024);
  CHECK(exact_score(rnd, rnd, params).value ==
        Catch::Approx(naive_score(2, 0.25, rnd, rnd)).margin(1e-14));
  CHECK(exact_score(mw, rnd, params).value ==
        Catch::Approx(naive_score(2, 0.25, mw, rnd)).margin(1e-14));

  const ScoreEstimate est = exact_score(mw, mw, params);
  CHECK(est.std_error == 0.0);
  CHECK(est.samples == 0);
  CHECK(est.method == ScoreEstimate::Method::kExact);
}

TEST_CASE("representative budget is enforced with a Monte Carlo pointer", "[kvgame]") {
  const KVParams params(4, 2, 0.25);  // (2^16/16)^2 joint representatives
  const KVStrategy mw = KVStrategy::max_weight(4);
  CHECK_THROWS_AS(exact_score(mw, mw, params), CapacityError);
  try {
    exact_score(mw, mw, params);
  } catch (const CapacityError& e) {
    CHECK(std::string(e.what()).find("mc_score") != std::string::npos);
  }
}

TEST_CASE("independent product strategies square the score", "[kvgame]") {
  for (int k : {2, 3}) {
    for (double eta : {0.1, 0.25}) {
      const KVParams p1(k, 1, eta), p2(k, 2, eta);
      for (const auto& s :
           {KVStrategy::max_weight(k), KVStrategy::random_orbit(k, 5), KVStrategy::random_orbit(k, 6)}) {
        const double s1 = exact_score(s, s, p1).value;
        const double s2 = exact_score(s, s, p2).value;
        CHECK(std::abs(s2 - s1 * s1) <= 1e-12);
      }
    }
  }
}

TEST_CASE("scores never exceed the closed-form bound, joint strategies included", "[kvgame]") {
  for (int k : {2, 3}) {
    for (double eta : {0.1, 0.25, 0.4}) {
      const KVParams params(k, 1, eta);
      const double bound = classical_bound(params);
      CHECK(exact_score(KVStrategy::max_weight(k), KVStrategy::max_weight(k), params).value <=
            bound + 1e-12);
      for (int i = 0; i < 25; ++i) {
        const KVStrategy s = KVStrategy::random_orbit(k, 100 + i);
        CHECK(exact_score(s, s, params).value <= bound + 1e-12);
      }
    }
  }
  // Slot-correlated strategies obey the L = 2 bound as well.
  const KVParams p2(2, 2, 0.25);
  const double bound2 = classical_bound(p2);
  for (int i = 0; i < 10; ++i) {
    const JointKVStrategy a = JointKVStrategy::random(2, 2, 900 + i);
    const JointKVStrategy b = JointKVStrategy::random(2, 2, 950 + i);
    CHECK(exact_score(a, b, p2).value <= bound2 + 1e-12);
  }
}

TEST_CASE("strategy outputs stay in the queried orbit and are orbit-constant", "[kvgame]") {
  for (int k : {2, 3}) {
    const HadamardCode code(k);
    for (const auto& s : {KVStrategy::max_weight(k), KVStrategy::random_orbit(k, 31)}) {
      RngStream rng(17 + k);
      for (int trial = 0; trial < 40; ++trial) {
        const BitString x(rng.next_bits(code.n()), code.n());
        const Orbit orbit(x, code);
        const BitString choice = s.choose(x);
        CHECK(orbit.contains(choice));
        for (const auto& e : orbit.elements()) CHECK(s.choose(e) == choice);
      }
    }
  }
}

TEST_CASE("monte-carlo scoring: consistency, determinism, single sample", "[kvgame]") {
  const KVParams params(2, 1, 0.25);
  const KVStrategy mw = KVStrategy::max_weight(2);
  const double exact = exact_score(mw, mw, params).value;
  const ScoreEstimate mc = mc_score(mw, mw, params, 100000, RngStream(7));
  CHECK(std::abs(mc.value - exact) <= 4.0 * mc.std_error);
  CHECK(mc.method == ScoreEstimate::Method::kMonteCarlo);
  CHECK(mc.samples == 100000);

  const ScoreEstimate again = mc_score(mw, mw, params, 100000, RngStream(7));
  CHECK(mc.value == again.value);

  const ScoreEstimate one = mc_score(mw, mw, params, 1, RngStream(3));
  CHECK((one.value == 0.0 || one.value == 1.0));
  CHECK_THROWS_AS(mc_score(mw, mw, params, 0, RngStream(3)), InputError);
}

TEST_CASE("orbit-basis vectors are orthonormal within an orbit", "[kvgame]") {
  for (int k : {2, 3}) {
    const HadamardCode code(k);
    const int n = code.n();
    const Orbit orbit(BitString(3 % (1 << n), n), code);
    const auto elems = orbit.elements();
    for (std::size_t i = 0; i < elems.size(); ++i) {
      const auto vi = orbit_basis_vector(elems[i]);
      for (std::size_t j = 0; j < elems.size(); ++j) {
        const auto vj = orbit_basis_vector(elems[j]);
        double dot = 0.0;
        for (int p = 0; p < n; ++p) dot += vi[p] * vj[p];
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("born probabilities normalize and match materialized vectors", "[kvgame]") {
  const HadamardCode code(2);
  RngStream rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const BitString x(rng.next_bits(4), 4), y(rng.next_bits(4), 4);
    const auto ox = Orbit(x, code).elements();
    const auto oy = Orbit(y, code).elements();
    double total = 0.0;
    for (const auto& a : ox)
      for (const auto& b : oy) {
        const double p = born_probability({a}, {b});
        const auto va = orbit_basis_vector(a);
        const auto vb = orbit_basis_vector(b);
        double dot = 0.0;
        for (int i = 0; i < 4; ++i) dot += va[i] * vb[i];
        CHECK(p == Catch::Approx(dot * dot / 4.0).margin(1e-14));
        total += p;
      }
    CHECK(total == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("quantum orbit strategy: frozen value, budget, monte-carlo", "[kvgame]") {
  const KVParams p4(2, 1, 0.25);
  const ScoreEstimate exact = quantum_orbit_strategy_score(p4, ScoreEstimate::Method::kExact);
  CHECK(exact.value == Catch::Approx(0.4375).margin(1e-12));  // frozen: 7/16

  const KVParams p16(4, 1, 0.25);
  CHECK_THROWS_AS(quantum_orbit_strategy_score(p16, ScoreEstimate::Method::kExact), CapacityError);

  QuantumScoreOptions opt;
  opt.samples = 20000;
  opt.seed = 11;
  const ScoreEstimate mc = quantum_orbit_strategy_score(p4, ScoreEstimate::Method::kMonteCarlo, opt);
  CHECK(std::abs(mc.value - exact.value) <= 4.0 * std::max(mc.std_error, 1e-9));
}

TEST_CASE("joint strategies validate their tables", "[kvgame]") {
  const HadamardCode code(2);
  // A joint table whose choice leaves the keyed orbit must be rejected.
  std::map<std::vector<std::uint64_t>, std::vector<std::uint64_t>> bad;
  bad[{0, 0}] = {0, 1};  // 1 is not in the orbit of 0
  CHECK_THROWS_AS(JointKVStrategy(2, 2, bad), InputError);
  const JointKVStrategy s = JointKVStrategy::random(2, 2, 4);
  const auto choice = s.choose_values({0, 0});
  REQUIRE(choice.size() == 2);
  for (std::uint64_t v : choice) CHECK(code.representative(v) == 0);
}
