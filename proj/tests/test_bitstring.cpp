#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <set>

#include "gmnl/bitstring.hpp"
#include "gmnl/rng.hpp"

using namespace gmnl;

TEST_CASE("XOR algebra on fixed-length words", "[bitcode]") {
  const BitString a = BitString::parse("0101");
  const BitString b = BitString::parse("0011");
  CHECK((a ^ b).str() == "0110");
  CHECK((a ^ a).str() == "0000");
  CHECK((BitString::zeros(4) ^ a) == a);
  CHECK(a.hamming_weight() == 2);
  CHECK(BitString::parse("1000").value() == 8);  // leftmost character is the MSB
  CHECK_THROWS_AS(a ^ BitString::parse("01010"), InputError);
  CHECK_THROWS_AS(BitString::parse("01x1"), InputError);
  CHECK_THROWS_AS(BitString(4, 2), InputError);  // value wider than the length
}

TEST_CASE("codewords have weight n/2 and form a group", "[bitcode]") {
  const HadamardCode c2(2);
  std::set<std::string> words;
  for (int a = 0; a < c2.n(); ++a) words.insert(c2.codeword(a).str());
  CHECK(words == std::set<std::string>{"0000", "0101", "0011", "0110"});

  for (int k = 2; k <= 4; ++k) {
    const HadamardCode code(k);
    CHECK(code.contains(0));
    for (std::uint64_t h : code.codeword_values()) {
      if (h != 0) CHECK(std::popcount(h) == code.n() / 2);
      for (std::uint64_t g : code.codeword_values()) {
        CHECK(code.contains(h ^ g));
        if (h != g) CHECK(std::popcount(h ^ g) == code.n() / 2);
      }
    }
  }
  CHECK_THROWS_AS(HadamardCode(0), CapacityError);
  CHECK_THROWS_AS(HadamardCode(7), CapacityError);
}

TEST_CASE("orbits partition the cube and are closed under the action", "[bitcode]") {
  for (int k = 2; k <= 3; ++k) {
    const HadamardCode code(k);
    const int n = code.n();
    std::set<std::uint64_t> reps;
    for (std::uint64_t x = 0; x < (1ULL << n); ++x) reps.insert(code.representative(x));
    CHECK(reps.size() == (1ULL << n) / static_cast<std::uint64_t>(n));
    for (std::uint64_t rep : reps) {
      const Orbit orbit(BitString(rep, n), code);
      std::set<std::uint64_t> elems;
      for (const auto& e : orbit.elements()) elems.insert(e.value());
      CHECK(static_cast<int>(elems.size()) == n);
      CHECK(elems.count(rep) == 1);
    }
  }
}

TEST_CASE("orbit of a word and its canonical representative", "[bitcode]") {
  const HadamardCode code(2);
  const Orbit zero(BitString::parse("0000"), code);
  CHECK(zero.representative().str() == "0000");
  std::set<std::string> zero_elems;
  for (const auto& e : zero.elements()) zero_elems.insert(e.str());
  CHECK(zero_elems == std::set<std::string>{"0000", "0101", "0011", "0110"});

  const Orbit one(BitString::parse("1000"), code);
  CHECK(one.representative().str() == "1000");
  std::set<std::string> one_elems;
  for (const auto& e : one.elements()) one_elems.insert(e.str());
  CHECK(one_elems == std::set<std::string>{"1000", "1101", "1011", "1110"});

  // The orbit is invariant under translating the query by any codeword.
  RngStream rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const BitString x(rng.next_bits(4), 4);
    const Orbit ox(x, code);
    for (std::uint64_t h : code.codeword_values())
      CHECK(Orbit(x ^ BitString(h, 4), code) == ox);
  }
  CHECK_THROWS_AS(Orbit(BitString::parse("10001"), code), InputError);
}

TEST_CASE("max-weight element with the lexicographic tie rule", "[bitcode]") {
  const HadamardCode code(2);
  CHECK(max_weight_element(Orbit(BitString::parse("0000"), code)).str() == "0011");
  CHECK(max_weight_element(Orbit(BitString::parse("1000"), code)).str() == "1011");

  // Constant on the orbit: any element queries to the same answer.
  for (int k = 2; k <= 4; ++k) {
    const HadamardCode c(k);
    RngStream rng(0x77 + k);
    for (int trial = 0; trial < 30; ++trial) {
      const BitString x(rng.next_bits(c.n()), c.n());
      const Orbit orbit(x, c);
      const BitString chosen = max_weight_element(orbit);
      CHECK(orbit.contains(chosen));
      for (const auto& e : orbit.elements())
        CHECK(max_weight_element(Orbit(e, c)) == chosen);
    }
  }
}

TEST_CASE("componentwise orbits of word tuples", "[bitcode]") {
  const HadamardCode code(2);
  const std::vector<BitString> xs{BitString::parse("1000"), BitString::parse("0001")};
  const auto orbits = cartesian_orbit(xs, code);
  REQUIRE(orbits.size() == 2);
  CHECK(orbits[0] == Orbit(xs[0], code));
  CHECK(orbits[1] == Orbit(xs[1], code));
  std::size_t joint = 1;
  for (const auto& o : orbits) joint *= static_cast<std::size_t>(o.size());
  CHECK(joint == 16);  // n^L
}

TEST_CASE("large words enumerate orbits lazily", "[bitcode]") {
  const HadamardCode code(5);  // n = 32: per-query enumeration
  const BitString x(0xdeadbeefULL & 0xffffffffULL, 32);
  const Orbit orbit(x, code);
  CHECK(orbit.size() == 32);
  const auto elems = orbit.elements();
  CHECK(elems.size() == 32);
  for (const auto& e : elems) CHECK(orbit.contains(e));
  CHECK(orbit.contains(orbit.representative()));
}
