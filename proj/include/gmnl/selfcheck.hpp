#pragma once

// Verification suite: every check pins an independently derived expectation
// (closed forms, exhaustive enumerations, frozen oracle constants) against
// the library implementation at a fixed tolerance. The CLI `verify`
// subcommand and the acceptance test binary both run these. Nothing in the
// library proper depends on this header.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "gmnl/gmnl.hpp"

namespace gmnl::selfcheck {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = true;
  std::string detail;
};

class Checker {
 public:
  void require(bool condition, const std::string& what) {
    if (!condition) {
      passed_ = false;
      if (failure_count_ < 8) append(failures_, what);
      ++failure_count_;
    }
  }
  void note(const std::string& info) { append(notes_, info); }

  bool passed() const { return passed_; }
  std::string detail() const {
    if (passed_) return notes_;
    std::string d = failures_;
    if (failure_count_ > 8) d += "; (+" + std::to_string(failure_count_ - 8) + " more)";
    return d;
  }

 private:
  static void append(std::string& target, const std::string& s) {
    if (!target.empty()) target += "; ";
    target += s;
  }
  bool passed_ = true;
  int failure_count_ = 0;
  std::string failures_;
  std::string notes_;
};

namespace detail {

inline std::string fmt(double v) { return fmt_double(v); }

template <typename Fn>
CheckResult run_check(int id, const std::string& name, Fn&& body) {
  CheckResult result;
  result.id = id;
  result.name = name;
  Checker ck;
  try {
    body(ck);
    result.passed = ck.passed();
    result.detail = ck.detail();
  } catch (const std::exception& e) {
    result.passed = false;
    result.detail = std::string("exception: ") + e.what();
  }
  return result;
}

/// Independent oracle for the quantum orbit strategy: materializes the
/// actual basis vectors and enumerates the full input cube with explicit
/// dot products (no popcount shortcut).
inline double quantum_score_vector_oracle(int k, double eta) {
  const HadamardCode code(k);
  const int n = code.n();
  const std::uint64_t cube = 1ULL << n;
  double total = 0.0;
  for (std::uint64_t x = 0; x < cube; ++x) {
    const auto ox = Orbit(BitString(x, n), code).elements();
    for (std::uint64_t z = 0; z < cube; ++z) {
      const double w = std::pow(eta, std::popcount(z)) *
                       std::pow(1.0 - eta, n - std::popcount(z));
      const auto oy = Orbit(BitString(x ^ z, n), code).elements();
      double p = 0.0;
      for (const auto& a : ox)
        for (const auto& b : oy) {
          if ((a.value() ^ b.value()) != z) continue;
          const auto va = orbit_basis_vector(a);
          const auto vb = orbit_basis_vector(b);
          double ip = 0.0;
          for (int i = 0; i < n; ++i)
            ip += va[static_cast<std::size_t>(i)] * vb[static_cast<std::size_t>(i)];
          p += ip * ip / static_cast<double>(n);
        }
      total += w * p;
    }
  }
  return total / static_cast<double>(cube);
}

inline NetworkGraph random_connected_graph(RngStream& rng, int max_parties) {
  for (;;) {
    const int n = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_parties - 1)));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.next_bernoulli(0.5)) edges.emplace_back(i, j);
    try {
      return NetworkGraph(n, edges);
    } catch (const InputError&) {
      continue;  // disconnected draw, try again
    }
  }
}

}  // namespace detail

// --------------------------------------------------------------------------
// 1. Code structure: weights, closure, orbit partition of the cube.
// --------------------------------------------------------------------------
inline CheckResult check_code_structure() {
  return detail::run_check(1, "hadamard-code structure and orbit partition", [](Checker& ck) {
    for (int k = 2; k <= 4; ++k) {
      const HadamardCode code(k);
      const int n = code.n();
      std::set<std::uint64_t> words(code.codeword_values().begin(), code.codeword_values().end());
      ck.require(static_cast<int>(words.size()) == n, "k=" + std::to_string(k) + ": duplicate codewords");
      ck.require(words.count(0) == 1, "k=" + std::to_string(k) + ": all-zero word missing");
      for (std::uint64_t h : words) {
        if (h != 0)
          ck.require(std::popcount(h) == n / 2,
                     "k=" + std::to_string(k) + ": nonzero codeword weight != n/2");
        for (std::uint64_t g : words)
          ck.require(words.count(h ^ g) == 1, "k=" + std::to_string(k) + ": not closed under XOR");
      }
      // Orbits partition {0,1}^n into 2^n/n classes of size n.
      const std::uint64_t cube = 1ULL << n;
      std::set<std::uint64_t> reps;
      for (std::uint64_t x = 0; x < cube; ++x) reps.insert(code.representative(x));
      ck.require(reps.size() == cube / static_cast<std::uint64_t>(n),
                 "k=" + std::to_string(k) + ": wrong number of orbit classes");
      for (std::uint64_t rep : reps) {
        const auto elems = Orbit(BitString(rep, n), code).elements();
        std::set<std::uint64_t> uniq;
        for (const auto& e : elems) uniq.insert(e.value());
        ck.require(static_cast<int>(uniq.size()) == n,
                   "k=" + std::to_string(k) + ": orbit size != n");
      }
    }
  });
}

// --------------------------------------------------------------------------
// 2. Orbit-game local bound: no orbit-respecting strategy beats the closed
//    form n^(-eta/(1-eta)).
// --------------------------------------------------------------------------
inline CheckResult check_local_bound_grid() {
  return detail::run_check(2, "orbit-game scores never exceed the closed-form local bound",
                           [](Checker& ck) {
    double worst_ratio = 0.0;
    for (int k : {2, 3, 4}) {
      for (double eta : {0.1, 0.25, 0.4}) {
        const KVParams params(k, 1, eta);
        const double bound = classical_bound(params);
        const KVStrategy mw = KVStrategy::max_weight(k);
        const double mw_score = exact_score(mw, mw, params).value;
        ck.require(mw_score <= bound + 1e-12,
                   "max-weight exceeds bound at n=" + std::to_string(params.n()) +
                       " eta=" + detail::fmt(eta));
        worst_ratio = std::max(worst_ratio, mw_score / bound);
        for (int i = 0; i < 100; ++i) {
          const KVStrategy rnd = KVStrategy::random_orbit(k, mix64(0xACCE97ULL + 1000 * k) + i);
          const double sc = exact_score(rnd, rnd, params).value;
          ck.require(sc <= bound + 1e-12,
                     "random strategy " + std::to_string(i) + " exceeds bound at n=" +
                         std::to_string(params.n()) + " eta=" + detail::fmt(eta));
          worst_ratio = std::max(worst_ratio, sc / bound);
        }
      }
    }
    ck.note("largest score/bound ratio " + detail::fmt(worst_ratio));
  });
}

// --------------------------------------------------------------------------
// 3. Parallel repetition: product strategies square the score, the closed
//    bound squares exactly.
// --------------------------------------------------------------------------
inline CheckResult check_multiplicativity() {
  return detail::run_check(3, "parallel-repetition multiplicativity", [](Checker& ck) {
    for (int k : {2, 3}) {
      for (double eta : {0.1, 0.25}) {
        const KVParams p1(k, 1, eta), p2(k, 2, eta);
        std::vector<KVStrategy> strategies{KVStrategy::max_weight(k),
                                           KVStrategy::random_orbit(k, 77),
                                           KVStrategy::random_orbit(k, 78)};
        for (const auto& s : strategies) {
          const double s1 = exact_score(s, s, p1).value;
          const double s2 = exact_score(s, s, p2).value;
          ck.require(std::abs(s2 - s1 * s1) <= 1e-12,
                     "L=2 score differs from squared L=1 score by " +
                         detail::fmt(std::abs(s2 - s1 * s1)));
        }
        const double b1 = classical_bound(p1), b2 = classical_bound(p2);
        ck.require(std::abs(b2 - b1 * b1) <= 1e-15, "bound at L=2 is not the square of L=1");
      }
    }
  });
}

// --------------------------------------------------------------------------
// 4. Monte Carlo consistency with exact scores, 4 sigma, seeded.
// --------------------------------------------------------------------------
inline CheckResult check_monte_carlo() {
  return detail::run_check(4, "monte-carlo estimates agree with exact scores (4 sigma)",
                           [](Checker& ck) {
    for (int k : {2, 3, 4}) {
      for (double eta : {0.1, 0.25, 0.4}) {
        const KVParams params(k, 1, eta);
        const KVStrategy mw = KVStrategy::max_weight(k);
        const double exact = exact_score(mw, mw, params).value;
        const ScoreEstimate mc =
            mc_score(mw, mw, params, 100000, RngStream(mix64(0x5a11ULL + static_cast<std::uint64_t>(100 * k + static_cast<int>(100 * eta)))));
        const double sigma = std::max(mc.std_error, 1e-9);
        ck.require(std::abs(mc.value - exact) <= 4.0 * sigma,
                   "n=" + std::to_string(params.n()) + " eta=" + detail::fmt(eta) + ": |" +
                       detail::fmt(mc.value) + " - " + detail::fmt(exact) + "| > 4 sigma");
      }
    }
  });
}

// --------------------------------------------------------------------------
// 5. Brute-force local bounds as exact rationals.
// --------------------------------------------------------------------------
inline CheckResult check_chsh_bounds() {
  return detail::run_check(5, "brute-forced game bounds are exactly 3/4 and 5/8", [](Checker& ck) {
    const BellGame game = chsh();
    const LocalBound b1 = local_bound_bruteforce(game);
    ck.require(b1.exact.has_value() && *b1.exact == Frac(3, 4),
               "single-game bound is not the exact rational 3/4");
    ck.require(b1.value == 0.75, "single-game bound double is not 0.75");
    const LocalBound b2 = local_bound_bruteforce(krep(game, 2));
    ck.require(b2.exact.has_value() && *b2.exact == Frac(5, 8),
               "2-repetition bound is not the exact rational 5/8");
    ck.require(b2.value == 0.625, "2-repetition bound double is not 0.625");
  });
}

// --------------------------------------------------------------------------
// 6. Triangle network: the exhaustive biseparable maximum equals the
//    2-repetition bound, and no bipartition exceeds it.
// --------------------------------------------------------------------------
inline CheckResult check_triangle_biseparable() {
  return detail::run_check(6, "triangle biseparable maximum equals the 2-repetition bound",
                           [](Checker& ck) {
    const NetworkGame ng = network_game(chsh(), NetworkGraph::triangle());
    const Frac expected(5, 8);
    const BiseparableBound bound = biseparable_bound_bruteforce(ng);
    ck.require(bound.exact.has_value() && *bound.exact == expected,
               "biseparable maximum is not exactly 5/8");
    const LocalBound rep = local_bound_bruteforce(krep(ng.base(), 2));
    ck.require(rep.exact.has_value() && *rep.exact == *bound.exact,
               "biseparable maximum differs from the 2-repetition bound");
    // Every bipartition individually stays below the maximum.
    const std::vector<std::vector<int>> parts{{0}, {0, 1}, {0, 2}};
    for (const auto& part : parts) {
      const LocalBound lb = local_bound_bruteforce(merged_bipartition_game(ng, part));
      ck.require(lb.exact.has_value() && !(*lb.exact > expected),
                 "a bipartition exceeds the repetition bound");
    }
    ck.require(bound.witness == std::vector<int>{0}, "witness is not the lexicographic first cut");
  });
}

// --------------------------------------------------------------------------
// 7. Min-cut: contraction algorithm vs exhaustive bipartitions.
// --------------------------------------------------------------------------
inline CheckResult check_min_cut() {
  return detail::run_check(7, "min-cut agrees with exhaustive bipartition minimum",
                           [](Checker& ck) {
    RngStream rng(0xC07ULL);
    for (int trial = 0; trial < 200; ++trial) {
      const NetworkGraph g = detail::random_connected_graph(rng, 8);
      const int fast = min_cut(g).capacity;
      const int slow = min_cut_bruteforce(g).capacity;
      ck.require(fast == slow, "trial " + std::to_string(trial) + ": " + std::to_string(fast) +
                                   " != " + std::to_string(slow));
    }
    ck.require(min_cut(NetworkGraph::star(5)).capacity == 1, "star capacity != 1");
    ck.require(min_cut(NetworkGraph::triangle()).capacity == 2, "triangle capacity != 2");
    for (int n : {4, 5, 6})
      ck.require(min_cut(NetworkGraph::complete(n)).capacity == n - 1,
                 "complete-graph capacity != N-1");
  });
}

// --------------------------------------------------------------------------
// 8. Twirl channel: trace preservation, idempotence, fixed point, the
//    |00><00| value, and positivity of the network twirl on a correlated
//    input whose rank-one remainder is not PSD.
// --------------------------------------------------------------------------
inline CheckResult check_twirl() {
  return detail::run_check(8, "twirl preserves trace, is idempotent, and outputs valid states",
                           [](Checker& ck) {
    const DensityOperator phi = max_entangled(2);
    const DensityOperator tphi = twirl_pair(phi, 0, 1);
    ck.require((tphi.matrix() - phi.matrix()).cwiseAbs().maxCoeff() <= 1e-12,
               "maximally entangled state is not a fixed point");
    // |00><00| -> isotropic(1/2).
    CMatrix zz = CMatrix::Zero(4, 4);
    zz(0, 0) = Complex(1.0, 0.0);
    const DensityOperator tzz = twirl_pair(DensityOperator({2, 2}, zz), 0, 1);
    ck.require((tzz.matrix() - isotropic(0.5, 2).matrix()).cwiseAbs().maxCoeff() <= 1e-12,
               "twirl of |00><00| is not isotropic(1/2)");
    for (int trial = 0; trial < 20; ++trial) {
      const DensityOperator rho = random_density({2, 2}, 0x88ULL + static_cast<std::uint64_t>(trial));
      const DensityOperator t1 = twirl_pair(rho, 0, 1);
      ck.require(std::abs(t1.matrix().trace().real() - 1.0) <= 1e-12, "trace not preserved");
      const DensityOperator t2 = twirl_pair(t1, 0, 1);
      ck.require((t2.matrix() - t1.matrix()).cwiseAbs().maxCoeff() <= 1e-12, "twirl not idempotent");
      const double f = fidelity_phi_plus(rho, 0, 1);
      ck.require((t1.matrix() - isotropic(f, 2).matrix()).cwiseAbs().maxCoeff() <= 1e-10,
                 "twirl output is not the isotropic state of the same fidelity");
    }
    // Correlated two-edge state on the path network: remainder not PSD, the
    // network twirl still produces a valid state.
    const NetworkGraph path3 = NetworkGraph::path(3);
    const EdgeAssignment assign = EdgeAssignment::canonical(path3, 2);
    CVector phi_gamma = tensor_at_vector(assign.dims(),
                                         {{phi_plus_vector(2), {0, 1}}, {phi_plus_vector(2), {2, 3}}});
    CVector extra = CVector::Zero(16);
    extra(0 * 8 + 0 * 4 + 1 * 2 + 1) = Complex(1.0, 0.0);  // |0011>
    CVector psi = phi_gamma + extra;
    psi /= psi.norm();
    const DensityOperator rho(assign.dims(), psi * psi.adjoint());
    const double f_gamma = network_fraction(rho, assign);
    const CMatrix remainder = (rho.matrix() - f_gamma * phi_gamma * phi_gamma.adjoint()) / (1.0 - f_gamma);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(remainder, Eigen::EigenvaluesOnly);
    ck.require(es.eigenvalues().minCoeff() < -1e-6,
               "test construction failed: the remainder is unexpectedly PSD");
    const DensityOperator twirled = network_twirl(rho, assign);  // constructor revalidates PSD
    ck.require(std::abs(network_fraction(twirled, assign) - f_gamma) <= 1e-12,
               "network fraction not preserved by the network twirl");
  });
}

// --------------------------------------------------------------------------
// 9. Entanglement fraction: isotropic recovery, closed form vs direct
//    optimization, local-rotation invariance.
// --------------------------------------------------------------------------
inline CheckResult check_entanglement_fraction() {
  return detail::run_check(9, "entanglement fraction: closed form, optimizer, invariance",
                           [](Checker& ck) {
    for (double f : {0.0, 0.3, 0.5, 0.8, 1.0}) {
      const DensityOperator iso = isotropic(f, 2);
      ck.require(std::abs(fidelity_phi_plus(iso, 0, 1) - f) <= 1e-8, "isotropic fidelity != F");
      // The maximized fraction of the isotropic family is max(F, (1-F)/3):
      // below F = 1/4 an orthogonal maximally entangled state wins.
      const double expected = std::max(f, (1.0 - f) / 3.0);
      ck.require(std::abs(entanglement_fraction(iso, 0, 1) - expected) <= 1e-8,
                 "isotropic fraction mismatch at F=" + detail::fmt(f));
    }
    AscentOptions opts;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const DensityOperator rho = random_density({2, 2}, 0x9e3ULL + static_cast<std::uint64_t>(trial));
      const CMatrix pair = rho.matrix();
      const double closed = entanglement_fraction_magic(pair);
      opts.seed = 0xbadULL + static_cast<std::uint64_t>(trial);
      const double direct = entanglement_fraction_ascent(pair, 2, opts);
      worst = std::max(worst, std::abs(closed - direct));
      ck.require(std::abs(closed - direct) <= 1e-6,
                 "trial " + std::to_string(trial) + ": closed form and optimizer differ by " +
                     detail::fmt(std::abs(closed - direct)));
    }
    ck.note("max |closed - optimized| = " + detail::fmt(worst));
    // A locally rotated maximally entangled state keeps fraction 1.
    const CMatrix ua = random_unitary(2, 0x111ULL), ub = random_unitary(2, 0x222ULL);
    CMatrix u = CMatrix::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) u(2 * a + b, 2 * c + d) = ua(a, c) * ub(b, d);
    const CVector rotated = u * phi_plus_vector(2);
    const DensityOperator rho(std::vector<int>{2, 2}, rotated * rotated.adjoint());
    ck.require(fidelity_phi_plus(rho, 0, 1) <= 1.0, "fidelity exceeded 1");
    ck.require(std::abs(entanglement_fraction(rho, 0, 1) - 1.0) <= 1e-8,
               "rotated maximally entangled state does not recover fraction 1");
  });
}

// --------------------------------------------------------------------------
// 10. Certificates: the triangle verdict flips across the published
//     per-edge threshold, and the star specialization matches the general
//     network-fraction path.
// --------------------------------------------------------------------------
inline CheckResult check_certificates() {
  return detail::run_check(10, "certificate thresholds: triangle flip and star agreement",
                           [](Checker& ck) {
    const NetworkGraph triangle = NetworkGraph::triangle();
    const EdgeAssignment tri_assign = EdgeAssignment::canonical(triangle, 2);
    for (double f : {0.6299, 0.6301}) {
      const DensityOperator iso = isotropic(f, 2);
      const DensityOperator state = product_over_edges(tri_assign, {iso, iso, iso});
      const Certificate cert = certify_network_fraction(state, tri_assign);
      const bool expect = f > ReferenceThresholds::kTriangleRequired;
      ck.require(cert.certified == expect,
                 "triangle verdict at F=" + detail::fmt(f) + " should be " +
                     (expect ? "certified" : "not certified"));
      ck.require(cert.c == 2 && cert.threshold == 0.25, "triangle threshold is not 2^-2");
    }
    // Star on fraction pairs, both routes.
    const NetworkGraph star2 = NetworkGraph::star(2);
    const EdgeAssignment star_assign = EdgeAssignment::canonical(star2, 2);
    const std::vector<std::pair<std::vector<double>, bool>> cases{
        {{0.8, 0.7}, true}, {{0.7, 0.7}, false}};
    for (const auto& [fs, expect] : cases) {
      const Certificate via_list = certify_star_fractions(fs, 2);
      ck.require(via_list.certified == expect, "star verdict (fraction list) wrong");
      const DensityOperator state =
          product_over_edges(star_assign, {isotropic(fs[0], 2), isotropic(fs[1], 2)});
      const Certificate via_state = certify_network_fraction(state, star_assign);
      ck.require(via_state.certified == via_list.certified,
                 "star verdicts disagree between the two routes");
      ck.require(std::abs(via_state.margin - via_list.margin) <= 1e-12,
                 "star margins disagree beyond 1e-12: " +
                     detail::fmt(std::abs(via_state.margin - via_list.margin)));
      ck.require(via_state.c == 1 && via_list.c == 1, "star min-cut capacity is not 1");
    }
  });
}

// --------------------------------------------------------------------------
// 11. Coupon collector and the flag protocol.
// --------------------------------------------------------------------------
inline CheckResult check_flag_protocol() {
  return detail::run_check(11, "coupon-collector probabilities and flag statistics",
                           [](Checker& ck) {
    ck.require(coupon_collector_prob(2, 2) == 0.5, "P(cover 2 links in 2 draws) != 1/2");
    ck.require(coupon_collector_prob(5, 4) == 0.0, "k < M must give probability 0");
    ck.require(coupon_collector_prob(1, 1) == 1.0, "single link with one draw must be certain");
    for (int links : {2, 3, 5}) {
      const std::uint64_t draws = static_cast<std::uint64_t>(2 * links);
      const double p = coupon_collector_prob(links, draws);
      const std::uint64_t trials = 100000;
      RngStream rng(0xF1a6ULL + static_cast<std::uint64_t>(links));
      std::uint64_t covered = 0;
      for (std::uint64_t t = 0; t < trials; ++t)
        if (static_cast<int>(simulate_flag_protocol(links, draws, rng.derive(t)).size()) == links)
          ++covered;
      const double freq = static_cast<double>(covered) / static_cast<double>(trials);
      const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
      ck.require(std::abs(freq - p) <= 4.0 * sigma,
                 "coverage frequency " + detail::fmt(freq) + " vs " + detail::fmt(p) +
                     " beyond 4 sigma for M=" + std::to_string(links));
      const std::uint64_t k99 = copies_for_success(links, 0.99);
      ck.require(coupon_collector_prob(links, k99) >= 0.99 &&
                     (k99 == static_cast<std::uint64_t>(links) ||
                      coupon_collector_prob(links, k99 - 1) < 0.99),
                 "copies_for_success is not the minimal draw count");
    }
    // Flag measurement on the star state finds the entangled block with
    // probability exactly 1/M on every pair.
    for (int m : {2, 3}) {
      std::vector<DensityOperator> edges(static_cast<std::size_t>(m), isotropic(0.8, 2));
      const DensityOperator star = sigma_star(edges);
      for (int i = 0; i < m; ++i) {
        const double p = flag_entangled_probability(star, i, m + i);
        ck.require(std::abs(p - 1.0 / m) <= 1e-12,
                   "flag probability on pair " + std::to_string(i) + " differs from 1/M");
      }
    }
  });
}

// --------------------------------------------------------------------------
// 12. Quantum orbit strategy: normalization, the frozen n=4 oracle value,
//     and the quantum/classical ratio table.
// --------------------------------------------------------------------------
inline CheckResult check_quantum_strategy() {
  return detail::run_check(12, "quantum orbit strategy: oracle match and diagnostics",
                           [](Checker& ck) {
    // Outcome distributions normalize for sampled inputs.
    for (int k : {2, 3}) {
      const HadamardCode code(k);
      const int n = code.n();
      RngStream rng(0xB0BAULL + static_cast<std::uint64_t>(k));
      for (int trial = 0; trial < 10; ++trial) {
        const std::uint64_t x = rng.next_bits(n), y = rng.next_bits(n);
        const auto ox = Orbit(BitString(x, n), code).elements();
        const auto oy = Orbit(BitString(y, n), code).elements();
        double total = 0.0;
        for (const auto& a : ox)
          for (const auto& b : oy) total += born_probability({a}, {b});
        ck.require(std::abs(total - 1.0) <= 1e-10, "outcome distribution does not normalize");
      }
    }
    // Frozen oracle values at n = 4, eta = 1/4: the score is 7/16.
    const KVParams p4(2, 1, 0.25);
    const double q4 = quantum_orbit_strategy_score(p4, ScoreEstimate::Method::kExact).value;
    ck.require(std::abs(q4 - 0.4375) <= 1e-12, "n=4 score differs from the frozen constant 7/16");
    const double oracle = detail::quantum_score_vector_oracle(2, 0.25);
    ck.require(std::abs(q4 - oracle) <= 1e-12, "n=4 score differs from the vector oracle");
    // Ratio table (diagnostic only, no violation asserted at these sizes).
    std::string table = "quantum/classical ratios:";
    for (int k : {2, 3, 4}) {
      const double eta = k >= 3 ? 0.5 - 1.0 / static_cast<double>(k) : 0.25;
      const KVParams params(k, 1, eta);
      ScoreEstimate q;
      if (params.joint_bits() <= 8) {
        q = quantum_orbit_strategy_score(params, ScoreEstimate::Method::kExact);
      } else {
        QuantumScoreOptions opt;
        opt.samples = 100000;
        opt.seed = 0xDECADEULL + static_cast<std::uint64_t>(k);
        q = quantum_orbit_strategy_score(params, ScoreEstimate::Method::kMonteCarlo, opt);
      }
      ck.require(q.value >= 0.0 && q.value <= 1.0, "quantum score is not a probability");
      table += " n=" + std::to_string(params.n()) + ": " +
               detail::fmt(q.value / classical_bound(params));
    }
    ck.note(table);
  });
}

inline std::vector<CheckResult> run_all() {
  return {check_code_structure(), check_local_bound_grid(), check_multiplicativity(),
          check_monte_carlo(),    check_chsh_bounds(),      check_triangle_biseparable(),
          check_min_cut(),        check_twirl(),            check_entanglement_fraction(),
          check_certificates(),   check_flag_protocol(),    check_quantum_strategy()};
}

inline bool print_results(const std::vector<CheckResult>& results, std::ostream& out) {
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name;
    if (!r.detail.empty()) out << " -- " << r.detail;
    out << "\n";
    all = all && r.passed;
  }
  return all;
}

}  // namespace gmnl::selfcheck
