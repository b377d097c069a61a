#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gmnl/density.hpp"
#include "gmnl/distill.hpp"

using namespace gmnl;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

TEST_CASE("density operator validation", "[quantum]") {
  CMatrix ok = CMatrix::Zero(2, 2);
  ok(0, 0) = Complex(0.5, 0.0);
  ok(1, 1) = Complex(0.5, 0.0);
  CHECK_NOTHROW(DensityOperator({2}, ok));

  CMatrix not_hermitian = ok;
  not_hermitian(0, 1) = Complex(0.1, 0.0);
  CHECK_THROWS_AS(DensityOperator({2}, not_hermitian), InputError);

  CMatrix bad_trace = ok * 2.0;
  CHECK_THROWS_AS(DensityOperator({2}, bad_trace), InputError);

  CMatrix negative = CMatrix::Zero(2, 2);
  negative(0, 0) = Complex(1.5, 0.0);
  negative(1, 1) = Complex(-0.5, 0.0);
  CHECK_THROWS_AS(DensityOperator({2}, negative), InputError);

  CHECK_THROWS_AS(DensityOperator({2, 2}, ok), InputError);  // size mismatch
  CHECK_THROWS_AS(random_density(std::vector<int>(13, 2), 1), CapacityError);  // 8192 > cap
}

TEST_CASE("maximally entangled state", "[quantum]") {
  const DensityOperator phi = max_entangled(2);
  CHECK(std::abs(phi.matrix().trace().real() - 1.0) <= 1e-14);
  CHECK(phi.purity() == Catch::Approx(1.0).margin(1e-12));
  CHECK(fidelity_phi_plus(phi, 0, 1) == Catch::Approx(1.0).margin(1e-12));
  for (int side : {0, 1}) {
    const CMatrix red = reduced_matrix(phi.matrix(), phi.dims(), {side});
    CHECK(max_abs(red - CMatrix::Identity(2, 2) * Complex(0.5, 0.0)) <= 1e-12);
  }
  CHECK_THROWS_AS(max_entangled(1), InputError);
}

TEST_CASE("isotropic family", "[quantum]") {
  CHECK(max_abs(isotropic(1.0, 2).matrix() - max_entangled(2).matrix()) <= 1e-14);
  const DensityOperator mixed = isotropic(0.25, 2);  // F = 1/d^2
  CHECK(max_abs(mixed.matrix() - CMatrix::Identity(4, 4) * Complex(0.25, 0.0)) <= 1e-14);
  CHECK(fidelity_phi_plus(isotropic(0.8, 2), 0, 1) == Catch::Approx(0.8).margin(1e-14));
  CHECK(fidelity_phi_plus(isotropic(0.6, 3), 0, 1) == Catch::Approx(0.6).margin(1e-14));
  CHECK_THROWS_AS(isotropic(1.2, 2), InputError);
  CHECK_THROWS_AS(isotropic(-0.1, 2), InputError);
}

TEST_CASE("index machinery: tensor placement, reduction, permutation", "[quantum]") {
  const DensityOperator a = random_density({2}, 11);
  const DensityOperator b = random_density({3}, 12);
  // tensor_at at in-order positions equals the Kronecker product.
  const CMatrix t = tensor_at({2, 3}, {{a.matrix(), {0}}, {b.matrix(), {1}}});
  CHECK(max_abs(t - kron(a.matrix(), b.matrix())) <= 1e-14);
  // Swapped positions give the transposed layout.
  const CMatrix t2 = tensor_at({3, 2}, {{a.matrix(), {1}}, {b.matrix(), {0}}});
  CHECK(max_abs(t2 - kron(b.matrix(), a.matrix())) <= 1e-14);
  // Reduction recovers the factors.
  const DensityOperator joint({2, 3}, t);
  CHECK(max_abs(reduced_matrix(joint.matrix(), joint.dims(), {0}) - a.matrix()) <= 1e-12);
  CHECK(max_abs(reduced_matrix(joint.matrix(), joint.dims(), {1}) - b.matrix()) <= 1e-12);
  // Permutation round-trips.
  const DensityOperator swapped = permute_subsystems(joint, {1, 0});
  CHECK(max_abs(swapped.matrix() - kron(b.matrix(), a.matrix())) <= 1e-14);
  CHECK(max_abs(permute_subsystems(swapped, {1, 0}).matrix() - joint.matrix()) <= 1e-14);
  CHECK_THROWS_AS(permute_subsystems(joint, {0, 0}), InputError);
  CHECK_THROWS_AS(tensor_at({2, 3}, {{a.matrix(), {0}}}), InputError);  // uncovered subsystem
}

TEST_CASE("pair twirl: fixed point, known value, idempotence, structure", "[quantum]") {
  const DensityOperator phi = max_entangled(2);
  CHECK(max_abs(twirl_pair(phi, 0, 1).matrix() - phi.matrix()) <= 1e-12);

  CMatrix zz = CMatrix::Zero(4, 4);
  zz(0, 0) = Complex(1.0, 0.0);
  const DensityOperator tzz = twirl_pair(DensityOperator({2, 2}, zz), 0, 1);
  CHECK(max_abs(tzz.matrix() - isotropic(0.5, 2).matrix()) <= 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    const DensityOperator rho = random_density({2, 2}, 500 + trial);
    const DensityOperator t = twirl_pair(rho, 0, 1);
    CHECK(std::abs(t.matrix().trace().real() - 1.0) <= 1e-12);
    CHECK(max_abs(twirl_pair(t, 0, 1).matrix() - t.matrix()) <= 1e-12);
    const double f = fidelity_phi_plus(rho, 0, 1);
    CHECK(max_abs(t.matrix() - isotropic(f, 2).matrix()) <= 1e-10);
  }

  // Twirling one pair of a larger state removes pair-rest correlations.
  const DensityOperator big = random_density({2, 2, 2}, 77);
  const DensityOperator t = twirl_pair(big, 0, 2);
  const double f = fidelity_phi_plus(big, 0, 2);
  const CMatrix pair = reduced_matrix(t.matrix(), t.dims(), {0, 2});
  CHECK(max_abs(pair - isotropic(f, 2).matrix()) <= 1e-10);
  CHECK_THROWS_AS(twirl_pair(big, 0, 0), InputError);
  const DensityOperator mixed_dims = random_density({2, 3}, 5);
  CHECK_THROWS_AS(twirl_pair(mixed_dims, 0, 1), InputError);
}

TEST_CASE("network twirl preserves the fraction and restores positivity", "[quantum]") {
  const NetworkGraph path3 = NetworkGraph::path(3);
  const EdgeAssignment assign = EdgeAssignment::canonical(path3, 2);
  // Product of isotropic edges is a fixed point.
  const DensityOperator product =
      product_over_edges(assign, {isotropic(0.8, 2), isotropic(0.6, 2)});
  CHECK(max_abs(network_twirl(product, assign).matrix() - product.matrix()) <= 1e-12);

  // A correlated pure state across both edges: the twirl keeps the fraction.
  CVector psi = tensor_at_vector(assign.dims(),
                                 {{phi_plus_vector(2), {0, 1}}, {phi_plus_vector(2), {2, 3}}});
  CVector extra = CVector::Zero(16);
  extra(3) = Complex(1.0, 0.0);  // |0011>
  psi += extra;
  psi /= psi.norm();
  const DensityOperator rho(assign.dims(), psi * psi.adjoint());
  const double before = network_fraction(rho, assign);
  const DensityOperator twirled = network_twirl(rho, assign);
  CHECK(std::abs(network_fraction(twirled, assign) - before) <= 1e-12);
}

TEST_CASE("entanglement fraction: construction values and optimizer", "[quantum]") {
  for (double f : {0.0, 0.3, 0.5, 0.8, 1.0}) {
    const DensityOperator iso = isotropic(f, 2);
    CHECK(fidelity_phi_plus(iso, 0, 1) == Catch::Approx(f).margin(1e-10));
    CHECK(entanglement_fraction(iso, 0, 1) ==
          Catch::Approx(std::max(f, (1.0 - f) / 3.0)).margin(1e-8));
  }
  // Product state: the best maximally entangled overlap is 1/2.
  CMatrix zz = CMatrix::Zero(4, 4);
  zz(0, 0) = Complex(1.0, 0.0);
  const DensityOperator prod({2, 2}, zz);
  CHECK(fidelity_phi_plus(prod, 0, 1) == Catch::Approx(0.5).margin(1e-12));
  CHECK(entanglement_fraction(prod, 0, 1) == Catch::Approx(0.5).margin(1e-8));

  // Closed form vs direct optimization on random states.
  AscentOptions opts;
  for (int trial = 0; trial < 30; ++trial) {
    const DensityOperator rho = random_density({2, 2}, 900 + trial);
    opts.seed = 40 + trial;
    const double closed = entanglement_fraction_magic(rho.matrix());
    const double direct = entanglement_fraction_ascent(rho.matrix(), 2, opts);
    CHECK(std::abs(closed - direct) <= 1e-6);
  }

  // Locally rotated maximally entangled state: canonical fidelity drops,
  // the maximized fraction stays 1.
  const CMatrix u = kron(random_unitary(2, 0xa1), random_unitary(2, 0xa2));
  const CVector rotated = u * phi_plus_vector(2);
  const DensityOperator rho(std::vector<int>{2, 2}, rotated * rotated.adjoint());
  CHECK(entanglement_fraction(rho, 0, 1) == Catch::Approx(1.0).margin(1e-8));

  // d = 3: the ascent recovers the isotropic fraction (F >= 1/(d+1) regime).
  CHECK(entanglement_fraction(isotropic(0.7, 3), 0, 1) == Catch::Approx(0.7).margin(1e-6));
}

TEST_CASE("network fraction: products, fixed points, optimization", "[quantum]") {
  const NetworkGraph tri = NetworkGraph::triangle();
  const EdgeAssignment assign = EdgeAssignment::canonical(tri, 2);
  const DensityOperator product =
      product_over_edges(assign, {isotropic(0.7, 2), isotropic(0.7, 2), isotropic(0.7, 2)});
  CHECK(network_fraction(product, assign) == Catch::Approx(0.343).margin(1e-12));

  const DensityOperator mixed =
      product_over_edges(assign, {isotropic(0.9, 2), isotropic(0.5, 2), isotropic(0.8, 2)});
  CHECK(network_fraction(mixed, assign) == Catch::Approx(0.9 * 0.5 * 0.8).margin(1e-12));

  const DensityOperator phi_gamma =
      product_over_edges(assign, {max_entangled(2), max_entangled(2), max_entangled(2)});
  CHECK(network_fraction(phi_gamma, assign) == Catch::Approx(1.0).margin(1e-12));

  // Optimization never loses to the canonical overlap, and recovers a
  // locally rotated product of maximally entangled edges.
  const NetworkGraph star2 = NetworkGraph::star(2);
  const EdgeAssignment sassign = EdgeAssignment::canonical(star2, 2);
  CVector v1 = kron(random_unitary(2, 0xe1), CMatrix::Identity(2, 2)) * phi_plus_vector(2);
  CVector v2 = kron(random_unitary(2, 0xe2), CMatrix::Identity(2, 2)) * phi_plus_vector(2);
  const CVector joint = tensor_at_vector(sassign.dims(), {{v1, {0, 2}}, {v2, {1, 3}}});
  const DensityOperator rotated(sassign.dims(), joint * joint.adjoint());
  const double canonical = network_fraction(rotated, sassign, false);
  AscentOptions opts;
  opts.restarts = 4;
  const double optimized = network_fraction(rotated, sassign, true, opts);
  CHECK(optimized >= canonical - 1e-12);
  CHECK(optimized == Catch::Approx(1.0).margin(1e-7));
}

TEST_CASE("star state: shape, flag statistics, single-edge degenerate case", "[quantum]") {
  const DensityOperator edge = isotropic(0.8, 2);
  CHECK(max_abs(sigma_star({edge}).matrix() - edge.matrix()) <= 1e-14);

  const DensityOperator two = sigma_star({edge, edge});
  CHECK(two.dims() == std::vector<int>{3, 3, 3, 3});
  CHECK(two.dimension() == 81);
  for (int i = 0; i < 2; ++i)
    CHECK(flag_entangled_probability(two, i, 2 + i) == Catch::Approx(0.5).margin(1e-12));

  const DensityOperator three = sigma_star({edge, edge, edge});
  CHECK(three.dimension() == 729);
  CHECK(flag_entangled_probability(three, 1, 4) == Catch::Approx(1.0 / 3.0).margin(1e-12));

  CHECK_THROWS_AS(sigma_star({}), InputError);
  CHECK_THROWS_AS(sigma_star({edge, isotropic(0.5, 3)}), InputError);
}

TEST_CASE("triangle state: symmetry and per-pair structure", "[quantum]") {
  const double F = 0.7;
  const DensityOperator state = sigma_triangle(F);
  CHECK(state.dimension() == 729);
  // Cyclic relabeling A->B->C->A maps subsystems (A1 A2 B1 B2 C1 C2) so that
  // the new order reads the old (C1 C2 A1 A2 B1 B2).
  const DensityOperator cycled = permute_subsystems(state, {4, 5, 0, 1, 2, 3});
  CHECK(max_abs(cycled.matrix() - state.matrix()) <= 1e-12);
  // Each flag-carrying pair finds the entangled block with probability 1/3,
  // and the qubit block carries fidelity F with the maximally entangled state.
  CHECK(flag_entangled_probability(state, 1, 2) == Catch::Approx(1.0 / 3.0).margin(1e-12));
  const CMatrix pair = reduced_matrix(state.matrix(), state.dims(), {1, 2});
  CMatrix phi_embedded = CMatrix::Zero(9, 9);
  const CVector phi = phi_plus_vector(2);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      phi_embedded(3 * (r / 2) + r % 2, 3 * (c / 2) + c % 2) = phi(r) * std::conj(phi(c));
  const double overlap = (phi_embedded * pair).trace().real();
  CHECK(overlap == Catch::Approx(F / 3.0).margin(1e-12));
  CHECK_THROWS_AS(sigma_triangle(1.5), InputError);
}

TEST_CASE("coupon collector and protocol simulation", "[quantum]") {
  CHECK(coupon_collector_prob(2, 2) == 0.5);
  CHECK(coupon_collector_prob(3, 5) == Catch::Approx(50.0 / 81.0).margin(1e-15));
  CHECK(coupon_collector_prob(5, 4) == 0.0);
  CHECK(coupon_collector_prob(1, 1) == 1.0);
  CHECK(coupon_collector_prob(1, 9) == 1.0);

  const std::uint64_t k = copies_for_success(3, 0.9);
  CHECK(coupon_collector_prob(3, k) >= 0.9);
  CHECK(coupon_collector_prob(3, k - 1) < 0.9);
  CHECK_THROWS_AS(copies_for_success(3, 1.0), InputError);

  RngStream rng(0xC0FFEE);
  std::uint64_t covered = 0;
  const std::uint64_t trials = 50000;
  for (std::uint64_t t = 0; t < trials; ++t)
    if (simulate_flag_protocol(3, 6, rng.derive(t)).size() == 3) ++covered;
  const double p = coupon_collector_prob(3, 6);
  const double freq = static_cast<double>(covered) / static_cast<double>(trials);
  CHECK(std::abs(freq - p) <= 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)));

  const auto links = simulate_flag_protocol(4, 2, RngStream(9));
  CHECK(links.size() <= 2);
  for (std::size_t i = 1; i < links.size(); ++i) CHECK(links[i - 1] < links[i]);
}
