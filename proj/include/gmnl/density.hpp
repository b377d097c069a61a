#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gmnl/errors.hpp"
#include "gmnl/multiindex.hpp"
#include "gmnl/netgraph.hpp"
#include "gmnl/rng.hpp"

namespace gmnl {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Eigenvalue floor for the PSD validation of density operators. Violations
/// raise, they are never clipped.
constexpr double kPsdTolerance = -1e-9;
constexpr double kHermTolerance = 1e-10;
constexpr double kTraceTolerance = 1e-10;
/// Dense-representation cap on the total Hilbert-space dimension.
constexpr int kMaxTotalDimension = 4096;

namespace detail {

inline std::size_t total_dimension(const std::vector<int>& dims) {
  std::size_t d = 1;
  for (int v : dims) {
    if (v < 2) throw InputError("dims: every subsystem dimension must be >= 2");
    d *= static_cast<std::size_t>(v);
  }
  return d;
}

/// Row-major strides: subsystem 0 is the most significant index digit.
inline std::vector<std::size_t> strides(const std::vector<int>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;)
    s[i - 1] = s[i] * static_cast<std::size_t>(dims[i]);
  return s;
}

}  // namespace detail

/// Immutable complex PSD unit-trace operator over a list of subsystem
/// dimensions. Constructors validate Hermiticity, unit trace and positivity;
/// all operations return new values.
class DensityOperator {
 public:
  DensityOperator(std::vector<int> dims, CMatrix matrix)
      : dims_(std::move(dims)), matrix_(std::move(matrix)) {
    const std::size_t d = detail::total_dimension(dims_);
    if (d > static_cast<std::size_t>(kMaxTotalDimension))
      throw CapacityError("DensityOperator: total dimension " + std::to_string(d) +
                          " exceeds the dense cap of " + std::to_string(kMaxTotalDimension));
    if (matrix_.rows() != static_cast<Eigen::Index>(d) || matrix_.cols() != static_cast<Eigen::Index>(d))
      throw InputError("DensityOperator: matrix size does not match subsystem dimensions");
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kHermTolerance)
      throw InputError("DensityOperator: matrix is not Hermitian within tolerance");
    if (std::abs(matrix_.trace().real() - 1.0) > kTraceTolerance ||
        std::abs(matrix_.trace().imag()) > kTraceTolerance)
      throw InputError("DensityOperator: trace differs from 1 beyond tolerance");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPsdTolerance)
      throw InputError("DensityOperator: negative eigenvalue " +
                       std::to_string(es.eigenvalues().minCoeff()) + " below PSD tolerance");
  }

  const std::vector<int>& dims() const { return dims_; }
  int subsystems() const { return static_cast<int>(dims_.size()); }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }

  double purity() const { return (matrix_ * matrix_).trace().real(); }

 private:
  std::vector<int> dims_;
  CMatrix matrix_;
};

// ---------------------------------------------------------------------------
// Composite-index machinery
// ---------------------------------------------------------------------------

/// Operator factors placed at explicit subsystem positions; the positions of
/// all factors must partition the subsystem list. Factor-local subsystem
/// order follows the position list, so out-of-order placement transposes
/// legs correctly.
struct PlacedFactor {
  CMatrix op;                  // square, of dimension prod of its local dims
  std::vector<int> positions;  // global subsystem indices, factor-local order
};

inline CMatrix tensor_at(const std::vector<int>& dims, const std::vector<PlacedFactor>& factors) {
  const std::size_t D = detail::total_dimension(dims);
  std::vector<char> used(dims.size(), 0);
  for (const auto& f : factors) {
    std::size_t fd = 1;
    for (int p : f.positions) {
      if (p < 0 || p >= static_cast<int>(dims.size()) || used[static_cast<std::size_t>(p)])
        throw InputError("tensor_at: factor positions must partition the subsystems");
      used[static_cast<std::size_t>(p)] = 1;
      fd *= static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]);
    }
    if (f.op.rows() != static_cast<Eigen::Index>(fd) || f.op.cols() != static_cast<Eigen::Index>(fd))
      throw InputError("tensor_at: factor dimension does not match its positions");
  }
  if (std::find(used.begin(), used.end(), 0) != used.end())
    throw InputError("tensor_at: factor positions must cover every subsystem");

  const auto str = detail::strides(dims);
  CMatrix out(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  std::vector<int> rdig(dims.size()), cdig(dims.size());
  for (std::size_t r = 0; r < D; ++r) {
    std::size_t rv = r;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      rdig[k] = static_cast<int>(rv / str[k]);
      rv %= str[k];
    }
    for (std::size_t c = 0; c < D; ++c) {
      std::size_t cv = c;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        cdig[k] = static_cast<int>(cv / str[k]);
        cv %= str[k];
      }
      Complex prod(1.0, 0.0);
      for (const auto& f : factors) {
        std::size_t fr = 0, fc = 0;
        for (int p : f.positions) {
          fr = fr * static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]) +
               static_cast<std::size_t>(rdig[static_cast<std::size_t>(p)]);
          fc = fc * static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]) +
               static_cast<std::size_t>(cdig[static_cast<std::size_t>(p)]);
        }
        prod *= f.op(static_cast<Eigen::Index>(fr), static_cast<Eigen::Index>(fc));
        if (prod == Complex(0.0, 0.0)) break;
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = prod;
    }
  }
  return out;
}

struct PlacedVectorFactor {
  CVector vec;
  std::vector<int> positions;
};

inline CVector tensor_at_vector(const std::vector<int>& dims,
                                const std::vector<PlacedVectorFactor>& factors) {
  const std::size_t D = detail::total_dimension(dims);
  std::vector<char> used(dims.size(), 0);
  for (const auto& f : factors) {
    std::size_t fd = 1;
    for (int p : f.positions) {
      if (p < 0 || p >= static_cast<int>(dims.size()) || used[static_cast<std::size_t>(p)])
        throw InputError("tensor_at_vector: factor positions must partition the subsystems");
      used[static_cast<std::size_t>(p)] = 1;
      fd *= static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]);
    }
    if (f.vec.size() != static_cast<Eigen::Index>(fd))
      throw InputError("tensor_at_vector: factor dimension does not match its positions");
  }
  if (std::find(used.begin(), used.end(), 0) != used.end())
    throw InputError("tensor_at_vector: factor positions must cover every subsystem");
  const auto str = detail::strides(dims);
  CVector out(static_cast<Eigen::Index>(D));
  std::vector<int> dig(dims.size());
  for (std::size_t r = 0; r < D; ++r) {
    std::size_t rv = r;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      dig[k] = static_cast<int>(rv / str[k]);
      rv %= str[k];
    }
    Complex prod(1.0, 0.0);
    for (const auto& f : factors) {
      std::size_t fr = 0;
      for (int p : f.positions)
        fr = fr * static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]) +
             static_cast<std::size_t>(dig[static_cast<std::size_t>(p)]);
      prod *= f.vec(static_cast<Eigen::Index>(fr));
      if (prod == Complex(0.0, 0.0)) break;
    }
    out(static_cast<Eigen::Index>(r)) = prod;
  }
  return out;
}

/// Reduced operator on `keep` (in the given order), tracing out the rest.
inline CMatrix reduced_matrix(const CMatrix& rho, const std::vector<int>& dims,
                              const std::vector<int>& keep) {
  std::vector<char> kept(dims.size(), 0);
  std::vector<int> keep_dims;
  for (int p : keep) {
    if (p < 0 || p >= static_cast<int>(dims.size()) || kept[static_cast<std::size_t>(p)])
      throw InputError("reduced_matrix: invalid keep list");
    kept[static_cast<std::size_t>(p)] = 1;
    keep_dims.push_back(dims[static_cast<std::size_t>(p)]);
  }
  std::vector<int> rest;
  for (int p = 0; p < static_cast<int>(dims.size()); ++p)
    if (!kept[static_cast<std::size_t>(p)]) rest.push_back(p);
  const auto str = detail::strides(dims);
  const MixedRadix keep_radix(keep_dims);
  std::vector<int> rest_dims;
  for (int p : rest) rest_dims.push_back(dims[static_cast<std::size_t>(p)]);
  const MixedRadix rest_radix(rest_dims.empty() ? std::vector<int>{} : rest_dims);
  const std::size_t rest_total = rest.empty() ? 1 : rest_radix.total();

  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(keep_radix.total()),
                              static_cast<Eigen::Index>(keep_radix.total()));
  std::vector<int> kdig(keep.size()), rdig(rest.size());
  for (std::size_t rk = 0; rk < keep_radix.total(); ++rk) {
    keep_radix.decode_into(rk, kdig.data());
    std::size_t off_r = 0;
    for (std::size_t i = 0; i < keep.size(); ++i)
      off_r += static_cast<std::size_t>(kdig[i]) * str[static_cast<std::size_t>(keep[i])];
    for (std::size_t ck = 0; ck < keep_radix.total(); ++ck) {
      keep_radix.decode_into(ck, kdig.data());
      std::size_t off_c = 0;
      for (std::size_t i = 0; i < keep.size(); ++i)
        off_c += static_cast<std::size_t>(kdig[i]) * str[static_cast<std::size_t>(keep[i])];
      Complex acc(0.0, 0.0);
      for (std::size_t rr = 0; rr < rest_total; ++rr) {
        std::size_t off_rest = 0;
        if (!rest.empty()) {
          rest_radix.decode_into(rr, rdig.data());
          for (std::size_t i = 0; i < rest.size(); ++i)
            off_rest += static_cast<std::size_t>(rdig[i]) * str[static_cast<std::size_t>(rest[i])];
        }
        acc += rho(static_cast<Eigen::Index>(off_r + off_rest), static_cast<Eigen::Index>(off_c + off_rest));
      }
      out(static_cast<Eigen::Index>(rk), static_cast<Eigen::Index>(ck)) = acc;
    }
  }
  return out;
}

inline DensityOperator reduced_state(const DensityOperator& rho, const std::vector<int>& keep) {
  std::vector<int> keep_dims;
  for (int p : keep) keep_dims.push_back(rho.dims()[static_cast<std::size_t>(p)]);
  return DensityOperator(keep_dims, reduced_matrix(rho.matrix(), rho.dims(), keep));
}

/// Reorder subsystems: new subsystem q is old subsystem order[q].
inline DensityOperator permute_subsystems(const DensityOperator& rho, const std::vector<int>& order) {
  const auto& dims = rho.dims();
  if (order.size() != dims.size())
    throw InputError("permute_subsystems: order length does not match subsystem count");
  std::vector<char> seen(dims.size(), 0);
  std::vector<int> new_dims(dims.size());
  for (std::size_t q = 0; q < order.size(); ++q) {
    const int p = order[q];
    if (p < 0 || p >= static_cast<int>(dims.size()) || seen[static_cast<std::size_t>(p)])
      throw InputError("permute_subsystems: order is not a permutation");
    seen[static_cast<std::size_t>(p)] = 1;
    new_dims[q] = dims[static_cast<std::size_t>(p)];
  }
  const auto str_old = detail::strides(dims);
  const auto str_new = detail::strides(new_dims);
  const std::size_t D = rho.dimension();
  std::vector<std::size_t> map(D);
  std::vector<int> dig(dims.size());
  for (std::size_t r = 0; r < D; ++r) {
    std::size_t rv = r;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      dig[k] = static_cast<int>(rv / str_old[k]);
      rv %= str_old[k];
    }
    std::size_t nr = 0;
    for (std::size_t q = 0; q < order.size(); ++q)
      nr += static_cast<std::size_t>(dig[static_cast<std::size_t>(order[q])]) * str_new[q];
    map[r] = nr;
  }
  CMatrix out(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (std::size_t r = 0; r < D; ++r)
    for (std::size_t c = 0; c < D; ++c)
      out(static_cast<Eigen::Index>(map[r]), static_cast<Eigen::Index>(map[c])) =
          rho.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return DensityOperator(new_dims, std::move(out));
}

// ---------------------------------------------------------------------------
// Canonical states
// ---------------------------------------------------------------------------

/// |Phi+> = sum_i |ii> / sqrt(d) as a vector on d x d.
inline CVector phi_plus_vector(int d) {
  if (d < 2) throw InputError("phi_plus_vector: local dimension must be >= 2");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d) * d);
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i) * d + i) = Complex(inv, 0.0);
  return v;
}

inline CMatrix phi_plus_projector(int d) {
  const CVector v = phi_plus_vector(d);
  return v * v.adjoint();
}

/// Rank-1 projector onto the canonical maximally entangled state of two
/// d-dimensional systems.
inline DensityOperator max_entangled(int d) {
  return DensityOperator({d, d}, phi_plus_projector(d));
}

/// F Phi+ + (1-F)/(d^2-1) (1 - Phi+): the (U x U*)-twirl fixed-point family,
/// with Tr(Phi+ rho) = F by construction.
inline DensityOperator isotropic(double F, int d) {
  if (!(F >= 0.0) || !(F <= 1.0)) throw InputError("isotropic: F must lie in [0, 1]");
  if (d < 2) throw InputError("isotropic: local dimension must be >= 2");
  const CMatrix phi = phi_plus_projector(d);
  const Eigen::Index D = static_cast<Eigen::Index>(d) * d;
  const CMatrix rest = CMatrix::Identity(D, D) - phi;
  return DensityOperator({d, d}, F * phi + ((1.0 - F) / (static_cast<double>(d) * d - 1.0)) * rest);
}

// ---------------------------------------------------------------------------
// Twirling
// ---------------------------------------------------------------------------

/// Isotropic (U x U*) twirl on the pair (sys_a, sys_b) of a possibly larger
/// state. The output carries an exact isotropic block structure on the pair:
///
///   T[rho] = Phi+ (x) K_phi + (1 - Phi+)/(d^2-1) (x) K_perp,
///   K_phi  = Tr_pair[(Phi+ (x) 1) rho],  K_perp = Tr_pair[((1-Phi+) (x) 1) rho],
///
/// which also removes all correlations between the pair and the rest except
/// through the two trace coefficients.
inline DensityOperator twirl_pair(const DensityOperator& rho, int sys_a, int sys_b) {
  const auto& dims = rho.dims();
  if (sys_a < 0 || sys_b < 0 || sys_a >= rho.subsystems() || sys_b >= rho.subsystems() || sys_a == sys_b)
    throw InputError("twirl_pair: invalid subsystem pair");
  const int d = dims[static_cast<std::size_t>(sys_a)];
  if (d != dims[static_cast<std::size_t>(sys_b)])
    throw InputError("twirl_pair: pair dimensions differ");

  // Bring the pair to the front, work there, then restore the order.
  std::vector<int> front{sys_a, sys_b};
  for (int p = 0; p < rho.subsystems(); ++p)
    if (p != sys_a && p != sys_b) front.push_back(p);
  const DensityOperator moved = permute_subsystems(rho, front);

  const Eigen::Index pair_dim = static_cast<Eigen::Index>(d) * d;
  const Eigen::Index rest_dim = static_cast<Eigen::Index>(moved.dimension()) / pair_dim;
  const CMatrix phi = phi_plus_projector(d);
  CMatrix k_phi = CMatrix::Zero(rest_dim, rest_dim);
  CMatrix k_all = CMatrix::Zero(rest_dim, rest_dim);
  for (Eigen::Index u = 0; u < pair_dim; ++u)
    for (Eigen::Index v = 0; v < pair_dim; ++v) {
      const Complex w = phi(u, v);
      const auto block = moved.matrix().block(v * rest_dim, u * rest_dim, rest_dim, rest_dim);
      if (w != Complex(0.0, 0.0)) k_phi += w * block;
      if (u == v) k_all += block;
    }
  const CMatrix k_perp = k_all - k_phi;

  const Eigen::Index D = static_cast<Eigen::Index>(moved.dimension());
  CMatrix out = CMatrix::Zero(D, D);
  const CMatrix rest_proj = CMatrix::Identity(pair_dim, pair_dim) - phi;
  const double inv = 1.0 / (static_cast<double>(d) * d - 1.0);
  for (Eigen::Index u = 0; u < pair_dim; ++u)
    for (Eigen::Index v = 0; v < pair_dim; ++v) {
      const Complex c1 = phi(u, v);
      const Complex c2 = rest_proj(u, v) * inv;
      if (c1 != Complex(0.0, 0.0))
        out.block(u * rest_dim, v * rest_dim, rest_dim, rest_dim) += c1 * k_phi;
      if (c2 != Complex(0.0, 0.0))
        out.block(u * rest_dim, v * rest_dim, rest_dim, rest_dim) += c2 * k_perp;
    }

  DensityOperator twirled(moved.dims(), std::move(out));
  // Inverse permutation restores the caller's subsystem order.
  std::vector<int> inverse(front.size());
  for (std::size_t q = 0; q < front.size(); ++q)
    inverse[static_cast<std::size_t>(front[q])] = static_cast<int>(q);
  return permute_subsystems(twirled, inverse);
}

// ---------------------------------------------------------------------------
// Edge assignments over a network
// ---------------------------------------------------------------------------

/// Maps each graph edge to the two subsystem indices carrying its shared
/// state (one at each endpoint party) and the local dimension. Every
/// subsystem of the state belongs to exactly one edge end.
class EdgeAssignment {
 public:
  struct EdgePair {
    int sub_i = 0;  // subsystem at the smaller-indexed party
    int sub_j = 0;  // subsystem at the larger-indexed party
    int dim = 2;
  };

  EdgeAssignment(NetworkGraph graph, std::vector<EdgePair> pairs)
      : graph_(std::move(graph)), pairs_(std::move(pairs)), dims_() {
    if (pairs_.size() != graph_.edges().size())
      throw InputError("EdgeAssignment: one subsystem pair per edge required");
    const int subsystems = 2 * static_cast<int>(pairs_.size());
    dims_.assign(static_cast<std::size_t>(subsystems), 0);
    for (const auto& pr : pairs_) {
      if (pr.dim < 2) throw InputError("EdgeAssignment: local dimension must be >= 2");
      for (int s : {pr.sub_i, pr.sub_j}) {
        if (s < 0 || s >= subsystems || dims_[static_cast<std::size_t>(s)] != 0)
          throw InputError("EdgeAssignment: every subsystem must belong to exactly one edge end");
        dims_[static_cast<std::size_t>(s)] = pr.dim;
      }
    }
  }

  /// Canonical layout: subsystems grouped by party in ascending party order,
  /// one per incident edge, ordered by ascending neighbor index.
  static EdgeAssignment canonical(const NetworkGraph& graph, int d) {
    std::vector<int> offset(static_cast<std::size_t>(graph.parties()), 0);
    int running = 0;
    for (int p = 0; p < graph.parties(); ++p) {
      offset[static_cast<std::size_t>(p)] = running;
      running += graph.degree(p);
    }
    std::vector<EdgePair> pairs;
    for (auto [i, j] : graph.edges()) {
      const auto ni = graph.neighbors(i);
      const auto nj = graph.neighbors(j);
      EdgePair pr;
      pr.sub_i = offset[static_cast<std::size_t>(i)] +
                 static_cast<int>(std::find(ni.begin(), ni.end(), j) - ni.begin());
      pr.sub_j = offset[static_cast<std::size_t>(j)] +
                 static_cast<int>(std::find(nj.begin(), nj.end(), i) - nj.begin());
      pr.dim = d;
      pairs.push_back(pr);
    }
    return EdgeAssignment(graph, std::move(pairs));
  }

  const NetworkGraph& graph() const { return graph_; }
  const std::vector<EdgePair>& pairs() const { return pairs_; }
  /// Expected subsystem dimension list of a compatible state.
  const std::vector<int>& dims() const { return dims_; }

  /// True when every edge carries the same local dimension.
  bool uniform_dimension() const {
    for (const auto& pr : pairs_)
      if (pr.dim != pairs_.front().dim) return false;
    return true;
  }

  void check_compatible(const DensityOperator& rho) const {
    if (rho.dims() != dims_)
      throw InputError("EdgeAssignment: state dimensions do not match the assignment");
  }

 private:
  NetworkGraph graph_;
  std::vector<EdgePair> pairs_;
  std::vector<int> dims_;
};

/// Twirl applied on every edge pair. The output is a mixture of tensor
/// products of Phi+ and its complement, hence PSD even when intermediate
/// decompositions of the input are not.
inline DensityOperator network_twirl(const DensityOperator& rho, const EdgeAssignment& assignment) {
  assignment.check_compatible(rho);
  DensityOperator out = rho;
  for (const auto& pr : assignment.pairs()) out = twirl_pair(out, pr.sub_i, pr.sub_j);
  return out;
}

/// State with the given bipartite factors placed on the assignment's edge
/// pairs (subsystems land at their canonical positions).
inline DensityOperator product_over_edges(const EdgeAssignment& assignment,
                                          const std::vector<DensityOperator>& edge_states) {
  if (edge_states.size() != assignment.pairs().size())
    throw InputError("product_over_edges: one edge state per edge required");
  std::vector<PlacedFactor> factors;
  for (std::size_t e = 0; e < edge_states.size(); ++e) {
    const auto& pr = assignment.pairs()[e];
    if (edge_states[e].dims() != std::vector<int>{pr.dim, pr.dim})
      throw InputError("product_over_edges: edge state dimensions do not match the assignment");
    factors.push_back({edge_states[e].matrix(), {pr.sub_i, pr.sub_j}});
  }
  return DensityOperator(assignment.dims(), tensor_at(assignment.dims(), factors));
}

// ---------------------------------------------------------------------------
// Entanglement fractions
// ---------------------------------------------------------------------------

/// Overlap with the canonical |Phi+> on the ordered pair (sys_a, sys_b).
inline double fidelity_phi_plus(const DensityOperator& rho, int sys_a, int sys_b) {
  if (rho.dims()[static_cast<std::size_t>(sys_a)] != rho.dims()[static_cast<std::size_t>(sys_b)])
    throw InputError("fidelity_phi_plus: pair dimensions differ");
  const CMatrix pair = reduced_matrix(rho.matrix(), rho.dims(), {sys_a, sys_b});
  const CVector v = phi_plus_vector(rho.dims()[static_cast<std::size_t>(sys_a)]);
  return (v.adjoint() * pair * v)(0, 0).real();
}

struct AscentOptions {
  int restarts = 16;
  int max_iterations = 500;
  double tolerance = 1e-9;
  std::uint64_t seed = 0x5eedULL;
};

namespace detail {

inline Complex gaussian(RngStream& rng) {
  const double u1 = 1.0 - rng.next_double();  // (0, 1]
  const double u2 = rng.next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return Complex(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
}

inline CMatrix random_unitary(int d, RngStream& rng) {
  CMatrix g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = gaussian(rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c) {
    const Complex rc = r(c, c);
    const double a = std::abs(rc);
    if (a > 0) q.col(c) *= rc / a;
  }
  return q;
}

/// Nearest unitary (polar factor) of a square matrix.
inline CMatrix polar_unitary(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// max over unitaries V of <Phi_V| R |Phi_V> with |Phi_V> = (V x 1)|Phi+>,
/// for a PSD operator R on C^d x C^d. Since (U_A x U_B)|Phi+> =
/// (U_A U_B^T x 1)|Phi+>, one unitary sweeps all maximally entangled states.
/// Power-type ascent with unitary retraction; monotone because R is PSD.
inline double unitary_overlap_ascent(const CMatrix& R, int d, const AscentOptions& opts) {
  const auto unvec = [d](const CVector& w) {
    CMatrix V(d, d);
    for (int a = 0; a < d; ++a)
      for (int m = 0; m < d; ++m) V(a, m) = w(static_cast<Eigen::Index>(a) * d + m);
    return V;
  };
  const auto vec = [d](const CMatrix& V) {
    CVector w(static_cast<Eigen::Index>(d) * d);
    for (int a = 0; a < d; ++a)
      for (int m = 0; m < d; ++m) w(static_cast<Eigen::Index>(a) * d + m) = V(a, m);
    return w;
  };
  RngStream root(opts.seed);
  double best = 0.0;
  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    RngStream lane = root.derive(static_cast<std::uint64_t>(restart));
    CMatrix V = restart == 0 ? CMatrix::Identity(d, d) : random_unitary(d, lane);
    double value = (vec(V).adjoint() * R * vec(V))(0, 0).real() / d;
    for (int it = 0; it < opts.max_iterations; ++it) {
      const CVector grad = R * vec(V);
      const CMatrix next = polar_unitary(unvec(grad));
      const double next_value = (vec(next).adjoint() * R * vec(next))(0, 0).real() / d;
      if (next_value <= value + opts.tolerance) {
        value = std::max(value, next_value);
        break;
      }
      V = next;
      value = next_value;
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace detail

/// Magic basis columns: the basis of C^4 in which maximally entangled
/// two-qubit states have real coordinates (up to a global phase).
inline CMatrix magic_basis() {
  CMatrix e = CMatrix::Zero(4, 4);
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  e(0, 0) = s;       e(3, 0) = s;        // (|00> + |11>)/sqrt2
  e(0, 1) = i * s;   e(3, 1) = -i * s;   // i(|00> - |11>)/sqrt2
  e(1, 2) = i * s;   e(2, 2) = i * s;    // i(|01> + |10>)/sqrt2
  e(1, 3) = s;       e(2, 3) = -s;       // (|01> - |10>)/sqrt2
  return e;
}

/// Two-qubit fully entangled fraction in closed form: the largest eigenvalue
/// of the real part of rho expressed in the magic basis.
inline double entanglement_fraction_magic(const CMatrix& rho_pair) {
  if (rho_pair.rows() != 4 || rho_pair.cols() != 4)
    throw InputError("entanglement_fraction_magic: expects a two-qubit operator");
  const CMatrix e = magic_basis();
  const CMatrix m = e.adjoint() * rho_pair * e;
  const Eigen::Matrix4d re = m.real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es((re + re.transpose()) / 2.0,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Iterative lower bound on max_Phi Tr(Phi rho_pair) over all maximally
/// entangled Phi, any dimension.
inline double entanglement_fraction_ascent(const CMatrix& rho_pair, int d,
                                           const AscentOptions& opts = {}) {
  if (rho_pair.rows() != static_cast<Eigen::Index>(d) * d)
    throw InputError("entanglement_fraction_ascent: operator does not match dimension");
  return detail::unitary_overlap_ascent(rho_pair, d, opts);
}

/// Fully entangled fraction of the pair (sys_a, sys_b): the closed magic
/// basis form for qubits, the local-unitary ascent (a certified lower bound)
/// for d > 2.
inline double entanglement_fraction(const DensityOperator& rho, int sys_a, int sys_b,
                                    const AscentOptions& opts = {}) {
  const int d = rho.dims()[static_cast<std::size_t>(sys_a)];
  if (d != rho.dims()[static_cast<std::size_t>(sys_b)])
    throw InputError("entanglement_fraction: pair dimensions differ");
  const CMatrix pair = reduced_matrix(rho.matrix(), rho.dims(), {sys_a, sys_b});
  if (d == 2) return entanglement_fraction_magic(pair);
  return entanglement_fraction_ascent(pair, d, opts);
}

// ---------------------------------------------------------------------------
// Network fraction
// ---------------------------------------------------------------------------

/// Overlap <Phi_Gamma| rho |Phi_Gamma> with Phi_Gamma the tensor product of
/// canonical |Phi+> over the assignment's edges. With optimize set, each
/// edge's maximally entangled state is tuned by coordinate ascent over local
/// unitaries (restarted, seeded); the result is a lower bound on the fully
/// optimized fraction and never below the canonical value.
inline double network_fraction(const DensityOperator& rho, const EdgeAssignment& assignment,
                               bool optimize = false, const AscentOptions& opts = {}) {
  assignment.check_compatible(rho);
  const auto& dims = rho.dims();
  const auto phi_gamma = [&](const std::vector<CMatrix>& vs) {
    std::vector<PlacedVectorFactor> fs;
    for (std::size_t e = 0; e < assignment.pairs().size(); ++e) {
      const auto& pr = assignment.pairs()[e];
      CVector base = phi_plus_vector(pr.dim);
      CVector rotated(base.size());
      // (V x 1)|Phi+>
      for (int a = 0; a < pr.dim; ++a)
        for (int m = 0; m < pr.dim; ++m) {
          Complex acc(0.0, 0.0);
          for (int ap = 0; ap < pr.dim; ++ap)
            acc += vs[e](a, ap) * base(static_cast<Eigen::Index>(ap) * pr.dim + m);
          rotated(static_cast<Eigen::Index>(a) * pr.dim + m) = acc;
        }
      fs.push_back({rotated, {pr.sub_i, pr.sub_j}});
    }
    return tensor_at_vector(dims, fs);
  };
  const auto overlap = [&](const std::vector<CMatrix>& vs) {
    const CVector v = phi_gamma(vs);
    return (v.adjoint() * rho.matrix() * v)(0, 0).real();
  };

  std::vector<CMatrix> identity;
  for (const auto& pr : assignment.pairs())
    identity.push_back(CMatrix::Identity(pr.dim, pr.dim));
  const double canonical = overlap(identity);
  if (!optimize) return canonical;

  RngStream root(opts.seed);
  double best = canonical;
  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    RngStream lane = root.derive(static_cast<std::uint64_t>(restart));
    std::vector<CMatrix> vs = identity;
    if (restart > 0)
      for (auto& v : vs) v = detail::random_unitary(static_cast<int>(v.rows()), lane);
    double value = overlap(vs);
    for (int sweep = 0; sweep < opts.max_iterations; ++sweep) {
      const double before = value;
      for (std::size_t e = 0; e < assignment.pairs().size(); ++e) {
        const auto& pr = assignment.pairs()[e];
        // Isometry from the pair's (V x 1)|Phi+> coefficient space into the
        // full space, other edges frozen.
        CMatrix w(static_cast<Eigen::Index>(rho.dimension()),
                  static_cast<Eigen::Index>(pr.dim) * pr.dim);
        for (int u = 0; u < pr.dim * pr.dim; ++u) {
          std::vector<PlacedVectorFactor> fs;
          CVector unit = CVector::Zero(static_cast<Eigen::Index>(pr.dim) * pr.dim);
          unit(u) = Complex(1.0, 0.0);
          fs.push_back({unit, {pr.sub_i, pr.sub_j}});
          for (std::size_t e2 = 0; e2 < assignment.pairs().size(); ++e2) {
            if (e2 == e) continue;
            const auto& p2 = assignment.pairs()[e2];
            CVector base = phi_plus_vector(p2.dim);
            CVector rotated(base.size());
            for (int a = 0; a < p2.dim; ++a)
              for (int m = 0; m < p2.dim; ++m) {
                Complex acc(0.0, 0.0);
                for (int ap = 0; ap < p2.dim; ++ap)
                  acc += vs[e2](a, ap) * base(static_cast<Eigen::Index>(ap) * p2.dim + m);
                rotated(static_cast<Eigen::Index>(a) * p2.dim + m) = acc;
              }
            fs.push_back({rotated, {p2.sub_i, p2.sub_j}});
          }
          w.col(u) = tensor_at_vector(dims, fs);
        }
        const CMatrix reduced = w.adjoint() * rho.matrix() * w;
        // One polar ascent step on this edge's unitary.
        CVector wv(static_cast<Eigen::Index>(pr.dim) * pr.dim);
        const double invd = 1.0 / std::sqrt(static_cast<double>(pr.dim));
        for (int a = 0; a < pr.dim; ++a)
          for (int m = 0; m < pr.dim; ++m)
            wv(static_cast<Eigen::Index>(a) * pr.dim + m) = vs[e](a, m) * invd;
        const CVector grad = reduced * wv;
        CMatrix gm(pr.dim, pr.dim);
        for (int a = 0; a < pr.dim; ++a)
          for (int m = 0; m < pr.dim; ++m) gm(a, m) = grad(static_cast<Eigen::Index>(a) * pr.dim + m);
        const CMatrix cand = detail::polar_unitary(gm);
        // Keep the step only if it does not decrease the overlap.
        std::vector<CMatrix> trial = vs;
        trial[e] = cand;
        const double trial_value = overlap(trial);
        if (trial_value > value) {
          vs = std::move(trial);
          value = trial_value;
        }
      }
      if (value - before < opts.tolerance) break;
    }
    best = std::max(best, value);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Flagged network states
// ---------------------------------------------------------------------------

namespace detail {

/// Embed a d (x) d operator into the (d+1) (x) (d+1) space spanned by the
/// lowest d levels of each side; the top level is the flag.
inline CMatrix embed_flagged_pair(const CMatrix& op, int d) {
  const int dd = d + 1;
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dd) * dd, static_cast<Eigen::Index>(dd) * dd);
  for (int ar = 0; ar < d; ++ar)
    for (int br = 0; br < d; ++br)
      for (int ac = 0; ac < d; ++ac)
        for (int bc = 0; bc < d; ++bc)
          out(static_cast<Eigen::Index>(ar) * dd + br, static_cast<Eigen::Index>(ac) * dd + bc) =
              op(static_cast<Eigen::Index>(ar) * d + br, static_cast<Eigen::Index>(ac) * d + bc);
  return out;
}

}  // namespace detail

/// Star-network state: an equal mixture of M terms, term i carrying the i-th
/// edge state on the pair (A_i, B_i) while every other pair holds the
/// locally orthogonal flag |dd>. Subsystems are (d+1)-level systems ordered
/// (A_1 .. A_M, B_1 .. B_M); the flag is the top level |d>.
inline DensityOperator sigma_star(const std::vector<DensityOperator>& edge_states) {
  const int M = static_cast<int>(edge_states.size());
  if (M < 1) throw InputError("sigma_star: at least one edge state required");
  const int d = edge_states.front().dims().front();
  for (const auto& st : edge_states)
    if (st.dims() != std::vector<int>{d, d})
      throw InputError("sigma_star: all edge states must share the same d x d shape");
  if (M == 1) return edge_states.front();  // flag-free: the edge state itself

  const int dd = d + 1;
  std::vector<int> dims(static_cast<std::size_t>(2 * M), dd);
  const std::size_t D = detail::total_dimension(dims);
  CMatrix acc = CMatrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  CMatrix flag = CMatrix::Zero(dd, dd);
  flag(d, d) = Complex(1.0, 0.0);
  for (int i = 0; i < M; ++i) {
    std::vector<PlacedFactor> factors;
    factors.push_back({detail::embed_flagged_pair(edge_states[static_cast<std::size_t>(i)].matrix(), d),
                       {i, M + i}});
    for (int j = 0; j < M; ++j) {
      if (j == i) continue;
      factors.push_back({flag, {j}});
      factors.push_back({flag, {M + j}});
    }
    acc += tensor_at(dims, factors);
  }
  return DensityOperator(dims, acc / static_cast<double>(M));
}

/// Probability that the non-demolition flag measurement {1, |d><d|} on both
/// ends of the pair (sys_a, sys_b) finds the entangled block (neither side
/// in the flag level).
inline double flag_entangled_probability(const DensityOperator& rho, int sys_a, int sys_b) {
  const int dd = rho.dims()[static_cast<std::size_t>(sys_a)];
  const CMatrix pair = reduced_matrix(rho.matrix(), rho.dims(), {sys_a, sys_b});
  double p = 0.0;
  for (int a = 0; a + 1 < dd; ++a)
    for (int b = 0; b + 1 < dd; ++b)
      p += pair(static_cast<Eigen::Index>(a) * dd + b, static_cast<Eigen::Index>(a) * dd + b).real();
  return p;
}

/// Triangle-network state on six qutrits ordered (A1, A2, B1, B2, C1, C2):
/// the equal mixture of the three cyclic placements of the two-qubit
/// isotropic state rho(F), the remaining pairs holding the flag |22>.
inline DensityOperator sigma_triangle(double F) {
  const DensityOperator iso = isotropic(F, 2);
  const CMatrix embedded = detail::embed_flagged_pair(iso.matrix(), 2);
  CMatrix flag = CMatrix::Zero(3, 3);
  flag(2, 2) = Complex(1.0, 0.0);
  const std::vector<int> dims(6, 3);
  const std::size_t D = detail::total_dimension(dims);
  CMatrix acc = CMatrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  // Pairs: (A2,B1), (B2,C1), (C2,A1) with layout A1=0, A2=1, B1=2, B2=3, C1=4, C2=5.
  const std::vector<std::pair<int, int>> pairs{{1, 2}, {3, 4}, {5, 0}};
  for (const auto& [pa, pb] : pairs) {
    std::vector<PlacedFactor> factors;
    factors.push_back({embedded, {pa, pb}});
    for (int s = 0; s < 6; ++s)
      if (s != pa && s != pb) factors.push_back({flag, {s}});
    acc += tensor_at(dims, factors);
  }
  return DensityOperator(dims, acc / 3.0);
}

// ---------------------------------------------------------------------------
// Random states (test and optimizer support)
// ---------------------------------------------------------------------------

inline CMatrix random_unitary(int d, std::uint64_t seed) {
  RngStream rng(seed);
  return detail::random_unitary(d, rng);
}

/// Ginibre-induced random density operator.
inline DensityOperator random_density(const std::vector<int>& dims, std::uint64_t seed) {
  const std::size_t D = detail::total_dimension(dims);
  RngStream rng(seed);
  CMatrix g(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = detail::gaussian(rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityOperator(dims, std::move(rho));
}

}  // namespace gmnl
