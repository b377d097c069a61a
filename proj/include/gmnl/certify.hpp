#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmnl/density.hpp"
#include "gmnl/errors.hpp"
#include "gmnl/kv.hpp"
#include "gmnl/netgraph.hpp"

namespace gmnl {

/// Published reference values for the two-qubit isotropic family, reported
/// alongside every certificate: the best known local-model bound under
/// general measurements, the best local-model bound under projective
/// measurements, and the per-edge fraction a triangle of isotropic states
/// needs to pass the network-fraction criterion.
struct ReferenceThresholds {
  static constexpr double kLhsPovm = 0.625;
  static constexpr double kProjectiveModel = 0.762;
  static inline const double kTriangleRequired = std::pow(2.0, -2.0 / 3.0);
};

/// One row of the copy-number diagnostic: the growth indicator (F d^c)^k,
/// and, where the orbit game of dimension d^k is computable, the quantum
/// orbit-strategy score against the closed-form local bound.
struct CopyNumberRow {
  int k = 1;
  double growth = 0.0;  // (F d^c)^k, asymptotic indicator only
  bool comparable = false;
  int n = 0;            // orbit-game dimension d^k when comparable
  double eta = 0.0;
  double quantum_score = 0.0;
  double quantum_lhs = 0.0;      // F^k * quantum_score
  double classical_bound_k = 0.0;
  bool exceeds = false;          // quantum_lhs > classical_bound_k
  ScoreEstimate::Method method = ScoreEstimate::Method::kExact;
};

struct CopyNumberReport {
  double f_gamma = 0.0;
  int d = 2;
  int c = 1;
  bool growth_diverges = false;  // F d^c > 1: the indicator grows with k
  std::vector<CopyNumberRow> rows;
  std::string note;
};

/// Growth sequence (F d^c)^k for k = 1..k_max, plus exact or Monte Carlo
/// orbit-game comparisons where the dimension d^k is a power of two at most
/// 32. The unknown proportionality constants of the asymptotic argument are
/// never filled in: rows only report what the computed numbers show.
inline CopyNumberReport copy_number_diagnostic(double f_gamma, int d, int c, int k_max,
                                               std::uint64_t mc_samples = 200000,
                                               std::uint64_t seed = 1) {
  if (!(f_gamma > 0.0) || !(f_gamma <= 1.0))
    throw InputError("copy_number_diagnostic: fraction must lie in (0, 1]");
  if (d < 2) throw InputError("copy_number_diagnostic: local dimension must be >= 2");
  if (c < 1) throw InputError("copy_number_diagnostic: cut capacity must be >= 1");
  if (k_max < 1) throw InputError("copy_number_diagnostic: k_max must be >= 1");
  CopyNumberReport report;
  report.f_gamma = f_gamma;
  report.d = d;
  report.c = c;
  const double base = f_gamma * std::pow(static_cast<double>(d), c);
  report.growth_diverges = base > 1.0;
  report.note = report.growth_diverges
                    ? "growth column is an asymptotic indicator only; no violation is claimed "
                      "beyond the rows computed below"
                    : "F * d^c <= 1: the indicator decays, so no copy number helps";
  for (int k = 1; k <= k_max; ++k) {
    CopyNumberRow row;
    row.k = k;
    row.growth = std::pow(base, k);
    // Orbit-game comparison needs dimension d^k = 2^kk with 2 <= kk <= 5.
    double dim = std::pow(static_cast<double>(d), k);
    if (dim <= 32.5) {
      const int n = static_cast<int>(std::lround(dim));
      const int kk = static_cast<int>(std::lround(std::log2(static_cast<double>(n))));
      if ((1 << kk) == n && kk >= 2 && kk <= 5) {
        row.comparable = true;
        row.n = n;
        row.eta = n >= 8 ? 0.5 - 1.0 / static_cast<double>(kk) : 0.25;
        const KVParams params(kk, 1, row.eta);
        row.classical_bound_k = classical_bound(params);
        if (params.joint_bits() <= 8) {
          row.quantum_score = quantum_orbit_strategy_score(params, ScoreEstimate::Method::kExact).value;
          row.method = ScoreEstimate::Method::kExact;
        } else {
          QuantumScoreOptions opt;
          opt.samples = mc_samples;
          opt.seed = mix64(seed + static_cast<std::uint64_t>(k));
          row.quantum_score =
              quantum_orbit_strategy_score(params, ScoreEstimate::Method::kMonteCarlo, opt).value;
          row.method = ScoreEstimate::Method::kMonteCarlo;
        }
        row.quantum_lhs = std::pow(f_gamma, k) * row.quantum_score;
        row.exceeds = row.quantum_lhs > row.classical_bound_k;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

/// Verdict record for the network-fraction criterion F > d^(-c) and its
/// star-network specialization. Comparisons are strict on the raw computed
/// values; the margin is reported so callers can apply their own tolerance.
struct Certificate {
  int parties = 0;
  int edges = 0;
  int d = 2;
  int c = 1;                 // min-cut capacity of the network
  double f_gamma = 0.0;      // network fraction (optimized if requested)
  double threshold = 0.0;    // d^(-c)
  double margin = 0.0;       // f_gamma - threshold
  bool certified = false;    // f_gamma > threshold, strictly
  bool optimized = false;    // per-edge local-unitary ascent applied
  std::string note;
  std::optional<CopyNumberReport> diagnostic;
};

struct CertifyOptions {
  bool optimize_fraction = false;
  AscentOptions ascent;
  int diagnostic_k_max = 0;  // 0: no copy-number diagnostic attached
  std::uint64_t diagnostic_samples = 200000;
  std::uint64_t seed = 1;
};

/// Network-fraction criterion for a state distributed over a network: the
/// overlap with the product of maximally entangled edge states must strictly
/// exceed d^(-c). Requires a uniform edge dimension.
inline Certificate certify_network_fraction(const DensityOperator& rho,
                                            const EdgeAssignment& assignment,
                                            const CertifyOptions& options = {}) {
  if (!assignment.uniform_dimension())
    throw UnsupportedError("certify_network_fraction: mixed edge dimensions are not supported");
  Certificate cert;
  cert.parties = assignment.graph().parties();
  cert.edges = static_cast<int>(assignment.graph().edges().size());
  cert.d = assignment.pairs().front().dim;
  cert.c = min_cut(assignment.graph()).capacity;
  AscentOptions ascent = options.ascent;
  ascent.seed = mix64(options.seed ^ 0xface5ULL);
  cert.f_gamma = network_fraction(rho, assignment, options.optimize_fraction, ascent);
  cert.threshold = std::pow(static_cast<double>(cert.d), -cert.c);
  cert.margin = cert.f_gamma - cert.threshold;
  cert.certified = cert.f_gamma > cert.threshold;
  cert.optimized = options.optimize_fraction;
  if (cert.c > 1)
    cert.note = "min-cut capacity exceeds 1: the star-network shortcut does not apply; "
                "the threshold uses the general exponent c";
  if (options.diagnostic_k_max > 0)
    cert.diagnostic = copy_number_diagnostic(cert.f_gamma, cert.d, cert.c,
                                             options.diagnostic_k_max,
                                             options.diagnostic_samples, options.seed);
  return cert;
}

/// Star-network specialization: with per-edge fractions F_i the criterion
/// reduces to prod_i F_i > 1/d (a star's min-cut capacity is 1).
inline Certificate certify_star_fractions(const std::vector<double>& fractions, int d,
                                          const CertifyOptions& options = {}) {
  if (fractions.empty()) throw InputError("certify_star_fractions: fraction list is empty");
  if (d < 2) throw InputError("certify_star_fractions: local dimension must be >= 2");
  double product = 1.0;
  for (double f : fractions) {
    if (!(f >= 0.0) || !(f <= 1.0))
      throw InputError("certify_star_fractions: every fraction must lie in [0, 1]");
    product *= f;
  }
  Certificate cert;
  cert.parties = static_cast<int>(fractions.size()) + 1;
  cert.edges = static_cast<int>(fractions.size());
  cert.d = d;
  cert.c = 1;
  cert.f_gamma = product;
  cert.threshold = 1.0 / static_cast<double>(d);
  cert.margin = cert.f_gamma - cert.threshold;
  cert.certified = cert.f_gamma > cert.threshold;
  if (options.diagnostic_k_max > 0 && product > 0.0)
    cert.diagnostic = copy_number_diagnostic(product, d, 1, options.diagnostic_k_max,
                                             options.diagnostic_samples, options.seed);
  return cert;
}

/// Score divided by the local bound; the additive-decomposition quantity of
/// the many-copy argument.
inline double normalized_violation(double score, double local_bound) {
  if (!(local_bound > 0.0))
    throw InputError("normalized_violation: local bound must be positive");
  return score / local_bound;
}

}  // namespace gmnl
