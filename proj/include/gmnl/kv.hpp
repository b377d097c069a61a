#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gmnl/bitstring.hpp"
#include "gmnl/errors.hpp"
#include "gmnl/parallel.hpp"
#include "gmnl/rng.hpp"

namespace gmnl {

/// Parameters of the L-fold parallel orbit game on {0,1}^n, n = 2^k.
/// Alice receives L uniform words, Bob receives them flipped through
/// independent Bernoulli(eta) noise; both answer with one element of each
/// input's code orbit and win iff the answers XOR to the noise word slotwise.
struct KVParams {
  int k;
  int L;
  double eta;

  KVParams(int k_, int L_, double eta_) : k(k_), L(L_), eta(eta_) {
    if (k < 1 || k > HadamardCode::kMaxK)
      throw CapacityError("KVParams: k must be in [1, " +
                          std::to_string(HadamardCode::kMaxK) + "]");
    if (L < 1) throw InputError("KVParams: L must be >= 1");
    if (!(eta > 0.0) || !(eta < 0.5))
      throw InputError("KVParams: eta must lie strictly inside (0, 1/2)");
  }

  /// eta = 1/2 - 1/log2(n). Degenerates to 0 at n = 4, so it requires
  /// n >= 8; for n = 4 pass an explicit eta instead.
  static KVParams with_default_eta(int k_, int L_) {
    if (k_ < 3)
      throw InputError("KVParams: default eta = 1/2 - 1/log2(n) is 0 or negative for n < 8; "
                       "choose eta explicitly");
    return KVParams(k_, L_, 0.5 - 1.0 / static_cast<double>(k_));
  }

  int n() const { return 1 << k; }
  int joint_bits() const { return n() * L; }
};

struct ScoreEstimate {
  enum class Method { kExact, kMonteCarlo };

  double value = 0.0;
  double std_error = 0.0;     // 0 for exact results
  std::uint64_t samples = 0;  // 0 for exact results
  Method method = Method::kExact;

  static ScoreEstimate exact(double v) { return {v, 0.0, 0, Method::kExact}; }
  static ScoreEstimate monte_carlo(double v, double se, std::uint64_t s) {
    return {v, se, s, Method::kMonteCarlo};
  }
};

/// All orbit representatives of {0,1}^n in ascending order. Requires a full
/// cube sweep, so it is capped at n <= 16 (where the partition has 2^n/n
/// classes); larger n never reach exact enumeration anyway.
inline std::vector<std::uint64_t> orbit_representatives(const HadamardCode& code) {
  if (code.n() > 16)
    throw CapacityError("orbit_representatives: full cube sweep capped at n <= 16");
  std::vector<std::uint64_t> reps;
  const std::uint64_t cube = 1ULL << code.n();
  reps.reserve(static_cast<std::size_t>(cube) / static_cast<std::size_t>(code.n()));
  for (std::uint64_t x = 0; x < cube; ++x)
    if (code.representative(x) == x) reps.push_back(x);
  return reps;
}

/// A per-slot deterministic rule mapping each orbit to one of its elements,
/// keyed by the canonical representative, hence constant on orbits. Applied
/// independently to each of the L repetition slots.
class KVStrategy {
 public:
  enum class Kind { kMaxWeight, kRandomOrbit, kTable };

  static KVStrategy max_weight(int k) { return KVStrategy(Kind::kMaxWeight, k, 0); }

  /// Uniform random element per orbit: element index mix64(seed ^ rep) mod n.
  static KVStrategy random_orbit(int k, std::uint64_t seed) {
    return KVStrategy(Kind::kRandomOrbit, k, seed);
  }

  static KVStrategy from_table(int k, std::map<std::uint64_t, std::uint64_t> table) {
    KVStrategy s(Kind::kTable, k, 0);
    for (const auto& [rep, choice] : table) {
      if (s.code_.representative(rep) != rep)
        throw InputError("KVStrategy: table key " + BitString(rep, s.code_.n()).str() +
                         " is not a canonical representative");
      if (s.code_.representative(choice) != rep)
        throw InputError("KVStrategy: choice " + BitString(choice, s.code_.n()).str() +
                         " lies outside the orbit of its key");
    }
    s.table_ = std::move(table);
    return s;
  }

  Kind kind() const { return kind_; }
  const HadamardCode& code() const { return code_; }
  std::uint64_t seed() const { return seed_; }

  std::uint64_t choose_value(std::uint64_t x) const {
    const std::uint64_t rep = code_.representative(x);
    switch (kind_) {
      case Kind::kMaxWeight:
        return max_weight_value(rep, code_);
      case Kind::kRandomOrbit:
        return rep ^ code_.codeword_values()[static_cast<std::size_t>(
                   mix64(seed_ ^ rep) % static_cast<std::uint64_t>(code_.n()))];
      case Kind::kTable: {
        const auto it = table_.find(rep);
        if (it == table_.end())
          throw InputError("KVStrategy: no table entry for orbit of " +
                           BitString(rep, code_.n()).str());
        return it->second;
      }
    }
    return rep;  // unreachable
  }

  BitString choose(const BitString& x) const {
    if (x.length() != code_.n())
      throw InputError("KVStrategy: query length does not match code length");
    return BitString(choose_value(x.value()), code_.n());
  }

  std::vector<BitString> choose(const std::vector<BitString>& xs) const {
    std::vector<BitString> out;
    out.reserve(xs.size());
    for (const BitString& x : xs) out.push_back(choose(x));
    return out;
  }

  /// The chosen element of every orbit, in ascending representative order.
  std::vector<std::uint64_t> chosen_words() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t rep : orbit_representatives(code_)) out.push_back(choose_value(rep));
    return out;
  }

  /// Representative -> choice pairs in ascending representative order.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> table() const {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::uint64_t rep : orbit_representatives(code_)) out.emplace_back(rep, choose_value(rep));
    return out;
  }

 private:
  KVStrategy(Kind kind, int k, std::uint64_t seed) : kind_(kind), code_(k), seed_(seed) {}

  Kind kind_;
  HadamardCode code_;
  std::uint64_t seed_;
  std::map<std::uint64_t, std::uint64_t> table_;
};

/// A joint L-slot strategy: the chosen output tuple may depend on the whole
/// L-tuple of orbit representatives, which covers strategies correlated
/// across repetition slots (the ones that make parallel repetition
/// nontrivial). Keys and values are L-tuples of word values.
class JointKVStrategy {
 public:
  JointKVStrategy(int k, int L, std::map<std::vector<std::uint64_t>, std::vector<std::uint64_t>> table)
      : code_(k), L_(L), table_(std::move(table)) {
    for (const auto& [rep, choice] : table_) {
      if (static_cast<int>(rep.size()) != L || static_cast<int>(choice.size()) != L)
        throw InputError("JointKVStrategy: tuple arity does not match L");
      for (int s = 0; s < L; ++s) {
        if (code_.representative(rep[static_cast<std::size_t>(s)]) != rep[static_cast<std::size_t>(s)])
          throw InputError("JointKVStrategy: key tuple is not canonical");
        if (code_.representative(choice[static_cast<std::size_t>(s)]) != rep[static_cast<std::size_t>(s)])
          throw InputError("JointKVStrategy: choice lies outside the keyed joint orbit");
      }
    }
  }

  /// Uniform random element of every joint orbit; the per-slot pick is keyed
  /// by the entire representative tuple, so slots are genuinely correlated.
  static JointKVStrategy random(int k, int L, std::uint64_t seed,
                                std::size_t rep_budget = kDefaultRepBudget);

  const HadamardCode& code() const { return code_; }
  int L() const { return L_; }

  std::vector<std::uint64_t> choose_values(const std::vector<std::uint64_t>& xs) const {
    std::vector<std::uint64_t> rep(xs.size());
    for (std::size_t s = 0; s < xs.size(); ++s) rep[s] = code_.representative(xs[s]);
    const auto it = table_.find(rep);
    if (it == table_.end()) throw InputError("JointKVStrategy: no entry for queried joint orbit");
    return it->second;
  }

  static constexpr std::size_t kDefaultRepBudget = 1u << 13;

 private:
  HadamardCode code_;
  int L_;
  std::map<std::vector<std::uint64_t>, std::vector<std::uint64_t>> table_;
};

/// Win predicate: all L slots must satisfy a XOR b = z.
inline bool win(const std::vector<BitString>& a, const std::vector<BitString>& b,
                const std::vector<BitString>& z) {
  if (a.size() != b.size() || a.size() != z.size())
    throw InputError("win: slot counts differ");
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s].length() != b[s].length() || a[s].length() != z[s].length())
      throw InputError("win: word lengths differ in slot " + std::to_string(s));
    if ((a[s] ^ b[s]) != z[s]) return false;
  }
  return true;
}

struct KVRound {
  std::vector<BitString> x;
  std::vector<BitString> y;  // x XOR z
  std::vector<BitString> z;  // i.i.d. Bernoulli(eta) bits
};

inline KVRound sample_round(const KVParams& params, RngStream& rng) {
  KVRound round;
  const int n = params.n();
  for (int s = 0; s < params.L; ++s) {
    const std::uint64_t xv = rng.next_bits(n);
    std::uint64_t zv = 0;
    for (int b = 0; b < n; ++b)
      if (rng.next_bernoulli(params.eta)) zv |= 1ULL << b;
    round.x.emplace_back(xv, n);
    round.z.emplace_back(zv, n);
    round.y.emplace_back(xv ^ zv, n);
  }
  return round;
}

/// Local bound n^(-L eta/(1-eta)) for the L-fold game; holds for every
/// classical strategy, correlated across slots or not, and factorizes over L.
inline double classical_bound(const KVParams& params) {
  return std::pow(2.0, -static_cast<double>(params.k) * params.L * params.eta / (1.0 - params.eta));
}

namespace detail {

/// eta^d (1-eta)^(m-d) for d = 0..m. Direct pow products up to m = 32;
/// beyond that the table is assembled in log space to dodge underflow.
inline std::vector<double> noise_weight_table(double eta, int m) {
  std::vector<double> w(static_cast<std::size_t>(m) + 1);
  if (m <= 32) {
    for (int d = 0; d <= m; ++d)
      w[static_cast<std::size_t>(d)] = std::pow(eta, d) * std::pow(1.0 - eta, m - d);
  } else {
    const double le = std::log(eta), lq = std::log1p(-eta);
    for (int d = 0; d <= m; ++d)
      w[static_cast<std::size_t>(d)] = std::exp(d * le + (m - d) * lq);
  }
  return w;
}

/// Histogram of XOR distances over all pairs (one row from A, one from B);
/// rows are L-word tuples stored flat with stride L.
inline std::vector<std::uint64_t> pair_distance_histogram(
    const std::vector<std::uint64_t>& flatA, const std::vector<std::uint64_t>& flatB, int L,
    int max_distance) {
  const std::size_t JA = flatA.size() / static_cast<std::size_t>(L);
  const std::size_t JB = flatB.size() / static_cast<std::size_t>(L);
  const std::size_t bins = static_cast<std::size_t>(max_distance) + 1;
  std::vector<std::vector<std::uint64_t>> partial;
  const std::uint64_t chunk = 256;
  const std::uint64_t n_chunks = JA == 0 ? 0 : (JA + chunk - 1) / chunk;
  partial.assign(n_chunks, {});
  for_each_chunk(JA, chunk, [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> h(bins, 0);
    for (std::uint64_t i = lo; i < hi; ++i) {
      const std::uint64_t* ra = flatA.data() + i * static_cast<std::uint64_t>(L);
      for (std::size_t j = 0; j < JB; ++j) {
        const std::uint64_t* rb = flatB.data() + j * static_cast<std::size_t>(L);
        int d = 0;
        for (int s = 0; s < L; ++s) d += std::popcount(ra[s] ^ rb[s]);
        ++h[static_cast<std::size_t>(d)];
      }
    }
    partial[c] = std::move(h);
  });
  std::vector<std::uint64_t> hist(bins, 0);
  for (const auto& h : partial)
    for (std::size_t d = 0; d < bins; ++d) hist[d] += h[d];
  return hist;
}

/// Winning probability from the two players' chosen-word lists:
///   P = n^L 2^(-nL) sum_{x in A, y in B} eta^{|x XOR y|} (1-eta)^{nL-|x XOR y|}.
inline double score_from_chosen(const std::vector<std::uint64_t>& flatA,
                                const std::vector<std::uint64_t>& flatB,
                                const KVParams& params) {
  const int m = params.joint_bits();
  const auto hist = pair_distance_histogram(flatA, flatB, params.L, m);
  const auto w = noise_weight_table(params.eta, m);
  double sum = 0.0;
  for (int d = 0; d <= m; ++d)
    sum += static_cast<double>(hist[static_cast<std::size_t>(d)]) * w[static_cast<std::size_t>(d)];
  // n^L * 2^(-nL) is the exact power of two 2^(L(k-n)).
  return std::ldexp(sum, params.L * (params.k - params.n()));
}

/// L-fold odometer over per-slot word lists -> flat tuple rows.
inline std::vector<std::uint64_t> joint_tuples(const std::vector<std::uint64_t>& slot_words, int L) {
  const std::size_t r = slot_words.size();
  std::size_t total = 1;
  for (int s = 0; s < L; ++s) total *= r;
  std::vector<std::uint64_t> flat;
  flat.reserve(total * static_cast<std::size_t>(L));
  std::vector<std::size_t> idx(static_cast<std::size_t>(L), 0);
  for (std::size_t row = 0; row < total; ++row) {
    for (int s = 0; s < L; ++s) flat.push_back(slot_words[idx[static_cast<std::size_t>(s)]]);
    for (int s = L - 1; s >= 0; --s) {
      if (++idx[static_cast<std::size_t>(s)] < r) break;
      idx[static_cast<std::size_t>(s)] = 0;
    }
  }
  return flat;
}

}  // namespace detail

constexpr std::size_t kDefaultRepBudget = 1u << 13;

/// Exact winning probability via the representative-pair sum, iterating only
/// over each player's chosen orbit elements (2^{nL}/n^L of them) instead of
/// the full (x, z) cube. Cross-checked against the naive enumeration in the
/// test suite at n = 4.
inline ScoreEstimate exact_score(const KVStrategy& strategyA, const KVStrategy& strategyB,
                                 const KVParams& params,
                                 std::size_t rep_budget = kDefaultRepBudget) {
  if (strategyA.code().n() != params.n() || strategyB.code().n() != params.n())
    throw InputError("exact_score: strategy code length does not match params");
  const auto reps = orbit_representatives(strategyA.code());
  double joint = 1.0;
  for (int s = 0; s < params.L; ++s) joint *= static_cast<double>(reps.size());
  if (joint > static_cast<double>(rep_budget))
    throw CapacityError("exact_score: " + std::to_string(joint) +
                        " joint representatives exceed budget " + std::to_string(rep_budget) +
                        "; use mc_score instead");
  std::vector<std::uint64_t> singleA, singleB;
  singleA.reserve(reps.size());
  singleB.reserve(reps.size());
  for (std::uint64_t rep : reps) {
    singleA.push_back(strategyA.choose_value(rep));
    singleB.push_back(strategyB.choose_value(rep));
  }
  const auto flatA = detail::joint_tuples(singleA, params.L);
  const auto flatB = detail::joint_tuples(singleB, params.L);
  return ScoreEstimate::exact(detail::score_from_chosen(flatA, flatB, params));
}

/// Exact score for joint (possibly slot-correlated) strategies.
inline ScoreEstimate exact_score(const JointKVStrategy& strategyA,
                                 const JointKVStrategy& strategyB, const KVParams& params,
                                 std::size_t rep_budget = kDefaultRepBudget) {
  if (strategyA.code().n() != params.n() || strategyB.code().n() != params.n() ||
      strategyA.L() != params.L || strategyB.L() != params.L)
    throw InputError("exact_score: joint strategy shape does not match params");
  const auto reps = orbit_representatives(strategyA.code());
  double joint = 1.0;
  for (int s = 0; s < params.L; ++s) joint *= static_cast<double>(reps.size());
  if (joint > static_cast<double>(rep_budget))
    throw CapacityError("exact_score: joint representative count exceeds budget; use mc_score");
  const auto rep_rows = detail::joint_tuples(reps, params.L);
  const std::size_t J = rep_rows.size() / static_cast<std::size_t>(params.L);
  std::vector<std::uint64_t> flatA, flatB;
  flatA.reserve(rep_rows.size());
  flatB.reserve(rep_rows.size());
  std::vector<std::uint64_t> tuple(static_cast<std::size_t>(params.L));
  for (std::size_t row = 0; row < J; ++row) {
    std::copy_n(rep_rows.begin() + static_cast<std::ptrdiff_t>(row * static_cast<std::size_t>(params.L)),
                params.L, tuple.begin());
    for (std::uint64_t v : strategyA.choose_values(tuple)) flatA.push_back(v);
    for (std::uint64_t v : strategyB.choose_values(tuple)) flatB.push_back(v);
  }
  return ScoreEstimate::exact(detail::score_from_chosen(flatA, flatB, params));
}

inline JointKVStrategy JointKVStrategy::random(int k, int L, std::uint64_t seed,
                                               std::size_t rep_budget) {
  HadamardCode code(k);
  const auto reps = orbit_representatives(code);
  double joint = 1.0;
  for (int s = 0; s < L; ++s) joint *= static_cast<double>(reps.size());
  if (joint > static_cast<double>(rep_budget))
    throw CapacityError("JointKVStrategy::random: joint representative count exceeds budget");
  const auto rep_rows = detail::joint_tuples(reps, L);
  const std::size_t J = rep_rows.size() / static_cast<std::size_t>(L);
  std::map<std::vector<std::uint64_t>, std::vector<std::uint64_t>> table;
  RngStream root(seed);
  for (std::size_t row = 0; row < J; ++row) {
    std::vector<std::uint64_t> rep(rep_rows.begin() + static_cast<std::ptrdiff_t>(row * static_cast<std::size_t>(L)),
                                   rep_rows.begin() + static_cast<std::ptrdiff_t>((row + 1) * static_cast<std::size_t>(L)));
    RngStream lane = root.derive(row);
    std::vector<std::uint64_t> choice(rep.size());
    for (std::size_t s = 0; s < rep.size(); ++s)
      choice[s] = rep[s] ^ code.codeword_values()[static_cast<std::size_t>(
                      lane.next_below(static_cast<std::uint64_t>(code.n())))];
    table.emplace(std::move(rep), std::move(choice));
  }
  return JointKVStrategy(k, L, std::move(table));
}

/// Unbiased Monte Carlo estimate over sampled rounds; sample i draws from the
/// sub-stream stream.derive(i), so the estimate is independent of how samples
/// are partitioned across workers.
inline ScoreEstimate mc_score(const KVStrategy& strategyA, const KVStrategy& strategyB,
                              const KVParams& params, std::uint64_t samples, RngStream stream) {
  if (samples < 1) throw InputError("mc_score: samples must be >= 1");
  const std::uint64_t chunk = 4096;
  const std::uint64_t n_chunks = (samples + chunk - 1) / chunk;
  std::vector<std::uint64_t> wins_per_chunk(n_chunks, 0);
  for_each_chunk(samples, chunk, [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t wins = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      RngStream lane = stream.derive(i);
      const KVRound round = sample_round(params, lane);
      if (win(strategyA.choose(round.x), strategyB.choose(round.y), round.z)) ++wins;
    }
    wins_per_chunk[c] = wins;
  });
  std::uint64_t wins = 0;
  for (std::uint64_t w : wins_per_chunk) wins += w;
  const double p = static_cast<double>(wins) / static_cast<double>(samples);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return ScoreEstimate::monte_carlo(p, se, samples);
}

/// Entries of the orbit-basis vector attached to word u: (-1)^{u_i} / sqrt(n),
/// indexed by ASCII bit position. The n vectors of one orbit are orthonormal
/// because distinct codewords differ in exactly n/2 positions.
inline std::vector<double> orbit_basis_vector(const BitString& u) {
  const double inv = 1.0 / std::sqrt(static_cast<double>(u.length()));
  std::vector<double> v(static_cast<std::size_t>(u.length()));
  for (int p = 0; p < u.length(); ++p) v[static_cast<std::size_t>(p)] = u.bit(p) ? -inv : inv;
  return v;
}

namespace detail {

/// Inner product of two orbit-basis vectors, slotwise:
/// prod_s (1 - 2 |a_s XOR b_s| / n).
inline double orbit_vector_inner(const std::uint64_t* a, const std::uint64_t* b, int L, int n) {
  double ip = 1.0;
  for (int s = 0; s < L; ++s)
    ip *= 1.0 - 2.0 * static_cast<double>(std::popcount(a[s] ^ b[s])) / static_cast<double>(n);
  return ip;
}

}  // namespace detail

/// Born probability of the outcome pair (a, b) when both players measure the
/// maximally entangled state of local dimension n^L in their L-fold orbit
/// bases: |<v_a, v_b>|^2 / n^L (the vectors are real).
inline double born_probability(const std::vector<BitString>& a, const std::vector<BitString>& b) {
  if (a.empty() || a.size() != b.size()) throw InputError("born_probability: slot counts differ");
  const int n = a[0].length();
  const int L = static_cast<int>(a.size());
  std::vector<std::uint64_t> av, bv;
  for (const auto& w : a) av.push_back(w.value());
  for (const auto& w : b) bv.push_back(w.value());
  const double ip = detail::orbit_vector_inner(av.data(), bv.data(), L, n);
  double dim = 1.0;
  for (int s = 0; s < L; ++s) dim *= static_cast<double>(n);
  return ip * ip / dim;
}

struct QuantumScoreOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  int exact_bit_budget = 8;  // exact path enumerates 2^{nL} x 2^{nL} input pairs
};

namespace detail {

/// Conditional win probability for fixed inputs (x, z): sum the Born weight
/// of every outcome pair (a, b) in O(x) x O(y) passing the win predicate.
inline double quantum_round_win_probability(const std::vector<std::uint64_t>& x,
                                            const std::vector<std::uint64_t>& z,
                                            const HadamardCode& code) {
  const int L = static_cast<int>(x.size());
  const int n = code.n();
  const auto& H = code.codeword_values();
  // Joint orbit elements a = x ^ ha, b = y ^ hb, odometers over H^L.
  std::vector<std::size_t> ia(static_cast<std::size_t>(L), 0);
  std::vector<std::uint64_t> a(static_cast<std::size_t>(L)), b(static_cast<std::size_t>(L));
  double total = 0.0;
  const std::size_t orbit = static_cast<std::size_t>(n);
  std::size_t count_a = 1;
  for (int s = 0; s < L; ++s) count_a *= orbit;
  for (std::size_t ra = 0; ra < count_a; ++ra) {
    for (int s = 0; s < L; ++s) a[static_cast<std::size_t>(s)] = x[static_cast<std::size_t>(s)] ^ H[ia[static_cast<std::size_t>(s)]];
    std::vector<std::size_t> ib(static_cast<std::size_t>(L), 0);
    for (std::size_t rb = 0; rb < count_a; ++rb) {
      bool winning = true;
      for (int s = 0; s < L; ++s) {
        b[static_cast<std::size_t>(s)] = (x[static_cast<std::size_t>(s)] ^ z[static_cast<std::size_t>(s)]) ^ H[ib[static_cast<std::size_t>(s)]];
        if ((a[static_cast<std::size_t>(s)] ^ b[static_cast<std::size_t>(s)]) != z[static_cast<std::size_t>(s)]) winning = false;
      }
      if (winning) {
        const double ip = orbit_vector_inner(a.data(), b.data(), L, n);
        double dim = 1.0;
        for (int s = 0; s < L; ++s) dim *= static_cast<double>(n);
        total += ip * ip / dim;
      }
      for (int s = L - 1; s >= 0; --s) {
        if (++ib[static_cast<std::size_t>(s)] < orbit) break;
        ib[static_cast<std::size_t>(s)] = 0;
      }
    }
    for (int s = L - 1; s >= 0; --s) {
      if (++ia[static_cast<std::size_t>(s)] < orbit) break;
      ia[static_cast<std::size_t>(s)] = 0;
    }
  }
  return total;
}

inline std::vector<std::uint64_t> unpack_slots(std::uint64_t packed, int n, int L) {
  std::vector<std::uint64_t> slots(static_cast<std::size_t>(L));
  const std::uint64_t mask = n >= 64 ? ~0ULL : (1ULL << n) - 1;
  for (int s = 0; s < L; ++s) slots[static_cast<std::size_t>(s)] = (packed >> (s * n)) & mask;
  return slots;
}

}  // namespace detail

/// Winning probability of the orbit-basis measurement strategy on the
/// maximally entangled state. Exact evaluation enumerates the full
/// (x, z) input cube and is capped by options.exact_bit_budget (nL bits);
/// the Monte Carlo path samples inputs and accumulates each round's exact
/// conditional win probability.
inline ScoreEstimate quantum_orbit_strategy_score(const KVParams& params,
                                                  ScoreEstimate::Method method,
                                                  const QuantumScoreOptions& options = {}) {
  const HadamardCode code(params.k);
  const int m = params.joint_bits();
  if (method == ScoreEstimate::Method::kExact) {
    if (m > options.exact_bit_budget)
      throw CapacityError("quantum_orbit_strategy_score: nL = " + std::to_string(m) +
                          " exceeds the exact enumeration budget of " +
                          std::to_string(options.exact_bit_budget) +
                          " input bits; use the Monte Carlo method");
    const std::uint64_t cube = 1ULL << m;
    const auto w = detail::noise_weight_table(params.eta, m);
    const double value = parallel_sum(cube, 64, [&](std::uint64_t xz) {
      // One outer index per x; inner loop over z keeps chunking deterministic.
      const auto x = detail::unpack_slots(xz, params.n(), params.L);
      double acc = 0.0;
      for (std::uint64_t zp = 0; zp < cube; ++zp) {
        const auto z = detail::unpack_slots(zp, params.n(), params.L);
        acc += w[static_cast<std::size_t>(std::popcount(zp))] *
               detail::quantum_round_win_probability(x, z, code);
      }
      return acc;
    }) / static_cast<double>(cube);
    return ScoreEstimate::exact(value);
  }
  if (options.samples < 1) throw InputError("quantum_orbit_strategy_score: samples must be >= 1");
  RngStream stream(options.seed);
  const std::uint64_t chunk = 1024;
  const std::uint64_t n_chunks = (options.samples + chunk - 1) / chunk;
  std::vector<double> sum_chunk(n_chunks, 0.0), sq_chunk(n_chunks, 0.0);
  for_each_chunk(options.samples, chunk, [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
    double s1 = 0.0, s2 = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      RngStream lane = stream.derive(i);
      const KVRound round = sample_round(params, lane);
      std::vector<std::uint64_t> x, z;
      for (const auto& wv : round.x) x.push_back(wv.value());
      for (const auto& wv : round.z) z.push_back(wv.value());
      const double p = detail::quantum_round_win_probability(x, z, code);
      s1 += p;
      s2 += p * p;
    }
    sum_chunk[c] = s1;
    sq_chunk[c] = s2;
  });
  double s1 = 0.0, s2 = 0.0;
  for (std::uint64_t c = 0; c < n_chunks; ++c) { s1 += sum_chunk[c]; s2 += sq_chunk[c]; }
  const double mean = s1 / static_cast<double>(options.samples);
  const double var = std::max(0.0, s2 / static_cast<double>(options.samples) - mean * mean);
  const double se = std::sqrt(var / static_cast<double>(options.samples));
  return ScoreEstimate::monte_carlo(mean, se, options.samples);
}

/// Independent max-weight strategy: in each slot, answer with the orbit
/// element of highest Hamming weight (ties to the lexicographically
/// smallest). Asymptotically optimal in n, identical for both players, and
/// applied slotwise for any number of repetitions.
inline KVStrategy max_weight_strategy(const HadamardCode& code) {
  return KVStrategy::max_weight(code.k());
}

}  // namespace gmnl
