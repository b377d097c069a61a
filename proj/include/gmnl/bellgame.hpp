#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmnl/errors.hpp"
#include "gmnl/multiindex.hpp"
#include "gmnl/rational.hpp"

namespace gmnl {

/// Two-player game: winning weights G[a,b,x,y] in [0,1] and an input
/// distribution p(x,y). Weight storage order is ((x*|Y|+y)*|A|+a)*|B|+b.
/// Games built from rationals carry exact tables alongside the double
/// mirrors, so brute-forced bounds on dyadic games come out as exact
/// fractions (3/4, 5/8) rather than rounded doubles.
class BellGame {
 public:
  BellGame(int nX, int nY, int nA, int nB, std::vector<double> weights, std::vector<double> p)
      : nX_(nX), nY_(nY), nA_(nA), nB_(nB), weights_(std::move(weights)), p_(std::move(p)) {
    validate();
  }

  BellGame(int nX, int nY, int nA, int nB, const std::vector<Frac>& weights,
           const std::vector<Frac>& p)
      : nX_(nX), nY_(nY), nA_(nA), nB_(nB) {
    weights_.reserve(weights.size());
    p_.reserve(p.size());
    for (const Frac& w : weights) weights_.push_back(w.to_double());
    for (const Frac& q : p) p_.push_back(q.to_double());
    weights_exact_ = weights;
    p_exact_ = p;
    validate();
  }

  int num_x() const { return nX_; }
  int num_y() const { return nY_; }
  int num_a() const { return nA_; }
  int num_b() const { return nB_; }

  double weight(int a, int b, int x, int y) const { return weights_[widx(a, b, x, y)]; }
  double p(int x, int y) const { return p_[pidx(x, y)]; }

  bool has_exact() const { return weights_exact_.has_value() && p_exact_.has_value(); }
  Frac weight_exact(int a, int b, int x, int y) const { return (*weights_exact_)[widx(a, b, x, y)]; }
  Frac p_exact(int x, int y) const { return (*p_exact_)[pidx(x, y)]; }

  /// Symmetric under player permutation: G[a,b,x,y] = G[b,a,y,x] and
  /// p(x,y) = p(y,x). Required for undirected network extensions.
  bool is_symmetric(double tol = 1e-12) const {
    if (nX_ != nY_ || nA_ != nB_) return false;
    for (int x = 0; x < nX_; ++x)
      for (int y = 0; y < nY_; ++y) {
        if (std::abs(p(x, y) - p(y, x)) > tol) return false;
        for (int a = 0; a < nA_; ++a)
          for (int b = 0; b < nB_; ++b)
            if (std::abs(weight(a, b, x, y) - weight(b, a, y, x)) > tol) return false;
      }
    return true;
  }

  std::size_t widx(int a, int b, int x, int y) const {
    return static_cast<std::size_t>(((x * nY_ + y) * nA_ + a) * nB_ + b);
  }
  std::size_t pidx(int x, int y) const { return static_cast<std::size_t>(x * nY_ + y); }

 private:
  void validate() const {
    if (nX_ < 1 || nY_ < 1 || nA_ < 1 || nB_ < 1)
      throw InputError("BellGame: alphabet sizes must be positive");
    const std::size_t wn = static_cast<std::size_t>(nX_) * static_cast<std::size_t>(nY_) *
                           static_cast<std::size_t>(nA_) * static_cast<std::size_t>(nB_);
    if (weights_.size() != wn || p_.size() != static_cast<std::size_t>(nX_) * static_cast<std::size_t>(nY_))
      throw InputError("BellGame: table sizes do not match alphabets");
    for (double w : weights_)
      if (!(w >= 0.0) || !(w <= 1.0)) throw InputError("BellGame: weights must lie in [0,1]");
    double sum = 0.0;
    for (double q : p_) {
      if (!(q >= 0.0)) throw InputError("BellGame: input distribution must be nonnegative");
      sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw InputError("BellGame: input distribution sums to " + std::to_string(sum));
  }

  int nX_, nY_, nA_, nB_;
  std::vector<double> weights_;
  std::vector<double> p_;
  std::optional<std::vector<Frac>> weights_exact_;
  std::optional<std::vector<Frac>> p_exact_;
};

/// CHSH with uniform inputs: win iff a XOR b = x AND y. Exact tables.
inline BellGame chsh() {
  std::vector<Frac> w;
  w.reserve(16);
  std::vector<Frac> p(4, Frac(1, 4));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) w.emplace_back(((a ^ b) == (x & y)) ? 1 : 0, 1);
  return BellGame(2, 2, 2, 2, w, p);
}

/// Multi-party conditional distribution P(outputs | inputs); inputs and
/// outputs are per-party joint alphabets. Table layout: row = flattened
/// input tuple (party 0 most significant), column = flattened output tuple.
class Behavior {
 public:
  Behavior(std::vector<int> in_sizes, std::vector<int> out_sizes, std::vector<double> table)
      : in_(std::move(in_sizes)), out_(std::move(out_sizes)), table_(std::move(table)) {
    if (in_.sizes().size() != out_.sizes().size())
      throw InputError("Behavior: party counts of inputs and outputs differ");
    if (table_.size() != in_.total() * out_.total())
      throw InputError("Behavior: table size does not match alphabets");
    for (std::size_t xf = 0; xf < in_.total(); ++xf) {
      double sum = 0.0;
      for (std::size_t af = 0; af < out_.total(); ++af) {
        const double v = table_[xf * out_.total() + af];
        if (!(v >= 0.0)) throw InputError("Behavior: negative probability");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-10)
        throw InputError("Behavior: outputs for input row " + std::to_string(xf) +
                         " sum to " + std::to_string(sum));
    }
  }

  /// Deterministic behavior from per-party response functions
  /// (party, party_input) -> party_output.
  template <typename Fn>
  static Behavior deterministic(std::vector<int> in_sizes, std::vector<int> out_sizes, Fn&& respond) {
    MixedRadix in(in_sizes), out(out_sizes);
    std::vector<double> table(in.total() * out.total(), 0.0);
    const int parties = in.digits();
    for (std::size_t xf = 0; xf < in.total(); ++xf) {
      const auto xs = in.decode(xf);
      std::vector<int> as(static_cast<std::size_t>(parties));
      for (int i = 0; i < parties; ++i) as[static_cast<std::size_t>(i)] = respond(i, xs[static_cast<std::size_t>(i)]);
      table[xf * out.total() + out.encode(as)] = 1.0;
    }
    return Behavior(std::move(in_sizes), std::move(out_sizes), std::move(table));
  }

  int parties() const { return in_.digits(); }
  const MixedRadix& inputs() const { return in_; }
  const MixedRadix& outputs() const { return out_; }
  double prob(std::size_t x_flat, std::size_t a_flat) const {
    return table_[x_flat * out_.total() + a_flat];
  }
  const std::vector<double>& table() const { return table_; }

 private:
  MixedRadix in_;
  MixedRadix out_;
  std::vector<double> table_;
};

/// Bipartite score S = sum G[a,b,x,y] P(a,b|x,y) p(x,y).
inline double score(const BellGame& game, const Behavior& behavior) {
  if (behavior.parties() != 2) throw InputError("score: behavior must have exactly 2 parties");
  if (behavior.inputs().sizes() != std::vector<int>{game.num_x(), game.num_y()} ||
      behavior.outputs().sizes() != std::vector<int>{game.num_a(), game.num_b()})
    throw InputError("score: behavior alphabets do not match the game");
  double s = 0.0;
  for (int x = 0; x < game.num_x(); ++x)
    for (int y = 0; y < game.num_y(); ++y) {
      const double px = game.p(x, y);
      if (px == 0.0) continue;
      const std::size_t xf = behavior.inputs().encode({x, y});
      for (int a = 0; a < game.num_a(); ++a)
        for (int b = 0; b < game.num_b(); ++b)
          s += game.weight(a, b, x, y) * behavior.prob(xf, behavior.outputs().encode({a, b})) * px;
    }
  return s;
}

struct LocalBound {
  double value = 0.0;
  std::optional<Frac> exact;        // present when the game carries exact tables
  std::vector<int> strategy_a;      // response per x
  std::vector<int> strategy_b;      // response per y
};

namespace detail {

inline double pow_count(int base, int exp) {
  double v = 1.0;
  for (int i = 0; i < exp; ++i) v *= static_cast<double>(base);
  return v;
}

/// Enumerates every deterministic strategy of player A and, for each one,
/// takes player B's exact best response (the inner maximum decomposes over
/// y, so this is the full maximum over all strategy pairs).
inline LocalBound local_bound_enumerate_a(const BellGame& g, std::uint64_t ops_budget) {
  const double countA = pow_count(g.num_a(), g.num_x());
  const double ops = countA * g.num_x() * g.num_y() * g.num_a() * g.num_b();
  if (ops > static_cast<double>(ops_budget))
    throw CapacityError("local_bound_bruteforce: ~" + std::to_string(ops) +
                        " enumeration steps exceed the budget of " + std::to_string(ops_budget));
  const bool exact = g.has_exact();
  LocalBound best;
  best.value = -1.0;
  std::vector<int> fa(static_cast<std::size_t>(g.num_x()), 0);
  std::vector<double> col(static_cast<std::size_t>(g.num_b()));
  std::vector<Frac> col_exact(static_cast<std::size_t>(g.num_b()));
  std::optional<Frac> best_exact;
  for (;;) {
    double s = 0.0;
    Frac s_exact(0, 1);
    std::vector<int> fb(static_cast<std::size_t>(g.num_y()), 0);
    for (int y = 0; y < g.num_y(); ++y) {
      for (int b = 0; b < g.num_b(); ++b) {
        double t = 0.0;
        for (int x = 0; x < g.num_x(); ++x)
          t += g.p(x, y) * g.weight(fa[static_cast<std::size_t>(x)], b, x, y);
        col[static_cast<std::size_t>(b)] = t;
        if (exact) {
          Frac te(0, 1);
          for (int x = 0; x < g.num_x(); ++x)
            te += g.p_exact(x, y) * g.weight_exact(fa[static_cast<std::size_t>(x)], b, x, y);
          col_exact[static_cast<std::size_t>(b)] = te;
        }
      }
      int arg = 0;
      if (exact) {
        for (int b = 1; b < g.num_b(); ++b)
          if (col_exact[static_cast<std::size_t>(b)] > col_exact[static_cast<std::size_t>(arg)]) arg = b;
        s_exact += col_exact[static_cast<std::size_t>(arg)];
      } else {
        for (int b = 1; b < g.num_b(); ++b)
          if (col[static_cast<std::size_t>(b)] > col[static_cast<std::size_t>(arg)]) arg = b;
      }
      s += col[static_cast<std::size_t>(arg)];
      fb[static_cast<std::size_t>(y)] = arg;
    }
    const bool better = exact ? (!best_exact || s_exact > *best_exact) : (s > best.value);
    if (better) {
      best.value = exact ? s_exact.to_double() : s;
      if (exact) best_exact = s_exact;
      best.strategy_a = fa;
      best.strategy_b = fb;
    }
    // next strategy (odometer over responses)
    int x = g.num_x() - 1;
    for (; x >= 0; --x) {
      if (++fa[static_cast<std::size_t>(x)] < g.num_a()) break;
      fa[static_cast<std::size_t>(x)] = 0;
    }
    if (x < 0) break;
  }
  best.exact = best_exact;
  return best;
}

/// The same game with the players exchanged: G'[b,a,y,x], p'(y,x).
inline BellGame swap_players(const BellGame& g) {
  const std::size_t wn = static_cast<std::size_t>(g.num_x()) * g.num_y() * g.num_a() * g.num_b();
  if (g.has_exact()) {
    std::vector<Frac> w(wn, Frac(0, 1)), p(static_cast<std::size_t>(g.num_x()) * g.num_y(), Frac(0, 1));
    for (int x = 0; x < g.num_x(); ++x)
      for (int y = 0; y < g.num_y(); ++y) {
        p[static_cast<std::size_t>(y * g.num_x() + x)] = g.p_exact(x, y);
        for (int a = 0; a < g.num_a(); ++a)
          for (int b = 0; b < g.num_b(); ++b)
            w[static_cast<std::size_t>(((y * g.num_x() + x) * g.num_b() + b) * g.num_a() + a)] =
                g.weight_exact(a, b, x, y);
      }
    return BellGame(g.num_y(), g.num_x(), g.num_b(), g.num_a(), w, p);
  }
  std::vector<double> w(wn), p(static_cast<std::size_t>(g.num_x()) * g.num_y());
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y) {
      p[static_cast<std::size_t>(y * g.num_x() + x)] = g.p(x, y);
      for (int a = 0; a < g.num_a(); ++a)
        for (int b = 0; b < g.num_b(); ++b)
          w[static_cast<std::size_t>(((y * g.num_x() + x) * g.num_b() + b) * g.num_a() + a)] =
              g.weight(a, b, x, y);
    }
  return BellGame(g.num_y(), g.num_x(), g.num_b(), g.num_a(), std::move(w), std::move(p));
}

}  // namespace detail

constexpr std::uint64_t kDefaultLocalBoundOps = 1ULL << 30;

/// Maximal score over all local deterministic strategy pairs (shared
/// randomness cannot beat the best vertex). The side with fewer deterministic
/// strategies is enumerated; the other side's best response is exact.
inline LocalBound local_bound_bruteforce(const BellGame& game,
                                         std::uint64_t ops_budget = kDefaultLocalBoundOps) {
  const double countA = detail::pow_count(game.num_a(), game.num_x());
  const double countB = detail::pow_count(game.num_b(), game.num_y());
  if (countA <= countB) return detail::local_bound_enumerate_a(game, ops_budget);
  LocalBound swapped = detail::local_bound_enumerate_a(detail::swap_players(game), ops_budget);
  std::swap(swapped.strategy_a, swapped.strategy_b);
  return swapped;
}

constexpr std::size_t kDefaultKrepEntries = 1u << 24;

/// k parallel repetitions: inputs are i.i.d. k-tuples, the weight is the
/// product of per-instance weights. Tuples flatten with instance 0 most
/// significant.
inline BellGame krep(const BellGame& game, int k, std::size_t max_entries = kDefaultKrepEntries) {
  if (k < 1) throw InputError("krep: k must be >= 1");
  const double projected = std::pow(static_cast<double>(game.num_x()) * game.num_y() *
                                        game.num_a() * game.num_b(),
                                    k);
  if (!(projected <= static_cast<double>(max_entries)))
    throw CapacityError("krep: the repeated game needs ~" + std::to_string(projected) +
                        " weight entries, beyond the budget of " + std::to_string(max_entries));
  MixedRadix X(std::vector<int>(static_cast<std::size_t>(k), game.num_x()));
  MixedRadix Y(std::vector<int>(static_cast<std::size_t>(k), game.num_y()));
  MixedRadix A(std::vector<int>(static_cast<std::size_t>(k), game.num_a()));
  MixedRadix B(std::vector<int>(static_cast<std::size_t>(k), game.num_b()));
  const std::size_t entries = X.total() * Y.total() * A.total() * B.total();
  if (entries > max_entries)
    throw CapacityError("krep: " + std::to_string(entries) + " weight entries exceed budget " +
                        std::to_string(max_entries));
  const bool exact = game.has_exact();
  std::vector<double> w(entries), p(X.total() * Y.total());
  std::vector<Frac> we, pe;
  if (exact) {
    we.assign(entries, Frac(0, 1));
    pe.assign(p.size(), Frac(0, 1));
  }
  std::vector<int> xs(static_cast<std::size_t>(k)), ys(static_cast<std::size_t>(k)),
      as(static_cast<std::size_t>(k)), bs(static_cast<std::size_t>(k));
  for (std::size_t xf = 0; xf < X.total(); ++xf) {
    X.decode_into(xf, xs.data());
    for (std::size_t yf = 0; yf < Y.total(); ++yf) {
      Y.decode_into(yf, ys.data());
      double pp = 1.0;
      Frac ppe(1, 1);
      for (int i = 0; i < k; ++i) {
        pp *= game.p(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(i)]);
        if (exact) ppe *= game.p_exact(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(i)]);
      }
      p[xf * Y.total() + yf] = pp;
      if (exact) pe[xf * Y.total() + yf] = ppe;
      for (std::size_t af = 0; af < A.total(); ++af) {
        A.decode_into(af, as.data());
        for (std::size_t bf = 0; bf < B.total(); ++bf) {
          B.decode_into(bf, bs.data());
          double ww = 1.0;
          Frac wwe(1, 1);
          for (int i = 0; i < k; ++i) {
            ww *= game.weight(as[static_cast<std::size_t>(i)], bs[static_cast<std::size_t>(i)],
                              xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(i)]);
            if (exact)
              wwe *= game.weight_exact(as[static_cast<std::size_t>(i)], bs[static_cast<std::size_t>(i)],
                                       xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(i)]);
          }
          const std::size_t idx = ((xf * Y.total() + yf) * A.total() + af) * B.total() + bf;
          w[idx] = ww;
          if (exact) we[idx] = wwe;
        }
      }
    }
  }
  if (exact)
    return BellGame(static_cast<int>(X.total()), static_cast<int>(Y.total()),
                    static_cast<int>(A.total()), static_cast<int>(B.total()), we, pe);
  return BellGame(static_cast<int>(X.total()), static_cast<int>(Y.total()),
                  static_cast<int>(A.total()), static_cast<int>(B.total()), std::move(w),
                  std::move(p));
}

}  // namespace gmnl
