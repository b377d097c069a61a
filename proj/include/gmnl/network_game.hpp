#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmnl/bellgame.hpp"
#include "gmnl/errors.hpp"
#include "gmnl/multiindex.hpp"
#include "gmnl/netgraph.hpp"

namespace gmnl {

/// Network extension of a symmetric bipartite game: one instance of the base
/// game on every edge, the global weight being the product of edge weights.
/// A party's joint input/output is the tuple over its incident edges; slots
/// are ordered by ascending neighbor index, and serialized behaviors must
/// follow this order.
class NetworkGame {
 public:
  struct EdgeSlots {
    int party_i = 0, slot_i = 0;  // endpoint with the smaller party index
    int party_j = 0, slot_j = 0;
  };

  NetworkGame(BellGame base, NetworkGraph graph)
      : base_(std::move(base)), graph_(std::move(graph)) {
    if (!base_.is_symmetric())
      throw UnsupportedError(
          "NetworkGame: the base game must be symmetric under player permutation "
          "(directed extensions are not supported)");
    slots_of_party_.resize(static_cast<std::size_t>(graph_.parties()));
    for (int p = 0; p < graph_.parties(); ++p)
      slots_of_party_[static_cast<std::size_t>(p)] = graph_.neighbors(p);
    for (auto [i, j] : graph_.edges()) {
      EdgeSlots es;
      es.party_i = i;
      es.slot_i = slot_index(i, j);
      es.party_j = j;
      es.slot_j = slot_index(j, i);
      edge_slots_.push_back(es);
    }
  }

  const BellGame& base() const { return base_; }
  const NetworkGraph& graph() const { return graph_; }
  const std::vector<EdgeSlots>& edge_slots() const { return edge_slots_; }

  int slots_of(int party) const { return static_cast<int>(slots_of_party_[static_cast<std::size_t>(party)].size()); }

  /// Position of the edge toward `neighbor` in party's slot list.
  int slot_index(int party, int neighbor) const {
    const auto& nb = slots_of_party_[static_cast<std::size_t>(party)];
    const auto it = std::find(nb.begin(), nb.end(), neighbor);
    return static_cast<int>(it - nb.begin());
  }

  std::vector<int> party_input_sizes() const {
    std::vector<int> out;
    for (int p = 0; p < graph_.parties(); ++p)
      out.push_back(static_cast<int>(MixedRadix(std::vector<int>(
          static_cast<std::size_t>(slots_of(p)), base_.num_x())).total()));
    return out;
  }

  std::vector<int> party_output_sizes() const {
    std::vector<int> out;
    for (int p = 0; p < graph_.parties(); ++p)
      out.push_back(static_cast<int>(MixedRadix(std::vector<int>(
          static_cast<std::size_t>(slots_of(p)), base_.num_a())).total()));
    return out;
  }

 private:
  BellGame base_;
  NetworkGraph graph_;
  std::vector<std::vector<int>> slots_of_party_;
  std::vector<EdgeSlots> edge_slots_;
};

inline NetworkGame network_game(const BellGame& game, const NetworkGraph& graph) {
  return NetworkGame(game, graph);
}

namespace detail {

/// Per-slot digits for every party, from a flattened behavior row.
inline void decode_party_slots(const NetworkGame& ng, const MixedRadix& party_radix,
                               std::size_t flat, int alphabet,
                               std::vector<std::vector<int>>& slot_digits) {
  const int parties = ng.graph().parties();
  std::vector<int> joint(static_cast<std::size_t>(parties));
  party_radix.decode_into(flat, joint.data());
  for (int p = 0; p < parties; ++p) {
    const int width = ng.slots_of(p);
    auto& digits = slot_digits[static_cast<std::size_t>(p)];
    digits.resize(static_cast<std::size_t>(width));
    int v = joint[static_cast<std::size_t>(p)];
    for (int s = width; s-- > 0;) {
      digits[static_cast<std::size_t>(s)] = v % alphabet;
      v /= alphabet;
    }
  }
}

}  // namespace detail

/// Network score: expectation of the product of per-edge winning weights,
/// inputs i.i.d. per edge with the base game's distribution.
inline double network_score(const NetworkGame& ng, const Behavior& behavior) {
  const int parties = ng.graph().parties();
  if (behavior.parties() != parties)
    throw InputError("network_score: behavior party count does not match the graph");
  if (behavior.inputs().sizes() != ng.party_input_sizes() ||
      behavior.outputs().sizes() != ng.party_output_sizes())
    throw InputError("network_score: behavior alphabets do not match the slot structure");
  const MixedRadix in(ng.party_input_sizes());
  const MixedRadix out(ng.party_output_sizes());
  std::vector<std::vector<int>> xs(static_cast<std::size_t>(parties)), as(static_cast<std::size_t>(parties));
  double total = 0.0;
  for (std::size_t xf = 0; xf < in.total(); ++xf) {
    detail::decode_party_slots(ng, in, xf, ng.base().num_x(), xs);
    double pin = 1.0;
    for (const auto& es : ng.edge_slots())
      pin *= ng.base().p(xs[static_cast<std::size_t>(es.party_i)][static_cast<std::size_t>(es.slot_i)],
                         xs[static_cast<std::size_t>(es.party_j)][static_cast<std::size_t>(es.slot_j)]);
    if (pin == 0.0) continue;
    for (std::size_t af = 0; af < out.total(); ++af) {
      const double pr = behavior.prob(xf, af);
      if (pr == 0.0) continue;
      detail::decode_party_slots(ng, out, af, ng.base().num_a(), as);
      double w = 1.0;
      for (const auto& es : ng.edge_slots())
        w *= ng.base().weight(as[static_cast<std::size_t>(es.party_i)][static_cast<std::size_t>(es.slot_i)],
                              as[static_cast<std::size_t>(es.party_j)][static_cast<std::size_t>(es.slot_j)],
                              xs[static_cast<std::size_t>(es.party_i)][static_cast<std::size_t>(es.slot_i)],
                              xs[static_cast<std::size_t>(es.party_j)][static_cast<std::size_t>(es.slot_j)]);
      total += pin * pr * w;
    }
  }
  return total;
}

/// The bipartite game induced by merging each side of the bipartition into a
/// single player. Within-group edges keep both endpoint slots on one side,
/// so the merged player sees both inputs and can win those instances with
/// certainty; only crossing edges remain constrained.
inline BellGame merged_bipartition_game(const NetworkGame& ng, const std::vector<int>& side_s,
                                        std::size_t max_entries = kDefaultKrepEntries) {
  const int parties = ng.graph().parties();
  std::vector<char> in_s(static_cast<std::size_t>(parties), 0);
  for (int v : side_s) {
    if (v < 0 || v >= parties) throw InputError("merged_bipartition_game: vertex out of range");
    in_s[static_cast<std::size_t>(v)] = 1;
  }
  const int size_s = static_cast<int>(std::count(in_s.begin(), in_s.end(), 1));
  if (size_s == 0 || size_s == parties)
    throw InputError("merged_bipartition_game: bipartition must be nonempty and proper");

  // Global slot ids: (party, slot) in party-major, slot-minor order; each
  // side's merged alphabet runs over its own slots in that order.
  struct SlotRef { int party; int slot; };
  std::vector<SlotRef> slots_s, slots_t;
  std::vector<int> side_pos(static_cast<std::size_t>(parties), 0);
  for (int p = 0; p < parties; ++p) {
    auto& bucket = in_s[static_cast<std::size_t>(p)] ? slots_s : slots_t;
    side_pos[static_cast<std::size_t>(p)] = static_cast<int>(bucket.size());
    for (int s = 0; s < ng.slots_of(p); ++s) bucket.push_back({p, s});
  }
  const int nx = ng.base().num_x(), na = ng.base().num_a();
  const MixedRadix XS(std::vector<int>(slots_s.size(), nx)), XT(std::vector<int>(slots_t.size(), nx));
  const MixedRadix AS(std::vector<int>(slots_s.size(), na)), AT(std::vector<int>(slots_t.size(), na));
  const std::size_t entries = XS.total() * XT.total() * AS.total() * AT.total();
  if (entries > max_entries)
    throw CapacityError("merged_bipartition_game: " + std::to_string(entries) +
                        " weight entries exceed budget " + std::to_string(max_entries));

  // For each edge, where do its two endpoint slots live?
  struct EdgeRef { bool i_in_s; int pos_i; bool j_in_s; int pos_j; };
  std::vector<EdgeRef> refs;
  for (const auto& es : ng.edge_slots()) {
    EdgeRef r;
    r.i_in_s = in_s[static_cast<std::size_t>(es.party_i)] != 0;
    r.pos_i = side_pos[static_cast<std::size_t>(es.party_i)] + es.slot_i;
    r.j_in_s = in_s[static_cast<std::size_t>(es.party_j)] != 0;
    r.pos_j = side_pos[static_cast<std::size_t>(es.party_j)] + es.slot_j;
    refs.push_back(r);
  }

  const bool exact = ng.base().has_exact();
  std::vector<double> w(entries), p(XS.total() * XT.total());
  std::vector<Frac> we, pe;
  if (exact) {
    we.assign(entries, Frac(0, 1));
    pe.assign(p.size(), Frac(0, 1));
  }
  std::vector<int> dx_s(slots_s.size()), dx_t(slots_t.size()), da_s(slots_s.size()), da_t(slots_t.size());
  for (std::size_t xs = 0; xs < XS.total(); ++xs) {
    XS.decode_into(xs, dx_s.data());
    for (std::size_t xt = 0; xt < XT.total(); ++xt) {
      XT.decode_into(xt, dx_t.data());
      double pp = 1.0;
      Frac ppe(1, 1);
      for (const auto& r : refs) {
        const int xi = r.i_in_s ? dx_s[static_cast<std::size_t>(r.pos_i)] : dx_t[static_cast<std::size_t>(r.pos_i)];
        const int xj = r.j_in_s ? dx_s[static_cast<std::size_t>(r.pos_j)] : dx_t[static_cast<std::size_t>(r.pos_j)];
        pp *= ng.base().p(xi, xj);
        if (exact) ppe *= ng.base().p_exact(xi, xj);
      }
      p[xs * XT.total() + xt] = pp;
      if (exact) pe[xs * XT.total() + xt] = ppe;
      for (std::size_t av = 0; av < AS.total(); ++av) {
        AS.decode_into(av, da_s.data());
        for (std::size_t bv = 0; bv < AT.total(); ++bv) {
          AT.decode_into(bv, da_t.data());
          double ww = 1.0;
          Frac wwe(1, 1);
          for (const auto& r : refs) {
            const int xi = r.i_in_s ? dx_s[static_cast<std::size_t>(r.pos_i)] : dx_t[static_cast<std::size_t>(r.pos_i)];
            const int xj = r.j_in_s ? dx_s[static_cast<std::size_t>(r.pos_j)] : dx_t[static_cast<std::size_t>(r.pos_j)];
            const int ai = r.i_in_s ? da_s[static_cast<std::size_t>(r.pos_i)] : da_t[static_cast<std::size_t>(r.pos_i)];
            const int aj = r.j_in_s ? da_s[static_cast<std::size_t>(r.pos_j)] : da_t[static_cast<std::size_t>(r.pos_j)];
            ww *= ng.base().weight(ai, aj, xi, xj);
            if (exact) wwe *= ng.base().weight_exact(ai, aj, xi, xj);
          }
          const std::size_t idx = ((xs * XT.total() + xt) * AS.total() + av) * AT.total() + bv;
          w[idx] = ww;
          if (exact) we[idx] = wwe;
        }
      }
    }
  }
  if (exact)
    return BellGame(static_cast<int>(XS.total()), static_cast<int>(XT.total()),
                    static_cast<int>(AS.total()), static_cast<int>(AT.total()), we, pe);
  return BellGame(static_cast<int>(XS.total()), static_cast<int>(XT.total()),
                  static_cast<int>(AS.total()), static_cast<int>(AT.total()), std::move(w),
                  std::move(p));
}

struct BiseparableBound {
  double value = 0.0;
  std::optional<Frac> exact;
  std::vector<int> witness;  // the maximizing bipartition's side containing party 0
};

/// Maximum score over biproduct deterministic behaviors: every bipartition
/// of the parties, each group merged into one player with free within-group
/// signaling, maximized over deterministic merged strategies (deterministic
/// vertices suffice by convexity). Ties report the lexicographically first
/// subset containing party 0.
inline BiseparableBound biseparable_bound_bruteforce(const NetworkGame& ng,
                                                     std::uint64_t ops_budget = kDefaultLocalBoundOps) {
  const int parties = ng.graph().parties();
  if (parties > 5)
    throw CapacityError("biseparable_bound_bruteforce: capped at N <= 5 parties");
  BiseparableBound best;
  best.value = -1.0;
  std::vector<std::vector<int>> candidates;
  const std::uint32_t limit = 1u << (parties - 1);
  for (std::uint32_t mask = 0; mask + 1 < limit; ++mask) {
    std::vector<int> subset{0};
    for (int v = 1; v < parties; ++v)
      if (mask & (1u << (v - 1))) subset.push_back(v);
    candidates.push_back(std::move(subset));
  }
  std::sort(candidates.begin(), candidates.end());  // lexicographic witness order
  for (const auto& subset : candidates) {
    const BellGame merged = merged_bipartition_game(ng, subset);
    const LocalBound lb = local_bound_bruteforce(merged, ops_budget);
    const bool better = best.exact && lb.exact ? (*lb.exact > *best.exact) : (lb.value > best.value);
    if (best.value < 0.0 || better) {
      best.value = lb.value;
      best.exact = lb.exact;
      best.witness = subset;
    }
  }
  return best;
}

struct ScoreCertificate {
  bool certified = false;
  double score = 0.0;
  double threshold = 0.0;  // local bound of the c-repetition of the base game
  double margin = 0.0;     // score - threshold
  int min_cut_capacity = 0;
};

/// Sufficient criterion for genuine multipartite nonlocality of a behavior:
/// the network score must strictly exceed the local bound of the
/// c-repetition of the base game, c being the global min-cut capacity.
/// A closed-form repetition bound may be supplied (the orbit game has one);
/// otherwise the bound is brute-forced.
inline ScoreCertificate certify_network_score(const NetworkGame& ng, const Behavior& behavior,
                                              std::optional<double> supplied_bound = std::nullopt) {
  ScoreCertificate v;
  v.score = network_score(ng, behavior);
  v.min_cut_capacity = min_cut(ng.graph()).capacity;
  if (supplied_bound) {
    v.threshold = *supplied_bound;
  } else {
    const BellGame rep = krep(ng.base(), v.min_cut_capacity);
    v.threshold = local_bound_bruteforce(rep).value;
  }
  v.margin = v.score - v.threshold;
  v.certified = v.score > v.threshold;
  return v;
}

}  // namespace gmnl
