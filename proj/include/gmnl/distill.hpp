#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gmnl/errors.hpp"
#include "gmnl/rng.hpp"

namespace gmnl {

/// Probability that k uniform draws over M links hit every link at least
/// once (inclusion-exclusion):
///   P = sum_{j=0}^{M} (-1)^j C(M,j) (1 - j/M)^k.
inline double coupon_collector_prob(int links, std::uint64_t draws) {
  if (links < 1) throw InputError("coupon_collector_prob: at least one link required");
  if (draws < static_cast<std::uint64_t>(links)) return 0.0;  // pigeonhole
  double total = 0.0;
  double binom = 1.0;  // C(M, j), updated multiplicatively
  for (int j = 0; j <= links; ++j) {
    const double frac = 1.0 - static_cast<double>(j) / static_cast<double>(links);
    const double term = binom * std::pow(frac, static_cast<double>(draws));
    total += (j % 2 == 0) ? term : -term;
    binom = binom * static_cast<double>(links - j) / static_cast<double>(j + 1);
  }
  return std::clamp(total, 0.0, 1.0);
}

/// Smallest number of draws for which every link is covered with
/// probability at least p.
inline std::uint64_t copies_for_success(int links, double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw InputError("copies_for_success: p must lie in (0, 1)");
  if (links < 1) throw InputError("copies_for_success: at least one link required");
  std::uint64_t k = static_cast<std::uint64_t>(links);
  while (coupon_collector_prob(links, k) < p) ++k;
  return k;
}

/// Draw `draws` uniform link indices; returns the covered links, sorted.
inline std::vector<int> simulate_flag_protocol(int links, std::uint64_t draws, RngStream stream) {
  if (links < 1) throw InputError("simulate_flag_protocol: at least one link required");
  std::vector<char> hit(static_cast<std::size_t>(links), 0);
  for (std::uint64_t i = 0; i < draws; ++i)
    hit[static_cast<std::size_t>(stream.next_below(static_cast<std::uint64_t>(links)))] = 1;
  std::vector<int> covered;
  for (int i = 0; i < links; ++i)
    if (hit[static_cast<std::size_t>(i)]) covered.push_back(i);
  return covered;
}

}  // namespace gmnl
