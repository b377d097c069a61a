#pragma once

#include <cstdint>
#include <vector>

#include "gmnl/errors.hpp"

namespace gmnl {

/// Mixed-radix flattening: digit 0 is the most significant. Used for joint
/// alphabets (tuples of inputs/outputs) and composite Hilbert-space indices.
class MixedRadix {
 public:
  explicit MixedRadix(std::vector<int> sizes) : sizes_(std::move(sizes)), total_(1) {
    for (int s : sizes_) {
      if (s < 1) throw InputError("MixedRadix: sizes must be positive");
      if (total_ > (std::size_t(1) << 62) / static_cast<std::size_t>(s))
        throw InputError("MixedRadix: joint alphabet overflows the index type");
      total_ *= static_cast<std::size_t>(s);
    }
  }

  std::size_t total() const { return total_; }
  int digits() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }

  std::size_t encode(const std::vector<int>& digit_values) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < sizes_.size(); ++i)
      flat = flat * static_cast<std::size_t>(sizes_[i]) + static_cast<std::size_t>(digit_values[i]);
    return flat;
  }

  std::vector<int> decode(std::size_t flat) const {
    std::vector<int> out(sizes_.size());
    for (std::size_t i = sizes_.size(); i-- > 0;) {
      out[i] = static_cast<int>(flat % static_cast<std::size_t>(sizes_[i]));
      flat /= static_cast<std::size_t>(sizes_[i]);
    }
    return out;
  }

  /// Decode into a caller-provided buffer (hot loops).
  void decode_into(std::size_t flat, int* out) const {
    for (std::size_t i = sizes_.size(); i-- > 0;) {
      out[i] = static_cast<int>(flat % static_cast<std::size_t>(sizes_[i]));
      flat /= static_cast<std::size_t>(sizes_[i]);
    }
  }

 private:
  std::vector<int> sizes_;
  std::size_t total_;
};

}  // namespace gmnl
