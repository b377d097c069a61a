#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "gmnl/errors.hpp"

namespace gmnl {

/// Fixed-length binary word over {0,1}^n, n in [1, 64], with XOR group
/// structure. Serialized form is ASCII 0/1, most significant (leftmost)
/// character first; character position p maps to stored bit (n-1-p), so
/// lexicographic order on the ASCII form equals numeric order on value().
class BitString {
 public:
  BitString(std::uint64_t value, int length) : value_(value), length_(length) {
    if (length < 1 || length > 64)
      throw InputError("BitString: length must be in [1, 64], got " + std::to_string(length));
    if (length < 64 && (value >> length) != 0)
      throw InputError("BitString: value has bits beyond declared length");
  }

  static BitString zeros(int length) { return BitString(0, length); }

  static BitString parse(const std::string& ascii) {
    if (ascii.empty() || ascii.size() > 64)
      throw InputError("BitString: ASCII form must have 1..64 characters");
    std::uint64_t v = 0;
    for (char c : ascii) {
      if (c != '0' && c != '1')
        throw InputError("BitString: invalid character '" + std::string(1, c) + "'");
      v = (v << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return BitString(v, static_cast<int>(ascii.size()));
  }

  int length() const { return length_; }
  std::uint64_t value() const { return value_; }

  /// Bit at ASCII position p (0 = leftmost / most significant).
  bool bit(int pos) const {
    if (pos < 0 || pos >= length_) throw InputError("BitString: bit position out of range");
    return (value_ >> (length_ - 1 - pos)) & 1u;
  }

  int hamming_weight() const { return std::popcount(value_); }

  friend BitString operator^(const BitString& a, const BitString& b) {
    if (a.length_ != b.length_)
      throw InputError("BitString: XOR of words with lengths " + std::to_string(a.length_) +
                       " and " + std::to_string(b.length_));
    return BitString(a.value_ ^ b.value_, a.length_);
  }

  friend bool operator==(const BitString& a, const BitString& b) {
    return a.length_ == b.length_ && a.value_ == b.value_;
  }
  friend bool operator!=(const BitString& a, const BitString& b) { return !(a == b); }
  /// Lexicographic on the ASCII form (requires equal lengths).
  friend bool operator<(const BitString& a, const BitString& b) {
    if (a.length_ != b.length_) throw InputError("BitString: comparing words of unequal length");
    return a.value_ < b.value_;
  }

  std::string str() const {
    std::string s(static_cast<std::size_t>(length_), '0');
    for (int p = 0; p < length_; ++p)
      if (bit(p)) s[static_cast<std::size_t>(p)] = '1';
    return s;
  }

  friend std::ostream& operator<<(std::ostream& os, const BitString& b) { return os << b.str(); }

 private:
  std::uint64_t value_;
  int length_;
};

inline BitString xor_words(const BitString& a, const BitString& b) { return a ^ b; }
inline int hamming_weight(const BitString& s) { return s.hamming_weight(); }

/// The order-n subgroup of ({0,1}^n, XOR) for n = 2^k whose codeword indexed
/// by a has, at ASCII position j, the inner product a.j mod 2 (j read as a
/// k-bit index). Every nonzero codeword has weight exactly n/2.
class HadamardCode {
 public:
  static constexpr int kMaxK = 6;  // n <= 64 bounds downstream enumerations

  explicit HadamardCode(int k) : k_(k), n_(1 << k) {
    if (k < 1 || k > kMaxK)
      throw CapacityError("HadamardCode: k must be in [1, " + std::to_string(kMaxK) +
                          "], got " + std::to_string(k));
    codewords_.reserve(static_cast<std::size_t>(n_));
    for (int a = 0; a < n_; ++a) {
      std::uint64_t v = 0;
      for (int j = 0; j < n_; ++j)
        if (std::popcount(static_cast<unsigned>(a & j)) & 1)
          v |= 1ULL << (n_ - 1 - j);
      codewords_.push_back(v);
    }
  }

  int k() const { return k_; }
  int n() const { return n_; }
  int size() const { return n_; }
  /// Codeword values in index order a = 0..n-1 (a = 0 is the all-zero word).
  const std::vector<std::uint64_t>& codeword_values() const { return codewords_; }
  BitString codeword(int a) const { return BitString(codewords_[static_cast<std::size_t>(a)], n_); }

  bool contains(std::uint64_t value) const {
    return std::find(codewords_.begin(), codewords_.end(), value) != codewords_.end();
  }

  /// Canonical representative of the orbit containing `value`: the
  /// lexicographically smallest element.
  std::uint64_t representative(std::uint64_t value) const {
    std::uint64_t rep = value ^ codewords_[0];
    for (std::size_t i = 1; i < codewords_.size(); ++i)
      rep = std::min(rep, value ^ codewords_[i]);
    return rep;
  }

 private:
  int k_;
  int n_;
  std::vector<std::uint64_t> codewords_;
};

inline HadamardCode hadamard_code(int k) { return HadamardCode(k); }

/// One orbit {x + h : h in H_n} of the code's XOR action. Orbits have exactly
/// n elements, and two orbits are equal or disjoint. The element list is
/// materialized at construction for n <= 16 and computed per query for larger
/// n, keeping full-cube sweeps at n = 32, 64 memory bounded.
class Orbit {
 public:
  Orbit(const BitString& x, const HadamardCode& code)
      : code_(&code), rep_(code.representative(check_length(x, code).value())) {
    if (code.n() <= 16) eager_ = enumerate();
  }

  const HadamardCode& code() const { return *code_; }
  BitString representative() const { return BitString(rep_, code_->n()); }

  /// Elements in codeword-index order from the representative:
  /// element i = representative XOR codeword(i).
  std::vector<BitString> elements() const {
    if (!eager_.empty()) return to_bitstrings(eager_);
    return to_bitstrings(enumerate());
  }

  bool contains(const BitString& w) const {
    return w.length() == code_->n() && code_->representative(w.value()) == rep_;
  }

  int size() const { return code_->n(); }

  friend bool operator==(const Orbit& a, const Orbit& b) {
    return a.code_->n() == b.code_->n() && a.rep_ == b.rep_;
  }

 private:
  static const BitString& check_length(const BitString& x, const HadamardCode& code) {
    if (x.length() != code.n())
      throw InputError("Orbit: word length " + std::to_string(x.length()) +
                       " does not match code length " + std::to_string(code.n()));
    return x;
  }

  std::vector<std::uint64_t> enumerate() const {
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(code_->n()));
    for (std::uint64_t h : code_->codeword_values()) out.push_back(rep_ ^ h);
    return out;
  }

  std::vector<BitString> to_bitstrings(const std::vector<std::uint64_t>& vals) const {
    std::vector<BitString> out;
    out.reserve(vals.size());
    for (std::uint64_t v : vals) out.emplace_back(v, code_->n());
    return out;
  }

  const HadamardCode* code_;
  std::uint64_t rep_;
  std::vector<std::uint64_t> eager_;
};

inline Orbit orbit_of(const BitString& x, const HadamardCode& code) { return Orbit(x, code); }

/// Value-level max-weight selection; ties resolved to the lexicographically
/// smallest word. Both players applying this same deterministic rule is what
/// makes the joined-maximum strategy symmetric.
inline std::uint64_t max_weight_value(std::uint64_t rep, const HadamardCode& code) {
  std::uint64_t best = rep ^ code.codeword_values()[0];
  int best_w = std::popcount(best);
  for (std::size_t i = 1; i < code.codeword_values().size(); ++i) {
    const std::uint64_t cand = rep ^ code.codeword_values()[i];
    const int w = std::popcount(cand);
    if (w > best_w || (w == best_w && cand < best)) {
      best = cand;
      best_w = w;
    }
  }
  return best;
}

inline BitString max_weight_element(const Orbit& o) {
  return BitString(max_weight_value(o.representative().value(), o.code()), o.code().n());
}

/// Componentwise orbits of an L-tuple; the joint orbit under the L-fold
/// product action is the direct product, of size n^L.
inline std::vector<Orbit> cartesian_orbit(const std::vector<BitString>& xs,
                                          const HadamardCode& code) {
  std::vector<Orbit> out;
  out.reserve(xs.size());
  for (const BitString& x : xs) out.emplace_back(x, code);
  return out;
}

}  // namespace gmnl
