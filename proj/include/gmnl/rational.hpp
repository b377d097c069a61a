#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "gmnl/errors.hpp"

namespace gmnl {

/// Exact rational with 64-bit numerator/denominator, gcd-normalized,
/// denominator > 0. Used for input distributions and 0/1-weight games so that
/// brute-forced bounds like 3/4 and 5/8 come out exact, not rounded.
/// Intermediates go through 128-bit arithmetic; overflow of the reduced
/// result throws (the desk-scale games here never get close).
class Frac {
 public:
  constexpr Frac() : num_(0), den_(1) {}
  Frac(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InputError("Frac: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g ? num / g : num;
    den_ = g ? den / g : den;
  }
  static Frac from_int(std::int64_t v) { return Frac(v, 1); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Frac operator+(const Frac& a, const Frac& b) {
    return reduce128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Frac operator-(const Frac& a, const Frac& b) {
    return reduce128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Frac operator*(const Frac& a, const Frac& b) {
    return reduce128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  Frac& operator+=(const Frac& o) { return *this = *this + o; }
  Frac& operator*=(const Frac& o) { return *this = *this * o; }

  friend bool operator==(const Frac& a, const Frac& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Frac& a, const Frac& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Frac& a, const Frac& b) { return b < a; }
  friend bool operator<=(const Frac& a, const Frac& b) { return !(b < a); }
  friend bool operator>=(const Frac& a, const Frac& b) { return !(a < b); }

  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

 private:
  using i128 = __int128;

  static Frac reduce128(i128 num, i128 den) {
    if (den < 0) { num = -num; den = -den; }
    i128 a = num < 0 ? -num : num, b = den;
    while (b) { const i128 t = a % b; a = b; b = t; }
    if (a) { num /= a; den /= a; }
    constexpr i128 lo = INT64_MIN, hi = INT64_MAX;
    if (num < lo || num > hi || den > hi)
      throw InputError("Frac: overflow in exact arithmetic");
    Frac f;
    f.num_ = static_cast<std::int64_t>(num);
    f.den_ = static_cast<std::int64_t>(den);
    return f;
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace gmnl
