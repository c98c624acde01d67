#pragma once

// Exact rationals for the quantities whose comparisons are topological or
// regime-defining: flux components, the conformal exponent p, potential
// exponents.  Decimal input such as "0.25" is converted exactly.

#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "cuspspec/error.hpp"

namespace cusp {

class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) { assign(num, den); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend auto operator<=>(const Rational& a, const Rational& b) {
    const __int128 l = static_cast<__int128>(a.num_) * b.den_;
    const __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l < r ? std::strong_ordering::less
                 : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) fail(ErrorCode::Numerical, "rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }

  /// Shortest text that parses back to the same value ("3", "-1/4", "5/2").
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts integers, finite decimals ("-0.125") and fractions ("1/3").
  static Rational parse(std::string_view text);

 private:
  static Rational from_wide(__int128 num, __int128 den) {
    if (den == 0) fail(ErrorCode::Numerical, "rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (num > lim || num < -lim || den > lim) fail(ErrorCode::Numerical, "rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  void assign(std::int64_t num, std::int64_t den) { *this = from_wide(num, den); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Replaces the Unicode minus sign (U+2212) by ASCII '-'.
inline std::string normalize_minus(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x88 && static_cast<unsigned char>(s[i + 2]) == 0x92) {
      out.push_back('-');
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

inline std::int64_t parse_int64(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty())
    fail(ErrorCode::Validation, "cannot parse integer '" + std::string(s) + "' for " + std::string(what));
  return v;
}

}  // namespace detail

inline Rational Rational::parse(std::string_view raw) {
  const std::string norm = detail::normalize_minus(detail::trim(raw));
  std::string_view s = norm;
  if (s.empty()) fail(ErrorCode::Validation, "empty number");
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const Rational a = parse(s.substr(0, slash));
    const Rational b = parse(s.substr(slash + 1));
    if (b.is_zero()) fail(ErrorCode::Validation, "zero denominator in '" + norm + "'");
    return a / b;
  }
  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  std::string digits(s.substr(0, dot));
  std::int64_t den = 1;
  if (dot != std::string_view::npos) {
    const std::string_view frac = s.substr(dot + 1);
    if (frac.size() > 17) fail(ErrorCode::Validation, "too many decimals in '" + norm + "'");
    digits += frac;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    fail(ErrorCode::Validation, "not an exact decimal or fraction: '" + norm + "'");
  const std::int64_t num = detail::parse_int64(digits, norm);
  return Rational(negative ? -num : num, den);
}

}  // namespace cusp
