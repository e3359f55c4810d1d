#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace umw {

/// Exact arbitrary-precision rational used for every measure, distance and
/// change-of-variable value.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Renders `p/q`, or just `p` when the denominator is 1.
inline std::string format_rational(const Rational& r) {
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline BigInt parse_bigint(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  BigInt v{std::string(s)};
  return neg ? BigInt(-v) : v;
}

inline BigInt pow10(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 0; i < n; ++i) r *= 10;
  return r;
}

}  // namespace detail

/// Accepts `p/q`, a plain integer, or a finite decimal such as `-1.25`.
inline Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = detail::parse_bigint(text.substr(0, slash));
    std::string_view den_text = text.substr(slash + 1);
    if (!den_text.empty() && den_text.front() == '+') den_text.remove_prefix(1);
    if (!detail::all_digits(den_text))
      throw std::invalid_argument("bad denominator in '" + std::string(text) + "'");
    BigInt den(std::string{den_text});
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool neg = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !detail::all_digits(whole)) ||
        (!frac.empty() && !detail::all_digits(frac)))
      throw std::invalid_argument("bad decimal '" + std::string(text) + "'");
    BigInt digits(std::string(whole.empty() ? "0" : whole) + std::string(frac));
    Rational r(digits, detail::pow10(static_cast<unsigned>(frac.size())));
    return neg ? Rational(-r) : r;
  }

  return Rational(detail::parse_bigint(text));
}

/// Decimal rendering rounded half away from zero to `digits` fractional digits.
inline std::string format_decimal(const Rational& r, unsigned digits) {
  const bool neg = r < 0;
  Rational a = neg ? Rational(-r) : r;
  const BigInt scale = detail::pow10(digits);
  Rational scaled = a * scale;
  BigInt num = boost::multiprecision::numerator(scaled);
  BigInt den = boost::multiprecision::denominator(scaled);
  BigInt q = num / den;
  BigInt rem = num - q * den;
  if (2 * rem >= den) q += 1;

  std::string s = q.str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
  }
  if (neg && q != 0) s.insert(0, "-");
  return s;
}

}  // namespace umw
