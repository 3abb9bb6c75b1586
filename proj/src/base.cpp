#include "kforge/base.hpp"

#include <cstdio>

namespace kforge {

Natural bit_length(const Natural& v) {
  if (v == 0) return 0;
  return Natural(boost::multiprecision::msb(v)) + 1;
}

Natural cantor_pair(const Natural& x, const Natural& y) {
  Natural s = x + y;
  return s * (s + 1) / 2 + y;
}

std::pair<Natural, Natural> cantor_unpair(const Natural& z) {
  // Largest s with s(s+1)/2 <= z, via integer sqrt of 8z+1.
  Natural s = (boost::multiprecision::sqrt(Natural(8) * z + 1) - 1) / 2;
  Natural base = s * (s + 1) / 2;
  if (base > z) {  // guard against sqrt rounding at the boundary
    s -= 1;
    base = s * (s + 1) / 2;
  }
  Natural y = z - base;
  Natural x = s - y;
  return {x, y};
}

std::string rational_str(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational parse_rational(const std::string& text) {
  auto bad = [&]() -> Rational {
    throw Error("bad rational '" + text + "'");
  };
  std::string s = text;
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = (s[0] == '-');
    s.erase(0, 1);
  }
  if (s.empty()) return bad();
  auto digits = [](const std::string& d) {
    return !d.empty() && d.find_first_not_of("0123456789") == std::string::npos;
  };
  Rational r;
  auto slash = s.find('/');
  auto dot = s.find('.');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!digits(num) || !digits(den)) return bad();
    Natural d(den);
    if (d == 0) return bad();
    r = Rational(Natural(num), d);
  } else if (dot != std::string::npos) {
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!digits(whole) || !digits(frac)) return bad();
    Natural den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    r = Rational(Natural(whole) * den + Natural(frac), den);
  } else {
    if (!digits(s)) return bad();
    r = Rational(Natural(s));
  }
  return neg ? -r : r;
}

std::string decimal6(const Rational& r) {
  // Round-half-up on the exact rational, then print; avoids double rounding.
  bool neg = r < 0;
  Rational a = neg ? Rational(-r) : r;
  Natural scaled = numerator(a) * 1000000 * 2 / denominator(a);
  Natural rounded = (scaled + 1) / 2;
  Natural whole = rounded / 1000000;
  Natural frac = rounded % 1000000;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06llu", frac.convert_to<unsigned long long>());
  return (neg ? "-" : "") + whole.str() + "." + buf;
}

}  // namespace kforge
