#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace kforge {

// Values of random variables are natural numbers with no upper bound.
// Naturals are kept non-negative by construction: the signature has no
// subtraction, so every operation is closed over the naturals.
using Natural = boost::multiprecision::cpp_int;

// Measures and tolerances are exact rationals; floating point appears
// only in rendered reports.
using Rational = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse failures carry a 1-based line/column position.
struct ParseError : Error {
  ParseError(std::size_t line, std::size_t col, const std::string& what)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
  std::size_t line;
  std::size_t col;
};

// Bit-length of a natural number, with len(0) = 0.
Natural bit_length(const Natural& v);

// Cantor pairing (x+y)(x+y+1)/2 + y, a bijection N^2 -> N.
Natural cantor_pair(const Natural& x, const Natural& y);

// Inverse of cantor_pair.
std::pair<Natural, Natural> cantor_unpair(const Natural& z);

// "num/den" in lowest terms, denominator always shown ("1/1").
std::string rational_str(const Rational& r);

// Fixed six-place decimal rendering, e.g. "0.500000".
std::string decimal6(const Rational& r);

// Accepts "3", "1/4", and decimal forms like "0.25".
Rational parse_rational(const std::string& text);

}  // namespace kforge
