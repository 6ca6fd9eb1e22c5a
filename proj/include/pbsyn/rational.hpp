#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace pbsyn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

inline int sign_of(const Rational& r) { return r.sign(); }

/// "p/q" for non-integers, plain "p" otherwise.
std::string to_fraction_string(const Rational& r);

/// Fixed-point decimal approximation (round half away from zero), exact integer
/// arithmetic throughout so the rendering is deterministic.
std::string to_decimal_string(const Rational& r, unsigned digits = 6);

/// Accepts "p/q", plain integers and exact decimals ("0.25" -> 1/4).
/// Throws std::invalid_argument on anything else.
Rational parse_rational(const std::string& text);

}  // namespace pbsyn
