#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace dflab {

using Rational = boost::multiprecision::cpp_rational;

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& r);

/// Accepts "p", "p/q" and "-p/q" with optional surrounding whitespace.
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

Rational abs(const Rational& r);

std::vector<std::string> to_strings(const std::vector<Rational>& v);

}  // namespace dflab
