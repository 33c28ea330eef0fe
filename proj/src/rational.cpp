#include "dflab/rational.hpp"

#include <cctype>

#include "dflab/error.hpp"

namespace dflab {

std::string to_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  auto valid_int = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? "1" : text.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den))
    throw ConfigError("malformed rational '" + std::string(text) + "'");
  using boost::multiprecision::cpp_int;
  std::string ns(num);
  if (!ns.empty() && ns.front() == '+') ns.erase(0, 1);
  std::string ds(den);
  if (!ds.empty() && ds.front() == '+') ds.erase(0, 1);
  const cpp_int d(ds);
  if (d == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
  return Rational(cpp_int(ns), d);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

std::vector<std::string> to_strings(const std::vector<Rational>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(to_string(r));
  return out;
}

}  // namespace dflab
