#include "aligned/rational.hpp"

#include <cctype>

namespace aligned {

std::string rat_to_string(const Rat& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Rat rat_from_string(std::string_view s) {
  auto bad = [&] { throw ParseError("invalid rational: '" + std::string(s) + "'"); };
  if (s.empty()) bad();
  std::string str(s);
  auto slash = str.find('/');
  try {
    if (slash != std::string::npos) {
      Int num(str.substr(0, slash));
      Int den(str.substr(slash + 1));
      if (den == 0) bad();
      return Rat(num, den);
    }
    auto dot = str.find('.');
    if (dot != std::string::npos) {
      std::string digits = str.substr(0, dot) + str.substr(dot + 1);
      size_t frac_len = str.size() - dot - 1;
      if (digits.empty() || digits == "-" || digits == "+") bad();
      Int num(digits);
      Int den = 1;
      for (size_t i = 0; i < frac_len; ++i) den *= 10;
      return Rat(num, den);
    }
    return Rat(Int(str));
  } catch (const std::runtime_error&) {
    bad();
  }
  return Rat();  // unreachable
}

}  // namespace aligned
