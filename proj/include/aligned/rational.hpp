#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace aligned {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

// Serializes as "p/q", with "/q" omitted when the denominator is 1.
std::string rat_to_string(const Rat& r);

// Accepts "p", "p/q" and decimal literals like "-1.25".
Rat rat_from_string(std::string_view s);

inline int sign_of(const Rat& r) { return r.sign(); }

}  // namespace aligned
