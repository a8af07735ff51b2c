#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace laakso_lab {

using Rational = boost::rational<std::int64_t>;

// "p/q", or "p" when q = 1. Throws ParseError on malformed input or q = 0.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);
inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

}  // namespace laakso_lab
