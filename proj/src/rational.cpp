#include "laakso_lab/rational.hpp"

#include <charconv>

#include "laakso_lab/error.hpp"

namespace laakso_lab {

namespace {

std::int64_t parse_int(std::string_view s, const std::string& whole) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("not a rational: '" + whole + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  const std::string_view view(text);
  if (slash == std::string::npos) return Rational(parse_int(view, text));
  const std::int64_t den = parse_int(view.substr(slash + 1), text);
  if (den == 0) throw ParseError("zero denominator in '" + text + "'");
  return Rational(parse_int(view.substr(0, slash), text), den);
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace laakso_lab
