#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace m2x {

// Exact rational arithmetic everywhere except the annealer's proposal loop
// and the Landau-Zener formula. GMP keeps numerators/denominators arbitrary
// precision, which the certification identities rely on.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Accepts "p", "-p" or "p/q" with decimal digits.
inline Rational rat_parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  bool seen_digit = false, seen_slash = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      seen_digit = true;
    } else if (c == '/' && !seen_slash && seen_digit) {
      seen_slash = true;
      seen_digit = false;
    } else {
      throw std::invalid_argument("malformed rational: " + text);
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed rational: " + text);
  Rational q;
  if (q.set_str(text, 10) != 0 || q.get_den() == 0)
    throw std::invalid_argument("malformed rational: " + text);
  q.canonicalize();
  return q;
}

// "p" when integral, "p/q" otherwise (canonical, positive denominator).
inline std::string rat_str(const Rational& q) { return q.get_str(); }

inline double rat_double(const Rational& q) { return q.get_d(); }

inline bool fits_int64(const mpz_class& z) {
  return z.fits_slong_p() || (sizeof(long) >= 8 && z >= -9223372036854775807L &&
                              z <= 9223372036854775807L);
}

}  // namespace m2x
