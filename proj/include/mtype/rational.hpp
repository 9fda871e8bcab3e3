#pragma once
#include <gmpxx.h>

#include <string>
#include <string_view>

namespace mtype {

using Q = mpq_class;

// Parses "a", "a/b", "-a/b" or a plain decimal like "0.25" into a canonical rational.
Q parse_rational(std::string_view text);
std::string to_string(const Q& q);
double to_double(const Q& q);

Q pow2(int e);                 // 2^e for any sign of e
Q qpow(const Q& base, int e);  // e >= 0
Q qabs(const Q& q);

}  // namespace mtype
