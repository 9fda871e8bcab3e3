#include "mtype/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace mtype {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Q parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  Q out;
  auto slash = s.find('/');
  auto dot = s.find('.');
  if (slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    mpz_class d(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    out = Q(mpz_class(std::string(num), 10), d);
  } else if (dot != std::string_view::npos) {
    auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty()))
      throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    mpz_class whole(ip.empty() ? std::string("0") : std::string(ip), 10);
    mpz_class frac(fp.empty() ? std::string("0") : std::string(fp), 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    out = Q(whole * scale + frac, scale);
  } else {
    if (!all_digits(s)) throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    out = Q(mpz_class(std::string(s), 10));
  }
  out.canonicalize();
  return neg ? Q(-out) : out;
}

std::string to_string(const Q& in) {
  Q q = in;
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_str();
}

double to_double(const Q& q) { return q.get_d(); }

Q pow2(int e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Q(mpz_class(1), p) : Q(p);
}

Q qpow(const Q& base, int e) {
  Q r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

Q qabs(const Q& q) { return q < 0 ? Q(-q) : q; }

}  // namespace mtype
