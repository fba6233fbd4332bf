#include "dyzeta/dyadic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "dyzeta/errors.hpp"

namespace dyzeta {

namespace {

// Exponents live well inside int64 so that sums of two never overflow
// before the range check runs.
constexpr std::int64_t kExponentLimit = std::int64_t{1} << 60;
// Largest alignment shift we are willing to materialize.
constexpr std::int64_t kShiftLimit = std::int64_t{1} << 34;

thread_local std::uint64_t g_mul_count = 0;

std::int64_t checked_exponent(std::int64_t e) {
  if (e > kExponentLimit || e < -kExponentLimit) {
    throw ResourceError("dyadic exponent out of range");
  }
  return e;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw ResourceError("dyadic exponent overflow");
  }
  return checked_exponent(r);
}

mpz_class shifted(const mpz_class& m, std::int64_t shift) {
  if (shift > kShiftLimit) {
    throw ResourceError("dyadic alignment shift too large");
  }
  mpz_class r;
  mpz_mul_2exp(r.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
  return r;
}

std::size_t trailing_zeros(const mpz_class& m) { return mpz_scan1(m.get_mpz_t(), 0); }

mpz_class pow10(std::size_t k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
  return r;
}

} // namespace

Dyadic::Dyadic(long value) : mantissa_(value) { normalize(); }

Dyadic::Dyadic(mpz_class mantissa, std::int64_t exponent)
    : mantissa_(std::move(mantissa)), exponent_(checked_exponent(exponent)) {
  normalize();
}

Dyadic Dyadic::pow2(std::int64_t exponent) { return Dyadic(mpz_class(1), exponent); }

void Dyadic::normalize() {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  auto tz = trailing_zeros(mantissa_);
  if (tz > 0) {
    mpz_tdiv_q_2exp(mantissa_.get_mpz_t(), mantissa_.get_mpz_t(), tz);
    exponent_ = checked_add(exponent_, static_cast<std::int64_t>(tz));
  }
}

std::size_t Dyadic::bits() const {
  if (mantissa_ == 0) return 0;
  return mpz_sizeinbase(mantissa_.get_mpz_t(), 2);
}

std::int64_t Dyadic::floor_log2() const {
  return exponent_ + static_cast<std::int64_t>(bits()) - 1;
}

std::int64_t Dyadic::ceil_log2() const {
  // Canonical mantissa is odd: a power of two iff |mantissa| == 1.
  if (mantissa_ == 1 || mantissa_ == -1) return exponent_;
  return exponent_ + static_cast<std::int64_t>(bits());
}

std::optional<long> Dyadic::to_long() const {
  if (exponent_ < 0) return std::nullopt;
  if (static_cast<std::int64_t>(bits()) + exponent_ > 62) return std::nullopt;
  mpz_class v = shifted(mantissa_, exponent_);
  return v.get_si();
}

double Dyadic::to_double() const {
  if (mantissa_ == 0) return 0.0;
  long e = 0;
  double d = mpz_get_d_2exp(&e, mantissa_.get_mpz_t());
  std::int64_t total = exponent_ + e;
  if (total > 2000) return d > 0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
  if (total < -2000) return 0.0;
  return std::ldexp(d, static_cast<int>(total));
}

Dyadic Dyadic::abs() const {
  Dyadic r = *this;
  mpz_abs(r.mantissa_.get_mpz_t(), r.mantissa_.get_mpz_t());
  return r;
}

Dyadic Dyadic::operator-() const {
  Dyadic r = *this;
  r.mantissa_ = -r.mantissa_;
  return r;
}

Dyadic dy_add(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.exponent() <= b.exponent()) {
    mpz_class m = shifted(b.mantissa(), b.exponent() - a.exponent());
    m += a.mantissa();
    return Dyadic(std::move(m), a.exponent());
  }
  mpz_class m = shifted(a.mantissa(), a.exponent() - b.exponent());
  m += b.mantissa();
  return Dyadic(std::move(m), b.exponent());
}

Dyadic dy_sub(const Dyadic& a, const Dyadic& b) { return dy_add(a, -b); }

Dyadic dy_mul(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero() || b.is_zero()) return Dyadic();
  ++g_mul_count;
  mpz_class m = a.mantissa() * b.mantissa();
  return Dyadic(std::move(m), checked_add(a.exponent(), b.exponent()));
}

Dyadic dy_shift(const Dyadic& a, std::int64_t e) {
  if (a.is_zero()) return a;
  return Dyadic(a.mantissa(), checked_add(a.exponent(), e));
}

Dyadic dy_round(const Dyadic& a, std::int64_t n) {
  if (a.is_zero() || a.exponent() >= -n) return a;
  std::int64_t drop = -n - a.exponent();
  if (static_cast<std::int64_t>(a.bits()) <= drop) return Dyadic();
  mpz_class m;
  mpz_tdiv_q_2exp(m.get_mpz_t(), a.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(drop));
  return Dyadic(std::move(m), -n);
}

Dyadic dy_round_up_bits(const Dyadic& a, std::size_t bits) {
  if (a.bits() <= bits) return a;
  std::int64_t drop = static_cast<std::int64_t>(a.bits() - bits);
  mpz_class m = abs(a.mantissa());
  mpz_cdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(drop));
  if (a.sign() < 0) m = -m;
  return Dyadic(std::move(m), checked_add(a.exponent(), drop));
}

Dyadic dy_div(const Dyadic& a, const Dyadic& b, std::int64_t n) {
  if (b.is_zero()) throw DomainError("division by zero");
  if (a.is_zero()) return Dyadic();
  // a/b * 2^n = (ma/mb) * 2^(ea - eb + n)
  std::int64_t shift = checked_add(checked_add(a.exponent(), -b.exponent()), n);
  mpz_class q;
  if (shift >= 0) {
    mpz_class num = shifted(a.mantissa(), shift);
    mpz_tdiv_q(q.get_mpz_t(), num.get_mpz_t(), b.mantissa().get_mpz_t());
  } else {
    mpz_class den = shifted(b.mantissa(), -shift);
    mpz_tdiv_q(q.get_mpz_t(), a.mantissa().get_mpz_t(), den.get_mpz_t());
  }
  ++g_mul_count;
  return Dyadic(std::move(q), -n);
}

std::strong_ordering dy_cmp(const Dyadic& a, const Dyadic& b) {
  if (a.sign() != b.sign()) return a.sign() <=> b.sign();
  if (a.is_zero()) return std::strong_ordering::equal;
  // Same nonzero sign: compare magnitudes by position of the leading bit first.
  auto la = a.floor_log2();
  auto lb = b.floor_log2();
  if (la != lb) {
    auto mag = la <=> lb;
    return a.sign() > 0 ? mag : 0 <=> mag;
  }
  int c = sgn(dy_sub(a, b).mantissa());
  return c <=> 0;
}

namespace {

struct DecimalParts {
  bool negative = false;
  mpz_class digits;       // all significant digits as an integer
  std::int64_t exp10 = 0; // value = digits * 10^exp10
};

DecimalParts parse_decimal(std::string_view text) {
  DecimalParts out;
  std::size_t i = 0;
  auto fail = [&]() -> DecimalParts {
    throw ParseError("malformed decimal numeral: '" + std::string(text) + "'");
  };
  if (text.empty()) fail();
  if (text[i] == '+' || text[i] == '-') {
    out.negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  std::size_t int_digits = 0;
  std::size_t frac_digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits.push_back(text[i++]);
    ++int_digits;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits.push_back(text[i++]);
      ++frac_digits;
    }
  }
  if (int_digits + frac_digits == 0) fail();
  std::int64_t exp10 = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      eneg = text[i] == '-';
      ++i;
    }
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      if (exp10 > 100000) throw ParseError("decimal exponent too large");
      exp10 = exp10 * 10 + (text[i++] - '0');
    }
    if (i == start) fail();
    if (eneg) exp10 = -exp10;
  }
  if (i != text.size()) fail();
  out.digits = mpz_class(digits, 10);
  out.exp10 = exp10 - static_cast<std::int64_t>(frac_digits);
  return out;
}

} // namespace

mpq_class dy_decimal_rational(std::string_view text) {
  DecimalParts d = parse_decimal(text);
  mpq_class q;
  if (d.exp10 >= 0) {
    q = mpq_class(d.digits * pow10(static_cast<std::size_t>(d.exp10)));
  } else {
    q = mpq_class(d.digits, pow10(static_cast<std::size_t>(-d.exp10)));
    q.canonicalize();
  }
  if (d.negative) q = -q;
  return q;
}

std::optional<Dyadic> dy_decimal_exact(std::string_view text) {
  mpq_class q = dy_decimal_rational(text);
  const mpz_class& den = q.get_den();
  std::size_t tz = trailing_zeros(den);
  if (den != (mpz_class(1) << tz)) return std::nullopt;
  return Dyadic(q.get_num(), -static_cast<std::int64_t>(tz));
}

Dyadic dy_from_decimal(std::string_view text, std::int64_t n) {
  mpq_class q = dy_decimal_rational(text);
  return dy_div(Dyadic(q.get_num(), 0), Dyadic(q.get_den(), 0), n);
}

mpq_class dy_to_rational(const Dyadic& a) {
  mpq_class q;
  if (a.exponent() >= 0) {
    q = mpq_class(shifted(a.mantissa(), a.exponent()));
  } else {
    q = mpq_class(a.mantissa(), shifted(mpz_class(1), -a.exponent()));
    q.canonicalize();
  }
  return q;
}

std::string dy_to_decimal(const Dyadic& a, std::size_t digits) {
  // trunc(a * 10^digits) as an integer, then place the decimal point.
  mpz_class scaled = a.mantissa() * pow10(digits);
  if (a.exponent() >= 0) {
    scaled = shifted(scaled, a.exponent());
  } else {
    mpz_tdiv_q_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(-a.exponent()));
  }
  bool negative = scaled < 0;
  std::string body = mpz_class(abs(scaled)).get_str(10);
  if (body.size() <= digits) body.insert(0, digits + 1 - body.size(), '0');
  std::string out = negative ? "-" : "";
  out += body.substr(0, body.size() - digits);
  if (digits > 0) {
    out += '.';
    out += body.substr(body.size() - digits);
  }
  return out;
}

std::string dy_to_hex(const Dyadic& a) {
  std::string out = a.sign() < 0 ? "-" : "+";
  out += mpz_class(abs(a.mantissa())).get_str(16);
  out += " p ";
  out += std::to_string(a.exponent());
  return out;
}

Dyadic dy_from_hex(std::string_view text) {
  auto fail = [&]() -> Dyadic {
    throw ParseError("malformed hex dyadic: '" + std::string(text) + "'");
  };
  auto p = text.find(" p ");
  if (p == std::string_view::npos || text.size() < 2) fail();
  char sign = text[0];
  if (sign != '+' && sign != '-') fail();
  std::string mant(text.substr(1, p - 1));
  std::string exp(text.substr(p + 3));
  if (mant.empty() || exp.empty()) fail();
  for (char c : mant) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) fail();
  }
  mpz_class m(mant, 16);
  std::int64_t e = 0;
  try {
    std::size_t used = 0;
    e = std::stoll(exp, &used);
    if (used != exp.size()) fail();
  } catch (const std::logic_error&) {
    fail();
  }
  if (sign == '-') m = -m;
  return Dyadic(std::move(m), e);
}

std::uint64_t dy_mul_count() { return g_mul_count; }
void dy_count_mul(std::uint64_t n) { g_mul_count += n; }

} // namespace dyzeta
