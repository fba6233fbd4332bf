#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace dyzeta {

/// Exact dyadic rational mantissa * 2^exponent.
///
/// Always kept canonical: the mantissa is odd, or the value is zero with
/// exponent zero. Two Dyadics compare equal iff their representations do.
class Dyadic {
public:
  Dyadic() = default;
  Dyadic(long value); // NOLINT(google-explicit-constructor)
  Dyadic(mpz_class mantissa, std::int64_t exponent);

  static Dyadic pow2(std::int64_t exponent);

  const mpz_class& mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }

  bool is_zero() const { return mantissa_ == 0; }
  int sign() const { return sgn(mantissa_); }
  bool is_integer() const { return exponent_ >= 0; }

  /// Number of significant mantissa bits (0 for zero).
  std::size_t bits() const;

  /// floor(log2 |x|); undefined for zero.
  std::int64_t floor_log2() const;
  /// Smallest e with |x| <= 2^e; undefined for zero.
  std::int64_t ceil_log2() const;

  /// Integer value when exponent >= 0 would not overflow a long.
  std::optional<long> to_long() const;
  /// Nearest double, saturating to +-inf / 0 outside double range.
  double to_double() const;

  Dyadic abs() const;
  Dyadic operator-() const;

  friend bool operator==(const Dyadic&, const Dyadic&) = default;

private:
  void normalize();

  mpz_class mantissa_{0};
  std::int64_t exponent_ = 0;
};

Dyadic dy_add(const Dyadic& a, const Dyadic& b);
Dyadic dy_sub(const Dyadic& a, const Dyadic& b);
Dyadic dy_mul(const Dyadic& a, const Dyadic& b);

/// Exact multiplication by 2^e.
Dyadic dy_shift(const Dyadic& a, std::int64_t e);

/// Truncation toward zero of all bits below position -n.
Dyadic dy_round(const Dyadic& a, std::int64_t n);

/// Rounds |a| away from zero to at most `bits` significant bits. Used to keep
/// error bounds short; the result is never smaller in magnitude.
Dyadic dy_round_up_bits(const Dyadic& a, std::size_t bits);

/// a / b truncated toward zero to n fractional bits. Throws DomainError when b
/// is zero.
Dyadic dy_div(const Dyadic& a, const Dyadic& b, std::int64_t n);

std::strong_ordering dy_cmp(const Dyadic& a, const Dyadic& b);

inline Dyadic operator+(const Dyadic& a, const Dyadic& b) { return dy_add(a, b); }
inline Dyadic operator-(const Dyadic& a, const Dyadic& b) { return dy_sub(a, b); }
inline Dyadic operator*(const Dyadic& a, const Dyadic& b) { return dy_mul(a, b); }
inline std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) { return dy_cmp(a, b); }

/// Parses "[+-]digits[.digits][(e|E)[+-]digits]" and returns the value
/// truncated toward zero to n fractional bits (|result - value| <= 2^-n).
Dyadic dy_from_decimal(std::string_view text, std::int64_t n);

/// The exact value of a decimal numeral when it is a dyadic rational.
std::optional<Dyadic> dy_decimal_exact(std::string_view text);

/// Exact rational value of a decimal numeral.
mpq_class dy_decimal_rational(std::string_view text);

/// Decimal rendering with exactly `digits` fractional digits, truncated
/// toward zero.
std::string dy_to_decimal(const Dyadic& a, std::size_t digits);

/// Debug format "+m p e": hex mantissa, decimal exponent.
std::string dy_to_hex(const Dyadic& a);
Dyadic dy_from_hex(std::string_view text);

/// Exact rational value, for tests and oracles.
mpq_class dy_to_rational(const Dyadic& a);

/// Running count of big-integer multiplications on this thread.
std::uint64_t dy_mul_count();
void dy_count_mul(std::uint64_t n = 1);

} // namespace dyzeta
