#pragma once

// Test-only reference values built from exact integer arithmetic by formulas
// the library itself does not use.

#include <cstdint>
#include <random>
#include <string>

#include <gmpxx.h>

#include "dyzeta/approx.hpp"
#include "dyzeta/dyadic.hpp"
#include "dyzeta/elementary.hpp"

namespace testing {

using dyzeta::Dyadic;

inline mpz_class pow2z(std::int64_t e) {
  mpz_class r = 1;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
  return r;
}

/// A fixed-point value m 2^-bits known to be within ulps 2^-bits of the target.
struct Fixed {
  mpz_class m;
  std::int64_t bits;
  std::int64_t ulps;

  Dyadic value() const { return Dyadic(m, -bits); }
  /// |x - target| <= 2^-n, allowing for the fixed point's own error.
  bool within(const Dyadic& x, std::int64_t n) const {
    mpq_class d = abs(dyzeta::dy_to_rational(x) - dyzeta::dy_to_rational(value()));
    mpq_class slack(mpz_class(ulps), pow2z(bits));
    return d <= mpq_class(1, pow2z(n)) + slack;
  }
};

/// floor(sqrt(2) 2^bits), exact to one ulp.
inline Fixed sqrt2_fixed(std::int64_t bits) {
  mpz_class r = pow2z(2 * bits + 1);
  mpz_sqrt(r.get_mpz_t(), r.get_mpz_t());
  return {r, bits, 1};
}

/// e = sum 1/k! in fixed point.
inline Fixed e_fixed(std::int64_t bits) {
  const std::int64_t w = bits + 16;
  mpz_class term = pow2z(w);
  mpz_class sum = 0;
  std::int64_t k = 0;
  for (; term != 0; ++k) {
    sum += term;
    term /= k + 1;
  }
  return {sum >> 16, bits, 2};
}

/// ln 2 = sum_{k>=1} 1 / (k 2^k) in fixed point.
inline Fixed ln2_fixed(std::int64_t bits) {
  const std::int64_t w = bits + 16;
  mpz_class sum = 0;
  for (std::int64_t k = 1; k <= w; ++k) sum += pow2z(w - k) / k;
  return {sum >> 16, bits, 2};
}

/// atan(1/x) 2^w by the alternating Taylor series.
inline mpz_class atan_inv(long x, std::int64_t w) {
  mpz_class power = pow2z(w) / x;
  const long x2 = x * x;
  mpz_class sum = 0;
  for (long k = 0; power != 0; ++k) {
    mpz_class term = power / (2 * k + 1);
    sum += (k % 2 == 0) ? term : mpz_class(-term);
    power /= x2;
  }
  return sum;
}

/// pi = 4 (2 atan(1/3) + atan(1/7)) in fixed point.
inline Fixed pi_fixed(std::int64_t bits) {
  const std::int64_t w = bits + 16;
  mpz_class v = 4 * (2 * atan_inv(3, w) + atan_inv(7, w));
  return {v >> 16, bits, 2};
}

/// |x - q| <= 2^-n for an exact rational target.
inline bool within_rational(const Dyadic& x, const mpq_class& q, std::int64_t n) {
  return abs(dyzeta::dy_to_rational(x) - q) <= mpq_class(1, pow2z(n));
}

/// Enclosure contains the exact rational q.
inline bool encloses(const dyzeta::Enclosure& e, const mpq_class& q) {
  return abs(dyzeta::dy_to_rational(e.mid) - q) <= dyzeta::dy_to_rational(e.rad);
}

/// Enclosure meets the fixed-point target's error interval.
inline bool encloses(const dyzeta::Enclosure& e, const Fixed& f) {
  mpq_class d = abs(dyzeta::dy_to_rational(e.mid) - dyzeta::dy_to_rational(f.value()));
  return d <= dyzeta::dy_to_rational(e.rad) + mpq_class(mpz_class(f.ulps), pow2z(f.bits));
}

/// Uniform dyadic with `frac_bits` fractional bits in [lo, hi).
inline Dyadic random_dyadic(std::mt19937_64& rng, const Dyadic& lo, const Dyadic& hi,
                            std::int64_t frac_bits) {
  mpz_class span = dyzeta::dy_to_rational(dyzeta::dy_shift(hi - lo, frac_bits)).get_num();
  gmp_randclass gen(gmp_randinit_default);
  gen.seed(static_cast<unsigned long>(rng()));
  mpz_class offset = gen.get_z_range(span);
  return lo + Dyadic(offset, -frac_bits);
}

} // namespace testing
