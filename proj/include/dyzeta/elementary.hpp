#pragma once

#include <cstdint>

#include "dyzeta/approx.hpp"
#include "dyzeta/dyadic.hpp"

namespace dyzeta {

struct ComplexDyadic {
  Dyadic re;
  Dyadic im;

  friend bool operator==(const ComplexDyadic&, const ComplexDyadic&) = default;
};

/// center +- 2^radius_exp in complex modulus.
struct ComplexBall {
  ComplexDyadic center;
  std::int64_t radius_exp = Ball::kExact;

  Dyadic radius() const { return radius_exp == Ball::kExact ? Dyadic() : Dyadic::pow2(radius_exp); }
};

/// Componentwise enclosure; the modulus error is at most re.rad + im.rad.
struct ComplexEnclosure {
  Enclosure re;
  Enclosure im;

  static ComplexEnclosure exact(ComplexDyadic z) {
    return {Enclosure::exact(std::move(z.re)), Enclosure::exact(std::move(z.im))};
  }
  ComplexDyadic mid() const { return {re.mid, im.mid}; }
  Dyadic modulus_radius() const { return re.rad + im.rad; }
  /// Certified lower bound of the squared modulus (may be zero).
  Dyadic modulus_lower_sq() const;
  /// Upper bound of the modulus, within a factor of sqrt(2).
  Dyadic modulus_upper() const { return re.mag_upper() + im.mag_upper(); }
  ComplexBall to_ball() const;
  ComplexEnclosure conj() const { return {re, -im}; }
};

ComplexEnclosure operator+(const ComplexEnclosure& a, const ComplexEnclosure& b);
ComplexEnclosure operator-(const ComplexEnclosure& a, const ComplexEnclosure& b);
ComplexEnclosure operator*(const ComplexEnclosure& a, const ComplexEnclosure& b);
ComplexEnclosure operator*(const Enclosure& a, const ComplexEnclosure& b);
ComplexEnclosure truncate(const ComplexEnclosure& a, std::int64_t n);
ComplexEnclosure scale2(const ComplexEnclosure& a, std::int64_t e);
/// 1/a with centers truncated at n fractional bits. Throws DomainError when
/// the enclosure may contain zero.
ComplexEnclosure reciprocal(const ComplexEnclosure& a, std::int64_t n);
bool intersects(const ComplexEnclosure& a, const ComplexEnclosure& b);

/// A complex number as a pair of approximable reals.
struct ComplexApprox {
  ApproxReal re;
  ApproxReal im;
};

// Certified constants, cached per process at the highest precision asked for.
// The radius is at most 2^-n.
Enclosure pi_enclosure(std::int64_t n);
Enclosure ln2_enclosure(std::int64_t n);

// Kernels on exact dyadic arguments. Every returned radius is at most 2^-n.
Enclosure exp_exact(const Dyadic& x, std::int64_t n);
/// Natural log of y > 0.
Enclosure log_exact(const Dyadic& y, std::int64_t n);
struct SinCos {
  Enclosure sin;
  Enclosure cos;
};
SinCos sincos_exact(const Dyadic& y, std::int64_t n);
/// y^h = exp(h ln y) for y > 0.
Enclosure pow_exact(const Dyadic& y, const Dyadic& h, std::int64_t n);
/// y^(sigma + i t) for y > 0.
ComplexEnclosure pow_complex_exact(const Dyadic& y, const Dyadic& sigma, const Dyadic& t,
                                   std::int64_t n);

// Kernels on uncertain arguments; the radius reflects the input radius too.
Enclosure exp_enclosure(const Enclosure& x, std::int64_t n);
SinCos sincos_enclosure(const Enclosure& y, std::int64_t n);

// Input-precision schedules of the ApproxReal operations below. Each is
// linear in n for fixed magnitude parameters:
//   exp:     n + 3 + ceil(3 (2^p + 1) / 2)
//   log1p:   n + p + 3
//   pow1p:   n + (p1 + 1)(p2 + 1) + bitlen(p1 + p2 + 2) + 3
//   sincos:  n + 2
//   cexp:    n + 4 + ceil(3 (2^p + 1) / 2)
//   cpow1p:  n + (p + 1)(2^p + 1) + p + 6
std::int64_t exp_input_precision(std::int64_t n, std::int64_t p);
std::int64_t log1p_input_precision(std::int64_t n, std::int64_t p);
std::int64_t pow1p_input_precision(std::int64_t n, std::int64_t p1, std::int64_t p2);
std::int64_t sincos_input_precision(std::int64_t n);
std::int64_t exp_complex_input_precision(std::int64_t n, std::int64_t p);
std::int64_t pow1p_complex_input_precision(std::int64_t n, std::int64_t p);

/// |result - e^x| <= 2^-n, given |x| <= 2^p.
Dyadic exp_real(const ApproxReal& x, std::int64_t n, std::int64_t p, EvalContext& ctx);
/// |result - ln(1 + x)| <= 2^-n, given 1 + x in [2^-p, 2^p - 1].
Dyadic log1p_real(const ApproxReal& x, std::int64_t n, std::int64_t p, EvalContext& ctx);
/// |result - (1 + x)^h| <= 2^-n, given x in [2^-p1 - 1, 2^p1 - 2] and |h| < p2.
Dyadic pow1p_real(const ApproxReal& x, const ApproxReal& h, std::int64_t n, std::int64_t p1,
                  std::int64_t p2, EvalContext& ctx);
Dyadic sin_real(const ApproxReal& y, std::int64_t n, std::int64_t p, EvalContext& ctx);
Dyadic cos_real(const ApproxReal& y, std::int64_t n, std::int64_t p, EvalContext& ctx);
/// Modulus error <= 2^-n, given |re z|, |im z| <= 2^p.
ComplexDyadic exp_complex(const ComplexApprox& z, std::int64_t n, std::int64_t p, EvalContext& ctx);
/// (1 + x)^s with modulus error <= 2^-n, given 1 + x in [2^-p, 2^p] and
/// |re s|, |im s| <= 2^p.
ComplexDyadic pow1p_complex(const ApproxReal& x, const ComplexApprox& s, std::int64_t n,
                            std::int64_t p, EvalContext& ctx);

} // namespace dyzeta
