#include "dyzeta/elementary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>

#include "dyzeta/errors.hpp"

namespace dyzeta {

namespace {

std::int64_t bitlen(std::uint64_t v) { return static_cast<std::int64_t>(std::bit_width(v)); }

std::uint64_t uabs(std::int64_t v) { return v < 0 ? 0 - static_cast<std::uint64_t>(v) : v; }

// trunc(x * 2^w) as an integer.
mpz_class to_fixed(const Dyadic& x, std::int64_t w) {
  mpz_class v = x.mantissa();
  std::int64_t shift = x.exponent() + w;
  if (shift >= 0) {
    mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
  } else {
    mpz_tdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
  }
  return v;
}

Dyadic ulps(std::uint64_t count, std::int64_t w) {
  return Dyadic(mpz_class(static_cast<unsigned long>(count)), -w);
}

// t <- trunc(t * m / 2^w)
void mul_fixed(mpz_class& t, const mpz_class& m, std::int64_t w) {
  t *= m;
  mpz_tdiv_q_2exp(t.get_mpz_t(), t.get_mpz_t(), static_cast<mp_bitcnt_t>(w));
}

// Kernels refine their guard bits until the certified radius meets the
// target. The first pass is sized to succeed; later passes exist only so that
// a loose a-priori estimate costs time instead of correctness.
constexpr int kMaxPasses = 6;

std::int64_t base_guard(std::int64_t n) { return bitlen(static_cast<std::uint64_t>(std::max<std::int64_t>(n, 0)) + 64) + 6; }

[[noreturn]] void refine_failed(const char* what) {
  throw ContractError(std::string(what) + ": could not certify the requested precision");
}

// ------------------------------------------------------------ constants

Enclosure compute_ln2(std::int64_t target) {
  // ln 2 = 2 atanh(1/3) = sum_i 2 / ((2i+1) 3^(2i+1)); every term is an exact
  // floor of its true value, so the sum is short by at most one ulp per term
  // plus a tail below one ulp.
  std::int64_t w = target + bitlen(static_cast<std::uint64_t>(target)) + 4;
  mpz_class p = mpz_class(1) << static_cast<mp_bitcnt_t>(w + 1);
  p /= 3;
  mpz_class sum = p;
  std::uint64_t terms = 1;
  for (unsigned long i = 1;; ++i) {
    p /= 9;
    if (p == 0) break;
    mpz_class t;
    mpz_tdiv_q_ui(t.get_mpz_t(), p.get_mpz_t(), 2 * i + 1);
    sum += t;
    ++terms;
  }
  Dyadic width = ulps(terms + 2, w);
  return {Dyadic(sum, -w) + dy_shift(width, -1), dy_shift(width, -1) + ulps(1, w)};
}

// atan(1/x) * 2^w, with the ulp error bound of the alternating sum.
std::pair<mpz_class, std::uint64_t> atan_inv(unsigned long x, std::int64_t w) {
  mpz_class p = mpz_class(1) << static_cast<mp_bitcnt_t>(w);
  p /= x;
  mpz_class sum = p;
  const unsigned long x2 = x * x;
  std::uint64_t terms = 1;
  for (unsigned long i = 1;; ++i) {
    p /= x2;
    if (p == 0) break;
    mpz_class t;
    mpz_tdiv_q_ui(t.get_mpz_t(), p.get_mpz_t(), 2 * i + 1);
    if (i % 2 == 1) {
      sum -= t;
    } else {
      sum += t;
    }
    ++terms;
  }
  return {sum, terms + 2};
}

Enclosure compute_pi(std::int64_t target) {
  // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
  std::int64_t w = target + bitlen(static_cast<std::uint64_t>(target)) + 10;
  auto [a5, e5] = atan_inv(5, w);
  auto [a239, e239] = atan_inv(239, w);
  mpz_class v = 16 * a5 - 4 * a239;
  return {Dyadic(v, -w), ulps(16 * e5 + 4 * e239, w)};
}

struct ConstantCache {
  std::mutex mu;
  std::int64_t prec = -1;
  Enclosure value;
};

Enclosure cached_constant(ConstantCache& cache, std::int64_t n, Enclosure (*compute)(std::int64_t)) {
  n = std::max<std::int64_t>(n, 1);
  std::lock_guard<std::mutex> lock(cache.mu);
  if (cache.prec < n + 1) {
    std::int64_t target = std::max(n + 1, 2 * cache.prec);
    cache.value = compute(target);
    if (cache.value.rad > Dyadic::pow2(-target)) refine_failed("constant");
    cache.prec = target;
  }
  return truncate(cache.value, n + 1);
}

ConstantCache g_ln2;
ConstantCache g_pi;

} // namespace

Enclosure ln2_enclosure(std::int64_t n) { return cached_constant(g_ln2, n, compute_ln2); }
Enclosure pi_enclosure(std::int64_t n) { return cached_constant(g_pi, n, compute_pi); }

// ------------------------------------------------------------ exp

Enclosure exp_exact(const Dyadic& x, std::int64_t n) {
  if (x.is_zero()) return Enclosure::exact(Dyadic(1));
  double xd = x.to_double();
  if (!(std::fabs(xd) < 0x1p40)) throw ResourceError("exp argument out of range");
  // x = k ln2 + r with |r| < 0.35
  auto k = static_cast<std::int64_t>(std::llround(xd / std::numbers::ln2));
  if (k < -n - 2) {
    // e^x = 2^k e^r < 2^(k+1)
    return {Dyadic(), Dyadic::pow2(k + 1)};
  }
  if (n + k > (std::int64_t{1} << 24)) throw ResourceError("exp result too large");
  const Dyadic target = Dyadic::pow2(-n);
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::int64_t guard = base_guard(n) + 16 * pass;
    std::int64_t w = std::max(n + k + guard, guard + 8);
    Enclosure ln2 = ln2_enclosure(w + bitlen(uabs(k)) + 2);
    Dyadic r = x - Dyadic(static_cast<long>(k)) * ln2.mid;
    mpz_class rf = to_fixed(r, w);
    const mpz_class one = mpz_class(1) << static_cast<mp_bitcnt_t>(w);
    if (abs(rf) * 2 > one) refine_failed("exp reduction");
    mpz_class sum = one;
    mpz_class term = one;
    std::uint64_t terms = 0;
    for (unsigned long i = 1;; ++i) {
      mul_fixed(term, rf, w);
      mpz_tdiv_q_ui(term.get_mpz_t(), term.get_mpz_t(), i);
      ++terms;
      if (term == 0) break;
      sum += term;
    }
    dy_count_mul(terms);
    // Each computed term is within 5 ulps; the tail after a zero term is
    // below 3 ulps. The reduction error |k| rad(ln2) moves e^r by at most
    // twice as much.
    Dyadic rad_r = ulps(5 * terms + 4, w) + dy_shift(Dyadic(static_cast<long>(uabs(k))) * ln2.rad, 1);
    Enclosure res{dy_shift(Dyadic(sum, -w), k), compact_radius(dy_shift(rad_r, k))};
    if (res.rad <= target) return res;
  }
  refine_failed("exp");
}

Enclosure exp_enclosure(const Enclosure& x, std::int64_t n) {
  if (x.rad.is_zero()) return exp_exact(x.mid, n);
  if (x.rad > Dyadic(1)) throw ContractError("exp argument too uncertain");
  Enclosure e = exp_exact(x.mid, n + 1);
  // |e^(m+d) - e^m| <= e^m (e^|d| - 1) <= 2 |d| e^m for |d| <= 1
  return widen(e, dy_shift(e.mag_upper() * x.rad, 1));
}

// ------------------------------------------------------------ log

Enclosure log_exact(const Dyadic& y, std::int64_t n) {
  if (y.sign() <= 0) throw DomainError("logarithm of a nonpositive number");
  if (y == Dyadic(1)) return Enclosure::exact(Dyadic());
  // y = z 2^j with z in [3/4, 3/2)
  std::int64_t j = y.floor_log2();
  Dyadic z = dy_shift(y, -j);
  if (z >= Dyadic(mpz_class(3), -1)) {
    ++j;
    z = dy_shift(y, -j);
  }
  const Dyadic target = Dyadic::pow2(-n);
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::int64_t w = n + base_guard(n) + 16 * pass;
    // atanh series in u = (z-1)/(z+1), |u| <= 1/5
    mpz_class u = to_fixed(dy_div(z - Dyadic(1), z + Dyadic(1), w), w);
    mpz_class u2 = u;
    mul_fixed(u2, u, w);
    mpz_class power = u;
    mpz_class sum = u;
    std::uint64_t terms = 1;
    for (unsigned long i = 1; power != 0; ++i) {
      mul_fixed(power, u2, w);
      mpz_class t;
      mpz_tdiv_q_ui(t.get_mpz_t(), power.get_mpz_t(), 2 * i + 1);
      sum += t;
      ++terms;
    }
    dy_count_mul(terms + 1);
    Enclosure ln2 = ln2_enclosure(w + bitlen(uabs(j)) + 1);
    // ln y = j ln2 + 2 atanh(u); atanh carries <= 2 ulps per term plus 4.
    Dyadic mid = Dyadic(static_cast<long>(j)) * ln2.mid + Dyadic(sum, 1 - w);
    Dyadic rad = Dyadic(static_cast<long>(uabs(j))) * ln2.rad + ulps(2 * (2 * terms + 4), w);
    Enclosure res{mid, compact_radius(rad)};
    if (res.rad <= target) return res;
  }
  refine_failed("log");
}

// ------------------------------------------------------------ sin / cos

SinCos sincos_exact(const Dyadic& y, std::int64_t n) {
  if (y.is_zero()) return {Enclosure::exact(Dyadic()), Enclosure::exact(Dyadic(1))};
  double yd = y.to_double();
  if (!(std::fabs(yd) < 0x1p40)) throw ResourceError("trigonometric argument out of range");
  // y = k pi + r, |r| <= pi/2 + tiny
  auto k = static_cast<std::int64_t>(std::llround(yd / std::numbers::pi));
  const Dyadic target = Dyadic::pow2(-n);
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::int64_t w = n + base_guard(n) + 16 * pass;
    Enclosure pi = pi_enclosure(w + bitlen(uabs(k)) + 2);
    Dyadic r = y - Dyadic(static_cast<long>(k)) * pi.mid;
    Dyadic reduction = Dyadic(static_cast<long>(uabs(k))) * pi.rad;
    mpz_class rf = to_fixed(r, w);
    mpz_class r2 = rf;
    mul_fixed(r2, rf, w);

    mpz_class s_term = rf;
    mpz_class s_sum = rf;
    std::uint64_t s_terms = 1;
    for (unsigned long i = 1; s_term != 0; ++i) {
      mul_fixed(s_term, r2, w);
      mpz_tdiv_q_ui(s_term.get_mpz_t(), s_term.get_mpz_t(), (2 * i) * (2 * i + 1));
      s_term = -s_term;
      s_sum += s_term;
      ++s_terms;
    }
    mpz_class c_term = mpz_class(1) << static_cast<mp_bitcnt_t>(w);
    mpz_class c_sum = c_term;
    std::uint64_t c_terms = 1;
    for (unsigned long i = 1; c_term != 0; ++i) {
      mul_fixed(c_term, r2, w);
      mpz_tdiv_q_ui(c_term.get_mpz_t(), c_term.get_mpz_t(), (2 * i - 1) * (2 * i));
      c_term = -c_term;
      c_sum += c_term;
      ++c_terms;
    }
    dy_count_mul(s_terms + c_terms + 1);
    if (k % 2 != 0) {
      s_sum = -s_sum;
      c_sum = -c_sum;
    }
    // <= 6 ulps per computed term, <= 10 for the tail and the rounding of r.
    Dyadic s_rad = compact_radius(ulps(6 * s_terms + 10, w) + reduction);
    Dyadic c_rad = compact_radius(ulps(6 * c_terms + 10, w) + reduction);
    SinCos res{{Dyadic(s_sum, -w), s_rad}, {Dyadic(c_sum, -w), c_rad}};
    if (s_rad <= target && c_rad <= target) return res;
  }
  refine_failed("sincos");
}

SinCos sincos_enclosure(const Enclosure& y, std::int64_t n) {
  if (y.rad.is_zero()) return sincos_exact(y.mid, n);
  SinCos sc = sincos_exact(y.mid, n + 1);
  return {widen(sc.sin, y.rad), widen(sc.cos, y.rad)};
}

// ------------------------------------------------------------ powers

namespace {

std::optional<Dyadic> exact_integer_power(const Dyadic& y, const Dyadic& h) {
  if (!h.is_integer()) return std::nullopt;
  auto e = h.abs().to_long();
  if (!e || *e > 4096 || static_cast<std::uint64_t>(*e) * y.bits() > (1u << 20)) return std::nullopt;
  mpz_class m;
  mpz_pow_ui(m.get_mpz_t(), y.mantissa().get_mpz_t(), static_cast<unsigned long>(*e));
  dy_count_mul(bitlen(static_cast<std::uint64_t>(*e)));
  return Dyadic(std::move(m), y.exponent() * *e);
}

// Upper estimate of log2 |y^h| used only to size working precisions.
std::int64_t magnitude_bits(const Dyadic& y, const Dyadic& h) {
  double e = h.to_double() * std::log2(y.to_double());
  if (!std::isfinite(e) || e > 0x1p40) throw ResourceError("power magnitude out of range");
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(e))) + 2;
}

std::int64_t size_bits(const Dyadic& v) {
  return v.is_zero() ? 0 : std::max<std::int64_t>(0, v.ceil_log2()) + 1;
}

} // namespace

Enclosure pow_exact(const Dyadic& y, const Dyadic& h, std::int64_t n) {
  if (y.sign() <= 0) throw DomainError("power of a nonpositive base");
  if (h.is_zero() || y == Dyadic(1)) return Enclosure::exact(Dyadic(1));
  if (auto p = exact_integer_power(y, h)) {
    if (h.sign() > 0) return Enclosure::exact(*p);
    return {dy_div(Dyadic(1), *p, n + 1), Dyadic::pow2(-n - 1)};
  }
  const std::int64_t mag = magnitude_bits(y, h);
  const Dyadic target = Dyadic::pow2(-n);
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::int64_t wl = n + mag + size_bits(h) + 4 + 16 * pass;
    Enclosure ln = log_exact(y, wl);
    Enclosure z = truncate(Enclosure{h * ln.mid, h.abs() * ln.rad}, wl + 1);
    Enclosure r = exp_enclosure(z, n + 1);
    if (r.rad <= target) return r;
  }
  refine_failed("pow");
}

ComplexEnclosure pow_complex_exact(const Dyadic& y, const Dyadic& sigma, const Dyadic& t,
                                   std::int64_t n) {
  if (t.is_zero()) return {pow_exact(y, sigma, n), Enclosure::exact(Dyadic())};
  if (y.sign() <= 0) throw DomainError("power of a nonpositive base");
  if (y == Dyadic(1)) return ComplexEnclosure::exact({Dyadic(1), Dyadic()});
  const std::int64_t mag = magnitude_bits(y, sigma);
  const std::int64_t arg_bits = std::max(size_bits(sigma), size_bits(t));
  const Dyadic target = Dyadic::pow2(-n);
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::int64_t wl = n + mag + arg_bits + 4 + 16 * pass;
    Enclosure ln = log_exact(y, wl);
    Enclosure zr = truncate(Enclosure{sigma * ln.mid, sigma.abs() * ln.rad}, wl + 1);
    Enclosure zi = truncate(Enclosure{t * ln.mid, t.abs() * ln.rad}, wl + 1);
    Enclosure a = exp_enclosure(zr, n + 2);
    SinCos sc = sincos_enclosure(zi, n + 2 + mag);
    ComplexEnclosure r = truncate(ComplexEnclosure{a * sc.cos, a * sc.sin}, n + 3);
    if (r.modulus_radius() <= target) return r;
  }
  refine_failed("complex pow");
}

// ------------------------------------------------------------ complex enclosures

Dyadic ComplexEnclosure::modulus_lower_sq() const {
  Dyadic a = re.mag_lower();
  Dyadic b = im.mag_lower();
  return a * a + b * b;
}

ComplexBall ComplexEnclosure::to_ball() const {
  Dyadic r = modulus_radius();
  return {mid(), r.is_zero() ? Ball::kExact : r.ceil_log2()};
}

ComplexEnclosure operator+(const ComplexEnclosure& a, const ComplexEnclosure& b) {
  return {a.re + b.re, a.im + b.im};
}

ComplexEnclosure operator-(const ComplexEnclosure& a, const ComplexEnclosure& b) {
  return {a.re - b.re, a.im - b.im};
}

ComplexEnclosure operator*(const ComplexEnclosure& a, const ComplexEnclosure& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ComplexEnclosure operator*(const Enclosure& a, const ComplexEnclosure& b) {
  return {a * b.re, a * b.im};
}

ComplexEnclosure truncate(const ComplexEnclosure& a, std::int64_t n) {
  return {truncate(a.re, n), truncate(a.im, n)};
}

ComplexEnclosure scale2(const ComplexEnclosure& a, std::int64_t e) {
  return {scale2(a.re, e), scale2(a.im, e)};
}

ComplexEnclosure reciprocal(const ComplexEnclosure& a, std::int64_t n) {
  Dyadic lower_sq = a.modulus_lower_sq();
  if (lower_sq.is_zero()) throw DomainError("reciprocal of a complex enclosure containing zero");
  const ComplexDyadic m = a.mid();
  Dyadic msq = m.re * m.re + m.im * m.im;
  // |1/x - 1/m| <= |x - m| / (|x| |m|) and |x| |m| >= 2^floor(log2(lower_sq msq) / 2)
  std::int64_t e = (lower_sq * msq).floor_log2();
  std::int64_t half = e >= 0 ? e / 2 : -((-e + 1) / 2);
  Dyadic prop = dy_shift(a.modulus_radius(), -half);
  Enclosure re{dy_div(m.re, msq, n), Dyadic::pow2(-n)};
  Enclosure im{-dy_div(m.im, msq, n), Dyadic::pow2(-n)};
  return {widen(re, prop), im};
}

bool intersects(const ComplexEnclosure& a, const ComplexEnclosure& b) {
  // Componentwise boxes around disks; both disks lie inside their boxes.
  return intersects(a.re, b.re) && intersects(a.im, b.im);
}

// ------------------------------------------------------------ schedules

namespace {

std::int64_t exp_magnitude_bits(std::int64_t p) {
  if (p > 40) throw ResourceError("magnitude parameter too large for exp");
  // log2(e) (2^p + 1) < 3 (2^p + 1) / 2
  std::int64_t v = 3 * ((std::int64_t{1} << p) + 1);
  return (v + 1) / 2;
}

Dyadic finish(const Enclosure& e, std::int64_t n, const char* what) {
  Enclosure t = truncate(e, n + 1);
  if (t.rad > Dyadic::pow2(-n)) refine_failed(what);
  return t.mid;
}

ComplexDyadic finish(const ComplexEnclosure& e, std::int64_t n, const char* what) {
  ComplexEnclosure t = truncate(e, n + 2);
  if (t.modulus_radius() > Dyadic::pow2(-n)) refine_failed(what);
  return t.mid();
}

void check_magnitude(const Dyadic& v, std::int64_t p, std::int64_t m, const char* what) {
  if (v.abs() > Dyadic::pow2(p) + Dyadic::pow2(-m)) {
    throw ContractError(std::string(what) + ": argument exceeds magnitude bound 2^" + std::to_string(p));
  }
}

} // namespace

std::int64_t exp_input_precision(std::int64_t n, std::int64_t p) {
  return n + 3 + exp_magnitude_bits(p);
}

std::int64_t log1p_input_precision(std::int64_t n, std::int64_t p) { return n + p + 3; }

std::int64_t pow1p_input_precision(std::int64_t n, std::int64_t p1, std::int64_t p2) {
  if (p1 > 1000 || p2 > 1000000) throw ResourceError("pow1p magnitude parameters too large");
  return n + (p1 + 1) * (p2 + 1) + bitlen(static_cast<std::uint64_t>(p1 + p2 + 2)) + 3;
}

std::int64_t sincos_input_precision(std::int64_t n) { return n + 2; }

std::int64_t exp_complex_input_precision(std::int64_t n, std::int64_t p) {
  return n + 4 + exp_magnitude_bits(p);
}

std::int64_t pow1p_complex_input_precision(std::int64_t n, std::int64_t p) {
  if (p > 30) throw ResourceError("magnitude parameter too large for complex pow1p");
  return n + (p + 1) * ((std::int64_t{1} << p) + 1) + p + 6;
}

Dyadic exp_real(const ApproxReal& x, std::int64_t n, std::int64_t p, EvalContext& ctx) {
  std::int64_t m = exp_input_precision(n, p);
  ctx.note_precision(m);
  Dyadic xs = ctx.query(x, m);
  check_magnitude(xs, p, m, "exp");
  Enclosure e = exp_exact(xs, n + 2);
  // input error 2^-m moves e^x by at most 2 e^x 2^-m
  e = widen(e, dy_shift(e.mag_upper(), 1 - m));
  return finish(e, n, "exp");
}

Dyadic log1p_real(const ApproxReal& x, std::int64_t n, std::int64_t p, EvalContext& ctx) {
  std::int64_t m = log1p_input_precision(n, p);
  ctx.note_precision(m);
  Dyadic xs = ctx.query(x, m);
  Dyadic y = xs + Dyadic(1);
  Dyadic eps = Dyadic::pow2(-m);
  if (y < Dyadic::pow2(-p) - eps) {
    throw DomainError("log1p: 1 + x is not certifiably >= 2^-" + std::to_string(p));
  }
  Enclosure l = log_exact(y, n + 2);
  // |d/dy ln y| <= 1 / (y - eps)
  l = widen(l, dy_div(eps, y - eps, n + 4) + Dyadic::pow2(-n - 4));
  return finish(l, n, "log1p");
}

Dyadic pow1p_real(const ApproxReal& x, const ApproxReal& h, std::int64_t n, std::int64_t p1,
                  std::int64_t p2, EvalContext& ctx) {
  std::int64_t m = pow1p_input_precision(n, p1, p2);
  ctx.note_precision(m);
  Dyadic xs = ctx.query(x, m);
  Dyadic hs = ctx.query(h, m);
  Dyadic y = xs + Dyadic(1);
  Dyadic eps = Dyadic::pow2(-m);
  if (y < Dyadic::pow2(-p1) - eps) {
    throw DomainError("pow1p: 1 + x is not certifiably >= 2^-" + std::to_string(p1));
  }
  if (hs.abs() > Dyadic(static_cast<long>(p2)) + eps) {
    throw ContractError("pow1p: exponent exceeds bound " + std::to_string(p2));
  }
  Enclosure r = pow_exact(y, hs, n + 2);
  // Mean-value bound over the input box, see pow1p_input_precision.
  r = widen(r, Dyadic::pow2(-n - 3));
  return finish(r, n, "pow1p");
}

Dyadic sin_real(const ApproxReal& y, std::int64_t n, std::int64_t p, EvalContext& ctx) {
  std::int64_t m = sincos_input_precision(n);
  ctx.note_precision(m);
  Dyadic ys = ctx.query(y, m);
  check_magnitude(ys, p, m, "sin");
  Enclosure s = widen(sincos_exact(ys, n + 2).sin, Dyadic::pow2(-m));
  return finish(s, n, "sin");
}

Dyadic cos_real(const ApproxReal& y, std::int64_t n, std::int64_t p, EvalContext& ctx) {
  std::int64_t m = sincos_input_precision(n);
  ctx.note_precision(m);
  Dyadic ys = ctx.query(y, m);
  check_magnitude(ys, p, m, "cos");
  Enclosure c = widen(sincos_exact(ys, n + 2).cos, Dyadic::pow2(-m));
  return finish(c, n, "cos");
}

ComplexDyadic exp_complex(const ComplexApprox& z, std::int64_t n, std::int64_t p, EvalContext& ctx) {
  std::int64_t m = exp_complex_input_precision(n, p);
  ctx.note_precision(m);
  Dyadic a = ctx.query(z.re, m);
  Dyadic b = ctx.query(z.im, m);
  check_magnitude(a, p, m, "complex exp");
  check_magnitude(b, p, m, "complex exp");
  Enclosure e = exp_exact(a, n + 3);
  std::int64_t mag = size_bits(e.mag_upper());
  SinCos sc = sincos_exact(b, n + 3 + mag);
  ComplexEnclosure r{e * sc.cos, e * sc.sin};
  // |e^z - e^z*| <= |e^z*| (e^|dz| - 1) <= 4 |e^z*| 2^-m
  r.re = widen(r.re, dy_shift(e.mag_upper(), 2 - m));
  return finish(r, n, "complex exp");
}

ComplexDyadic pow1p_complex(const ApproxReal& x, const ComplexApprox& s, std::int64_t n,
                            std::int64_t p, EvalContext& ctx) {
  std::int64_t m = pow1p_complex_input_precision(n, p);
  ctx.note_precision(m);
  Dyadic xs = ctx.query(x, m);
  Dyadic sigma = ctx.query(s.re, m);
  Dyadic t = ctx.query(s.im, m);
  Dyadic y = xs + Dyadic(1);
  Dyadic eps = Dyadic::pow2(-m);
  if (y < Dyadic::pow2(-p) - eps) {
    throw DomainError("pow1p: 1 + x is not certifiably >= 2^-" + std::to_string(p));
  }
  check_magnitude(sigma, p, m, "complex pow1p");
  check_magnitude(t, p, m, "complex pow1p");
  ComplexEnclosure r = pow_complex_exact(y, sigma, t, n + 2);
  r.re = widen(r.re, Dyadic::pow2(-n - 3));
  return finish(r, n, "complex pow1p");
}

} // namespace dyzeta
