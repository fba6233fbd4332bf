#include "dyzeta/zeta_complex.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "dyzeta/errors.hpp"

namespace dyzeta {

namespace {

std::int64_t bitlen(std::uint64_t v) { return static_cast<std::int64_t>(std::bit_width(v)); }

std::int64_t ceil_log2_int(std::uint64_t v) { return v <= 1 ? 0 : bitlen(v - 1); }

std::uint64_t mpz_bits(const mpz_class& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

struct Interval {
  Dyadic lo;
  Dyadic hi;
};

Interval interval_of(const ApproxReal& x, std::int64_t m, EvalContext& ctx) {
  if (x.exact()) return {*x.exact(), *x.exact()};
  Dyadic v = ctx.query(x, m);
  Dyadic eps = Dyadic::pow2(-m);
  return {v - eps, v + eps};
}

Dyadic mag_of(const Interval& iv) { return std::max(iv.lo.abs(), iv.hi.abs()); }

std::int64_t exponent_bound(const Dyadic& mag) {
  return mag.is_zero() ? 0 : std::max<std::int64_t>(0, mag.ceil_log2());
}

// Magnitude parameter for 2^(1-s): |1 - sigma|, |t| <= 2^p and 2 <= 2^p.
std::int64_t guard_parameter(const ComplexApprox& s, EvalContext& ctx) {
  Dyadic a = mag_of(interval_of(one_minus(s.re), 16, ctx));
  Dyadic b = mag_of(interval_of(s.im, 16, ctx));
  return std::max<std::int64_t>({1, exponent_bound(a), exponent_bound(b)});
}

// Imaginary part 2 pi k / ln 2 of the k-th exceptional point, 20 digits.
std::string exceptional_imag(long long k) {
  Dyadic pi = pi_enclosure(96).mid;
  Dyadic ln2 = ln2_enclosure(96).mid;
  Dyadic v = dy_div(dy_shift(pi, 1) * Dyadic(static_cast<long>(k)), ln2, 80);
  std::string digits = dy_to_decimal(v.abs(), 20);
  return (k < 0 ? "1 - " : "1 + ") + digits + "i";
}

[[noreturn]] void exceptional_failure(const ComplexApprox& s, EvalContext& ctx,
                                      std::int64_t guard_bits) {
  double t = ctx.query(s.im, 64).to_double();
  const double period = 2 * std::numbers::pi / std::numbers::ln2;
  auto k = static_cast<long long>(std::llround(t / period));
  std::string point = k == 0 ? "the pole s = 1"
                             : "the exceptional point s = 1 + 2*pi*i*(" + std::to_string(k) +
                                   ")/ln 2 = " + exceptional_imag(k);
  throw DomainError("s = " + s.re.label() + " + (" + s.im.label() + ")i is within 2^-" +
                    std::to_string(guard_bits) + " of " + point +
                    ", where 1 - 2^(1-s) vanishes");
}

ComplexApprox one_minus_s(const ComplexApprox& s) { return {one_minus(s.re), negate(s.im)}; }

} // namespace

std::int64_t exceptional_guard(const ComplexApprox& s, std::int64_t working_n, EvalContext& ctx,
                               std::int64_t guard_bits) {
  const auto& sig = s.re.exact();
  const auto& t = s.im.exact();
  if (sig && t && t->is_zero() && sig->is_integer() && sig->to_long() &&
      std::abs(*sig->to_long()) < (1L << 40)) {
    // 1 - 2^(1 - sigma) is an exact dyadic.
    Dyadic d = Dyadic(1) - Dyadic::pow2(1 - *sig->to_long());
    if (d.is_zero() || d.abs().floor_log2() < -guard_bits) exceptional_failure(s, ctx, guard_bits);
    return d.abs().floor_log2();
  }
  const std::int64_t w = std::max(working_n, guard_bits + 8);
  const std::int64_t p = guard_parameter(s, ctx);
  ComplexDyadic z = pow1p_complex(ApproxReal::constant(Dyadic(1)), one_minus_s(s), w, p, ctx);
  Dyadic eps = Dyadic::pow2(-w);
  ComplexEnclosure d{{Dyadic(1) - z.re, eps}, {-z.im, eps}};
  Dyadic lower_sq = d.modulus_lower_sq();
  if (lower_sq.is_zero() || lower_sq.floor_log2() < -2 * guard_bits) {
    exceptional_failure(s, ctx, guard_bits);
  }
  // |d| >= sqrt(2^f) >= 2^floor(f / 2)
  std::int64_t f = lower_sq.floor_log2();
  return f >= 0 ? f / 2 : -((-f + 1) / 2);
}

std::int64_t gamma_ratio_log2_bound(double sigma_lower, double t_upper) {
  if (!(sigma_lower > 0)) throw DomainError("the tail bound requires sigma > 0");
  if (t_upper == 0) return 0;
  // |Gamma(sigma) / Gamma(sigma + i t)|^2 = prod_j (1 + t^2 / (sigma + j)^2);
  // the factors beyond J contribute at most t^2 / (ln 2 (sigma + J - 1)) bits.
  const double t2 = t_upper * t_upper;
  const auto terms = static_cast<long>(64 + std::ceil(4 * t_upper));
  double bits = 0;
  for (long j = 0; j < terms; ++j) {
    double x = sigma_lower + static_cast<double>(j);
    bits += std::log2(1 + t2 / (x * x));
  }
  bits += t2 / (std::numbers::ln2 * (sigma_lower + static_cast<double>(terms) - 1));
  // Half for the square root, with a margin for floating-point rounding.
  return static_cast<std::int64_t>(std::ceil(0.5 * bits * (1 + 1e-9) + 1e-6)) + 1;
}

ComplexDyadic v_eval_complex(const ComplexApprox& s, std::int64_t nv, const ComplexPlan& plan,
                             EvalContext& ctx) {
  const std::int64_t p_inv = std::max<std::int64_t>(-plan.guard_exp, 0);
  std::int64_t w = lf_eval(schedules::inv(), {nv, p_inv}) + 3;
  ComplexApprox h = one_minus_s(s);
  ApproxReal one = ApproxReal::constant(Dyadic(1));
  for (int pass = 0; pass < 4; ++pass) {
    ComplexDyadic z = pow1p_complex(one, h, w, plan.p_guard, ctx);
    Dyadic eps = Dyadic::pow2(-w);
    ComplexEnclosure d{{Dyadic(1) - z.re, eps}, {-z.im, eps}};
    ComplexEnclosure r = reciprocal(d, nv + 2);
    if (r.modulus_radius() <= Dyadic::pow2(-nv)) return r.mid();
    ++ctx.stats().schedule_retries;
    w += 16;
  }
  throw ContractError("v_eval_complex: reciprocal schedule fell short");
}

ComplexDyadic f_eval_complex(std::int64_t q, const ComplexApprox& s, std::int64_t n4, EvalContext& ctx) {
  if (q < 0) throw ContractError("f_eval_complex: q must be nonnegative");
  if (q == 0) return {Dyadic(1), Dyadic()};
  // The input error |ds| <= 2^(1/2 - m) moves (q+1)^-s by at most
  // |ds| ln(q+1) max (q+1)^-Re(xi) <= 2^(2 - m) lq for sigma > 0.
  const std::int64_t lq = ceil_log2_int(static_cast<std::uint64_t>(q + 1));
  const std::int64_t m = n4 + 5 + bitlen(static_cast<std::uint64_t>(lq));
  ctx.note_precision(m);
  Dyadic sigma = ctx.query(s.re, m);
  Dyadic t = ctx.query(s.im, m);
  ComplexEnclosure r = pow_complex_exact(Dyadic(static_cast<long>(q + 1)), -sigma, -t, n4 + 2);
  r = truncate(r, n4 + 3);
  if (r.modulus_radius() + Dyadic::pow2(-n4 - 3) > Dyadic::pow2(-n4)) {
    throw ContractError("f_eval_complex: could not certify the requested precision");
  }
  return r.mid();
}

ComplexDyadic h_eval_complex(std::int64_t k, const ComplexApprox& s, const ComplexPlan& plan,
                             EvalContext& ctx) {
  if (k < 0) throw ContractError("h_eval_complex: k must be nonnegative");
  const std::int64_t n4 = plan.base.n4(k);
  ctx.note_precision(n4);
  const bool timed = ctx.caps().timeout.has_value();
  mpz_class binom = 1;
  Dyadic re;
  Dyadic im;
  for (std::int64_t q = 0; q <= k; ++q) {
    ComplexDyadic f = f_eval_complex(q, s, n4, ctx);
    Dyadic c(binom, 0);
    if (q % 2 == 0) {
      re = re + c * f.re;
      im = im + c * f.im;
    } else {
      re = re - c * f.re;
      im = im - c * f.im;
    }
    ctx.note_live_bits(mpz_bits(binom) + re.bits() + im.bits() + f.re.bits() + f.im.bits());
    binom *= static_cast<unsigned long>(k - q);
    mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), static_cast<unsigned long>(q + 1));
    if (timed) ctx.check_timeout();
  }
  // Inner error <= 2^k 2^-n4 <= 2^-(n3 + 3); componentwise truncation adds
  // at most sqrt(2) 2^-(n3 + 2).
  return {dy_round(re, plan.base.n3 + 2), dy_round(im, plan.base.n3 + 2)};
}

ComplexDyadic u_eval_complex(const ComplexApprox& s, const ComplexPlan& plan, EvalContext& ctx) {
  if (plan.tail_log2 - plan.base.iota > -(plan.base.n1 + 3)) {
    throw ContractError("u_eval_complex: truncation index too small for the tail bound");
  }
  Dyadic re;
  Dyadic im;
  for (std::int64_t k = 0; k < plan.base.iota; ++k) {
    ctx.note_terms(1);
    ComplexDyadic h = h_eval_complex(k, s, plan, ctx);
    re = re + dy_shift(h.re, -(k + 1));
    im = im + dy_shift(h.im, -(k + 1));
    ctx.note_live_bits(re.bits() + im.bits() + h.re.bits() + h.im.bits());
  }
  // h errors <= 2^-n3 = 2^-(n1 + 2), tail <= 2^-(n1 + 3), truncation
  // <= sqrt(2) 2^-(n1 + 3).
  return {dy_round(re, plan.base.n1 + 3), dy_round(im, plan.base.n1 + 3)};
}

ComplexBall zeta_complex(const ApproxReal& sigma, const ApproxReal& t, std::int64_t n,
                         EvalContext& ctx, ComplexPlan* plan_out) {
  if (n < 0) throw ContractError("target precision must be nonnegative");
  const ComplexApprox s{sigma, t};
  ComplexBall out;
  meter_scope(ctx, [&] {
    // sigma in [2^-p, 2^p]
    std::int64_t p = 0;
    Interval sig_iv;
    for (std::int64_t cand = 1; cand <= 64 && p == 0; ++cand) {
      sig_iv = interval_of(sigma, 2 * cand + 16, ctx);
      if (sig_iv.hi <= Dyadic()) {
        throw DomainError("sigma = " + sigma.label() +
                          " is not supported: the series is evaluated for sigma > 0 only");
      }
      if (sig_iv.lo >= Dyadic::pow2(-cand) && sig_iv.hi <= Dyadic::pow2(cand)) p = cand;
    }
    if (p == 0) throw DomainError("sigma = " + sigma.label() + " cannot be certified positive");
    Interval t_iv = interval_of(t, 16, ctx);
    const std::int64_t p_t = exponent_bound(mag_of(t_iv));
    if (p_t > 24) throw ResourceError("|t| exceeds 2^24");

    ComplexPlan cp;
    cp.p_t = p_t;
    cp.p_guard = guard_parameter(s, ctx);
    cp.guard_exp = exceptional_guard(s, 0, ctx);
    cp.tail_log2 = gamma_ratio_log2_bound(sig_iv.lo.to_double() * (1 - 1e-12),
                                          mag_of(t_iv).to_double() * (1 + 1e-12));

    std::int64_t target = n;
    for (int attempt = 0; attempt < 2; ++attempt) {
      // The complex cascade replaces C2(p) by the certified separation from
      // the exceptional set: |v| <= 2^-guard_exp.
      PrecisionPlan& pl = cp.base;
      pl = plan(target, p);
      pl.n1 = target + std::max<std::int64_t>(-cp.guard_exp, 0) + 4;
      pl.n2 = pl.n1 + 1;
      pl.n3 = pl.n2 + 1;
      pl.iota = 4 * p + 2 * pl.n2 + pl.constants.c6;
      while (cp.tail_log2 - pl.iota > -(pl.n1 + 3)) {
        pl.iota *= 2;
        ++ctx.stats().tail_retries;
      }
      const std::int64_t last = pl.iota - 1;
      pl.m = pl.n4(last) + 5 + bitlen(static_cast<std::uint64_t>(ceil_log2_int(last + 1)));
      if (!sigma.exact() || !t.exact()) {
        ctx.note_precision(pl.m);
        ctx.query(sigma, pl.m);
        ctx.query(t, pl.m);
      }

      ComplexDyadic u = u_eval_complex(s, cp, ctx);
      Dyadic u_eps = Dyadic::pow2(-pl.n1);
      Dyadic u_mag = u.re.abs() + u.im.abs() + u_eps;
      cp.u_mag_exp = exponent_bound(u_mag);
      cp.nv = target + cp.u_mag_exp + 4;
      ComplexDyadic v = v_eval_complex(s, cp.nv, cp, ctx);
      Dyadic v_eps = Dyadic::pow2(-cp.nv);

      ComplexEnclosure ue{{u.re, u_eps}, {u.im, u_eps}};
      ComplexEnclosure ve{{v.re, v_eps}, {v.im, v_eps}};
      ComplexEnclosure z = truncate(ve * ue, n + 4);
      if (plan_out) *plan_out = cp;
      if (z.modulus_radius() <= Dyadic::pow2(-n)) {
        out = z.to_ball();
        return;
      }
      ++ctx.stats().schedule_retries;
      target = target + 8;
    }
    throw ContractError("zeta_complex: certified radius exceeds 2^-" + std::to_string(n));
  });
  return out;
}

ComplexBall zeta_complex(const ApproxReal& sigma, const ApproxReal& t, std::int64_t n) {
  EvalContext ctx;
  return zeta_complex(sigma, t, n, ctx);
}

} // namespace dyzeta
