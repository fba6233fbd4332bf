#include "dyzeta/zeta_real.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "dyzeta/elementary.hpp"
#include "dyzeta/errors.hpp"

namespace dyzeta {

namespace {

std::int64_t bitlen(std::uint64_t v) { return static_cast<std::int64_t>(std::bit_width(v)); }

std::int64_t ceil_log2_int(std::uint64_t v) { return v <= 1 ? 0 : bitlen(v - 1); }

std::uint64_t mpz_bits(const mpz_class& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

// Interval [lo, hi] certainly containing s, from one query at precision m.
struct SInterval {
  Dyadic lo;
  Dyadic hi;
};

SInterval s_interval(const ApproxReal& s, std::int64_t m, EvalContext& ctx) {
  if (s.exact()) return {*s.exact(), *s.exact()};
  Dyadic v = ctx.query(s, m);
  Dyadic eps = Dyadic::pow2(-m);
  return {v - eps, v + eps};
}

// s >= 1 + log2(1 + 2^-p), i.e. (s - 1) ln 2 >= ln(1 + 2^-p), certified.
bool separated_from_pole(const Dyadic& lo, std::int64_t p) {
  if (lo <= Dyadic(1)) return false;
  std::int64_t w = 2 * p + 24;
  Enclosure ln2 = ln2_enclosure(w);
  Enclosure lg = log_exact(Dyadic(1) + Dyadic::pow2(-p), w);
  return (lo - Dyadic(1)) * ln2.lower() >= lg.upper();
}

std::int64_t range_precision(std::int64_t p) { return 2 * p + 16; }

std::int64_t ceil_to_int(const Dyadic& x) {
  Dyadic t = dy_round(x, 0);
  if (t < x) t = t + Dyadic(1);
  auto v = t.to_long();
  if (!v) throw ResourceError("s is too large");
  return *v;
}

// Precision at which pow1p_real reads s when evaluating (q+1)^-s at n4.
std::int64_t f_input_precision(std::int64_t n4, std::int64_t q, const PrecisionPlan& pl) {
  return pow1p_input_precision(n4, bitlen(static_cast<std::uint64_t>(q + 1)), pl.s_bound);
}

std::int64_t v_pow_precision(std::int64_t n1, std::int64_t p) {
  return lf_eval(schedules::inv(), {n1, p + 1});
}

Dyadic f_eval_neg(std::int64_t q, const ApproxReal& neg_s, std::int64_t n4, const PrecisionPlan& pl,
                  EvalContext& ctx) {
  if (q == 0) return Dyadic(1);
  ApproxReal base = ApproxReal::constant(Dyadic(static_cast<long>(q)));
  return pow1p_real(base, neg_s, n4, bitlen(static_cast<std::uint64_t>(q + 1)), pl.s_bound, ctx);
}

bool use_integer_path(const ApproxReal& s, const EvalOptions& opts) {
  return opts.integer_fast_path && opts.binomial == BinomialMode::running && s.exact() &&
         s.exact()->is_integer() && s.exact()->to_long();
}

Dyadic h_eval_impl(std::int64_t k, const ApproxReal& s, const ApproxReal& neg_s,
                   const PrecisionPlan& pl, EvalContext& ctx, const EvalOptions& opts) {
  const std::int64_t n4 = pl.n4(k);
  ctx.note_precision(n4);
  const bool timed = ctx.caps().timeout.has_value();
  Dyadic acc;

  if (use_integer_path(s, opts)) {
    // C(k, q) / (q+1)^s truncated once: at most one ulp per term.
    const unsigned long e = static_cast<unsigned long>(*s.exact()->to_long());
    mpz_class binom = 1;
    mpz_class sum = 0;
    mpz_class num;
    mpz_class den;
    for (std::int64_t q = 0; q <= k; ++q) {
      mpz_mul_2exp(num.get_mpz_t(), binom.get_mpz_t(), static_cast<mp_bitcnt_t>(n4));
      mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(q + 1), e);
      mpz_tdiv_q(num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
      if (q % 2 == 0) {
        sum += num;
      } else {
        sum -= num;
      }
      ctx.note_live_bits(mpz_bits(binom) + mpz_bits(sum) + mpz_bits(num));
      binom *= static_cast<unsigned long>(k - q);
      mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), static_cast<unsigned long>(q + 1));
      if (timed) ctx.check_timeout();
    }
    dy_count_mul(2 * static_cast<std::uint64_t>(k + 1));
    acc = Dyadic(std::move(sum), -n4);
  } else if (opts.binomial == BinomialMode::running) {
    mpz_class binom = 1;
    for (std::int64_t q = 0; q <= k; ++q) {
      Dyadic f = f_eval_neg(q, neg_s, n4, pl, ctx);
      Dyadic term = Dyadic(binom, 0) * f;
      acc = q % 2 == 0 ? acc + term : acc - term;
      ctx.note_live_bits(mpz_bits(binom) + acc.bits() + term.bits());
      binom *= static_cast<unsigned long>(k - q);
      mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), static_cast<unsigned long>(q + 1));
      if (timed) ctx.check_timeout();
    }
  } else {
    // C(k, q) rebuilt for every q from the truncated reciprocal product; the
    // product with f follows the multiplication schedule with |C| <= 2^k.
    const std::int64_t w = lf_eval(schedules::mul(), {n4, k});
    ctx.note_precision(w);
    for (std::int64_t q = 0; q <= k; ++q) {
      Enclosure g{g_eval(k, q, w), Dyadic::pow2(-w)};
      Enclosure f{f_eval_neg(q, neg_s, w, pl, ctx), Dyadic::pow2(-w)};
      Enclosure term = mul_enclosures(g, f, n4, k);
      if (term.rad > Dyadic::pow2(-n4)) throw ContractError("h term schedule fell short");
      acc = q % 2 == 0 ? acc + term.mid : acc - term.mid;
      ctx.note_live_bits(acc.bits() + term.mid.bits() + g.mid.bits());
      if (timed) ctx.check_timeout();
    }
  }
  // Inner error <= (k + 1) 2^k 2^-n4 <= 2^-(n3 + 1); truncation adds less
  // than 2^-(n3 + 1).
  return dy_round(acc, pl.n3 + 1);
}

} // namespace

// ------------------------------------------------------------ plan

std::int64_t PrecisionPlan::n4(std::int64_t k) const {
  return n3 + constants.c3 * k + ceil_log2_int(static_cast<std::uint64_t>(k + 2)) + constants.c4;
}

PrecisionPlan plan(std::int64_t n, std::int64_t p) {
  if (n < 0) throw ContractError("target precision must be nonnegative");
  if (p < 1) throw ContractError("range parameter p must be at least 1");
  PrecisionPlan pl;
  pl.n = n;
  pl.p = p;
  pl.n1 = n + pl.constants.c2(p);
  pl.n2 = pl.n1 + 1;
  pl.n3 = pl.n2 + 1;
  pl.iota = 4 * p + 2 * pl.n2 + pl.constants.c6;
  pl.s_bound = p < 62 ? std::int64_t{1} << p : std::int64_t{1} << 62;
  pl.m = 0;
  return pl;
}

std::int64_t choose_p(const ApproxReal& s, EvalContext& ctx, std::int64_t p_max) {
  for (std::int64_t p = 1; p <= p_max; ++p) {
    SInterval iv = s_interval(s, range_precision(p), ctx);
    if (iv.hi <= Dyadic(1)) {
      throw DomainError("real mode requires s > 1; s = " + s.label() +
                        " is not above the pole at s = 1");
    }
    if (iv.hi > Dyadic::pow2(p)) continue;
    if (separated_from_pole(iv.lo, p)) return p;
  }
  throw DomainError("s = " + s.label() + " cannot be separated from the pole at s = 1");
}

PrecisionPlan plan_for(const ApproxReal& s, std::int64_t n, EvalContext& ctx,
                       std::optional<std::int64_t> p_override) {
  std::int64_t p;
  if (p_override) {
    p = *p_override;
    if (p < 1) throw ContractError("range parameter p must be at least 1");
    SInterval iv = s_interval(s, range_precision(p), ctx);
    if (iv.hi > Dyadic::pow2(p) || !separated_from_pole(iv.lo, p)) {
      throw DomainError("s = " + s.label() + " is not certifiably in the range of p = " +
                        std::to_string(p));
    }
  } else {
    p = choose_p(s, ctx);
  }
  PrecisionPlan pl = plan(n, p);
  pl.s_bound = std::min(pl.s_bound, ceil_to_int(s_interval(s, range_precision(p), ctx).hi));
  if (!s.exact()) {
    std::int64_t last = pl.iota - 1;
    std::int64_t m_v = pow1p_input_precision(v_pow_precision(pl.n1, p), 2, pl.s_bound);
    std::int64_t m_f = last > 0 ? f_input_precision(pl.n4(last), last, pl) : 0;
    pl.m = std::max(m_v, m_f);
  }
  return pl;
}

// ------------------------------------------------------------ terms

Dyadic v_eval(const ApproxReal& s, std::int64_t n1, std::int64_t p, EvalContext& ctx) {
  // 2^(1-s) <= 2^-lambda = 1 / (1 + 2^-p), hence 1 - 2^(1-s) >= 2^-(p+1).
  SInterval iv = s_interval(s, range_precision(p), ctx);
  const std::int64_t bound = ceil_to_int(iv.hi);
  ApproxReal one = ApproxReal::constant(Dyadic(1));
  ApproxReal h = one_minus(s);
  ApproxReal denom = ApproxReal::from_function(
      [one, h, bound](std::int64_t n, EvalContext& c) {
        return Dyadic(1) - pow1p_real(one, h, n, 2, bound, c);
      },
      0, "1-2^(1-s)");
  return inv_to_prec(denom, n1, p + 1, ctx);
}

Dyadic f_eval(std::int64_t q, const ApproxReal& s, std::int64_t n4, std::int64_t p, EvalContext& ctx) {
  if (q < 0) throw ContractError("f_eval: q must be nonnegative");
  PrecisionPlan pl = plan(0, p);
  pl.s_bound = std::min(pl.s_bound, ceil_to_int(s_interval(s, range_precision(p), ctx).hi));
  return f_eval_neg(q, negate(s), n4, pl, ctx);
}

Dyadic binom_recip(std::int64_t k, std::int64_t q, std::int64_t n_omega,
                   std::vector<SeriesTermState>* trace) {
  if (q < 0 || q > k) throw ContractError("binom_recip requires 0 <= q <= k");
  if (q == 0) return Dyadic(1);
  const std::int64_t w = std::max(3 * q, n_omega + bitlen(static_cast<std::uint64_t>(q)) + 1);
  mpz_class prod = mpz_class(1) << static_cast<mp_bitcnt_t>(w);
  for (std::int64_t tau = 1; tau <= q; ++tau) {
    // prod <- floor(prod * b_tau); one truncation per step and b_tau <= 1, so
    // the error after tau steps is at most tau ulps.
    prod *= static_cast<unsigned long>(q - tau + 1);
    mpz_fdiv_q_ui(prod.get_mpz_t(), prod.get_mpz_t(), static_cast<unsigned long>(k - tau + 1));
    if (trace) {
      trace->push_back({k, q, tau, bitlen(static_cast<std::uint64_t>(tau)) - w, Dyadic(prod, -w)});
    }
  }
  dy_count_mul(static_cast<std::uint64_t>(q));
  return dy_round(Dyadic(prod, -w), n_omega + 1);
}

Dyadic g_eval(std::int64_t k, std::int64_t q, std::int64_t n4) {
  if (q < 0 || q > k) throw ContractError("g_eval requires 0 <= q <= k");
  if (q == 0 || q == k) return Dyadic(1);
  // 1 / C(k, q) >= 2^-k.
  EvalContext local;
  ApproxReal recip = ApproxReal::from_function(
      [k, q](std::int64_t n, EvalContext&) { return binom_recip(k, q, n); }, 0, "1/C(k,q)");
  return inv_to_prec(recip, n4, k, local);
}

Dyadic h_eval(std::int64_t k, const ApproxReal& s, const PrecisionPlan& plan, EvalContext& ctx,
              const EvalOptions& opts) {
  if (k < 0) throw ContractError("h_eval: k must be nonnegative");
  return h_eval_impl(k, s, negate(s), plan, ctx, opts);
}

Dyadic u_eval(const ApproxReal& s, const PrecisionPlan& plan, EvalContext& ctx, const EvalOptions& opts) {
  ApproxReal neg_s = negate(s);
  Dyadic acc;
  for (std::int64_t k = 0; k < plan.iota; ++k) {
    ctx.note_terms(1);
    Dyadic h = h_eval_impl(k, s, neg_s, plan, ctx, opts);
    acc = acc + dy_shift(h, -(k + 1));
    ctx.note_live_bits(acc.bits() + h.bits());
  }
  // h errors sum to <= 2^-n3, the tail beyond iota to <= 2^-iota <= 2^-n3,
  // and the final truncation adds < 2^-(n1 + 1).
  return dy_round(acc, plan.n1 + 1);
}

// ------------------------------------------------------------ zeta

Ball zeta_real(const ApproxReal& s, std::int64_t n, EvalContext& ctx, const EvalOptions& opts,
               PrecisionPlan* plan_out) {
  if (n < 0) throw ContractError("target precision must be nonnegative");
  Ball out;
  meter_scope(ctx, [&] {
    std::int64_t target = n;
    for (int attempt = 0; attempt < 2; ++attempt) {
      PrecisionPlan pl = plan_for(s, target, ctx, opts.p_override);
      if (plan_out) *plan_out = pl;
      if (pl.m > 0) {
        ctx.note_precision(pl.m);
        ctx.query(s, pl.m);
      }
      Dyadic v = v_eval(s, pl.n1, pl.p, ctx);
      Dyadic u = u_eval(s, pl, ctx, opts);
      Dyadic eps = Dyadic::pow2(-pl.n1);
      Enclosure z = mul_enclosures({v, eps}, {u, eps}, n, 2 * pl.p);
      if (z.rad <= Dyadic::pow2(-n)) {
        out = z.to_ball();
        return;
      }
      ++ctx.stats().schedule_retries;
      target = 2 * target + 8;
    }
    throw ContractError("zeta_real: certified radius exceeds 2^-" + std::to_string(n));
  });
  return out;
}

Ball zeta_real(const ApproxReal& s, std::int64_t n) {
  EvalContext ctx;
  return zeta_real(s, n, ctx);
}

} // namespace dyzeta
