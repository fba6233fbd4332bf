#include "dyzeta/reference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include <mpfr.h>

#include "dyzeta/errors.hpp"

namespace dyzeta {

namespace {

constexpr std::int64_t kMaxTerms = std::int64_t{1} << 20;
constexpr mpfr_prec_t kBoundPrec = 64;

// RAII holder for one MPFR variable.
class Fr {
public:
  explicit Fr(mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  ~Fr() { mpfr_clear(v_); }
  Fr(const Fr&) = delete;
  Fr& operator=(const Fr&) = delete;

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

private:
  mpfr_t v_;
};

void set_dyadic(Fr& x, const Dyadic& d) {
  mpfr_prec_t need = static_cast<mpfr_prec_t>(std::max<std::size_t>(d.bits(), 2));
  if (mpfr_get_prec(x.get()) < need) mpfr_set_prec(x.get(), need);
  mpfr_set_z_2exp(x.get(), d.mantissa().get_mpz_t(), static_cast<mpfr_exp_t>(d.exponent()), MPFR_RNDN);
}

Dyadic to_dyadic(const Fr& x) {
  mpz_class z;
  mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), x.get());
  return Dyadic(std::move(z), static_cast<std::int64_t>(e));
}

// Rounding-error bookkeeping, all rounded upward. With round-to-nearest at
// precision W every correctly rounded operation has relative error at most
// u = 2^(1-W), which is what the factors below count in.
class ErrorBound {
public:
  explicit ErrorBound(mpfr_prec_t w) : unit_(kBoundPrec), total_(kBoundPrec), tmp_(kBoundPrec) {
    mpfr_set_ui_2exp(unit_.get(), 1, 1 - w, MPFR_RNDU);
  }

  /// Adds factor * u * |x|.
  void add_rel(const Fr& x, double factor) {
    mpfr_abs(tmp_.get(), x.get(), MPFR_RNDU);
    add_scaled(factor);
  }

  /// Adds factor * u * (|a| + |b|).
  void add_rel(const Fr& a, const Fr& b, double factor) {
    Fr t2(kBoundPrec);
    mpfr_abs(tmp_.get(), a.get(), MPFR_RNDU);
    mpfr_abs(t2.get(), b.get(), MPFR_RNDU);
    mpfr_add(tmp_.get(), tmp_.get(), t2.get(), MPFR_RNDU);
    add_scaled(factor);
  }

  /// Adds an absolute bound 2^log2_bound.
  void add_pow2(double log2_bound) {
    auto e = static_cast<long>(std::ceil(log2_bound));
    mpfr_set_ui_2exp(tmp_.get(), 1, e, MPFR_RNDU);
    mpfr_add(total_.get(), total_.get(), tmp_.get(), MPFR_RNDU);
  }

  void add_abs(const Fr& x) {
    mpfr_abs(tmp_.get(), x.get(), MPFR_RNDU);
    mpfr_add(total_.get(), total_.get(), tmp_.get(), MPFR_RNDU);
  }

  /// Smallest e with total <= 2^e.
  std::int64_t exponent() const {
    if (mpfr_zero_p(total_.get())) return Ball::kExact;
    return static_cast<std::int64_t>(mpfr_get_exp(total_.get()));
  }

private:
  void add_scaled(double factor) {
    mpfr_mul(tmp_.get(), tmp_.get(), unit_.get(), MPFR_RNDU);
    mpfr_mul_d(tmp_.get(), tmp_.get(), factor, MPFR_RNDU);
    mpfr_add(total_.get(), total_.get(), tmp_.get(), MPFR_RNDU);
  }

  Fr unit_;
  Fr total_;
  Fr tmp_;
};

// Rounds the center to n + 4 fractional bits and folds that into the bound.
OracleResult finish(const Fr& re, const Fr* im, ErrorBound& err, std::int64_t n, std::string method) {
  OracleResult r;
  Dyadic c_re = dy_round(to_dyadic(re), n + 4);
  Dyadic c_im = im ? dy_round(to_dyadic(*im), n + 4) : Dyadic();
  err.add_pow2(static_cast<double>(-n - 4));
  if (im) err.add_pow2(static_cast<double>(-n - 4));
  r.value = {c_re, c_im};
  r.radius_exp = err.exponent();
  r.method = std::move(method);
  return r;
}

// log2 of the Euler-Maclaurin remainder bound
//   4 |(s)_2M| / (2 pi)^2M * N^(1 - sigma - 2M) / (sigma + 2M - 1)
// plus one bit for floating-point slack.
double em_remainder_log2(double sigma, double t, std::int64_t big_n, std::int64_t m) {
  double poch = 0;
  for (std::int64_t i = 0; i < 2 * m; ++i) {
    double x = sigma + static_cast<double>(i);
    poch += 0.5 * std::log2(x * x + t * t);
  }
  return 2 + poch - 2.0 * static_cast<double>(m) * std::log2(2 * std::numbers::pi) +
         (1 - sigma - 2.0 * static_cast<double>(m)) * std::log2(static_cast<double>(big_n)) -
         std::log2(sigma + 2.0 * static_cast<double>(m) - 1) + 1;
}

struct ComplexFr {
  explicit ComplexFr(mpfr_prec_t w) : re(w), im(w) {}
  Fr re;
  Fr im;
};

// x <- x * (a + b i)
void cmul(ComplexFr& x, const Fr& a, const Fr& b, mpfr_prec_t w) {
  Fr t1(w), t2(w), t3(w);
  mpfr_mul(t1.get(), x.re.get(), a.get(), MPFR_RNDN);
  mpfr_mul(t2.get(), x.im.get(), b.get(), MPFR_RNDN);
  mpfr_mul(t3.get(), x.re.get(), b.get(), MPFR_RNDN);
  mpfr_sub(x.re.get(), t1.get(), t2.get(), MPFR_RNDN);
  mpfr_mul(t1.get(), x.im.get(), a.get(), MPFR_RNDN);
  mpfr_add(x.im.get(), t3.get(), t1.get(), MPFR_RNDN);
}

// out <- k^-s for integer k >= 1; returns the relative-error factor (in u).
double power_neg(ComplexFr& out, unsigned long k, const Fr& neg_sigma, const Fr& t, bool has_t,
                 mpfr_prec_t w) {
  mpfr_ui_pow(out.re.get(), k, neg_sigma.get(), MPFR_RNDN);
  if (!has_t) {
    mpfr_set_zero(out.im.get(), 1);
    return 1;
  }
  Fr theta(w), s(w), c(w);
  mpfr_log_ui(theta.get(), k, MPFR_RNDN);
  double lnk = mpfr_get_d(theta.get(), MPFR_RNDU);
  mpfr_mul(theta.get(), theta.get(), t.get(), MPFR_RNDN);
  mpfr_sin_cos(s.get(), c.get(), theta.get(), MPFR_RNDN);
  mpfr_mul(out.im.get(), out.re.get(), s.get(), MPFR_RNDN);
  mpfr_neg(out.im.get(), out.im.get(), MPFR_RNDN);
  mpfr_mul(out.re.get(), out.re.get(), c.get(), MPFR_RNDN);
  // angle error <= 2 |t| ln k u + u; each component then errs by
  // |k^-s| (angle error + 3u).
  return 2 * (3 * std::fabs(mpfr_get_d(t.get(), MPFR_RNDU)) * lnk + 8);
}

void accumulate(ComplexFr& sum, const ComplexFr& term, ErrorBound& err, double term_factor) {
  err.add_rel(term.re, term.im, term_factor);
  mpfr_add(sum.re.get(), sum.re.get(), term.re.get(), MPFR_RNDN);
  mpfr_add(sum.im.get(), sum.im.get(), term.im.get(), MPFR_RNDN);
  err.add_rel(sum.re, sum.im, 1);
}

OracleResult euler_maclaurin(const Dyadic& sigma, const Dyadic& t, std::int64_t n, std::string method) {
  if (sigma.sign() <= 0) throw DomainError("Euler-Maclaurin oracle requires sigma > 0");
  if (sigma == Dyadic(1) && t.is_zero()) throw DomainError("zeta has a pole at s = 1");
  const double sd = sigma.to_double();
  const double td = std::fabs(t.to_double());
  const bool has_t = !t.is_zero();

  std::int64_t big_n = std::max<std::int64_t>(16, n / 2 + 32 + static_cast<std::int64_t>(std::ceil(4 * td)));
  std::int64_t m = 0;
  for (int widen = 0; widen < 8 && m == 0; ++widen, big_n *= 2) {
    if (big_n > kMaxTerms) throw ResourceError("Euler-Maclaurin oracle: term cap exceeded");
    double best = INFINITY;
    for (std::int64_t cand = 1; cand <= 4000; ++cand) {
      double b = em_remainder_log2(sd, td, big_n, cand);
      if (b <= static_cast<double>(-n - 3)) {
        m = cand;
        break;
      }
      if (b > best + 8) break; // past the minimum
      best = std::min(best, b);
    }
    if (m == 0) continue;
    const double remainder = em_remainder_log2(sd, td, big_n, m);

    for (mpfr_prec_t w = static_cast<mpfr_prec_t>(n + 64 + 4 * std::bit_width(static_cast<std::uint64_t>(big_n)));
         w < 64 * (n + 256); w = 2 * w) {
      ErrorBound err(w);
      err.add_pow2(remainder);
      Fr neg_sigma(w), tt(w), sig(w);
      set_dyadic(sig, sigma);
      set_dyadic(neg_sigma, -sigma);
      set_dyadic(tt, t);
      ComplexFr sum(w), term(w);

      for (std::int64_t k = 1; k < big_n; ++k) {
        double f = power_neg(term, static_cast<unsigned long>(k), neg_sigma, tt, has_t, w);
        accumulate(sum, term, err, f);
      }
      ComplexFr npow(w); // N^-s
      const double f_n = power_neg(npow, static_cast<unsigned long>(big_n), neg_sigma, tt, has_t, w);

      // N^-s / 2
      mpfr_div_2ui(term.re.get(), npow.re.get(), 1, MPFR_RNDN);
      mpfr_div_2ui(term.im.get(), npow.im.get(), 1, MPFR_RNDN);
      accumulate(sum, term, err, f_n);

      // N^(1-s) / (s - 1) = N N^-s conj(s - 1) / |s - 1|^2
      {
        Fr a(w), b(w), den(w), tmp(w);
        mpfr_sub_ui(a.get(), sig.get(), 1, MPFR_RNDN);
        mpfr_set(b.get(), tt.get(), MPFR_RNDN);
        mpfr_sqr(den.get(), a.get(), MPFR_RNDN);
        mpfr_sqr(tmp.get(), b.get(), MPFR_RNDN);
        mpfr_add(den.get(), den.get(), tmp.get(), MPFR_RNDN);
        mpfr_neg(b.get(), b.get(), MPFR_RNDN);
        mpfr_set(term.re.get(), npow.re.get(), MPFR_RNDN);
        mpfr_set(term.im.get(), npow.im.get(), MPFR_RNDN);
        cmul(term, a, b, w);
        mpfr_mul_ui(term.re.get(), term.re.get(), static_cast<unsigned long>(big_n), MPFR_RNDN);
        mpfr_mul_ui(term.im.get(), term.im.get(), static_cast<unsigned long>(big_n), MPFR_RNDN);
        mpfr_div(term.re.get(), term.re.get(), den.get(), MPFR_RNDN);
        mpfr_div(term.im.get(), term.im.get(), den.get(), MPFR_RNDN);
        // |s - 1| may be small: the relative error of conj(s-1)/|s-1|^2 is
        // still a few u because both are formed from exact inputs.
        accumulate(sum, term, err, f_n + 24);
      }

      // Corrections B_2j / (2j)! (s)_(2j-1) N^(-s-2j+1).
      {
        ComplexFr x(w);
        Fr a(w), b(w), n2(w), coef(w);
        mpfr_set_ui(n2.get(), static_cast<unsigned long>(big_n), MPFR_RNDN);
        mpfr_sqr(n2.get(), n2.get(), MPFR_RNDN); // exact: N^2 fits
        // x = s N^-s / N
        mpfr_set(x.re.get(), npow.re.get(), MPFR_RNDN);
        mpfr_set(x.im.get(), npow.im.get(), MPFR_RNDN);
        mpfr_div_ui(x.re.get(), x.re.get(), static_cast<unsigned long>(big_n), MPFR_RNDN);
        mpfr_div_ui(x.im.get(), x.im.get(), static_cast<unsigned long>(big_n), MPFR_RNDN);
        cmul(x, sig, tt, w);
        double rel = f_n + 12;
        mpz_class fact = 1;
        for (std::int64_t j = 1; j <= m; ++j) {
          if (j > 1) {
            // x *= (s + 2j - 3)(s + 2j - 2) / N^2
            mpfr_add_ui(a.get(), sig.get(), static_cast<unsigned long>(2 * j - 3), MPFR_RNDN);
            cmul(x, a, tt, w);
            mpfr_add_ui(a.get(), sig.get(), static_cast<unsigned long>(2 * j - 2), MPFR_RNDN);
            cmul(x, a, tt, w);
            mpfr_div(x.re.get(), x.re.get(), n2.get(), MPFR_RNDN);
            mpfr_div(x.im.get(), x.im.get(), n2.get(), MPFR_RNDN);
            rel += 16;
          }
          fact *= static_cast<unsigned long>((2 * j - 1) * (2 * j));
          mpq_class c = bernoulli(2 * j) / mpq_class(fact);
          mpfr_set_q(coef.get(), c.get_mpq_t(), MPFR_RNDN);
          mpfr_mul(term.re.get(), x.re.get(), coef.get(), MPFR_RNDN);
          mpfr_mul(term.im.get(), x.im.get(), coef.get(), MPFR_RNDN);
          accumulate(sum, term, err, rel + 4);
        }
      }
      OracleResult r = finish(sum.re, has_t ? &sum.im : nullptr, err, n, method);
      if (r.radius_exp <= -n) return r;
    }
  }
  throw ResourceError("Euler-Maclaurin oracle could not reach 2^-" + std::to_string(n));
}

std::mutex g_bernoulli_mu;
std::vector<mpq_class> g_bernoulli{mpq_class(1)};

} // namespace

mpq_class bernoulli(std::int64_t m) {
  if (m < 0) throw ContractError("Bernoulli index must be nonnegative");
  if (m == 1) return mpq_class(-1, 2);
  if (m % 2 == 1) return mpq_class(0);
  std::lock_guard<std::mutex> lock(g_bernoulli_mu);
  // g_bernoulli[i] = B_i for all i, odd ones included.
  auto& b = g_bernoulli;
  while (static_cast<std::int64_t>(b.size()) <= m) {
    const auto next = static_cast<std::int64_t>(b.size());
    // sum_{j=0..next} C(next+1, j) B_j = 0
    mpq_class acc = 0;
    mpz_class binom = 1; // C(next+1, j)
    for (std::int64_t j = 0; j < next; ++j) {
      if (j < 2 || j % 2 == 0) acc += mpq_class(binom) * b[static_cast<std::size_t>(j)];
      binom *= static_cast<unsigned long>(next + 1 - j);
      binom /= static_cast<unsigned long>(j + 1);
    }
    mpq_class bn = next == 1 ? mpq_class(-1, 2) : (next % 2 == 1 ? mpq_class(0) : mpq_class(-acc / (next + 1)));
    bn.canonicalize();
    b.push_back(bn);
  }
  return b[static_cast<std::size_t>(m)];
}

mpz_class oracle_binom_exact(std::int64_t k, std::int64_t q) {
  if (q < 0 || q > k) throw ContractError("binomial requires 0 <= q <= k");
  if (k > kMaxTerms) throw ResourceError("binomial oracle cap exceeded");
  mpz_class r = 1;
  for (std::int64_t i = 1; i <= q; ++i) {
    r *= static_cast<unsigned long>(k - q + i);
    mpz_divexact_ui(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(i));
  }
  return r;
}

OracleResult oracle_zeta_dirichlet(const Dyadic& s, std::int64_t n) {
  if (s < Dyadic(1) + Dyadic::pow2(-8)) throw DomainError("Dirichlet oracle requires s >= 1 + 2^-8");
  const double sd = s.to_double();
  const double k_log2 = static_cast<double>(n + 3) / sd;
  if (k_log2 > 20) return euler_maclaurin(s, Dyadic(), n, "dirichlet+euler-maclaurin-tail");

  const auto big_k = static_cast<unsigned long>(std::ceil(std::exp2(k_log2)));
  // sum_{k <= K} k^-s, then the tail bracketed by
  //   (K+1)^(1-s)/(s-1) <= tail <= K^(1-s)/(s-1),
  // a bracket of width <= K^-s <= 2^-(n+3).
  for (mpfr_prec_t w = static_cast<mpfr_prec_t>(n + 48 + 2 * std::bit_width(big_k)); w < 64 * (n + 256);
       w *= 2) {
    ErrorBound err(w);
    Fr neg_s(w), sum(w), term(w), s1(w), lo(w), hi(w);
    set_dyadic(neg_s, -s);
    for (unsigned long k = 1; k <= big_k; ++k) {
      mpfr_ui_pow(term.get(), k, neg_s.get(), MPFR_RNDN);
      err.add_rel(term, 1);
      mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
      err.add_rel(sum, 1);
    }
    set_dyadic(s1, s);
    mpfr_sub_ui(s1.get(), s1.get(), 1, MPFR_RNDN);
    // hi = K K^-s / (s-1), lo = (K+1) (K+1)^-s / (s-1)
    mpfr_ui_pow(hi.get(), big_k, neg_s.get(), MPFR_RNDN);
    mpfr_mul_ui(hi.get(), hi.get(), big_k, MPFR_RNDN);
    mpfr_div(hi.get(), hi.get(), s1.get(), MPFR_RNDN);
    mpfr_ui_pow(lo.get(), big_k + 1, neg_s.get(), MPFR_RNDN);
    mpfr_mul_ui(lo.get(), lo.get(), big_k + 1, MPFR_RNDN);
    mpfr_div(lo.get(), lo.get(), s1.get(), MPFR_RNDN);
    err.add_rel(hi, 8);
    err.add_rel(lo, 8);
    // center of the bracket; half its width
    mpfr_add(term.get(), hi.get(), lo.get(), MPFR_RNDN);
    mpfr_div_2ui(term.get(), term.get(), 1, MPFR_RNDN);
    err.add_rel(term, 1);
    mpfr_sub(lo.get(), hi.get(), lo.get(), MPFR_RNDU);
    mpfr_div_2ui(lo.get(), lo.get(), 1, MPFR_RNDU);
    err.add_abs(lo);
    err.add_rel(hi, 4);
    mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    err.add_rel(sum, 1);
    OracleResult r = finish(sum, nullptr, err, n, "dirichlet");
    if (r.radius_exp <= -n) return r;
  }
  throw ResourceError("Dirichlet oracle could not reach 2^-" + std::to_string(n));
}

OracleResult oracle_eta_alternating(const Dyadic& s, std::int64_t n) {
  if (s < Dyadic::pow2(-8)) throw DomainError("eta oracle requires s >= 2^-8");
  // N terms leave at most 2 / (3 + sqrt 8)^N <= 2 / d_N, log2(3 + sqrt 8) > 2.543.
  const auto big_n = static_cast<std::int64_t>(std::ceil(static_cast<double>(n + 3) / 2.543)) + 1;
  if (big_n > kMaxTerms) throw ResourceError("eta oracle: term cap exceeded");
  // d_N = T_N(3)
  mpz_class d_prev = 1;
  mpz_class d = 3;
  for (std::int64_t i = 1; i < big_n; ++i) {
    mpz_class next = 6 * d - d_prev;
    d_prev = d;
    d = next;
  }
  const auto d_bits = static_cast<mpfr_prec_t>(mpz_sizeinbase(d.get_mpz_t(), 2));
  for (mpfr_prec_t w = static_cast<mpfr_prec_t>(n + d_bits + 48); w < 64 * (n + d_bits + 256); w *= 2) {
    ErrorBound err(w);
    Fr neg_s(w), sum(w), term(w), cf(w), dd(w);
    set_dyadic(neg_s, -s);
    mpz_class b = -1;
    mpz_class c = -d;
    ErrorBound sum_err(w);
    for (std::int64_t k = 0; k < big_n; ++k) {
      c = b - c;
      mpfr_ui_pow(term.get(), static_cast<unsigned long>(k + 1), neg_s.get(), MPFR_RNDN);
      mpfr_set_z(cf.get(), c.get_mpz_t(), MPFR_RNDN);
      mpfr_mul(term.get(), term.get(), cf.get(), MPFR_RNDN);
      sum_err.add_rel(term, 4);
      mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
      sum_err.add_rel(sum, 1);
      // b <- b (k + N)(k - N) / ((k + 1/2)(k + 1)), an exact integer
      b *= 2 * (k + big_n) * (k - big_n);
      mpz_class den = (2 * k + 1) * (k + 1);
      if (!mpz_divisible_p(b.get_mpz_t(), den.get_mpz_t())) {
        throw ContractError("eta oracle: acceleration weight is not integral");
      }
      mpz_divexact(b.get_mpz_t(), b.get_mpz_t(), den.get_mpz_t());
    }
    mpfr_set_z(dd.get(), d.get_mpz_t(), MPFR_RNDN);
    mpfr_div(sum.get(), sum.get(), dd.get(), MPFR_RNDN);
    // The summation error scales down with the division by d.
    {
      Fr e(kBoundPrec), inv_d(kBoundPrec);
      mpfr_set_z(inv_d.get(), d.get_mpz_t(), MPFR_RNDD);
      mpfr_ui_div(inv_d.get(), 1, inv_d.get(), MPFR_RNDU);
      mpfr_set_ui_2exp(e.get(), 1, sum_err.exponent(), MPFR_RNDU);
      mpfr_mul(e.get(), e.get(), inv_d.get(), MPFR_RNDU);
      err.add_abs(e);
      mpfr_mul_2ui(inv_d.get(), inv_d.get(), 1, MPFR_RNDU);
      err.add_abs(inv_d); // acceleration remainder 2 / d
    }
    err.add_rel(sum, 2);
    OracleResult r = finish(sum, nullptr, err, n, "eta-accelerated");
    if (r.radius_exp <= -n) return r;
  }
  throw ResourceError("eta oracle could not reach 2^-" + std::to_string(n));
}

OracleResult eta_partial_sum(const Dyadic& s, std::int64_t terms, std::int64_t n) {
  if (terms < 0 || terms > kMaxTerms) throw ResourceError("partial sum: term cap exceeded");
  for (mpfr_prec_t w = static_cast<mpfr_prec_t>(n + 48 + std::bit_width(static_cast<std::uint64_t>(terms)));
       w < 64 * (n + 256); w *= 2) {
    ErrorBound err(w);
    Fr neg_s(w), sum(w), term(w);
    set_dyadic(neg_s, -s);
    for (std::int64_t k = 1; k <= terms; ++k) {
      mpfr_ui_pow(term.get(), static_cast<unsigned long>(k), neg_s.get(), MPFR_RNDN);
      err.add_rel(term, 1);
      if (k % 2 == 1) {
        mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
      } else {
        mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
      }
      err.add_rel(sum, 1);
    }
    OracleResult r = finish(sum, nullptr, err, n, "eta-partial-sum");
    if (r.radius_exp <= -n) return r;
  }
  throw ResourceError("partial sum could not reach 2^-" + std::to_string(n));
}

OracleResult oracle_zeta_euler_maclaurin(const Dyadic& sigma, const Dyadic& t, std::int64_t n) {
  return euler_maclaurin(sigma, t, n, "euler-maclaurin");
}

} // namespace dyzeta
