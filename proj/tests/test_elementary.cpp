#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <mpfr.h>

#include "dyzeta/elementary.hpp"
#include "dyzeta/errors.hpp"
#include "support.hpp"

using namespace dyzeta;
using testing::Fixed;

namespace {

// High-precision MPFR value of f(x) as a fixed point good to a few ulps.
template <class F>
Fixed mpfr_fixed(const Dyadic& x, std::int64_t bits, F f) {
  const mpfr_prec_t w = static_cast<mpfr_prec_t>(bits + 64);
  mpfr_t a, r;
  mpfr_init2(a, static_cast<mpfr_prec_t>(std::max<std::size_t>(x.bits(), 2)));
  mpfr_init2(r, w);
  mpfr_set_z_2exp(a, x.mantissa().get_mpz_t(), static_cast<mpfr_exp_t>(x.exponent()), MPFR_RNDN);
  f(r, a);
  mpfr_mul_2si(r, r, static_cast<long>(bits), MPFR_RNDN);
  mpz_class m;
  mpfr_get_z(m.get_mpz_t(), r, MPFR_RNDZ);
  mpfr_clear(a);
  mpfr_clear(r);
  return {m, bits, 2};
}

bool meets(const Enclosure& e, const Fixed& f, std::int64_t n) {
  return testing::encloses(e, f) && e.rad <= Dyadic::pow2(-n);
}

} // namespace

TEST_CASE("constants against independent series") {
  for (std::int64_t n : {1, 10, 64, 333, 2000}) {
    CAPTURE(n);
    Enclosure pi = pi_enclosure(n);
    Enclosure ln2 = ln2_enclosure(n);
    CHECK(meets(pi, testing::pi_fixed(n + 20), n));
    CHECK(meets(ln2, testing::ln2_fixed(n + 20), n));
  }
  // Asking for less after more still honours the lower request.
  CHECK(meets(pi_enclosure(30), testing::pi_fixed(60), 30));
}

TEST_CASE("exp of exact arguments") {
  CHECK(meets(exp_exact(Dyadic(1), 200), testing::e_fixed(240), 200));
  Enclosure e0 = exp_exact(Dyadic(), 50);
  CHECK(e0.contains(Dyadic(1)));
  // e^(ln2 approx) lands near 2
  std::mt19937_64 rng(3);
  for (int i = 0; i < 60; ++i) {
    Dyadic x = testing::random_dyadic(rng, Dyadic(-40), Dyadic(40), 30);
    std::int64_t n = 20 + static_cast<std::int64_t>(rng() % 200);
    CAPTURE(dy_to_hex(x));
    CHECK(meets(exp_exact(x, n), mpfr_fixed(x, n + 40, [](mpfr_t r, mpfr_t a) { mpfr_exp(r, a, MPFR_RNDN); }), n));
  }
}

TEST_CASE("log of exact arguments") {
  CHECK(meets(log_exact(Dyadic(2), 300), testing::ln2_fixed(330), 300));
  CHECK(log_exact(Dyadic(1), 40).contains(Dyadic()));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 60; ++i) {
    Dyadic y = testing::random_dyadic(rng, Dyadic::pow2(-20), Dyadic(1000), 40);
    if (y.is_zero()) continue;
    std::int64_t n = 20 + static_cast<std::int64_t>(rng() % 200);
    CAPTURE(dy_to_hex(y));
    CHECK(meets(log_exact(y, n), mpfr_fixed(y, n + 40, [](mpfr_t r, mpfr_t a) { mpfr_log(r, a, MPFR_RNDN); }), n));
  }
  CHECK_THROWS_AS(log_exact(Dyadic(), 10), DomainError);
  CHECK_THROWS_AS(log_exact(Dyadic(-1), 10), DomainError);
}

TEST_CASE("sin and cos of exact arguments") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 60; ++i) {
    Dyadic y = testing::random_dyadic(rng, Dyadic(-2000), Dyadic(2000), 40);
    std::int64_t n = 20 + static_cast<std::int64_t>(rng() % 200);
    CAPTURE(dy_to_hex(y));
    SinCos sc = sincos_exact(y, n);
    CHECK(meets(sc.sin, mpfr_fixed(y, n + 40, [](mpfr_t r, mpfr_t a) { mpfr_sin(r, a, MPFR_RNDN); }), n));
    CHECK(meets(sc.cos, mpfr_fixed(y, n + 40, [](mpfr_t r, mpfr_t a) { mpfr_cos(r, a, MPFR_RNDN); }), n));
  }
}

TEST_CASE("real powers") {
  // 2^(1/2) and 2^(-3/2)
  Fixed r2 = testing::sqrt2_fixed(220);
  CHECK(meets(pow_exact(Dyadic(2), Dyadic::pow2(-1), 200), r2, 200));
  Enclosure p = pow_exact(Dyadic(2), Dyadic(mpz_class(-3), -1), 200);
  Fixed quarter_r2{r2.m, r2.bits + 2, 1}; // sqrt2 / 4
  CHECK(meets(p, quarter_r2, 200));
  // integer exponents are exact to the requested precision
  CHECK(testing::encloses(pow_exact(Dyadic(3), Dyadic(-4), 100), mpq_class(1, 81)));
  CHECK(testing::encloses(pow_exact(Dyadic(mpz_class(3), -1), Dyadic(5), 100), mpq_class(243, 32)));
  CHECK_THROWS_AS(pow_exact(Dyadic(), Dyadic(2), 10), DomainError);
}

TEST_CASE("complex powers") {
  // 2^(i pi / ln 2) = e^(i pi) = -1, using exact dyadic stand-ins
  Dyadic t = dy_round(dy_div(pi_enclosure(120).mid, ln2_enclosure(120).mid, 120), 110);
  ComplexEnclosure z = pow_complex_exact(Dyadic(2), Dyadic(), t, 80);
  CHECK(z.modulus_radius() <= Dyadic::pow2(-80));
  CHECK((z.re.mid + Dyadic(1)).abs() < Dyadic::pow2(-90));
  CHECK(z.im.mid.abs() < Dyadic::pow2(-90));
  // modulus of 3^(2 + i t) is 9
  ComplexEnclosure w = pow_complex_exact(Dyadic(3), Dyadic(2), Dyadic(mpz_class(7), -2), 60);
  Dyadic mod2 = w.re.mid * w.re.mid + w.im.mid * w.im.mid;
  CHECK((mod2 - Dyadic(81)).abs() < Dyadic::pow2(-50));
}

TEST_CASE("complex enclosure arithmetic") {
  ComplexEnclosure a{Enclosure{Dyadic(1), Dyadic::pow2(-30)}, Enclosure{Dyadic(2), Dyadic::pow2(-30)}};
  ComplexEnclosure b{Enclosure{Dyadic(-3), Dyadic::pow2(-30)}, Enclosure{Dyadic(1), Dyadic::pow2(-30)}};
  ComplexEnclosure p = a * b; // (1 + 2i)(-3 + i) = -5 - 5i
  CHECK(p.re.contains(Dyadic(-5)));
  CHECK(p.im.contains(Dyadic(-5)));
  ComplexEnclosure r = reciprocal(a, 60); // 1/(1 + 2i) = (1 - 2i)/5
  CHECK(testing::encloses(r.re, mpq_class(1, 5)));
  CHECK(testing::encloses(r.im, mpq_class(-2, 5)));
  CHECK(a.modulus_lower_sq() <= Dyadic(5));
  CHECK(a.modulus_lower_sq() > Dyadic(4));
  CHECK(a.modulus_upper() >= Dyadic(3));
  CHECK(a.conj().im.mid == Dyadic(-2));
  CHECK(intersects(a, a + ComplexEnclosure::exact({Dyadic::pow2(-31), Dyadic()})));
  CHECK_THROWS_AS(reciprocal(ComplexEnclosure{Enclosure{Dyadic(), Dyadic(1)}, Enclosure{Dyadic(), Dyadic(1)}}, 10),
                  DomainError);
}

TEST_CASE("enclosure kernels propagate input radius") {
  Enclosure x{Dyadic(1), Dyadic::pow2(-40)};
  Enclosure e = exp_enclosure(x, 60);
  CHECK(testing::encloses(e, testing::e_fixed(100)));
  CHECK(e.rad >= Dyadic::pow2(-40)); // e * 2^-40 at least
  SinCos sc = sincos_enclosure(Enclosure{Dyadic(), Dyadic::pow2(-20)}, 50);
  CHECK(sc.sin.contains(Dyadic()));
  CHECK(sc.sin.rad >= Dyadic::pow2(-21));
  CHECK(sc.cos.contains(Dyadic(1)));
}

TEST_CASE("ApproxReal wrappers meet their precision contracts") {
  ApproxReal tenth = ApproxReal::decimal("0.1");
  EvalContext ctx;
  for (std::int64_t n : {0, 8, 53, 128, 500}) {
    CAPTURE(n);
    Dyadic ex = exp_real(tenth, n, 0, ctx);
    Dyadic lg = log1p_real(tenth, n, 1, ctx);
    Dyadic pw = pow1p_real(tenth, make_const(Dyadic::pow2(-1)), n, 1, 1, ctx);
    Dyadic sn = sin_real(tenth, n, 0, ctx);
    Dyadic cs = cos_real(tenth, n, 0, ctx);
    Dyadic x10 = dy_from_decimal("0.1", n + 80);
    auto ref = [&](auto fn) {
      return mpfr_fixed(x10, n + 40, fn);
    };
    CHECK(ref([](mpfr_t r, mpfr_t a) { mpfr_exp(r, a, MPFR_RNDN); }).within(ex, n));
    CHECK(ref([](mpfr_t r, mpfr_t a) { mpfr_log1p(r, a, MPFR_RNDN); }).within(lg, n));
    CHECK(ref([](mpfr_t r, mpfr_t a) {
            mpfr_add_ui(r, a, 1, MPFR_RNDN);
            mpfr_sqrt(r, r, MPFR_RNDN);
          }).within(pw, n));
    CHECK(ref([](mpfr_t r, mpfr_t a) { mpfr_sin(r, a, MPFR_RNDN); }).within(sn, n));
    CHECK(ref([](mpfr_t r, mpfr_t a) { mpfr_cos(r, a, MPFR_RNDN); }).within(cs, n));
  }
  CHECK_THROWS_AS(exp_real(make_const(Dyadic(5)), 10, 1, ctx), ContractError);
  CHECK_THROWS_AS(log1p_real(make_const(Dyadic(-1)), 10, 4, ctx), DomainError);
  CHECK_THROWS_AS(pow1p_real(tenth, make_const(Dyadic(5)), 10, 1, 2, ctx), ContractError);
}

TEST_CASE("complex wrappers") {
  EvalContext ctx;
  // e^(i pi/2) = i, with pi/2 given as a computed real
  ApproxReal half_pi = ApproxReal::from_function(
      [](std::int64_t n, EvalContext&) { return dy_round(dy_shift(pi_enclosure(n + 2).mid, -1), n + 1); }, 1,
      "pi/2");
  ComplexDyadic z = exp_complex({make_const(Dyadic()), half_pi}, 100, 1, ctx);
  CHECK(z.re.abs() <= Dyadic::pow2(-100));
  CHECK((z.im - Dyadic(1)).abs() <= Dyadic::pow2(-100));
  // (1 + 1)^(1 + 0i) = 2
  ComplexDyadic w = pow1p_complex(make_const(Dyadic(1)), {make_const(Dyadic(1)), make_const(Dyadic())}, 80, 2, ctx);
  CHECK((w.re - Dyadic(2)).abs() <= Dyadic::pow2(-80));
  CHECK(w.im.abs() <= Dyadic::pow2(-80));
}

TEST_CASE("input-precision schedules are affine in n") {
  for (std::int64_t p : {1, 2, 5}) {
    CHECK(exp_input_precision(20, p) - exp_input_precision(10, p) == 10);
    CHECK(log1p_input_precision(20, p) - log1p_input_precision(10, p) == 10);
    CHECK(pow1p_input_precision(20, p, 3) - pow1p_input_precision(10, p, 3) == 10);
    CHECK(exp_complex_input_precision(20, p) - exp_complex_input_precision(10, p) == 10);
    CHECK(pow1p_complex_input_precision(20, p) - pow1p_complex_input_precision(10, p) == 10);
  }
  CHECK(sincos_input_precision(10) == 12);
  CHECK(log1p_input_precision(10, 2) == 15);
  CHECK_THROWS_AS(exp_input_precision(10, 41), ResourceError);
  CHECK_THROWS_AS(pow1p_complex_input_precision(10, 31), ResourceError);
}
