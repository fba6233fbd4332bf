#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "dyzeta/approx.hpp"
#include "dyzeta/dyadic.hpp"
#include "dyzeta/elementary.hpp"

namespace dyzeta {

// Reference values computed with MPFR by textbook methods that share no code
// with the series pipeline. Every result carries its own remainder and
// rounding-error bound.

struct OracleResult {
  ComplexDyadic value; // imaginary part zero for the real oracles
  std::int64_t radius_exp = 0;
  std::string method;

  Ball real_ball() const { return {value.re, radius_exp}; }
  ComplexBall complex_ball() const { return {value, radius_exp}; }
};

/// zeta(s) for real s >= 1 + 2^-8, radius <= 2^-n. Sums k^-s directly and
/// brackets the tail between the integrals from K and K + 1; when that needs
/// more than 2^20 terms the tail is taken from Euler-Maclaurin instead.
OracleResult oracle_zeta_dirichlet(const Dyadic& s, std::int64_t n);

/// eta(s) = sum (-1)^(k+1) k^-s for real s >= 2^-8, radius <= 2^-n, using the
/// Chebyshev-weighted alternating-series acceleration with exact integer
/// weights (error <= 2 / (3 + sqrt 8)^N for N terms).
OracleResult oracle_eta_alternating(const Dyadic& s, std::int64_t n);

/// The plain partial sum sum_{k=1..terms} (-1)^(k+1) k^-s, radius <= 2^-n.
OracleResult eta_partial_sum(const Dyadic& s, std::int64_t terms, std::int64_t n);

/// zeta(sigma + i t) for sigma > 0, s != 1, by Euler-Maclaurin summation
/// with an explicit remainder bound; radius <= 2^-n.
OracleResult oracle_zeta_euler_maclaurin(const Dyadic& sigma, const Dyadic& t, std::int64_t n);

/// Exact C(k, q) by the multiplicative formula.
mpz_class oracle_binom_exact(std::int64_t k, std::int64_t q);

/// Bernoulli number B_m as an exact rational.
mpq_class bernoulli(std::int64_t m);

} // namespace dyzeta
