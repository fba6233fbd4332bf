#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dyzeta/approx.hpp"
#include "dyzeta/dyadic.hpp"

namespace dyzeta {

// zeta(s) = v(s) u(s) with
//   v(s) = 1 / (1 - 2^(1-s))
//   u(s) = sum_k 2^-(k+1) h(k, s)
//   h(k, s) = sum_{q=0..k} (-1)^q C(k, q) (q+1)^-s
// The series for u converges for every s off the exceptional set; for real
// s > 1 every h(k, s) lies in (0, 1].

/// Constants of the precision cascade, with their one-line derivations.
struct CascadeConstants {
  /// |u(s)| <= C1: for real s > 1, u(s) = eta(s) lies in (1/2, 1].
  std::int64_t c1 = 1;
  /// n1 = n + C2(p), C2(p) = 2p + 2: |v| < 2^(2p), |u| <= 1, and the product
  /// keeps two guard bits for its own truncation.
  std::int64_t c2(std::int64_t p) const { return 2 * p + 2; }
  /// n4(k) = n3 + C3 k + ceil(log2(k + 2)) + C4: the sum of k + 1 terms with
  /// binomial weights up to 2^k loses (k + 1)(2^k + 3) ulps at most.
  std::int64_t c3 = 1;
  std::int64_t c4 = 3;
  /// Tail factor of the a-priori bound C5 2^(2p) 2^(-iota/2) <= 2^(-n2-3).
  /// For real s the sharper 0 < h(k, s) <= 1 bounds the tail by 2^-iota.
  std::int64_t c5 = 2;
  /// iota = 4p + 2 n2 + C6.
  std::int64_t c6 = 8;
};

struct PrecisionPlan {
  std::int64_t n = 0;  // target: result within 2^-n
  std::int64_t p = 1;  // s in [1 + log2(1 + 2^-p), 2^p]
  std::int64_t n1 = 0; // precision of u and v
  std::int64_t n2 = 0; // precision of the truncated sum for u
  std::int64_t n3 = 0; // precision of each h(k, s)
  std::int64_t m = 0;  // largest precision at which s is queried
  std::int64_t s_bound = 2; // integer with s <= s_bound
  std::int64_t iota = 0; // number of outer terms k = 0 .. iota - 1
  CascadeConstants constants;

  /// Precision of the inner terms of h(k, s).
  std::int64_t n4(std::int64_t k) const;
};

/// Builds the cascade for target n and range parameter p.
PrecisionPlan plan(std::int64_t n, std::int64_t p);

/// Smallest p >= 1 with s certifiably in [1 + log2(1 + 2^-p), 2^p]. Throws
/// DomainError when s <= 1 or s cannot be separated from the pole.
std::int64_t choose_p(const ApproxReal& s, EvalContext& ctx, std::int64_t p_max = 64);

/// The plan for s at target n, with the input precision m filled in.
PrecisionPlan plan_for(const ApproxReal& s, std::int64_t n, EvalContext& ctx,
                       std::optional<std::int64_t> p_override = std::nullopt);

/// One step of the running product for 1 / C(k, q).
struct SeriesTermState {
  std::int64_t k = 0;
  std::int64_t q = 0;
  std::int64_t tau = 0;
  /// Error after step tau is below 2^eps_exp.
  std::int64_t eps_exp = 0;
  Dyadic partial;
};

enum class BinomialMode {
  /// Exact running binomial C(k, q), updated in place as q advances.
  running,
  /// C(k, q) recomputed for every q as the reciprocal of the truncated
  /// product 1 / C(k, q) (binom_recip followed by g_eval).
  omega_loop,
};

struct EvalOptions {
  BinomialMode binomial = BinomialMode::running;
  /// For integer s, evaluate C(k, q) / (q+1)^s by one exact integer division.
  bool integer_fast_path = true;
  std::optional<std::int64_t> p_override;
};

/// |result - 1 / (1 - 2^(1-s))| <= 2^-n1.
Dyadic v_eval(const ApproxReal& s, std::int64_t n1, std::int64_t p, EvalContext& ctx);

/// |result - (q+1)^-s| <= 2^-n4.
Dyadic f_eval(std::int64_t q, const ApproxReal& s, std::int64_t n4, std::int64_t p, EvalContext& ctx);

/// |result - 1 / C(k, q)| <= 2^-n_omega. The running product over
/// tau = 1..q of (q - tau + 1) / (k - tau + 1) is truncated after every step
/// at max(3q, n_omega + bitlen(q) + 1) fractional bits. When `trace` is
/// given, one state per step is appended.
Dyadic binom_recip(std::int64_t k, std::int64_t q, std::int64_t n_omega,
                   std::vector<SeriesTermState>* trace = nullptr);

/// |result - C(k, q)| <= 2^-n4, as the reciprocal of binom_recip.
Dyadic g_eval(std::int64_t k, std::int64_t q, std::int64_t n4);

/// |result - h(k, s)| <= 2^-n3 with n3 = plan.n3.
Dyadic h_eval(std::int64_t k, const ApproxReal& s, const PrecisionPlan& plan, EvalContext& ctx,
              const EvalOptions& opts = {});

/// |result - u(s)| <= 2^-n1 (= 2^(-n2 + 1)), summing k = 0 .. iota - 1.
Dyadic u_eval(const ApproxReal& s, const PrecisionPlan& plan, EvalContext& ctx,
              const EvalOptions& opts = {});

/// Certified ball around zeta(s) with radius_exp <= -n.
Ball zeta_real(const ApproxReal& s, std::int64_t n, EvalContext& ctx, const EvalOptions& opts = {},
               PrecisionPlan* plan_out = nullptr);
Ball zeta_real(const ApproxReal& s, std::int64_t n);

} // namespace dyzeta
