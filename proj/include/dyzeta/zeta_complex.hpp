#pragma once

#include <cstdint>

#include "dyzeta/approx.hpp"
#include "dyzeta/elementary.hpp"
#include "dyzeta/zeta_real.hpp"

namespace dyzeta {

// zeta(sigma + i t) for sigma > 0 off the exceptional set
// s = 1 + 2 pi i k / ln 2, through the same series as the real case with
// complex accumulators.

struct ComplexPlan {
  /// Cascade for u: n1 .. n3, iota and n4(k); p bounds sigma in [2^-p, 2^p].
  PrecisionPlan base;
  /// |t| <= 2^p_t.
  std::int64_t p_t = 0;
  /// Magnitude parameter of the evaluation of 2^(1-s).
  std::int64_t p_guard = 1;
  /// |1 - 2^(1-s)| >= 2^guard_exp, certified.
  std::int64_t guard_exp = 0;
  /// |h(k, s)| <= 2^tail_log2 for every k.
  std::int64_t tail_log2 = 0;
  /// |u(s)| <= 2^u_mag_exp (filled in once u is known).
  std::int64_t u_mag_exp = 0;
  /// Precision of v (filled in once u is known).
  std::int64_t nv = 0;
};

/// Default separation from the exceptional set: |1 - 2^(1-s)| >= 2^-64.
inline constexpr std::int64_t kGuardBits = 64;

/// Certified e with |1 - 2^(1-s)| >= 2^e. Throws DomainError naming the
/// nearest exceptional point when the distance cannot be certified above
/// 2^-guard_bits.
std::int64_t exceptional_guard(const ComplexApprox& s, std::int64_t working_n, EvalContext& ctx,
                               std::int64_t guard_bits = kGuardBits);

/// Upper bound for log2(Gamma(sigma) / |Gamma(sigma + i t)|), which bounds
/// |h(k, s)| for sigma > 0.
std::int64_t gamma_ratio_log2_bound(double sigma_lower, double t_upper);

/// Modulus error <= 2^-nv.
ComplexDyadic v_eval_complex(const ComplexApprox& s, std::int64_t nv, const ComplexPlan& plan,
                             EvalContext& ctx);

/// (q+1)^-s with modulus error <= 2^-n4.
ComplexDyadic f_eval_complex(std::int64_t q, const ComplexApprox& s, std::int64_t n4, EvalContext& ctx);

/// Modulus error <= 2^-n3.
ComplexDyadic h_eval_complex(std::int64_t k, const ComplexApprox& s, const ComplexPlan& plan,
                             EvalContext& ctx);

/// Modulus error <= 2^-n1, given the plan's tail bound.
ComplexDyadic u_eval_complex(const ComplexApprox& s, const ComplexPlan& plan, EvalContext& ctx);

/// Certified ball of complex-modulus radius <= 2^-n around zeta(sigma + i t).
ComplexBall zeta_complex(const ApproxReal& sigma, const ApproxReal& t, std::int64_t n,
                         EvalContext& ctx, ComplexPlan* plan_out = nullptr);
ComplexBall zeta_complex(const ApproxReal& sigma, const ApproxReal& t, std::int64_t n);

} // namespace dyzeta
