#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dyzeta/dyadic.hpp"

namespace dyzeta {

/// center +- 2^radius_exp. kExact marks a zero radius.
struct Ball {
  static constexpr std::int64_t kExact = std::numeric_limits<std::int64_t>::min();

  Dyadic center;
  std::int64_t radius_exp = kExact;

  bool exact() const { return radius_exp == kExact; }
  /// Radius as a dyadic (zero for exact balls).
  Dyadic radius() const;
  bool contains(const Dyadic& x) const;
};

Ball ball_add(const Ball& a, const Ball& b);
Ball ball_mul(const Ball& a, const Ball& b);
/// Re-centers on the truncation of the center to n fractional bits.
Ball ball_round(const Ball& a, std::int64_t n);
bool ball_intersects(const Ball& a, const Ball& b);

/// Center plus an exact dyadic radius. This is the working form used for
/// runtime certification; Ball is what crosses the public API.
struct Enclosure {
  Dyadic mid;
  Dyadic rad; // >= 0

  static Enclosure exact(Dyadic value) { return {std::move(value), Dyadic()}; }

  Dyadic lower() const { return mid - rad; }
  Dyadic upper() const { return mid + rad; }
  Dyadic mag_upper() const { return mid.abs() + rad; }
  /// max(|mid| - rad, 0)
  Dyadic mag_lower() const;
  bool contains(const Dyadic& x) const;
  bool contains(const Enclosure& inner) const;
  Ball to_ball() const;
};

Enclosure operator+(const Enclosure& a, const Enclosure& b);
Enclosure operator-(const Enclosure& a, const Enclosure& b);
Enclosure operator-(const Enclosure& a);
Enclosure operator*(const Enclosure& a, const Enclosure& b);
Enclosure scale2(const Enclosure& a, std::int64_t e);
/// Truncates mid to n fractional bits, adding the exact truncation error to rad.
Enclosure truncate(const Enclosure& a, std::int64_t n);
/// Adds `extra` to the radius.
Enclosure widen(const Enclosure& a, const Dyadic& extra);
/// 1/a truncated at n fractional bits. Throws DomainError if the enclosure
/// touches zero.
Enclosure reciprocal(const Enclosure& a, std::int64_t n);
bool intersects(const Enclosure& a, const Enclosure& b);

/// Radii are rounded up to this many significant bits to keep them cheap.
inline constexpr std::size_t kRadiusBits = 30;
Dyadic compact_radius(const Dyadic& r);

/// Affine precision schedule L(args) = constant + sum coefficient_i * arg_i,
/// all coefficients nonnegative so L is monotone in every argument.
class LinearForm {
public:
  LinearForm(std::int64_t constant, std::vector<std::int64_t> coefficients);

  std::int64_t constant() const { return constant_; }
  const std::vector<std::int64_t>& coefficients() const { return coefficients_; }
  std::size_t arity() const { return coefficients_.size(); }

private:
  std::int64_t constant_;
  std::vector<std::int64_t> coefficients_;
};

std::int64_t lf_eval(const LinearForm& form, std::span<const std::int64_t> args);
std::int64_t lf_eval(const LinearForm& form, std::initializer_list<std::int64_t> args);

namespace schedules {
// |a|,|b| <= 2^p: query both at n + p + 2 and truncate the product at n + 2.
LinearForm mul();
// |a| >= 2^-p: query at n + 2p + 2 and truncate the reciprocal at n + 1.
LinearForm inv();
} // namespace schedules

struct ResourceStats {
  std::uint64_t peak_bits = 0;
  std::int64_t max_working_precision = 0;
  std::uint64_t term_count = 0;
  std::uint64_t op_count = 0;
  double elapsed_ms = 0.0;
  /// Times the a-priori schedule fell short of its runtime certificate.
  std::uint64_t schedule_retries = 0;
  /// Times the truncation index had to be enlarged after the tail check.
  std::uint64_t tail_retries = 0;
};

struct Caps {
  std::int64_t max_bits = std::int64_t{1} << 20;
  std::uint64_t max_terms = std::uint64_t{1} << 20;
  std::optional<std::chrono::milliseconds> timeout;
};

class ApproxReal;

/// Per-evaluation state: query memo, counters and caps. Single owner; never
/// share one context between concurrent evaluations.
class EvalContext {
public:
  explicit EvalContext(Caps caps = {});

  const Caps& caps() const { return caps_; }
  ResourceStats& stats() { return stats_; }
  const ResourceStats& stats() const { return stats_; }

  /// Records a working precision; throws ResourceError above max_bits.
  void note_precision(std::int64_t bits);
  /// Records summed series terms; enforces max_terms and the timeout.
  void note_terms(std::uint64_t count);
  /// Records the current number of live mantissa bits.
  void note_live_bits(std::uint64_t bits);
  void check_timeout() const;

  Dyadic query(const ApproxReal& x, std::int64_t n);

private:
  struct Memo {
    std::shared_ptr<const void> owner;
    std::int64_t n;
    Dyadic value;
  };

  Caps caps_;
  ResourceStats stats_;
  std::chrono::steady_clock::time_point start_;
  std::unordered_map<const void*, Memo> memo_;
};

/// A real number given by its approximations: query(n) returns a dyadic
/// within 2^-n of the value.
///
/// Constants answer by truncation and are never memoized. Everything else is
/// memoized per context at the highest precision requested so far, and
/// lower-precision answers are derived from that cached value, so priming a
/// context at the largest precision it will need makes every later answer a
/// deterministic function of one approximation.
class ApproxReal {
public:
  /// fn(n, ctx) must return a dyadic within 2^-n of the value.
  using Fn = std::function<Dyadic(std::int64_t, EvalContext&)>;

  ApproxReal() : ApproxReal(constant(Dyadic())) {}

  static ApproxReal constant(Dyadic value);
  /// Exact decimal value; a constant when the numeral is dyadic.
  static ApproxReal decimal(std::string text);
  static ApproxReal from_function(Fn fn, std::optional<std::int64_t> magnitude_hint = std::nullopt,
                                  std::string label = {});

  /// Exact dyadic value, when known.
  const std::optional<Dyadic>& exact() const;
  /// p with |x| <= 2^p, when known.
  std::optional<std::int64_t> magnitude_hint() const;
  ApproxReal with_magnitude_hint(std::int64_t p) const;
  const std::string& label() const;

private:
  friend class EvalContext;
  struct Impl;
  explicit ApproxReal(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  Dyadic evaluate(std::int64_t n, EvalContext& ctx) const;

  std::shared_ptr<const Impl> impl_;
};

ApproxReal make_const(const Dyadic& d);
/// -s and 1 - s; constants stay constants.
ApproxReal negate(const ApproxReal& s);
ApproxReal one_minus(const ApproxReal& s);
Dyadic query(const ApproxReal& x, std::int64_t n, EvalContext& ctx);
/// Convenience overload with a throwaway context.
Dyadic query(const ApproxReal& x, std::int64_t n);

/// |result - a*b| <= 2^-n given |a|,|b| <= 2^p.
Dyadic mul_to_prec(const ApproxReal& a, const ApproxReal& b, std::int64_t n, std::int64_t p,
                   EvalContext& ctx);
/// |result - 1/a| <= 2^-n given |a| >= 2^-p.
Dyadic inv_to_prec(const ApproxReal& a, std::int64_t n, std::int64_t p, EvalContext& ctx);

/// Product of two certified enclosures with the mul schedule's magnitude
/// checks: both magnitudes must stay within 2^p. Result radius is the exact
/// propagated bound after truncating at n + 2 fractional bits.
Enclosure mul_enclosures(const Enclosure& a, const Enclosure& b, std::int64_t n, std::int64_t p);

/// Runs `action`, charging its multiplications and wall time to ctx.
template <class Action>
const ResourceStats& meter_scope(EvalContext& ctx, Action&& action) {
  auto ops0 = dy_mul_count();
  auto t0 = std::chrono::steady_clock::now();
  std::forward<Action>(action)();
  auto t1 = std::chrono::steady_clock::now();
  ctx.stats().op_count += dy_mul_count() - ops0;
  ctx.stats().elapsed_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
  return ctx.stats();
}

} // namespace dyzeta
