#include "dyzeta/approx.hpp"

#include <algorithm>

#include "dyzeta/errors.hpp"

namespace dyzeta {

// ---------------------------------------------------------------- Ball

Dyadic Ball::radius() const { return exact() ? Dyadic() : Dyadic::pow2(radius_exp); }

bool Ball::contains(const Dyadic& x) const { return (x - center).abs() <= radius(); }

namespace {

std::int64_t radius_exp_of(const Dyadic& r) { return r.is_zero() ? Ball::kExact : r.ceil_log2(); }

} // namespace

Ball ball_add(const Ball& a, const Ball& b) {
  Ball r{a.center + b.center, Ball::kExact};
  if (a.exact()) {
    r.radius_exp = b.radius_exp;
  } else if (b.exact()) {
    r.radius_exp = a.radius_exp;
  } else {
    r.radius_exp = std::max(a.radius_exp, b.radius_exp) + 1;
  }
  return r;
}

Ball ball_mul(const Ball& a, const Ball& b) {
  Dyadic ra = a.radius();
  Dyadic rb = b.radius();
  Dyadic bound = a.center.abs() * rb + b.center.abs() * ra + ra * rb;
  return {a.center * b.center, radius_exp_of(bound)};
}

Ball ball_round(const Ball& a, std::int64_t n) {
  Dyadic c = dy_round(a.center, n);
  Dyadic bound = a.radius() + (a.center - c).abs();
  return {c, radius_exp_of(bound)};
}

bool ball_intersects(const Ball& a, const Ball& b) {
  return (a.center - b.center).abs() <= a.radius() + b.radius();
}

// ---------------------------------------------------------------- Enclosure

Dyadic compact_radius(const Dyadic& r) { return dy_round_up_bits(r, kRadiusBits); }

Dyadic Enclosure::mag_lower() const {
  Dyadic m = mid.abs() - rad;
  return m.sign() > 0 ? m : Dyadic();
}

bool Enclosure::contains(const Dyadic& x) const { return (x - mid).abs() <= rad; }

bool Enclosure::contains(const Enclosure& inner) const {
  return (inner.mid - mid).abs() + inner.rad <= rad;
}

Ball Enclosure::to_ball() const { return {mid, radius_exp_of(rad)}; }

Enclosure operator+(const Enclosure& a, const Enclosure& b) {
  return {a.mid + b.mid, compact_radius(a.rad + b.rad)};
}

Enclosure operator-(const Enclosure& a, const Enclosure& b) {
  return {a.mid - b.mid, compact_radius(a.rad + b.rad)};
}

Enclosure operator-(const Enclosure& a) { return {-a.mid, a.rad}; }

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  Dyadic rad = a.mid.abs() * b.rad + b.mid.abs() * a.rad + a.rad * b.rad;
  return {a.mid * b.mid, compact_radius(rad)};
}

Enclosure scale2(const Enclosure& a, std::int64_t e) {
  return {dy_shift(a.mid, e), dy_shift(a.rad, e)};
}

Enclosure truncate(const Enclosure& a, std::int64_t n) {
  Dyadic m = dy_round(a.mid, n);
  return {m, compact_radius(a.rad + (a.mid - m).abs())};
}

Enclosure widen(const Enclosure& a, const Dyadic& extra) {
  return {a.mid, compact_radius(a.rad + extra.abs())};
}

Enclosure reciprocal(const Enclosure& a, std::int64_t n) {
  Dyadic lo = a.mag_lower();
  if (lo.is_zero()) throw DomainError("reciprocal of an enclosure containing zero");
  Dyadic q = dy_div(Dyadic(1), a.mid, n);
  // |1/x - 1/mid| <= rad / (|mid| * lo) for x in the enclosure, plus truncation.
  Dyadic denom = a.mid.abs() * lo;
  Dyadic prop = a.rad.is_zero() ? Dyadic() : dy_div(a.rad, denom, n + 2) + Dyadic::pow2(-n - 2);
  return {q, compact_radius(prop + Dyadic::pow2(-n))};
}

bool intersects(const Enclosure& a, const Enclosure& b) {
  return (a.mid - b.mid).abs() <= a.rad + b.rad;
}

// ---------------------------------------------------------------- LinearForm

LinearForm::LinearForm(std::int64_t constant, std::vector<std::int64_t> coefficients)
    : constant_(constant), coefficients_(std::move(coefficients)) {
  if (constant_ < 0 ||
      std::any_of(coefficients_.begin(), coefficients_.end(), [](auto c) { return c < 0; })) {
    throw ContractError("linear form coefficients must be nonnegative");
  }
}

std::int64_t lf_eval(const LinearForm& form, std::span<const std::int64_t> args) {
  if (args.size() != form.arity()) {
    throw ContractError("linear form arity mismatch: expected " + std::to_string(form.arity()) +
                        ", got " + std::to_string(args.size()));
  }
  std::int64_t v = form.constant();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] < 0) throw ContractError("linear form arguments must be nonnegative");
    v += form.coefficients()[i] * args[i];
  }
  return v;
}

std::int64_t lf_eval(const LinearForm& form, std::initializer_list<std::int64_t> args) {
  return lf_eval(form, std::span<const std::int64_t>(args.begin(), args.size()));
}

namespace schedules {
LinearForm mul() { return LinearForm(2, {1, 1}); }
LinearForm inv() { return LinearForm(2, {1, 2}); }
} // namespace schedules

// ---------------------------------------------------------------- EvalContext

EvalContext::EvalContext(Caps caps) : caps_(caps), start_(std::chrono::steady_clock::now()) {}

void EvalContext::note_precision(std::int64_t bits) {
  if (bits > caps_.max_bits) {
    throw ResourceError("working precision " + std::to_string(bits) + " exceeds cap of " +
                        std::to_string(caps_.max_bits) + " bits");
  }
  stats_.max_working_precision = std::max(stats_.max_working_precision, bits);
}

void EvalContext::note_terms(std::uint64_t count) {
  stats_.term_count += count;
  if (stats_.term_count > caps_.max_terms) {
    throw ResourceError("series term count exceeds cap of " + std::to_string(caps_.max_terms));
  }
  check_timeout();
}

void EvalContext::note_live_bits(std::uint64_t bits) {
  stats_.peak_bits = std::max(stats_.peak_bits, bits);
}

void EvalContext::check_timeout() const {
  if (caps_.timeout && std::chrono::steady_clock::now() - start_ > *caps_.timeout) {
    throw ResourceError("evaluation timed out");
  }
}

// ---------------------------------------------------------------- ApproxReal

struct ApproxReal::Impl {
  std::optional<Dyadic> exact;
  Fn fn;
  std::optional<std::int64_t> magnitude_hint;
  std::string label;
};

ApproxReal ApproxReal::constant(Dyadic value) {
  auto impl = std::make_shared<Impl>();
  impl->magnitude_hint = value.is_zero() ? 0 : std::max<std::int64_t>(0, value.ceil_log2());
  impl->label = dy_to_hex(value);
  impl->exact = std::move(value);
  return ApproxReal(std::move(impl));
}

ApproxReal ApproxReal::decimal(std::string text) {
  if (auto d = dy_decimal_exact(text)) {
    ApproxReal r = constant(*d);
    auto impl = std::make_shared<Impl>(*r.impl_);
    impl->label = text;
    return ApproxReal(std::move(impl));
  }
  mpq_class q = dy_decimal_rational(text);
  Dyadic num(q.get_num(), 0);
  Dyadic den(q.get_den(), 0);
  auto impl = std::make_shared<Impl>();
  impl->fn = [num, den](std::int64_t n, EvalContext&) { return dy_div(num, den, n); };
  Dyadic approx = dy_div(num, den, 0);
  impl->magnitude_hint = std::max<std::int64_t>(0, (approx.abs() + Dyadic(1)).ceil_log2());
  impl->label = std::move(text);
  return ApproxReal(std::move(impl));
}

ApproxReal ApproxReal::from_function(Fn fn, std::optional<std::int64_t> magnitude_hint,
                                     std::string label) {
  auto impl = std::make_shared<Impl>();
  impl->fn = std::move(fn);
  impl->magnitude_hint = magnitude_hint;
  impl->label = std::move(label);
  return ApproxReal(std::move(impl));
}

const std::optional<Dyadic>& ApproxReal::exact() const { return impl_->exact; }

std::optional<std::int64_t> ApproxReal::magnitude_hint() const { return impl_->magnitude_hint; }

ApproxReal ApproxReal::with_magnitude_hint(std::int64_t p) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->magnitude_hint = p;
  return ApproxReal(std::move(impl));
}

const std::string& ApproxReal::label() const { return impl_->label; }

Dyadic ApproxReal::evaluate(std::int64_t n, EvalContext& ctx) const {
  if (impl_->exact) return dy_round(*impl_->exact, n);
  return impl_->fn(n, ctx);
}

Dyadic EvalContext::query(const ApproxReal& x, std::int64_t n) {
  if (n < 0) n = 0;
  Dyadic value;
  if (x.impl_->exact) {
    value = x.evaluate(n, *this);
  } else {
    auto it = memo_.find(x.impl_.get());
    if (it != memo_.end() && it->second.n >= n) {
      // A value within 2^-N, truncated at n + 1 bits, stays within 2^-n.
      value = it->second.n == n ? it->second.value : dy_round(it->second.value, n + 1);
    } else {
      note_precision(n);
      value = x.evaluate(n, *this);
      memo_[x.impl_.get()] = Memo{x.impl_, n, value};
    }
  }
  if (auto p = x.magnitude_hint()) {
    if (value.abs() > Dyadic::pow2(*p) + Dyadic::pow2(-n)) {
      throw ContractError("approximation of '" + x.label() + "' violates magnitude hint 2^" +
                          std::to_string(*p));
    }
  }
  return value;
}

ApproxReal make_const(const Dyadic& d) { return ApproxReal::constant(d); }

ApproxReal negate(const ApproxReal& s) {
  if (s.exact()) return ApproxReal::constant(-*s.exact());
  return ApproxReal::from_function(
      [s](std::int64_t n, EvalContext& ctx) { return -ctx.query(s, n); }, s.magnitude_hint(),
      "-(" + s.label() + ")");
}

ApproxReal one_minus(const ApproxReal& s) {
  if (s.exact()) return ApproxReal::constant(Dyadic(1) - *s.exact());
  std::optional<std::int64_t> hint;
  if (auto h = s.magnitude_hint()) hint = *h + 1;
  return ApproxReal::from_function(
      [s](std::int64_t n, EvalContext& ctx) { return Dyadic(1) - ctx.query(s, n); }, hint,
      "1-(" + s.label() + ")");
}


Dyadic query(const ApproxReal& x, std::int64_t n, EvalContext& ctx) { return ctx.query(x, n); }

Dyadic query(const ApproxReal& x, std::int64_t n) {
  EvalContext ctx;
  return ctx.query(x, n);
}

// ---------------------------------------------------------------- schedules

Enclosure mul_enclosures(const Enclosure& a, const Enclosure& b, std::int64_t n, std::int64_t p) {
  Dyadic bound = Dyadic::pow2(p);
  if (a.mag_lower() > bound || b.mag_lower() > bound) {
    throw ContractError("multiplication operand exceeds magnitude hint 2^" + std::to_string(p));
  }
  return truncate(a * b, n + 2);
}

Dyadic mul_to_prec(const ApproxReal& a, const ApproxReal& b, std::int64_t n, std::int64_t p,
                   EvalContext& ctx) {
  std::int64_t m = lf_eval(schedules::mul(), {n, p});
  ctx.note_precision(m);
  Dyadic eps = Dyadic::pow2(-m);
  Enclosure ea{ctx.query(a, m), eps};
  Enclosure eb{ctx.query(b, m), eps};
  Enclosure r = mul_enclosures(ea, eb, n, p);
  if (r.rad > Dyadic::pow2(-n)) {
    throw ContractError("product schedule did not reach 2^-" + std::to_string(n));
  }
  return r.mid;
}

Dyadic inv_to_prec(const ApproxReal& a, std::int64_t n, std::int64_t p, EvalContext& ctx) {
  std::int64_t m = lf_eval(schedules::inv(), {n, p});
  ctx.note_precision(m);
  Dyadic eps = Dyadic::pow2(-m);
  Dyadic v = ctx.query(a, m);
  if (v.abs() < Dyadic::pow2(-p) - eps) {
    throw DomainError("reciprocal operand is not bounded away from zero by 2^-" +
                      std::to_string(p));
  }
  Enclosure r = reciprocal(Enclosure{v, eps}, n + 1);
  if (r.rad > Dyadic::pow2(-n)) {
    throw ContractError("reciprocal schedule did not reach 2^-" + std::to_string(n));
  }
  return r.mid;
}

} // namespace dyzeta
