#include "dyzeta/cli.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyzeta/errors.hpp"
#include "dyzeta/reference.hpp"
#include "dyzeta/zeta_complex.hpp"
#include "dyzeta/zeta_real.hpp"

namespace dyzeta::cli {

namespace {

using nlohmann::json;

// Extra bits used to replace a non-dyadic input by a dyadic one for the
// oracles; the derivative bound below turns that into an oracle radius.
constexpr std::int64_t kOracleInputBits = 48;

std::size_t decimal_digits(std::int64_t bits) {
  return static_cast<std::size_t>(std::ceil(0.302 * static_cast<double>(bits)));
}

std::string radius_text(std::int64_t radius_exp) {
  return radius_exp == Ball::kExact ? "0" : "2^" + std::to_string(radius_exp);
}

json radius_json(std::int64_t radius_exp) {
  return radius_exp == Ball::kExact ? json(nullptr) : json(radius_exp);
}

// Dyadic stand-in for a decimal numeral and the bound on its distance.
struct OracleInput {
  Dyadic value;
  Dyadic delta;
};

OracleInput oracle_input(const std::string& text, std::int64_t bits) {
  if (auto d = dy_decimal_exact(text)) return {*d, Dyadic()};
  const std::int64_t m = bits + kOracleInputBits;
  return {dy_from_decimal(text, m), Dyadic::pow2(-m)};
}

Dyadic radius_of(std::int64_t radius_exp) {
  return radius_exp == Ball::kExact ? Dyadic() : Dyadic::pow2(radius_exp);
}

bool disks_meet(const ComplexDyadic& a, const ComplexDyadic& b, const Dyadic& r) {
  Dyadic dr = a.re - b.re;
  Dyadic di = a.im - b.im;
  return dr * dr + di * di <= r * r;
}

// |zeta'| on the segment between the input and its dyadic stand-in. zeta(s)
// minus 1/(s-1) is entire and its derivative stays far below 2^20 on the
// verified region (sigma >= 1/4, |t| <= 100), so 2^20 (1 + 1/|s-1|^2)
// bounds |zeta'| there; dist_sq_lower is a lower bound for |s-1|^2.
Dyadic derivative_bound(const Dyadic& dist_sq_lower) {
  std::int64_t inv = std::max<std::int64_t>(0, -dist_sq_lower.floor_log2() + 1);
  return Dyadic::pow2(21 + inv);
}

std::optional<bool> verify_real(const Request& req, const Ball& result) {
  const mpq_class s = dy_decimal_rational(req.s);
  if (s < mpq_class(257, 256)) return std::nullopt;
  OracleInput in = oracle_input(req.s, req.bits);
  OracleResult o = oracle_zeta_dirichlet(in.value, req.bits + 8);
  Dyadic r = radius_of(o.radius_exp) + radius_of(result.radius_exp);
  if (!in.delta.is_zero()) {
    Dyadic dist = in.value - Dyadic(1) - in.delta;
    r = r + derivative_bound(dist * dist) * in.delta;
  }
  return (result.center - o.value.re).abs() <= r;
}

std::optional<bool> verify_complex(const Request& req, const ComplexBall& result) {
  const mpq_class sigma = dy_decimal_rational(req.sigma);
  const mpq_class t = dy_decimal_rational(req.t);
  if (sigma < mpq_class(1, 4) || abs(t) > 100) return std::nullopt;
  OracleInput si = oracle_input(req.sigma, req.bits);
  OracleInput ti = oracle_input(req.t, req.bits);
  Dyadic delta = si.delta + ti.delta;
  Dyadic a = (si.value - Dyadic(1)).abs();
  Dyadic b = ti.value.abs();
  Dyadic dist_sq = a * a + b * b;
  Dyadic slack = dy_shift(delta * (a + b + delta), 2);
  if (!delta.is_zero() && dist_sq <= slack) return std::nullopt;
  OracleResult o = oracle_zeta_euler_maclaurin(si.value, ti.value, req.bits + 8);
  Dyadic r = radius_of(o.radius_exp) + radius_of(result.radius_exp);
  if (!delta.is_zero()) r = r + derivative_bound(dist_sq - slack) * delta;
  return disks_meet(result.center, o.value, r);
}

json stats_json(const ResourceStats& st) {
  return {{"peak_bits", st.peak_bits},
          {"max_working_precision", st.max_working_precision},
          {"term_count", st.term_count},
          {"op_count", st.op_count},
          {"elapsed_ms", st.elapsed_ms}};
}

void print_stats_text(std::ostream& out, const ResourceStats& st) {
  out << "peak_bits: " << st.peak_bits << "\n"
      << "max_working_precision: " << st.max_working_precision << "\n"
      << "term_count: " << st.term_count << "\n"
      << "op_count: " << st.op_count << "\n"
      << "elapsed_ms: " << st.elapsed_ms << "\n";
}

std::string complex_decimal(const ComplexDyadic& z, std::size_t digits) {
  std::string re = dy_to_decimal(z.re, digits);
  std::string im = dy_to_decimal(z.im, digits);
  if (!im.empty() && im[0] == '-') return re + " - " + im.substr(1) + "i";
  return re + " + " + im + "i";
}

json verified_json(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

int emit_real(const Request& req, std::ostream& out) {
  EvalContext ctx(Caps{req.max_bits, req.max_terms,
                       req.timeout_ms ? std::optional(std::chrono::milliseconds(*req.timeout_ms))
                                      : std::nullopt});
  EvalOptions opts;
  opts.p_override = req.p;
  ApproxReal s = ApproxReal::decimal(req.s);
  Ball b = zeta_real(s, req.bits, ctx, opts);
  if (req.corrupt_center) b.center = b.center + Dyadic::pow2(4 - req.bits);
  std::optional<bool> verified;
  if (req.verify) verified = verify_real(req, b);

  const std::size_t digits = decimal_digits(req.bits);
  switch (req.format) {
  case Format::json: {
    json j{{"mode", "real"},
           {"s", req.s},
           {"bits", req.bits},
           {"value", dy_to_decimal(b.center, digits)},
           {"value_hex", dy_to_hex(b.center)},
           {"radius_exp", radius_json(b.radius_exp)},
           {"verified", verified_json(verified)},
           {"stats", stats_json(ctx.stats())}};
    out << j.dump(2) << "\n";
    break;
  }
  case Format::hex:
    out << dy_to_hex(b.center) << " +/- " << radius_text(b.radius_exp) << "\n";
    break;
  case Format::decimal:
    out << dy_to_decimal(b.center, digits) << " +/- " << radius_text(b.radius_exp) << "\n";
    break;
  }
  if (req.format != Format::json) {
    if (req.verify) out << "verified: " << (verified ? (*verified ? "true" : "false") : "null") << "\n";
    if (req.stats) print_stats_text(out, ctx.stats());
  }
  return verified == false ? kVerifyMismatch : kSuccess;
}

int emit_complex(const Request& req, std::ostream& out) {
  EvalContext ctx(Caps{req.max_bits, req.max_terms,
                       req.timeout_ms ? std::optional(std::chrono::milliseconds(*req.timeout_ms))
                                      : std::nullopt});
  ApproxReal sigma = ApproxReal::decimal(req.sigma);
  ApproxReal t = ApproxReal::decimal(req.t);
  ComplexBall b = zeta_complex(sigma, t, req.bits, ctx);
  if (req.corrupt_center) b.center.re = b.center.re + Dyadic::pow2(4 - req.bits);
  std::optional<bool> verified;
  if (req.verify) verified = verify_complex(req, b);

  const std::size_t digits = decimal_digits(req.bits);
  switch (req.format) {
  case Format::json: {
    json j{{"mode", "complex"},
           {"sigma", req.sigma},
           {"t", req.t},
           {"bits", req.bits},
           {"value", {{"re", dy_to_decimal(b.center.re, digits)}, {"im", dy_to_decimal(b.center.im, digits)}}},
           {"value_hex", {{"re", dy_to_hex(b.center.re)}, {"im", dy_to_hex(b.center.im)}}},
           {"radius_exp", radius_json(b.radius_exp)},
           {"verified", verified_json(verified)},
           {"stats", stats_json(ctx.stats())}};
    out << j.dump(2) << "\n";
    break;
  }
  case Format::hex:
    out << dy_to_hex(b.center.re) << " " << dy_to_hex(b.center.im) << " +/- "
        << radius_text(b.radius_exp) << "\n";
    break;
  case Format::decimal:
    out << complex_decimal(b.center, digits) << " +/- " << radius_text(b.radius_exp) << "\n";
    break;
  }
  if (req.format != Format::json) {
    if (req.verify) out << "verified: " << (verified ? (*verified ? "true" : "false") : "null") << "\n";
    if (req.stats) print_stats_text(out, ctx.stats());
  }
  return verified == false ? kVerifyMismatch : kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Request req;
  CLI::App app{"Certified evaluation of the Riemann zeta function", "zeta"};
  std::vector<std::string> complex_args;
  auto* real_opt = app.add_option("--real", req.s, "Real argument s > 1 (decimal)");
  auto* complex_opt =
      app.add_option("--complex", complex_args, "Complex argument SIGMA T (decimal)")->expected(2);
  real_opt->excludes(complex_opt);
  app.add_option("--bits", req.bits, "Target precision n: error <= 2^-n")
      ->check(CLI::Range(std::int64_t{0}, std::int64_t{1} << 20));
  std::map<std::string, Format> formats{{"decimal", Format::decimal}, {"hex", Format::hex}, {"json", Format::json}};
  app.add_option("--format", req.format, "Output format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  app.add_flag("--stats", req.stats, "Print resource statistics");
  app.add_flag("--verify", req.verify, "Check the result against an independent reference");
  app.add_option("--p", req.p, "Override the range parameter p")->check(CLI::Range(1, 64));
  app.add_option("--max-bits", req.max_bits, "Cap on working precision")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-terms", req.max_terms, "Cap on series terms")->check(CLI::PositiveNumber);
  app.add_option("--timeout", req.timeout_ms, "Wall-clock limit in milliseconds")
      ->check(CLI::PositiveNumber);
  app.add_flag("--corrupt-center", req.corrupt_center)->group("");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (!real_opt->count() && !complex_opt->count()) {
      throw CLI::RequiredError("one of --real or --complex");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (complex_opt->count()) {
    req.complex = true;
    req.sigma = complex_args.at(0);
    req.t = complex_args.at(1);
  }

  try {
    return req.complex ? emit_complex(req, out) : emit_real(req, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

} // namespace dyzeta::cli
