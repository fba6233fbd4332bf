// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyzeta/cli.hpp"
#include "dyzeta/errors.hpp"
#include "dyzeta/reference.hpp"
#include "dyzeta/zeta_complex.hpp"
#include "dyzeta/zeta_real.hpp"
#include "support.hpp"

using namespace dyzeta;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

int g_failures = 0;

void report(int id, const std::string& title, const Verdict& v, const std::string& summary) {
  std::printf("%s criterion %d: %s (%s)\n", v.pass ? "PASS" : "FAIL", id, title.c_str(),
              v.pass ? summary.c_str() : v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++g_failures;
}

std::string str(const Dyadic& d, std::size_t digits = 6) { return dy_to_decimal(d, digits); }

// Term-count and retry bookkeeping shared by criteria 1, 2 and 4.
struct RunRecord {
  std::string label;
  std::int64_t iota;
  std::uint64_t term_count;
  std::uint64_t schedule_retries;
  std::uint64_t tail_retries;
};

std::vector<RunRecord> g_runs;

// -------------------------------------------------------------- criterion 1

void known_constants() {
  Verdict v;
  const auto t0 = Clock::now();
  int cases = 0;
  for (long s : {2, 3, 4, 5}) {
    for (std::int64_t n : {64, 256, 1024}) {
      EvalContext ctx;
      PrecisionPlan pl;
      Ball z = zeta_real(make_const(Dyadic(s)), n, ctx, {}, &pl);
      OracleResult o = oracle_zeta_dirichlet(Dyadic(s), n + 8);
      const std::string tag = "s=" + std::to_string(s) + " n=" + std::to_string(n);
      v.require(z.radius_exp <= -n, tag + ": radius 2^" + std::to_string(z.radius_exp));
      v.require(ball_intersects(z, o.real_ball()), tag + ": enclosures do not intersect");
      Dyadic gap = (z.center - o.value.re).abs();
      v.require(gap <= Dyadic::pow2(-n) + Dyadic::pow2(-n - 8),
                tag + ": |center - oracle| = 2^" + std::to_string(gap.is_zero() ? 0 : gap.ceil_log2()));
      g_runs.push_back({tag, pl.iota, ctx.stats().term_count, ctx.stats().schedule_retries,
                        ctx.stats().tail_retries});
      ++cases;
    }
  }
  const double secs = seconds_since(t0);
  v.require(secs < 60, "took " + std::to_string(secs) + " s");
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d cases, %.1f s including oracles", cases, secs);
  report(1, "known constants zeta(2..5) at n = 64, 256, 1024", v, buf);
}

// -------------------------------------------------------------- criterion 2

void eta_factorization() {
  Verdict v;
  std::mt19937_64 rng(20240601);
  const std::int64_t n = 48;
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    Dyadic s;
    do {
      s = testing::random_dyadic(rng, Dyadic(mpz_class(9), -3), Dyadic(8), 16);
    } while (s == Dyadic(mpz_class(9), -3));
    ApproxReal sa = make_const(s);
    EvalContext ctx;
    PrecisionPlan pl = plan_for(sa, n, ctx);
    Dyadic u = u_eval(sa, pl, ctx);
    Ball ub{u, -pl.n1};
    OracleResult eta = oracle_eta_alternating(s, pl.n1 + 4);
    if (!ball_intersects(ub, eta.real_ball())) {
      ++failures;
      v.require(false, "u misses eta at s = " + str(s, 8));
    }
    g_runs.push_back({"eta s=" + str(s, 8), pl.iota, ctx.stats().term_count, ctx.stats().schedule_retries,
                      ctx.stats().tail_retries});
  }
  report(2, "u(s) matches the accelerated eta series on 200 random s in (1.125, 8)", v,
         std::to_string(failures) + " failures");
}

// -------------------------------------------------------------- criterion 3

void binomial_reciprocal() {
  Verdict v;
  const std::int64_t n_omega = 80;
  std::int64_t pairs = 0;
  std::int64_t steps = 0;
  for (std::int64_t k = 0; k <= 64; ++k) {
    for (std::int64_t q = 0; q <= k; ++q) {
      std::vector<SeriesTermState> trace;
      Dyadic r = binom_recip(k, q, n_omega, &trace);
      const mpq_class exact(1, oracle_binom_exact(k, q));
      const std::string tag = "k=" + std::to_string(k) + " q=" + std::to_string(q);
      v.require(testing::within_rational(r, exact, n_omega), tag + ": error above 2^-80");
      v.require(static_cast<std::int64_t>(trace.size()) == q, tag + ": trace length");
      mpq_class partial = 1;
      for (const SeriesTermState& st : trace) {
        partial *= mpq_class(q - st.tau + 1, k - st.tau + 1);
        const mpq_class err = abs(dy_to_rational(st.partial) - partial);
        // recorded bound below 2^(-3q + 2 tau), and the actual error below it
        v.require(st.eps_exp < -3 * q + 2 * st.tau,
                  tag + " tau=" + std::to_string(st.tau) + ": eps 2^" + std::to_string(st.eps_exp));
        v.require(err < mpq_class(1, testing::pow2z(-st.eps_exp)),
                  tag + " tau=" + std::to_string(st.tau) + ": actual error exceeds the trace bound");
        ++steps;
      }
      ++pairs;
    }
  }
  report(3, "binomial reciprocal within 2^-80 for k <= 64, eps_tau < 2^(-3q+2tau)", v,
         std::to_string(pairs) + " pairs, " + std::to_string(steps) + " traced steps");
}

// -------------------------------------------------------------- criterion 4

void term_count() {
  Verdict v;
  for (const RunRecord& r : g_runs) {
    v.require(r.schedule_retries == 0 && r.tail_retries == 0, r.label + ": retry fired");
    v.require(r.term_count == static_cast<std::uint64_t>(r.iota),
              r.label + ": term_count " + std::to_string(r.term_count) + " != iota " + std::to_string(r.iota));
  }
  // iota = 4p + 2 n2 + C6 on the recorded plans
  for (std::int64_t n : {64, 256, 1024}) {
    for (std::int64_t p : {1, 2, 3}) {
      PrecisionPlan pl = plan(n, p);
      v.require(pl.iota == 4 * p + 2 * pl.n2 + pl.constants.c6, "iota formula");
    }
  }
  report(4, "term count equals iota = 4p + 2 n2 + C6 with zero retries on criteria 1-2", v,
         std::to_string(g_runs.size()) + " runs checked");
}

// -------------------------------------------------------------- criteria 5, 6

struct LadderPoint {
  std::int64_t n;
  std::uint64_t peak_bits;
  std::int64_t max_wp;
  double best_ms;
};

std::vector<LadderPoint> g_ladder;

void run_ladder() {
  for (std::int64_t n : {256, 512, 1024, 2048}) {
    const int repeats = n <= 512 ? 5 : (n == 1024 ? 3 : 2);
    LadderPoint pt{n, 0, 0, 1e300};
    for (int r = 0; r < repeats; ++r) {
      EvalContext ctx;
      zeta_real(make_const(Dyadic(2)), n, ctx);
      pt.peak_bits = ctx.stats().peak_bits;
      pt.max_wp = ctx.stats().max_working_precision;
      pt.best_ms = std::min(pt.best_ms, ctx.stats().elapsed_ms);
    }
    g_ladder.push_back(pt);
  }
}

void linear_space() {
  Verdict v;
  std::ostringstream summary;
  summary << "peak_bits";
  for (std::size_t i = 0; i < g_ladder.size(); ++i) {
    summary << (i ? "/" : " ") << g_ladder[i].peak_bits;
    if (i + 1 < g_ladder.size()) {
      const double lhs = static_cast<double>(g_ladder[i + 1].peak_bits);
      const double rhs = 2.5 * static_cast<double>(g_ladder[i].peak_bits) + 1e4;
      v.require(lhs <= rhs, "peak_bits(" + std::to_string(g_ladder[i + 1].n) + ") = " +
                                std::to_string(g_ladder[i + 1].peak_bits) + " > 2.5 peak_bits(n) + 1e4");
    }
  }
  // least-squares line max_wp = a + b n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(g_ladder.size());
  for (const LadderPoint& p : g_ladder) {
    const double x = static_cast<double>(p.n);
    const double y = static_cast<double>(p.max_wp);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double a = (sy - b * sx) / m;
  double ss_res = 0, ss_tot = 0;
  for (const LadderPoint& p : g_ladder) {
    const double y = static_cast<double>(p.max_wp);
    const double f = a + b * static_cast<double>(p.n);
    ss_res += (y - f) * (y - f);
    ss_tot += (y - sy / m) * (y - sy / m);
  }
  const double r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : 1;
  v.require(r2 >= 0.99, "R^2 = " + std::to_string(r2));
  char buf[96];
  std::snprintf(buf, sizeof buf, "; max_working_precision = %.1f + %.3f n, R^2 = %.6f", a, b, r2);
  summary << buf;
  report(5, "linear space in n for s = 2", v, summary.str());
}

void polynomial_time() {
  Verdict v;
  std::ostringstream summary;
  summary << "best-of-N ms";
  for (std::size_t i = 0; i < g_ladder.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.1f", i ? "/" : " ", g_ladder[i].best_ms);
    summary << buf;
    if (i + 1 < g_ladder.size()) {
      const double ratio = g_ladder[i + 1].best_ms / g_ladder[i].best_ms;
      char rb[32];
      std::snprintf(rb, sizeof rb, "%.2f", ratio);
      v.require(ratio <= 9, "elapsed(" + std::to_string(g_ladder[i + 1].n) + ")/elapsed(" +
                                std::to_string(g_ladder[i].n) + ") = " + rb);
    }
  }
  summary << "; ratios";
  for (std::size_t i = 0; i + 1 < g_ladder.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.2f", i ? "/" : " ", g_ladder[i + 1].best_ms / g_ladder[i].best_ms);
    summary << buf;
  }
  report(6, "elapsed(2n)/elapsed(n) <= 9 for s = 2", v, summary.str());
}

// -------------------------------------------------------------- criterion 7

bool complex_meet(const ComplexBall& a, const ComplexBall& b) {
  Dyadic dr = a.center.re - b.center.re;
  Dyadic di = a.center.im - b.center.im;
  Dyadic r = a.radius() + b.radius();
  return dr * dr + di * di <= r * r;
}

void complex_line() {
  Verdict v;
  // first zero, checked through the command line's oracle path
  {
    std::ostringstream out, err;
    int code = cli::run({"--complex", "0.5", "14.134725141734693790", "--bits", "64", "--format", "json",
                         "--verify"},
                        out, err);
    v.require(code == 0, "first zero: exit code " + std::to_string(code) + " " + err.str());
    if (code == 0) {
      auto j = nlohmann::json::parse(out.str());
      v.require(j["verified"] == true, "first zero: oracle disagrees");
      v.require(j["radius_exp"].get<std::int64_t>() <= -64, "first zero: radius");
    }
    ComplexBall z = zeta_complex(make_const(Dyadic::pow2(-1)), ApproxReal::decimal("14.134725141734693790"), 64);
    Dyadic mod_upper = z.center.re.abs() + z.center.im.abs() + z.radius();
    v.require(mod_upper.to_double() < 1e-6, "first zero: |zeta| bound " + std::to_string(mod_upper.to_double()));
  }
  // zeta(1/2)
  {
    ComplexBall z = zeta_complex(make_const(Dyadic::pow2(-1)), make_const(Dyadic()), 48);
    const mpq_class ref = dy_decimal_rational("-1.4603545088095868128894991525");
    const mpq_class ref_err(1, mpz_class("10000000000000000000000000000")); // 1e-28
    const mpq_class gap = abs(dy_to_rational(z.center.re) - ref) + abs(dy_to_rational(z.center.im));
    v.require(z.radius_exp <= -48, "zeta(1/2): radius");
    v.require(gap + ref_err <= dy_to_rational(z.radius()), "zeta(1/2): ball misses -1.46035450880958681...");
    OracleResult o = oracle_zeta_euler_maclaurin(Dyadic::pow2(-1), Dyadic(), 56);
    v.require(complex_meet(z, o.complex_ball()), "zeta(1/2): Euler-Maclaurin disagrees");
  }
  // conjugate symmetry on 100 random points
  std::mt19937_64 rng(1859);
  const std::int64_t n = 32;
  int conj_ok = 0;
  for (int i = 0; i < 100; ++i) {
    Dyadic sigma = testing::random_dyadic(rng, Dyadic(mpz_class(1), -2), Dyadic(3), 12);
    Dyadic t = testing::random_dyadic(rng, Dyadic(-20), Dyadic(20), 12);
    if (sigma == Dyadic(1) && t.is_zero()) continue;
    ComplexBall a = zeta_complex(make_const(sigma), make_const(t), n);
    ComplexBall b = zeta_complex(make_const(sigma), make_const(-t), n);
    ComplexBall bc{{b.center.re, -b.center.im}, b.radius_exp};
    bool ok = complex_meet(a, bc) && a.radius_exp <= -n && b.radius_exp <= -n;
    v.require(ok, "conjugate symmetry fails at " + str(sigma) + " + " + str(t) + "i");
    conj_ok += ok;
  }
  // real-line consistency on 100 random points
  int real_ok = 0;
  for (int i = 0; i < 100; ++i) {
    Dyadic s = testing::random_dyadic(rng, Dyadic(mpz_class(9), -3), Dyadic(8), 12);
    ComplexBall c = zeta_complex(make_const(s), make_const(Dyadic()), n);
    Ball r = zeta_real(make_const(s), n);
    ComplexBall rc{{r.center, Dyadic()}, r.radius_exp};
    bool ok = complex_meet(c, rc) && c.radius_exp <= -n;
    v.require(ok, "real-line consistency fails at s = " + str(s));
    real_ok += ok;
  }
  report(7, "complex line: first zero, zeta(1/2), symmetry and real-line suites", v,
         "conjugate " + std::to_string(conj_ok) + "/100, real-line " + std::to_string(real_ok) + "/100");
}

// -------------------------------------------------------------- criterion 8

void soundness_sweep() {
  Verdict v;
  std::mt19937_64 rng(314159);
  int inside = 0;
  for (int i = 0; i < 500; ++i) {
    Dyadic s = testing::random_dyadic(rng, Dyadic(mpz_class(17), -4), Dyadic(16), 20);
    const std::int64_t n = 8 + static_cast<std::int64_t>(rng() % 57);
    Ball z = zeta_real(make_const(s), n);
    OracleResult o = oracle_zeta_dirichlet(s, n + 24);
    const std::string tag = "s=" + str(s, 8) + " n=" + std::to_string(n);
    v.require(z.radius_exp <= -n, tag + ": radius 2^" + std::to_string(z.radius_exp));
    bool ok = z.contains(o.value.re) && ball_intersects(z, o.real_ball());
    v.require(ok, tag + ": oracle value outside the ball");
    inside += ok && z.radius_exp <= -n;
  }
  report(8, "soundness sweep over 500 random real (s, n)", v, std::to_string(inside) + "/500 sound");
}

// -------------------------------------------------------------- criterion 9

void domain_errors() {
  Verdict v;
  struct Case {
    std::vector<std::string> args;
    std::string must_name;
  };
  const std::vector<Case> cases = {
      {{"--real", "1"}, "s = 1"},
      {{"--complex", "1", "0"}, "pole s = 1"},
      {{"--complex", "1", "9.06472028365438761925536589143"}, "1 + 2*pi*i*(1)/ln 2"},
      {{"--complex", "1", "-9.06472028365438761925536589143"}, "1 + 2*pi*i*(-1)/ln 2"},
      {{"--real", "0.5"}, "s = 0.5"},
      {{"--real", "-3"}, "s = -3"},
      {{"--real", "1.0"}, "s = 1.0"},
  };
  for (const Case& c : cases) {
    std::ostringstream out, err;
    int code = cli::run(c.args, out, err);
    std::string joined;
    for (const auto& a : c.args) joined += a + " ";
    v.require(code == cli::kDomain, joined + "-> exit " + std::to_string(code));
    v.require(err.str().find(c.must_name) != std::string::npos,
              joined + "-> message does not name '" + c.must_name + "': " + err.str());
  }
  report(9, "domain errors exit 3 and name the point", v, std::to_string(cases.size()) + " cases");
}

} // namespace

int main() {
  const auto t0 = Clock::now();
  auto guarded = [](int id, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      Verdict v;
      v.require(false, std::string("exception: ") + e.what());
      report(id, "aborted", v, "");
    }
  };
  guarded(1, known_constants);
  guarded(2, eta_factorization);
  guarded(3, binomial_reciprocal);
  guarded(4, term_count);
  guarded(5, [] {
    run_ladder();
    linear_space();
  });
  guarded(6, polynomial_time);
  guarded(7, complex_line);
  guarded(8, soundness_sweep);
  guarded(9, domain_errors);
  std::printf("%d criteria failed, %.1f s total\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
