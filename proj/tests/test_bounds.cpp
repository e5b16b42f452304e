#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <doctest.h>

#include "dbcorr/bounds.hpp"
#include "dbcorr/errors.hpp"

using namespace dbcorr;
using Hp = boost::multiprecision::cpp_dec_float_50;

namespace {

// Reference evaluations of the closed forms in 50 significant digits, written
// exactly as the formulas read (no rearrangement).
Hp hp_g_fa(Hp g) {
  const Hp s = sqrt(1 + g);
  return s - 1 - log((1 + s) / 2);
}

Hp hp_g_md(Hp g, Hp rho2) {
  const Hp q = 1 - rho2;
  const Hp s = sqrt(q * q + g);
  return (s - sqrt(rho2 * g)) / q - 1 - log((q + s) / 2);
}

Hp hp_unconditional(Hp n, Hp d, Hp rho2) {
  const Hp v = 1 - sqrt(pow(1 - rho2, -d * n) - 1);
  return v > 0 ? v : Hp(0);
}

Hp hp_recovery_ach(Hp n, Hp d, Hp rho2) {
  const Hp b = n * pow(1 - rho2, d / 4);
  return b * (1 - pow(b, n)) / (1 - b);
}

double rel_err(double got, const Hp& want) {
  return std::abs(static_cast<double>((Hp(got) - want) / want));
}

// Golden-section minimizer on [a, b].
template <class F>
double golden_argmin(F f, double a, double b) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double c = b - r * (b - a), e = a + r * (b - a);
  double fc = f(c), fe = f(e);
  for (int i = 0; i < 400 && b - a > 1e-16; ++i) {
    if (fc < fe) {
      b = e, e = c, fe = fc, c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = e, fc = fe, e = a + r * (b - a), fe = f(e);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("false-alarm exponent") {
  CHECK(g_fa(0.0) == 0.0);
  CHECK(rel_err(g_fa(3.0), hp_g_fa(3)) < 1e-15);
  CHECK(g_fa(3.0) == doctest::Approx(1.0 - std::log(1.5)));
  CHECK(g_fa(0.024) == doctest::Approx(0.005982).epsilon(1e-4));
  for (double g : {1e-12, 1e-8, 1e-4, 0.01, 0.5, 2.0, 10.0, 1e4}) {
    CHECK(rel_err(g_fa(g), hp_g_fa(Hp(g))) < 1e-13);
  }
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = g_fa(i * 0.01);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(g_fa(-1.0), DomainError);
}

TEST_CASE("linear lower bound on the false-alarm exponent") {
  const double c = (std::sqrt(2.0) - 1.0) / 2.0;
  for (int i = 1; i <= 10000; ++i) {
    const double g = i / 10000.0;
    CHECK(g_fa(g) >= c * g);
  }
  // The bound is not global: it fails past gamma ~ 2.2263.
  CHECK(g_fa(10.0) < c * 10.0);
  double lo = 1.0, hi = 10.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g_fa(mid) >= c * mid ? lo : hi) = mid;
  }
  CHECK(lo == doctest::Approx(2.2263).epsilon(1e-4));
}

TEST_CASE("missed-detection exponent") {
  for (double g : {0.0, 0.1, 1.0, 3.0}) CHECK(g_md(g, 0.0) == doctest::Approx(g_fa(g)));
  CHECK(g_md(0.024, std::sqrt(0.024)) == doctest::Approx(0.005981).epsilon(1e-4));
  for (double r2 : {0.01, 0.3, 0.9}) {
    CHECK(g_md(0.0, std::sqrt(r2)) == doctest::Approx(-std::log1p(-r2)));
  }
  for (double r2 : {1e-6, 0.001, 0.05, 0.5, 0.9, 0.999}) {
    for (double g : {1e-6 * r2, 0.3 * r2, r2, 2 * r2, 3.9 * r2}) {
      const Hp want = hp_g_md(Hp(g), Hp(r2));
      CHECK(std::abs(g_md(g, std::sqrt(r2)) - static_cast<double>(want)) <=
            1e-13 * std::max(1.0, std::abs(static_cast<double>(want))));
    }
  }
  for (int i = 1; i < 10000; ++i) {
    const double r2 = i / 10000.0;
    CHECK(g_md(r2, std::sqrt(r2)) >= r2 / 30.0);
  }
  CHECK_THROWS_AS(g_md(0.1, 1.0), DomainError);
}

TEST_CASE("detection achievable risk") {
  CHECK(detection_ach_risk(1000, 0.0240385162152998) ==
        doctest::Approx(0.1).epsilon(0.01));
  CHECK(std::abs(detection_ach_risk(1000, 0.0240385162152998) - 0.1) <= 1e-3);
  CHECK(detection_ach_risk(1000, 1e-14) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(detection_ach_risk(1000, 0.0) == 2.0);
  double prev = 3.0;
  for (double d = 1; d <= 1e5; d *= 1.5) {
    const double v = detection_ach_risk(d, 0.01);
    CHECK(v <= prev);
    prev = v;
  }
  for (int i = 1; i < 100; ++i) {
    for (double d : {2.0, 50.0, 1000.0, 20000.0}) {
      const double r2 = i / 100.0;
      CHECK(detection_ach_risk(d, r2) <= 2.0 * std::exp(-d * r2 / 60.0));
    }
  }
}

TEST_CASE("Chernoff optimizers") {
  SUBCASE("worked value") {
    const ChernoffLambdas l = chernoff_lambdas(10000, 100, 1000, 0.2);
    CHECK(l.lambda_fa == doctest::Approx(-0.05 + std::sqrt(0.0001 + 0.0025)));
    CHECK(l.lambda_fa == doctest::Approx(9.902e-4).epsilon(1e-3));
    const double num_fa = golden_argmin(
        [](double lam) { return -lam * 10000 + log_mgf_null(lam, 100, 1000); },
        1e-9, 0.01 - 1e-9);
    CHECK(std::abs(num_fa - l.lambda_fa) <= 1e-10);
    const double num_md = golden_argmin(
        [](double lam) { return lam * 10000 + log_mgf_alt(-lam, 100, 1000, 0.2); },
        1e-9, 1.0 / (100 * 0.8) - 1e-9);
    CHECK(std::abs(num_md - l.lambda_md) <= 1e-9);
  }
  SUBCASE("ranges and exponent identities") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double n = 1 + std::floor(u(rng) * 500);
      const double d = 1 + std::floor(u(rng) * 5000);
      const double rho = (u(rng) < 0.5 ? -1 : 1) * (0.01 + 0.98 * u(rng));
      const double t = std::abs(rho) * n * d * (0.01 + 0.98 * u(rng));
      const ChernoffLambdas l = chernoff_lambdas(t, n, d, rho);
      CHECK(l.lambda_fa > 0.0);
      CHECK(l.lambda_fa < 1.0 / n);
      CHECK(l.lambda_md > 0.0);
      CHECK(l.lambda_md < 1.0 / (n * (1.0 - std::abs(rho))));
      const double gamma = std::pow(2.0 * t / (d * n), 2);
      const double fa = -l.lambda_fa * t + log_mgf_null(l.lambda_fa, n, d);
      const double md = l.lambda_md * t + log_mgf_alt(-l.lambda_md, n, d, rho);
      CHECK(std::abs(fa + 0.5 * d * g_fa(gamma)) <=
            1e-10 * std::max(1.0, 0.5 * d * g_fa(gamma)));
      CHECK(std::abs(md + 0.5 * d * g_md(gamma, rho)) <=
            1e-10 * std::max(1.0, 0.5 * d * g_md(gamma, rho)));
    }
  }
  CHECK_THROWS_AS(chernoff_lambdas(0.0, 10, 10, 0.5), DomainError);
  CHECK_THROWS_AS(chernoff_lambdas(50.0, 10, 10, 0.5), DomainError);
}

TEST_CASE("statistic MGFs") {
  CHECK(mgf_alt(0.0, 3, 4, 0.5) == 1.0);
  CHECK(mgf_null(0.0, 3, 4) == 1.0);
  for (double lam : {-0.3, -0.05, 0.0, 0.1, 0.32}) {
    CHECK(mgf_null(lam, 3, 4) == mgf_alt(lam, 3, 4, 0.0));
  }
  // (1 - 2 n lam |rho| - n^2 lam^2 (1 - rho^2))^(-d/2)
  CHECK(mgf_alt(0.05, 2, 3, 0.5) ==
        doctest::Approx(std::pow(1 - 0.1 - 0.0075, -1.5)));
  CHECK_THROWS_AS(mgf_null(0.5, 2, 3), DomainError);
  CHECK_THROWS_AS(mgf_alt(0.34, 2, 3, 0.5), DomainError);
  CHECK_THROWS_AS(mgf_alt(-1.0, 2, 3, 0.5), DomainError);
}

TEST_CASE("unconditional converse") {
  CHECK(unconditional_converse_risk(100, 1000, 0.0) == 1.0);
  // dn ln(1/(1-rho^2)) = ln 2 makes the radicand 1.
  const double rho2 = -std::expm1(-std::log(2.0) / (5.0 * 7.0));
  CHECK(unconditional_converse_risk(5, 7, rho2) == doctest::Approx(0.0));
  const double v = unconditional_converse_risk(100, 1000, 1e-6);
  CHECK(v == doctest::Approx(0.6757).epsilon(1e-4));
  CHECK(rel_err(v, hp_unconditional(100, 1000, Hp("1e-6"))) < 1e-12);
  for (double r2 : {1e-9, 1e-7, 3e-6}) {
    for (double n : {10.0, 1000.0, 20000.0}) {
      const Hp want = hp_unconditional(Hp(n), 1000, Hp(r2));
      if (want > Hp("1e-3")) CHECK(rel_err(unconditional_converse_risk(n, 1000, r2), want) < 1e-9);
    }
  }
}

TEST_CASE("truncation schedule") {
  const TruncationSchedule s = truncation_schedule(169, 10, 0.3, 169, 0.1);
  REQUIRE(s.r.size() == 1);
  CHECK(s.r[0] == doctest::Approx(1.1));
  CHECK(s.w[0] == doctest::Approx(10 * 169 - 2 * std::sqrt(10.0) * 169 * 1.1));
  CHECK(s.v[0] == doctest::Approx(std::sqrt(0.3) * 10 * 169 +
                                  4 * std::sqrt(0.3) * std::sqrt(10.0) * 169 *
                                      s.s[0]));
  CHECK(default_k_star(10000) == 1300);
  CHECK(default_k_star(169) == 169);
  CHECK(default_k_star(170) == 170);

  SUBCASE("k = n at margin 0.1 needs sqrt(d)/2 > 1.1") {
    for (double d = 5; d <= 200; d += 1) {
      CHECK(build_truncation_schedule(169, d, 0.3, 169, 0.1).valid());
    }
    const TruncationSchedule four = build_truncation_schedule(169, 4, 0.3, 169, 0.1);
    REQUIRE_FALSE(four.valid());
    CHECK(four.violations.front() == "r_k < sqrt(d) / 2");
  }
  SUBCASE("small d is rejected with the inequality named") {
    const double n = 1000;
    const std::uint64_t k = 10;
    const double floor_d = 4 * (1 + std::log(n / k));
    try {
      truncation_schedule(n, std::floor(floor_d) - 1, 0.1, k, 0.1);
      FAIL("expected ConditionViolated");
    } catch (const ConditionViolated& e) {
      CHECK(std::string(e.what()).find("d >= 4 ln(e n / k_star)") !=
            std::string::npos);
    }
  }
  CHECK_THROWS_AS(truncation_schedule(10, 100, 0.1, 11, 0.1), ConditionViolated);
}

TEST_CASE("psi values") {
  SUBCASE("positive with a margin") {
    for (double margin : {0.01, 0.1, 0.5}) {
      for (double r2 : {1e-6, 1e-3, 0.1}) {
        const auto s = build_truncation_schedule(400, 2000, r2, 260, margin);
        REQUIRE(s.valid());
        const PsiValues p = psi_values(s, 400, 2000, r2);
        CHECK(p.psi1 > 0.0);
        CHECK(p.psi2 > 0.0);
      }
    }
  }
  SUBCASE("psi decreases in rho^2") {
    double prev = 1e300;
    for (int i = 0; i <= 60; ++i) {
      const double r2 = 1e-8 * std::pow(10.0, i / 10.0);
      const auto s = build_truncation_schedule(400, 200, r2, 260, 0.1);
      REQUIRE(s.valid());
      const double psi = psi_values(s, 400, 200, r2).psi;
      CHECK(psi <= prev);
      prev = psi;
    }
  }
  SUBCASE("tiny correlation") {
    const double n = 400, d = 200;
    const double r2 = 1.0 / (200.0 * d * std::sqrt(n));
    const auto s = truncation_schedule(n, d, r2, default_k_star(n), 0.1);
    CHECK(psi_values(s, n, d, r2).psi > 0.0);
  }
}

TEST_CASE("truncated converse") {
  CHECK(truncated_converse_risk(100, 1000, 0.0) == 1.0);
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double n = 1 + std::floor(std::pow(10.0, 4 * u(rng)));
    const double d = std::pow(10.0, 4 * u(rng));
    const double r2 = std::pow(10.0, -10 * u(rng)) * 0.999;
    const TruncatedConverse t = truncated_converse_detail(n, d, r2);
    CHECK(t.risk >= 0.0);
    CHECK(t.risk <= 1.0);
    CHECK(t.risk >= t.unconditional);
    CHECK(t.risk == truncated_converse_risk(n, d, r2));
  }
  SUBCASE("square-root regime") {
    const double n = 1e4, d = 1e3, r2 = 0.01 / (d * std::sqrt(n));
    const TruncatedConverse t = truncated_converse_detail(n, d, r2);
    CHECK(t.schedule_valid);
    CHECK(t.risk >= unconditional_converse_risk(n, d, r2));
    CHECK(t.truncated > t.unconditional);
    CHECK(t.truncated == doctest::Approx(0.627).epsilon(1e-3));
  }
  SUBCASE("hand-evaluated point") {
    const TruncatedConverse t = truncated_converse_detail(400, 200, 1.25e-6);
    CHECK(t.psi.psi == doctest::Approx(4.39).epsilon(1e-2));
    CHECK(t.truncated == doctest::Approx(0.7408).epsilon(1e-3));
    CHECK(t.unconditional == doctest::Approx(0.6757).epsilon(1e-3));
  }
}

TEST_CASE("recovery achievable bound") {
  const double lp = recovery_ach_log_perr(10, 400, 0.99);
  CHECK(lp == doctest::Approx(std::log(10.0) + 100 * std::log(0.01)));
  CHECK(recovery_ach_perr(10, 400, 0.99) > 0.0);
  CHECK(std::log10(recovery_ach_perr(10, 400, 0.99)) ==
        doctest::Approx(-199.0).epsilon(1e-6));
  CHECK(recovery_ach_perr(16, 4, 0.9375) == doctest::Approx(16.0));
  for (double r2 : {0.5, 0.7, 0.9, 0.95}) {
    CHECK(rel_err(recovery_ach_perr(10, 20, r2), hp_recovery_ach(10, 20, Hp(r2))) <
          1e-12);
  }
  double prev = 1e300;
  for (int i = 1; i < 1000; ++i) {
    const double v = recovery_ach_perr(50, 100, i / 1000.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("recovery converse bound") {
  for (double n : {5.0, 10.0, 1000.0}) {
    CHECK(recovery_conv_perr(n, 100, 0.0) ==
          doctest::Approx(1 - 1 / (n * n) - 4 / n));
  }
  // a = 40.25
  CHECK(recovery_conv_perr(40.25, 100, 0.0) ==
        doctest::Approx(0.9000038578758536).epsilon(1e-14));
  // The bound falls as rho^2 grows: a = n (1 - rho^2)^(d/4) shrinks.
  double prev = 2.0;
  for (int i = 0; i < 1000; ++i) {
    const double v = recovery_conv_perr(1000, 100, i / 1000.0);
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  CHECK(recovery_conv_perr(1000, 100, 0.1, 0.5) <
        recovery_conv_perr(1000, 100, 0.1, 0.0));
  CHECK_THROWS_AS(recovery_conv_perr(1000, 100, 0.1, -0.1), DomainError);
}

TEST_CASE("inversion") {
  const double d1000 = invert_for_rho2(BoundKind::kDetectionAchievable, 100, 1000, 0.1);
  CHECK(std::abs(d1000 / 0.0240385162 - 1) <= 1e-4);
  const double d10k =
      invert_for_rho2(BoundKind::kDetectionAchievable, 1e4, 1e4, 0.1);
  CHECK(std::abs(d10k / 0.0023973206 - 1) <= 1e-4);
  CHECK(invert_for_rho2(BoundKind::kDetectionAchievable, 1e4, 1000, 0.1) ==
        d1000);
  CHECK(detection_ach_risk(1000, d1000) <= 0.1);
  CHECK(detection_ach_risk(1000, d1000 - 1e-9) > 0.1);

  const double ra = invert_for_rho2(BoundKind::kRecoveryAchievable, 100, 1000, 0.1);
  CHECK(recovery_ach_perr(100, 1000, ra) <= 0.05);
  const double rc = invert_for_rho2(BoundKind::kRecoveryConverse, 100, 1000, 0.1);
  CHECK(recovery_conv_perr(100, 1000, rc) >= 0.1);
  CHECK(rc < ra);
  const double dc = invert_for_rho2(BoundKind::kDetectionConverse, 100, 1000, 0.1);
  CHECK(truncated_converse_risk(100, 1000, dc) >= 0.1);
  CHECK(dc <= d1000);

  CHECK_THROWS_AS(invert_for_rho2(BoundKind::kDetectionAchievable, 100, 18, 0.1),
                  InversionUndefined);
  CHECK_THROWS_AS(invert_for_rho2(BoundKind::kDetectionAchievable, 100, 100, 1.5),
                  DomainError);
}

TEST_CASE("curve points") {
  const BoundCurvePoint pt = curve_point(1000, 100, 1000, 0.1);
  CHECK(pt.axis == 1000);
  REQUIRE(pt.rho2_det_ach);
  REQUIRE(pt.rho2_det_conv);
  REQUIRE(pt.rho2_rec_ach);
  REQUIRE(pt.rho2_rec_conv);
  CHECK(*pt.rho2_det_conv <= *pt.rho2_det_ach);
  CHECK(pt.warnings.empty());
  const BoundCurvePoint low = curve_point(18, 100, 18, 0.1);
  CHECK_FALSE(low.rho2_det_ach);
  CHECK_FALSE(low.warnings.empty());
}
