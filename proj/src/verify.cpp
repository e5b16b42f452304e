// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dbcorr/align.hpp"
#include "dbcorr/assignment.hpp"
#include "dbcorr/bounds.hpp"
#include "dbcorr/detect.hpp"
#include "dbcorr/parallel.hpp"

namespace dbcorr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// A grid check: `slack` must be >= 0 everywhere; reports the worst point.
class GridCheck {
 public:
  explicit GridCheck(std::string name) : name_(std::move(name)) {}
  void observe(double slack) {
    if (!(slack >= worst_)) worst_ = std::isnan(slack) ? -kInf : slack;
  }
  CheckResult result() const {
    CheckResult c;
    c.name = name_;
    c.statistic = worst_;
    c.reference = 0.0;
    c.relation = ">=";
    c.passed = worst_ >= 0.0;
    return c;
  }

 private:
  std::string name_;
  double worst_ = kInf;
};

CheckResult approx(std::string name, double stat, double ref, double rel_tol) {
  CheckResult c;
  c.name = std::move(name);
  c.statistic = stat;
  c.reference = ref;
  c.relation = "~=";
  c.passed = std::abs(stat - ref) <= rel_tol * std::max(1.0, std::abs(ref));
  return c;
}

CheckResult within_sigma(std::string name, const McEstimate& e, double ref) {
  CheckResult c;
  c.name = std::move(name);
  c.statistic = e.mean;
  c.reference = ref;
  c.sigma = e.std_error;
  c.relation = "~=";
  c.passed = std::abs(e.mean - ref) <= 3.0 * e.std_error;
  return c;
}

void inequality_grids(std::vector<CheckResult>& out) {
  constexpr int kGrid = 10000;
  const double c_fa = (std::sqrt(2.0) - 1.0) / 2.0;
  const double c_b3 = (std::sqrt(2.0) - 1.0) * (std::sqrt(2.0) - 1.0);

  GridCheck fa("g_fa(gamma) >= (sqrt 2 - 1)/2 gamma on (0, 1]");
  GridCheck md30("g_md(rho^2) >= rho^2 / 30 on (0, 1)");
  GridCheck mdfa("g_md(rho^2) >= g_fa(rho^2) - (sqrt 2 - 1)^2 rho^2 on (0, 1)");
  GridCheck b2lo("x^2 (sqrt(1+x) - 1) <= sqrt(1+x^3) - 1 on [0, 1]");
  GridCheck b2hi("sqrt(1+x^3) - 1 <= x (sqrt(1+x) - 1) on [0, 1]");
  GridCheck b3("h(x) + g(x) <= (sqrt 2 - 1)^2 x on (0, 1]");
  for (int i = 1; i <= kGrid; ++i) {
    const double x = static_cast<double>(i) / kGrid;
    fa.observe(g_fa(x) - c_fa * x);
    b3.observe(c_b3 * x - (exponent_gap_h(x) + exponent_gap_g(x)));
    const double r2 = static_cast<double>(i) / (kGrid + 1);
    const double gm = g_md(r2, std::sqrt(r2));
    md30.observe(gm - r2 / 30.0);
    mdfa.observe(gm - (g_fa(r2) - c_b3 * r2));
  }
  for (int i = 0; i < kGrid; ++i) {
    const double x = static_cast<double>(i) / (kGrid - 1);
    const double x3 = x * x * x;
    const double mid = x3 / (std::sqrt(1.0 + x3) + 1.0);
    const double base = x / (std::sqrt(1.0 + x) + 1.0);
    b2lo.observe(mid - x * x * base);
    b2hi.observe(x * base - mid);
  }
  for (auto* g : {&fa, &md30, &mdfa, &b2lo, &b2hi, &b3}) {
    out.push_back(g->result());
  }

  GridCheck simple("detection risk bound <= 2 exp(-d rho^2 / 60)");
  for (double d : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    for (int i = 1; i <= 40; ++i) {
      const double r2 = std::pow(10.0, -4.0 + 4.0 * i / 41.0);
      simple.observe(2.0 * std::exp(-d * r2 / 60.0) - detection_ach_risk(d, r2));
    }
  }
  out.push_back(simple.result());
}

void barrier_checks(std::uint64_t seed, std::vector<CheckResult>& out) {
  Rng rng(derive_seed(seed, "verify/barrier", 0));
  std::uniform_real_distribution<double> ua(-20.0, 20.0), ud(0.5, 50.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = ua(rng), d = ud(rng);
    const BarrierMinimum cf = log_barrier_minimum(a, d);
    // Dense grid, then golden refinement inside the best cell pair.
    constexpr int kCells = 100000;
    double best_x = 0.0, best_f = kInf;
    for (int i = 1; i < kCells; ++i) {
      const double x = -1.0 + 2.0 * i / kCells;
      const double f = log_barrier_objective(a, d, x);
      if (f < best_f) {
        best_f = f;
        best_x = x;
      }
    }
    double lo = std::max(-1.0 + 1e-300, best_x - 2.0 / kCells);
    double hi = std::min(1.0 - 1e-16, best_x + 2.0 / kCells);
    const double k = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100; ++it) {
      const double c = hi - k * (hi - lo), e = lo + k * (hi - lo);
      if (log_barrier_objective(a, d, c) <= log_barrier_objective(a, d, e)) {
        hi = e;
      } else {
        lo = c;
      }
    }
    const double grid_min =
        std::min(best_f, log_barrier_objective(a, d, 0.5 * (lo + hi)));
    worst = std::max(worst, std::abs(grid_min - cf.minimum));
  }
  CheckResult c;
  c.name = "closed-form minimum of a x + (d/2) ln(1/(1-x^2)) vs grid search";
  c.statistic = worst;
  c.reference = 1e-8;
  c.relation = "<=";
  c.passed = worst <= 1e-8;
  out.push_back(c);

  GridCheck b4("-1 + sqrt(1+x) >= c sqrt(x) for c <= sqrt((x0-1)/(x0+1)), "
               "x >= x0^2 - 1");
  Rng rng4(derive_seed(seed, "verify/barrier-ratio", 0));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const double x0 = 1.0 + 20.0 * u01(rng4);
    const double c_max = std::sqrt((x0 - 1.0) / (x0 + 1.0));
    const double cc = c_max * u01(rng4);
    const double x = x0 * x0 - 1.0 + 1000.0 * u01(rng4) * u01(rng4);
    b4.observe(-1.0 + std::sqrt(1.0 + x) - cc * std::sqrt(x));
  }
  out.push_back(b4.result());
}

void chernoff_identities(std::vector<CheckResult>& out) {
  GridCheck range("optimal Chernoff lambdas lie in their MGF domains");
  double worst_fa = 0.0, worst_md = 0.0;
  for (double n : {2.0, 10.0, 100.0}) {
    for (double d : {5.0, 100.0, 1000.0}) {
      for (double rho : {-0.7, -0.2, 0.05, 0.3, 0.9}) {
        const double a = std::abs(rho);
        for (double frac : {0.1, 0.5, 0.9}) {
          const double t = frac * a * n * d;
          const ChernoffLambdas l = chernoff_lambdas(t, n, d, rho);
          range.observe(std::min({l.lambda_fa, 1.0 / n - l.lambda_fa,
                                  l.lambda_md,
                                  1.0 / (n * (1.0 - a)) - l.lambda_md}));
          const double gamma = std::pow(2.0 * t / (d * n), 2.0);
          const double fa = -l.lambda_fa * t + log_mgf_null(l.lambda_fa, n, d);
          const double md = l.lambda_md * t + log_mgf_alt(-l.lambda_md, n, d, a);
          const double ref_fa = -0.5 * d * g_fa(gamma);
          const double ref_md = -0.5 * d * g_md(gamma, rho);
          worst_fa = std::max(worst_fa, std::abs(fa - ref_fa) /
                                            std::max(1.0, std::abs(ref_fa)));
          worst_md = std::max(worst_md, std::abs(md - ref_md) /
                                            std::max(1.0, std::abs(ref_md)));
        }
      }
    }
  }
  out.push_back(range.result());
  for (auto [name, worst] :
       {std::pair{"false-alarm Chernoff exponent at optimal lambda", worst_fa},
        std::pair{"missed-detection Chernoff exponent at optimal lambda",
                  worst_md}}) {
    CheckResult c;
    c.name = name;
    c.statistic = worst;
    c.reference = 1e-10;
    c.relation = "<=";
    c.passed = worst <= 1e-10;
    out.push_back(c);
  }
}

void combinatorics(std::vector<CheckResult>& out) {
  bool ok = true;
  for (std::size_t n = 1; n <= 10; ++n) {
    BigInt total = 0;
    for_each_cycle_type(n, [&](const CycleType& t) { total += cycle_type_count(t); });
    ok = ok && total == factorial(n);
    Rational p = 0;
    for (std::size_t k = 0; k <= n; ++k) p += prob_fixed_points(n, k);
    ok = ok && p == 1;
    // !n = n! sum_k (-1)^k / k!
    Rational series = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      Rational term(1, factorial(k));
      series += (k % 2 ? -term : term);
    }
    ok = ok && Rational(derangement_count(n)) == series * factorial(n);
  }
  CheckResult c;
  c.name = "cycle-type counts sum to n!, fixed-point law sums to 1, "
           "derangement series (n <= 10)";
  c.statistic = ok ? 1.0 : 0.0;
  c.reference = 1.0;
  c.relation = "~=";
  c.passed = ok;
  out.push_back(c);
}

void second_moments(const VerifyOptions& o, std::vector<CheckResult>& out) {
  bool exact_ok = true;
  GridCheck dominated("exact E0 L^2 <= (1 - rho^2)^{-dn}");
  for (std::size_t n = 1; n <= 6; ++n) {
    for (double d : {1.0, 2.0, 5.0}) {
      for (double r2 : {0.01, 0.1, 0.3}) {
        const double exact = exact_second_moment(n, d, r2);
        exact_ok = exact_ok && exact == second_moment_by_enumeration(n, d, r2);
      }
    }
  }
  for (std::size_t n = 1; n <= 10; ++n) {
    for (double d = 1.0; d <= 20.0; d += 1.0) {
      for (double r2 : {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.3, 0.6, 0.9}) {
        const double lhs = exact_second_moment(n, d, r2);
        const double rhs = std::exp(-d * n * std::log1p(-r2));
        dominated.observe((rhs - lhs) / rhs + 1e-14);
      }
    }
  }
  CheckResult c;
  c.name = "cycle-type second moment equals full S_n enumeration (n <= 6)";
  c.statistic = exact_ok ? 1.0 : 0.0;
  c.reference = 1.0;
  c.relation = "~=";
  c.passed = exact_ok;
  out.push_back(c);
  out.push_back(dominated.result());

  const SeedSpec seed{o.master_seed, "verify/second-moment"};
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::uint64_t d : {1, 2, 5}) {
      for (double r2 : {0.01, 0.1, 0.3}) {
        const std::string tag = "n=" + std::to_string(n) + ",d=" +
                                std::to_string(d) + ",rho2=" + fmt(r2);
        const McEstimate e = mc_second_moment(
            n, d, std::sqrt(r2), o.trials, seed.child(tag),
            SecondMomentEstimator::kConditional, o.threads);
        out.push_back(within_sigma("Monte-Carlo E0 L^2 vs exact (" + tag + ")",
                                   e, exact_second_moment(n, double(d), r2)));
      }
    }
  }
}

void likelihood_checks(const VerifyOptions& o, std::vector<CheckResult>& out) {
  const SeedSpec seed{o.master_seed, "verify/likelihood"};
  const std::uint64_t trials = std::max<std::uint64_t>(1, o.trials / 4);
  for (auto [n, d, rho] : {std::tuple{2, 2, 0.3}, std::tuple{3, 2, 0.5},
                           std::tuple{4, 3, 0.2}}) {
    const std::string tag = "n=" + std::to_string(n) + ",d=" +
                            std::to_string(d) + ",rho=" + fmt(rho);
    out.push_back(within_sigma(
        "E0 L = 1 (" + tag + ")",
        mc_likelihood_mean(n, d, rho, trials, seed.child("mean/" + tag), o.threads),
        1.0));
  }
  for (auto [n, d, r2] : {std::tuple{4, 2, 0.001}, std::tuple{2, 2, 0.1},
                          std::tuple{3, 1, 0.2}}) {
    const std::string tag = "n=" + std::to_string(n) + ",d=" +
                            std::to_string(d) + ",rho2=" + fmt(r2);
    const double rho = std::sqrt(r2);
    const McEstimate tv = tv_risk_lower_bound_mc(
        n, d, rho, trials, seed.child("tv/" + tag), o.threads);
    double converse = unconditional_converse_risk(n, d, r2);
    if (o.inject_fault && n == 4) converse += 0.5;
    CheckResult c;
    c.name = "1 - E0|L-1| >= unconditional converse - 3 sigma (" + tag + ")";
    c.statistic = tv.mean;
    c.reference = converse;
    c.sigma = tv.std_error;
    c.relation = ">=";
    c.passed = tv.mean >= converse - 3.0 * tv.std_error;
    out.push_back(c);

    const double abs_dev = 1.0 - tv.mean;
    const double excess = exact_second_moment(n, d, r2) - 1.0;
    CheckResult j;
    j.name = "(E0|L-1|)^2 <= E0 L^2 - 1 (" + tag + ")";
    j.statistic = abs_dev * abs_dev;
    j.reference = excess;
    j.sigma = 2.0 * abs_dev * tv.std_error;
    j.relation = "<=";
    j.passed = j.statistic <= excess + 5.0 * j.sigma;
    out.push_back(j);
  }
}

void mgf_checks(const VerifyOptions& o, std::vector<CheckResult>& out) {
  const SeedSpec seed{o.master_seed, "verify/mgf"};
  for (auto [n, d, rho, lambda] :
       {std::tuple{2, 3, 0.5, 0.05}, std::tuple{3, 2, -0.4, 0.03},
        std::tuple{2, 2, 0.7, -0.1}}) {
    const ProblemParams p(n, d, rho);
    const std::string tag = "n=" + std::to_string(n) + ",d=" +
                            std::to_string(d) + ",rho=" + fmt(rho) +
                            ",lambda=" + fmt(lambda);
    const SeedSpec s = seed.child(tag);
    auto blocks = parallel_blocks(
        o.trials, kTrialBlock, o.threads,
        [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
          Moments m;
          for (std::uint64_t i = b; i < e; ++i) {
            Rng rng(s.trial_seed(i));
            m.add(std::exp(lambda *
                           draw_statistic(p, true, Sampler::kDatabases, rng)));
          }
          return m;
        });
    Moments total;
    for (const auto& m : blocks) total.merge(m);
    out.push_back(within_sigma("statistic MGF under the alternate (" + tag + ")",
                               {total.mean(), total.std_error(), total.count},
                               mgf_alt(lambda, n, d, rho)));
  }
  const std::uint64_t trials = o.trials;
  out.push_back(quadratic_mgf_check(Eigen::MatrixXd::Zero(2, 2),
                                    Eigen::VectorXd::Zero(2), trials,
                                    seed.child("quad0"), o.threads));
  Eigen::MatrixXd r(2, 2);
  r << 0.3, 0.0, 0.0, -0.2;
  Eigen::VectorXd b(2);
  b << 1.0, 0.0;
  out.push_back(
      quadratic_mgf_check(r, b, trials, seed.child("quad1"), o.threads));
  out.push_back(pair_mgf_check(0.2, 0.3, 3, trials, seed.child("pair"), o.threads));
  for (std::size_t len : {1, 2, 3, 7, 20, 50}) {
    for (double rho : {0.3, 0.5, 0.9}) {
      out.push_back(circulant_det_check(len, rho));
    }
  }
}

void concentration(const VerifyOptions& o, std::vector<CheckResult>& out) {
  const SeedSpec seed{o.master_seed, "verify/concentration"};
  const std::vector<double> lm_grid{1.0, 5.0, 10.0, 15.0, 20.0, 25.0};
  for (const auto& c : laurent_massart_check(Eigen::VectorXd::Ones(50), lm_grid,
                                             o.trials, seed.child("lm-ones"),
                                             o.threads)) {
    out.push_back(c);
  }
  Eigen::VectorXd het(20);
  for (int i = 0; i < 20; ++i) het(i) = 0.1 + 0.1 * i;
  for (const auto& c : laurent_massart_check(het, {0.5, 2.0, 5.0, 10.0, 15.0},
                                             o.trials, seed.child("lm-het"),
                                             o.threads)) {
    out.push_back(c);
  }
  const std::vector<double> chaos_grid{0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  Eigen::MatrixXd diag = Eigen::VectorXd::LinSpaced(8, 0.2, 1.6).asDiagonal();
  for (const auto& set :
       {gaussian_chaos_check(diag, chaos_grid, o.trials, seed.child("diag"),
                             o.threads),
        gaussian_chaos_check(truncation_chaos_matrix(10, 0.6), chaos_grid,
                             o.trials, seed.child("block"), o.threads),
        gaussian_chaos_check(truncation_chaos_matrix(10, -0.3), chaos_grid,
                             o.trials, seed.child("block-neg"), o.threads),
        gaussian_chaos_check(Eigen::MatrixXd::Zero(4, 4), chaos_grid,
                             std::min<std::uint64_t>(o.trials, 1000),
                             seed.child("zero"), o.threads)}) {
    out.insert(out.end(), set.begin(), set.end());
  }
}

void converse_machinery(const VerifyOptions& o, std::vector<CheckResult>& out) {
  GridCheck dominance("truncated converse >= unconditional converse");
  for (double n : {100.0, 400.0, 2500.0, 10000.0}) {
    for (double d : {20.0, 100.0, 1000.0}) {
      for (int i = 0; i < 30; ++i) {
        const double r2 = std::pow(10.0, -9.0 + 8.0 * i / 29.0);
        const TruncatedConverse t = truncated_converse_detail(n, d, r2);
        dominance.observe(t.risk - t.unconditional);
      }
    }
  }
  out.push_back(dominance.result());

  GridCheck positive("psi, psi1, psi2 > 0 at rho^2 = 1/(200 d sqrt n), "
                     "k* = ceil(13 sqrt n), margin 0.1");
  for (double n : {400.0, 2500.0, 10000.0}) {
    for (double d : {200.0, 1000.0}) {
      const double r2 = 1.0 / (200.0 * d * std::sqrt(n));
      const TruncationSchedule s =
          truncation_schedule(n, d, r2, default_k_star(n), 0.1);
      const PsiValues p = psi_values(s, n, d, r2);
      positive.observe(std::min({p.psi, p.psi1, p.psi2}));
    }
  }
  out.push_back(positive.result());

  GridCheck ordering("curve ordering: detection converse <= achievable");
  for (double d : {50.0, 500.0, 5000.0}) {
    const BoundCurvePoint pt = curve_point(d, 10000.0, d, 0.1);
    if (pt.rho2_det_ach && pt.rho2_det_conv) {
      ordering.observe(*pt.rho2_det_ach - *pt.rho2_det_conv);
    }
  }
  for (double n : {100.0, 1000.0, 20000.0}) {
    const BoundCurvePoint pt = curve_point(n, n, 1000.0, 0.1);
    if (pt.rho2_det_ach && pt.rho2_det_conv) {
      ordering.observe(*pt.rho2_det_ach - *pt.rho2_det_conv);
    }
  }
  out.push_back(ordering.result());

  out.push_back(truncation_event_check(
      12, 40, 0.5, 4, 0.1, std::max<std::uint64_t>(1, o.trials / 10),
      {o.master_seed, "verify/truncation-event"}, o.threads));
}

void decoder_checks(const VerifyOptions& o, std::vector<CheckResult>& out) {
  double worst_gap = 0.0, worst_slack = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng(derive_seed(o.master_seed, "verify/decoder", i));
    const std::size_t n = 2 + i % 6;
    const ProblemParams p = ProblemParams::alternate(n, 3, i % 2 ? 0.4 : -0.6);
    const DatabasePair pair =
        sample_alt(p, uniform_permutation(n, rng), rng);
    const AlignmentResult ml = ml_decode(pair, p.rho);
    const AlignmentResult bf = brute_force_decode(pair, p.rho);
    worst_gap = std::max(worst_gap, std::abs(ml.score - bf.score));
    const Eigen::MatrixXd s = score_matrix(pair, p.rho_sign());
    worst_slack =
        std::max(worst_slack, slackness_violation(s, solve_assignment_max(s)));
  }
  out.push_back(approx("assignment decoder score equals brute force (n <= 7)",
                       worst_gap, 0.0, 0.0));
  CheckResult c;
  c.name = "assignment dual certificate (complementary slackness)";
  c.statistic = worst_slack;
  c.reference = 1e-7;
  c.relation = "<=";
  c.passed = worst_slack <= 1e-7;
  out.push_back(c);
}

void risk_checks(const VerifyOptions& o, std::vector<CheckResult>& out) {
  const std::uint64_t trials = std::max<std::uint64_t>(1, o.trials / 20);
  for (auto [d, n, r2] : {std::tuple{2000, 100, 0.05}, std::tuple{500, 50, 0.2}}) {
    const ProblemParams p = ProblemParams::alternate(n, d, std::sqrt(r2));
    const std::string tag = "d=" + std::to_string(d) + ",n=" +
                            std::to_string(n) + ",rho2=" + fmt(r2);
    const RiskEstimate r =
        monte_carlo_risk(p, standard_threshold(p), trials,
                         {o.master_seed, "verify/risk/" + tag},
                         {o.threads, Sampler::kAuto});
    CheckResult c;
    c.name = "empirical risk <= minimized bound + 3 CI (" + tag + ")";
    c.statistic = r.risk();
    c.reference = optimal_gamma(p).bound;
    c.sigma = r.ci_radius / 3.0;
    c.relation = "<=";
    c.passed = r.risk() <= c.reference + 3.0 * r.ci_radius;
    out.push_back(c);
  }
}

}  // namespace

bool VerifyReport::all_passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
}

VerifyReport run_verify_suite(const VerifyOptions& o) {
  VerifyReport report;
  auto& out = report.checks;
  out.push_back(approx("g_fa(3) = 1 - ln(3/2)", g_fa(3.0),
                       1.0 - std::log(1.5), 1e-15));
  out.push_back(approx("detection risk at d = 1000, rho^2 = 0.0240385162152998",
                       detection_ach_risk(1000.0, 0.0240385162152998), 0.1,
                       1e-3));
  inequality_grids(out);
  barrier_checks(o.master_seed, out);
  chernoff_identities(out);
  combinatorics(out);
  second_moments(o, out);
  likelihood_checks(o, out);
  mgf_checks(o, out);
  concentration(o, out);
  converse_machinery(o, out);
  decoder_checks(o, out);
  risk_checks(o, out);
  return report;
}

}  // namespace dbcorr
