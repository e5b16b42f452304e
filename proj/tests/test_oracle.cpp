#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "dbcorr/bounds.hpp"
#include "dbcorr/errors.hpp"
#include "dbcorr/oracle.hpp"

using namespace dbcorr;

namespace {

bool within(const McEstimate& e, double ref, double k = 3.0) {
  return std::abs(e.mean - ref) <= k * e.std_error;
}

// (1/n!) sum_sigma prod_i N(X_i; rho Y_sigma(i), q I) / N(X_i; 0, I) with
// plain products; only usable where nothing under- or overflows.
double naive_likelihood(const DatabasePair& p, double rho) {
  const auto n = static_cast<std::size_t>(p.n());
  const double q = 1 - rho * rho;
  const double d = static_cast<double>(p.d());
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  double total = 0.0, count = 0.0;
  do {
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = p.x.row(i) - rho * p.y.row(sigma[i]);
      prod *= std::pow(q, -d / 2) * std::exp(-r.squaredNorm() / (2 * q)) /
              std::exp(-p.x.row(i).squaredNorm() / 2);
    }
    total += prod;
    count += 1;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total / count;
}

}  // namespace

TEST_CASE("likelihood ratio") {
  SUBCASE("rho = 0") {
    const DatabasePair p = sample_null(ProblemParams(4, 3, 0.0), 61);
    CHECK(log_likelihood_ratio(p, 0.0) == 0.0);
    CHECK(likelihood_sample(p, 0.0).l_value == 1.0);
    CHECK(std::abs(log_likelihood_ratio(p, 1e-9)) < 1e-7);
  }
  SUBCASE("single row against the joint density") {
    for (double rho : {0.3, -0.8}) {
      const DatabasePair p = sample_null(ProblemParams(1, 5, 0.0), 62);
      const double q = 1 - rho * rho;
      const double direct =
          -2.5 * std::log(q) -
          ((p.y.row(0) - rho * p.x.row(0)).squaredNorm() / q -
           p.y.row(0).squaredNorm()) /
              2;
      CHECK(log_likelihood_ratio(p, rho) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
  SUBCASE("log-sum-exp matches the naive sum") {
    Rng rng(63);
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t n = 1 + rng() % 6;
      const double rho = rep % 2 ? 0.4 : -0.6;
      const DatabasePair p = sample_alt(ProblemParams(n, 3, rho),
                                        uniform_permutation(n, rng), rng);
      const double naive = naive_likelihood(p, rho);
      const LikelihoodSample s = likelihood_sample(p, rho);
      CHECK(std::abs(s.l_value / naive - 1) <= 1e-8);
      CHECK(s.l_value == doctest::Approx(std::exp(s.log_l)));
    }
  }
  SUBCASE("unit mean under the null") {
    CHECK(within(mc_likelihood_mean(3, 2, 0.5, 100000, {1, "l1"}), 1.0));
    CHECK(within(mc_likelihood_mean(5, 1, -0.3, 50000, {1, "l2"}), 1.0));
  }
  CHECK_THROWS_AS(log_likelihood_ratio(sample_null(ProblemParams(9, 2, 0.0), 1), 0.5),
                  SizeError);
}

TEST_CASE("exact second moment") {
  for (double r2 : {0.01, 0.2, 0.7}) {
    for (double d : {1.0, 3.0, 10.0}) {
      CHECK(exact_second_moment(1, d, r2) == doctest::Approx(std::pow(1 - r2, -d)));
      CHECK(exact_second_moment(2, d, r2) ==
            doctest::Approx(0.5 * (std::pow(1 - r2, -2 * d) +
                                   std::pow(1 - r2 * r2, -d))));
    }
  }
  CHECK(exact_second_moment(5, 3, 0.16) == second_moment_by_enumeration(5, 3, 0.16));
  for (std::size_t n = 1; n <= 10; ++n) {
    for (double d : {1.0, 2.0, 7.0, 20.0}) {
      for (double r2 : {0.001, 0.05, 0.3, 0.8}) {
        const double m = exact_second_moment(n, d, r2);
        CHECK(m >= 1.0);
        CHECK(m <= std::pow(1 - r2, -d * static_cast<double>(n)) * (1 + 1e-12));
      }
    }
  }
  CHECK(exact_second_moment(4, 3, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(exact_second_moment(11, 2, 0.1), SizeError);
}

TEST_CASE("Monte-Carlo second moment") {
  const double r2 = 0.09;
  CHECK(within(mc_second_moment(2, 2, 0.3, 200000, {1, "m2"}),
               exact_second_moment(2, 2, r2)));
  CHECK(within(mc_second_moment(3, 1, 0.5, 200000, {1, "m3"}),
               exact_second_moment(3, 1, 0.25)));
  // Below |rho| = 1/3 the direct estimator has finite variance too.
  CHECK(within(mc_second_moment(2, 2, 0.2, 200000, {1, "m4"},
                                SecondMomentEstimator::kDirect),
               exact_second_moment(2, 2, 0.04)));
  const McEstimate zero = mc_second_moment(3, 2, 0.0, 100, {1, "m0"});
  CHECK(zero.mean == 1.0);
  CHECK(zero.std_error == 0.0);
  // Determinism across workers.
  CHECK(mc_second_moment(3, 2, 0.4, 5000, {2, "w"}, {}, 1).mean ==
        mc_second_moment(3, 2, 0.4, 5000, {2, "w"}, {}, 4).mean);
}

TEST_CASE("total-variation lower bound") {
  const McEstimate zero = tv_risk_lower_bound_mc(3, 2, 0.0, 100, {1, "t0"});
  CHECK(zero.mean == 1.0);
  const double rho = std::sqrt(0.001);
  const McEstimate e = tv_risk_lower_bound_mc(4, 2, rho, 100000, {1, "tv"});
  CHECK(e.mean >= unconditional_converse_risk(4, 2, 0.001) - 3 * e.std_error);
  // Falls as the correlation grows.
  double prev = 2.0, prev_se = 0.0;
  for (double r2 : {0.001, 0.05, 0.3}) {
    const McEstimate t = tv_risk_lower_bound_mc(3, 2, std::sqrt(r2), 50000, {1, "sw"});
    CHECK(t.mean <= prev + 3 * (t.std_error + prev_se));
    prev = t.mean;
    prev_se = t.std_error;
  }
  // (E|L-1|)^2 <= E L^2 - 1.
  const double l1 = 1 - e.mean;
  CHECK(l1 * l1 <= exact_second_moment(4, 2, 0.001) - 1 + 5 * e.std_error);
}

TEST_CASE("Gaussian MGF identities") {
  SUBCASE("trivial quadratic form") {
    CHECK(quadratic_mgf_closed_form(Eigen::MatrixXd::Zero(3, 3),
                                    Eigen::VectorXd::Zero(3)) == 1.0);
  }
  SUBCASE("diagonal form by hand") {
    Eigen::MatrixXd r(2, 2);
    r << 0.3, 0, 0, -0.2;
    Eigen::VectorXd b(2);
    b << 1, 0;
    // exp(b1^2 / (2 (1 - 0.3))) / sqrt(0.7 * 1.2)
    const double hand = std::exp(1.0 / 1.4) / std::sqrt(0.7 * 1.2);
    CHECK(quadratic_mgf_closed_form(r, b) == doctest::Approx(hand).epsilon(1e-14));
    const CheckResult c = quadratic_mgf_check(r, b, 200000, {1, "q"});
    CHECK(c.passed);
    CHECK(c.reference == doctest::Approx(hand));
  }
  SUBCASE("non-definite input is rejected") {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(2, 2) * 1.5;
    CHECK_THROWS_AS(quadratic_mgf_check(r, Eigen::VectorXd::Zero(2), 10, {1, "x"}),
                    DomainError);
    r = Eigen::MatrixXd::Identity(2, 2) * 0.6;  // I - 2R is not definite
    CHECK_THROWS_AS(quadratic_mgf_check(r, Eigen::VectorXd::Zero(2), 10, {1, "x"}),
                    DomainError);
  }
  SUBCASE("pair MGF") {
    CHECK(pair_mgf_closed_form(0.2, 0.3, 3) ==
          doctest::Approx(std::pow(1.4 * 1.4 - 0.09, -1.5)));
    CHECK(pair_mgf_check(0.2, 0.3, 3, 200000, {1, "pm"}).passed);
  }
}

TEST_CASE("cycle circulant determinant") {
  for (std::size_t len : {1u, 2u, 7u, 30u, 50u}) {
    for (double rho : {0.5, 0.9, -0.7}) {
      CHECK(circulant_det_check(len, rho).passed);
    }
  }
  // A single fixed point: the 1x1 determinant is the entry itself.
  const Eigen::MatrixXd one = cycle_circulant(1, 0.5);
  REQUIRE(one.rows() == 1);
  const double want = std::pow(1 - std::pow(0.5, 4), -1.0) *
                      std::pow(1 - 0.25, 2);
  CHECK(one(0, 0) == doctest::Approx(want));
}

TEST_CASE("Laurent-Massart lower tail") {
  const std::vector<double> ts{0.5, 2.0, 5.0, 10.0, 15.0};
  for (const auto& c :
       laurent_massart_check(Eigen::VectorXd::Ones(50), ts, 50000, {1, "lm"})) {
    CHECK(c.passed);
  }
  Eigen::VectorXd het(6);
  het << 0.1, 0.5, 1, 2, 3, 0;
  for (const auto& c : laurent_massart_check(het, {0.5, 1, 3}, 50000, {1, "h"})) {
    CHECK(c.passed);
  }
  CHECK(laurent_massart_bound(Eigen::VectorXd::Ones(50), 1e-9) ==
        doctest::Approx(1.0));
}

TEST_CASE("Gaussian chaos tail") {
  SUBCASE("diagonal matrix has no off-diagonal spectrum") {
    const Eigen::MatrixXd a = Eigen::VectorXd::LinSpaced(4, 0.5, 2).asDiagonal();
    const ChaosSplit s = chaos_split(a);
    CHECK(s.lambda.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& c : gaussian_chaos_check(a, {1, 4, 10}, 50000, {1, "cd"})) {
      CHECK(c.passed);
    }
  }
  SUBCASE("truncation block matrix") {
    for (double rho : {0.6, -0.3}) {
      const Eigen::MatrixXd a = truncation_chaos_matrix(5, rho);
      REQUIRE(a.rows() == 10);
      const ChaosSplit s = chaos_split(a);
      // Off-diagonal blocks sqrt(1-rho^2)/2 I give eigenvalues +- that value.
      const double beta = std::sqrt(1 - rho * rho) / 2;
      for (Eigen::Index i = 0; i < s.lambda.size(); ++i) {
        CHECK(std::abs(std::abs(s.lambda(i)) - beta) < 1e-12);
      }
      for (const auto& c : gaussian_chaos_check(a, {1, 3, 8}, 50000, {1, "tb"})) {
        CHECK(c.passed);
      }
    }
  }
  SUBCASE("zero matrix") {
    for (const auto& c : gaussian_chaos_check(Eigen::MatrixXd::Zero(3, 3), {0.5, 2},
                                              1000, {1, "z"})) {
      CHECK(c.passed);
      CHECK(c.statistic == 0.0);
    }
  }
  SUBCASE("asymmetric input is rejected") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 1) = 1;
    CHECK_THROWS_AS(chaos_split(a), DomainError);
  }
}

TEST_CASE("truncation event") {
  SUBCASE("subset walk and sorted extremes agree") {
    Rng rng(64);
    const double rho = 0.5;
    for (int rep = 0; rep < 300; ++rep) {
      const std::size_t n = 8 + rng() % 5;
      const std::uint64_t d = 30 + rng() % 30;
      const TruncationSchedule sch =
          build_truncation_schedule(n, d, rho * rho, 2 + rng() % 3, 0.1);
      if (!sch.valid()) continue;
      const Permutation sigma =
          rep % 3 ? Permutation::identity(n) : uniform_permutation(n, rng);
      const DatabasePair p = sample_alt(ProblemParams(n, d, rho), sigma, rng);
      CHECK(truncation_event_holds(p, sigma, rho, sch, true) ==
            truncation_event_holds(p, sigma, rho, sch, false));
    }
  }
  SUBCASE("probability is above the first-moment bound") {
    const CheckResult c = truncation_event_check(12, 40, 0.5, 4, 0.1, 20000, {1, "te"});
    CHECK(c.passed);
  }
}

TEST_CASE("scalar inequalities") {
  SUBCASE("closed-form minimizer against a dense grid") {
    std::mt19937_64 rng(65);
    std::uniform_real_distribution<double> ua(-50, 50), ud(0.5, 200);
    for (int rep = 0; rep < 100; ++rep) {
      const double a = ua(rng), d = ud(rng);
      const BarrierMinimum cf = log_barrier_minimum(a, d);
      CHECK(std::abs(log_barrier_objective(a, d, cf.argmin) - cf.minimum) <=
            1e-9 * std::max(1.0, std::abs(cf.minimum)));
      double best = 1e300, arg = 0;
      constexpr int kGrid = 100000;
      for (int i = 1; i < kGrid; ++i) {
        const double x = -1 + 2.0 * i / kGrid;
        const double v = log_barrier_objective(a, d, x);
        if (v < best) best = v, arg = x;
      }
      CHECK(cf.minimum <= best + 1e-12);
      CHECK(std::abs(cf.argmin - arg) <= 2.0 / kGrid);
    }
  }
  SUBCASE("h + g below the quadratic constant") {
    const double c = (std::sqrt(2.0) - 1) * (std::sqrt(2.0) - 1);
    for (int i = 1; i <= 10000; ++i) {
      const double x = i / 10000.0;
      CHECK(exponent_gap_h(x) + exponent_gap_g(x) <= c * x);
    }
  }
}
