// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "dbcorr/errors.hpp"
#include "dbcorr/parallel.hpp"

namespace dbcorr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LogSumExp {
  double max = -kInf;
  double scaled = 0.0;

  void add(double x) {
    if (x == -kInf) return;
    if (x > max) {
      scaled = scaled * std::exp(max - x) + 1.0;
      max = x;
    } else {
      scaled += std::exp(x - max);
    }
  }
  double value() const { return max == -kInf ? -kInf : max + std::log(scaled); }
};

// log of (1/n!) sum over S_n of exp(sum_i m(i, pi(i))).
double log_mean_over_permutations(const Eigen::MatrixXd& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  LogSumExp acc;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p[i]));
    }
    acc.add(s);
  } while (std::next_permutation(p.begin(), p.end()));
  return acc.value() - std::lgamma(static_cast<double>(n) + 1.0);
}

void require_rho(double rho) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("|rho| must be below 1");
}

// Per-type term of the cycle-type sum, shared by both second-moment paths so
// that they agree bit for bit when the multiplicities agree.
double cycle_type_term(const CycleType& t, const BigInt& multiplicity,
                       double log_n_fact, double d, double rho2) {
  const double log_rho2 = std::log(rho2);
  double log_term = std::log(multiplicity.convert_to<double>()) - log_n_fact;
  for (std::size_t k = 1; k < t.counts.size(); ++k) {
    if (t.counts[k] == 0) continue;
    const double rho2k = std::exp(static_cast<double>(k) * log_rho2);
    log_term -= d * t.counts[k] * std::log1p(-rho2k);
  }
  return std::exp(log_term);
}

void require_second_moment_args(std::size_t n, double d, double rho2) {
  if (n == 0) throw SizeError("n must be at least 1");
  if (n > kSecondMomentCap) {
    throw SizeError("exact second moment is capped at n = 10");
  }
  if (!(d > 0.0)) throw DomainError("d must be positive");
  if (!(rho2 >= 0.0 && rho2 < 1.0)) throw DomainError("rho^2 must lie in [0,1)");
}

template <class PerTrial>
McEstimate run_moments(std::uint64_t trials, unsigned threads,
                       const SeedSpec& seed, PerTrial per_trial) {
  if (trials == 0) throw DomainError("trials must be at least 1");
  auto blocks = parallel_blocks(
      trials, kTrialBlock, threads,
      [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
        Moments m;
        for (std::uint64_t i = b; i < e; ++i) {
          Rng rng(seed.trial_seed(i));
          m.add(per_trial(rng));
        }
        return m;
      });
  Moments total;
  for (const auto& m : blocks) total.merge(m);
  return {total.mean(), total.std_error(), total.count};
}

}  // namespace

double log_likelihood_ratio(const DatabasePair& pair, double rho) {
  require_rho(rho);
  const auto n = static_cast<std::size_t>(pair.n());
  if (n > kLikelihoodCap) {
    throw SizeError("likelihood enumeration is capped at n = 8");
  }
  if (rho == 0.0) return 0.0;
  const double rho2 = rho * rho;
  const double q = 1.0 - rho2;
  const double d = static_cast<double>(pair.d());
  const Eigen::VectorXd xx = pair.x.rowwise().squaredNorm();
  const Eigen::VectorXd yy = pair.y.rowwise().squaredNorm();
  const Eigen::MatrixXd xy = pair.x * pair.y.transpose();
  Eigen::MatrixXd ell(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double log_norm = -0.5 * d * std::log1p(-rho2);
  for (Eigen::Index i = 0; i < ell.rows(); ++i) {
    for (Eigen::Index j = 0; j < ell.cols(); ++j) {
      const double resid = xx(i) - 2.0 * rho * xy(i, j) + rho2 * yy(j);
      ell(i, j) = log_norm - resid / (2.0 * q) + 0.5 * xx(i);
    }
  }
  return log_mean_over_permutations(ell);
}

LikelihoodSample likelihood_sample(const DatabasePair& pair, double rho) {
  const double log_l = log_likelihood_ratio(pair, rho);
  return {std::exp(log_l), log_l};
}

double exact_second_moment(std::size_t n, double d, double rho2) {
  require_second_moment_args(n, d, rho2);
  const double log_n_fact = std::log(factorial(n).convert_to<double>());
  double total = 0.0;
  for_each_cycle_type(n, [&](const CycleType& t) {
    total += cycle_type_term(t, cycle_type_count(t), log_n_fact, d, rho2);
  });
  return total;
}

double second_moment_by_enumeration(std::size_t n, double d, double rho2) {
  require_second_moment_args(n, d, rho2);
  std::map<std::vector<std::uint32_t>, std::uint64_t> tally;
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  do {
    ++tally[cycle_decompose(Permutation(p)).counts];
  } while (std::next_permutation(p.begin(), p.end()));
  const double log_n_fact = std::log(factorial(n).convert_to<double>());
  double total = 0.0;
  for_each_cycle_type(n, [&](const CycleType& t) {
    const auto it = tally.find(t.counts);
    if (it == tally.end()) return;
    total += cycle_type_term(t, BigInt(it->second), log_n_fact, d, rho2);
  });
  return total;
}

McEstimate mc_second_moment(std::size_t n, std::uint64_t d, double rho,
                            std::uint64_t trials, const SeedSpec& seed,
                            SecondMomentEstimator estimator, unsigned threads) {
  require_rho(rho);
  if (n == 0 || n > kMcSecondMomentCap) {
    throw SizeError("Monte-Carlo second moment needs 1 <= n <= 6");
  }
  const ProblemParams params(n, d, rho);
  if (estimator == SecondMomentEstimator::kDirect) {
    return run_moments(trials, threads, seed, [&](Rng& rng) {
      const DatabasePair pair = sample_null(params, rng);
      return std::exp(2.0 * log_likelihood_ratio(pair, rho));
    });
  }
  const double rho2 = rho * rho;
  const double rho4 = rho2 * rho2;
  const double c1 = rho4 / (2.0 * (1.0 - rho4));
  const double c2 = rho2 / (1.0 - rho4);
  const double base = -0.5 * static_cast<double>(d) * std::log1p(-rho4);
  return run_moments(trials, threads, seed, [&](Rng& rng) {
    RowMatrix y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    fill_standard_normal(y, rng);
    const Eigen::VectorXd sq = y.rowwise().squaredNorm();
    const Eigen::MatrixXd gram = y * y.transpose();
    Eigen::MatrixXd qm(gram.rows(), gram.cols());
    for (Eigen::Index a = 0; a < qm.rows(); ++a) {
      for (Eigen::Index b = 0; b < qm.cols(); ++b) {
        qm(a, b) = base - c1 * (sq(a) + sq(b)) + c2 * gram(a, b);
      }
    }
    return std::exp(log_mean_over_permutations(qm));
  });
}

McEstimate mc_likelihood_mean(std::size_t n, std::uint64_t d, double rho,
                              std::uint64_t trials, const SeedSpec& seed,
                              unsigned threads) {
  require_rho(rho);
  if (n == 0 || n > kLikelihoodCap) throw SizeError("need 1 <= n <= 8");
  const ProblemParams params(n, d, rho);
  return run_moments(trials, threads, seed, [&](Rng& rng) {
    return std::exp(log_likelihood_ratio(sample_null(params, rng), rho));
  });
}

McEstimate tv_risk_lower_bound_mc(std::size_t n, std::uint64_t d, double rho,
                                  std::uint64_t trials, const SeedSpec& seed,
                                  unsigned threads) {
  require_rho(rho);
  if (n == 0 || n > kMcSecondMomentCap) throw SizeError("need 1 <= n <= 6");
  const ProblemParams params(n, d, rho);
  McEstimate e = run_moments(trials, threads, seed, [&](Rng& rng) {
    const double l =
        std::exp(log_likelihood_ratio(sample_null(params, rng), rho));
    return std::abs(l - 1.0);
  });
  e.mean = 1.0 - e.mean;
  return e;
}

double quadratic_mgf_closed_form(const Eigen::MatrixXd& r,
                                 const Eigen::VectorXd& b) {
  if (r.rows() != r.cols() || r.rows() != b.size()) {
    throw ShapeError("R must be square and match b");
  }
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(r.rows(), r.cols()) - r;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw DomainError("I - R must be positive definite");
  }
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double quad = b.dot(llt.solve(b));
  return std::exp(0.5 * quad - 0.5 * log_det);
}

CheckResult quadratic_mgf_check(const Eigen::MatrixXd& r,
                                const Eigen::VectorXd& b, std::uint64_t trials,
                                const SeedSpec& seed, unsigned threads) {
  if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("R must be symmetric");
  }
  const double closed = quadratic_mgf_closed_form(r, b);
  const Eigen::MatrixXd twice =
      Eigen::MatrixXd::Identity(r.rows(), r.cols()) - 2.0 * r;
  if (Eigen::LLT<Eigen::MatrixXd>(twice).info() != Eigen::Success) {
    throw DomainError("I - 2R must be positive definite for finite variance");
  }
  const Eigen::Index dim = r.rows();
  const McEstimate e = run_moments(trials, threads, seed, [&](Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x(i) = normal(rng);
    return std::exp(0.5 * x.dot(r * x) + x.dot(b));
  });
  CheckResult c;
  c.name = "quadratic MGF";
  c.statistic = e.mean;
  c.reference = closed;
  c.sigma = e.std_error;
  c.relation = "~=";
  c.passed = std::abs(e.mean - closed) <= 3.0 * e.std_error;
  return c;
}

double pair_mgf_closed_form(double a, double b, double d) {
  if (!(1.0 + 2.0 * a > std::abs(b))) {
    throw DomainError("pair MGF needs 1 + 2a > |b|");
  }
  return std::exp(-0.5 * d * std::log((1.0 + 2.0 * a) * (1.0 + 2.0 * a) - b * b));
}

CheckResult pair_mgf_check(double a, double b, std::uint64_t d,
                           std::uint64_t trials, const SeedSpec& seed,
                           unsigned threads) {
  const double closed = pair_mgf_closed_form(a, b, static_cast<double>(d));
  if (!(1.0 + 4.0 * a > 2.0 * std::abs(b))) {
    throw DomainError("pair MGF estimate needs 1 + 4a > 2|b| for finite variance");
  }
  const McEstimate e = run_moments(trials, threads, seed, [&](Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double expo = 0.0;
    for (std::uint64_t k = 0; k < d; ++k) {
      const double x = normal(rng);
      const double y = normal(rng);
      expo += -a * (x * x + y * y) + b * x * y;
    }
    return std::exp(expo);
  });
  CheckResult c;
  c.name = "pair MGF";
  c.statistic = e.mean;
  c.reference = closed;
  c.sigma = e.std_error;
  c.relation = "~=";
  c.passed = std::abs(e.mean - closed) <= 3.0 * e.std_error;
  return c;
}

Eigen::MatrixXd cycle_circulant(std::size_t len, double rho) {
  require_rho(rho);
  if (len == 0) throw SizeError("cycle length must be at least 1");
  const auto l = static_cast<Eigen::Index>(len);
  const double rho2 = rho * rho;
  const double scale = rho2 / (1.0 - rho2 * rho2);
  // R = scale (-2 rho^2 I + P + P^T), P the cyclic shift.
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    r(i, i) += -2.0 * rho2;
    r(i, (i + 1) % l) += 1.0;
    r((i + 1) % l, i) += 1.0;
  }
  return Eigen::MatrixXd::Identity(l, l) - scale * r;
}

CheckResult circulant_det_check(std::size_t len, double rho) {
  if (len > 50) throw SizeError("cycle length is capped at 50");
  const double det = cycle_circulant(len, rho).partialPivLu().determinant();
  const double rho2 = rho * rho;
  const double l = static_cast<double>(len);
  const double closed =
      std::pow(1.0 - rho2 * rho2, -l) * std::pow(1.0 - std::pow(rho2, l), 2.0);
  CheckResult c;
  c.name = "circulant determinant, |C| = " + std::to_string(len);
  c.statistic = det;
  c.reference = closed;
  c.relation = "~=";
  c.passed = std::abs(det - closed) <= 1e-8 * std::abs(closed);
  return c;
}

double laurent_massart_bound(const Eigen::VectorXd& alpha, double t) {
  return std::exp(-t * t / (4.0 * alpha.squaredNorm()));
}

namespace {

std::vector<CheckResult> tail_checks(
    const std::string& label, const std::vector<double>& t_grid,
    const std::vector<double>& bounds, std::uint64_t trials,
    unsigned threads, const SeedSpec& seed,
    const std::function<double(Rng&)>& draw, bool upper_tail) {
  if (trials == 0) throw DomainError("trials must be at least 1");
  const std::size_t m = t_grid.size();
  auto blocks = parallel_blocks(
      trials, kTrialBlock, threads,
      [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
        std::vector<std::uint64_t> hits(m, 0);
        for (std::uint64_t i = b; i < e; ++i) {
          Rng rng(seed.trial_seed(i));
          const double v = draw(rng);
          for (std::size_t j = 0; j < m; ++j) {
            hits[j] += upper_tail ? (v >= t_grid[j]) : (v <= -t_grid[j]);
          }
        }
        return hits;
      });
  std::vector<std::uint64_t> hits(m, 0);
  for (const auto& h : blocks) {
    for (std::size_t j = 0; j < m; ++j) hits[j] += h[j];
  }
  std::vector<CheckResult> out;
  const double nt = static_cast<double>(trials);
  for (std::size_t j = 0; j < m; ++j) {
    CheckResult c;
    c.name = label + ", t = " + std::to_string(t_grid[j]);
    c.statistic = static_cast<double>(hits[j]) / nt;
    c.reference = bounds[j];
    c.sigma = std::sqrt(c.statistic * (1.0 - c.statistic) / nt);
    c.relation = "<=";
    c.passed = c.statistic <= c.reference + 3.0 * c.sigma;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<CheckResult> laurent_massart_check(const Eigen::VectorXd& alpha,
                                               const std::vector<double>& t_grid,
                                               std::uint64_t trials,
                                               const SeedSpec& seed,
                                               unsigned threads) {
  if (alpha.size() == 0 || (alpha.array() < 0.0).any()) {
    throw DomainError("alpha must be a nonempty nonnegative vector");
  }
  std::vector<double> bounds;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw DomainError("t must be positive");
    bounds.push_back(laurent_massart_bound(alpha, t));
  }
  const Eigen::Index dim = alpha.size();
  return tail_checks(
      "Laurent-Massart lower tail (d = " + std::to_string(dim) + ")", t_grid,
      bounds, trials, threads, seed,
      [&](Rng& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        double s = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
          const double x = normal(rng);
          s += alpha(i) * (x * x - 1.0);
        }
        return s;
      },
      false);
}

ChaosSplit chaos_split(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ShapeError("A must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("A must be symmetric");
  }
  ChaosSplit s;
  s.alpha = a.diagonal();
  Eigen::MatrixXd off = a;
  off.diagonal().setZero();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(off,
                                                     Eigen::EigenvaluesOnly);
  s.lambda = eig.eigenvalues();
  return s;
}

double gaussian_chaos_bound(const ChaosSplit& s, double t) {
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : kInf; };
  const double a2 = s.alpha.squaredNorm();
  const double ainf = s.alpha.size() ? s.alpha.cwiseAbs().maxCoeff() : 0.0;
  const double l2 = s.lambda.squaredNorm();
  const double linf = s.lambda.size() ? s.lambda.cwiseAbs().maxCoeff() : 0.0;
  const double m = std::min({ratio(t, 2.0 * a2), ratio(1.0, ainf),
                             ratio(t, 2.0 * l2), ratio(1.0, linf)});
  return 2.0 * std::exp(-t / 16.0 * m);
}

std::vector<CheckResult> gaussian_chaos_check(const Eigen::MatrixXd& a,
                                              const std::vector<double>& t_grid,
                                              std::uint64_t trials,
                                              const SeedSpec& seed,
                                              unsigned threads) {
  const ChaosSplit split = chaos_split(a);
  std::vector<double> bounds;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw DomainError("t must be positive");
    bounds.push_back(gaussian_chaos_bound(split, t));
  }
  const Eigen::Index dim = a.rows();
  const double trace = a.trace();
  return tail_checks(
      "Gaussian chaos upper tail (dim = " + std::to_string(dim) + ")", t_grid,
      bounds, trials, threads, seed,
      [&](Rng& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd x(dim);
        for (Eigen::Index i = 0; i < dim; ++i) x(i) = normal(rng);
        return x.dot(a * x) - trace;
      },
      true);
}

Eigen::MatrixXd truncation_chaos_matrix(std::size_t dim, double rho) {
  require_rho(rho);
  const auto m = static_cast<Eigen::Index>(dim);
  const double sign = rho < 0.0 ? -1.0 : 1.0;
  const double off = std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  a.topLeftCorner(m, m).diagonal().setConstant(2.0 * rho);
  a.topRightCorner(m, m).diagonal().setConstant(off);
  a.bottomLeftCorner(m, m).diagonal().setConstant(off);
  return 0.5 * sign * a;
}

bool truncation_event_holds(const DatabasePair& pair, const Permutation& sigma,
                            double rho, const TruncationSchedule& sch,
                            bool enumerate) {
  if (!sch.valid()) throw ConditionViolated("invalid truncation schedule");
  if (sigma.size() != static_cast<std::size_t>(pair.n())) {
    throw ShapeError("permutation length must equal n");
  }
  const double sign = rho < 0.0 ? -1.0 : 1.0;
  std::vector<double> xx, yy, xy;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] != i) continue;
    const auto r = static_cast<Eigen::Index>(i);
    xx.push_back(pair.x.row(r).squaredNorm());
    yy.push_back(pair.y.row(r).squaredNorm());
    xy.push_back(sign * pair.x.row(r).dot(pair.y.row(r)));
  }
  const std::size_t fixed = xx.size();
  if (fixed < sch.k_star) return true;
  if (fixed > sch.k_max) throw ShapeError("schedule does not cover |F|");
  auto index = [&](std::size_t k) { return k - sch.k_star; };

  if (enumerate) {
    if (fixed > 12) throw SizeError("subset enumeration is capped at 12");
    for (std::uint32_t mask = 1; mask < (1u << fixed); ++mask) {
      const auto k = static_cast<std::size_t>(std::popcount(mask));
      if (k < sch.k_star) continue;
      double sx = 0.0, sy = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < fixed; ++i) {
        if (!(mask >> i & 1u)) continue;
        sx += xx[i];
        sy += yy[i];
        sxy += xy[i];
      }
      const std::size_t j = index(k);
      if (!(sx > sch.w[j] && sy > sch.w[j] && sxy < sch.v[j])) return false;
    }
    return true;
  }
  std::sort(xx.begin(), xx.end());
  std::sort(yy.begin(), yy.end());
  std::sort(xy.begin(), xy.end(), std::greater<>());
  double sx = 0.0, sy = 0.0, sxy = 0.0;
  for (std::size_t k = 1; k <= fixed; ++k) {
    sx += xx[k - 1];
    sy += yy[k - 1];
    sxy += xy[k - 1];
    if (k < sch.k_star) continue;
    const std::size_t j = index(k);
    if (!(sx > sch.w[j] && sy > sch.w[j] && sxy < sch.v[j])) return false;
  }
  return true;
}

CheckResult truncation_event_check(std::size_t n, std::uint64_t d, double rho,
                                   std::uint64_t k_star, double margin,
                                   std::uint64_t trials, const SeedSpec& seed,
                                   unsigned threads) {
  const ProblemParams params = ProblemParams::alternate(n, d, rho);
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const TruncationSchedule sch =
      truncation_schedule(nd, dd, rho * rho, k_star, margin);
  const PsiValues psi = psi_values(sch, nd, dd, rho * rho);
  const double m = std::min(psi.psi1, psi.psi2);
  const double deficit =
      m > 0.0 ? 4.0 * std::exp(-static_cast<double>(k_star) * m) /
                    -std::expm1(-m)
              : kInf;
  const Permutation id = Permutation::identity(n);
  const bool enumerate = n <= 12;
  const McEstimate e = run_moments(trials, threads, seed, [&](Rng& rng) {
    return truncation_event_holds(sample_alt(params, id, rng), id, rho, sch,
                                  enumerate)
               ? 1.0
               : 0.0;
  });
  CheckResult c;
  c.name = "truncation event probability (n = " + std::to_string(n) +
           ", d = " + std::to_string(d) + ")";
  c.statistic = e.mean;
  c.reference = std::max(0.0, 1.0 - deficit);
  c.sigma = e.std_error;
  c.relation = ">=";
  c.passed = e.mean >= c.reference - 3.0 * e.std_error;
  return c;
}

double log_barrier_objective(double a, double d, double x) {
  return a * x - 0.5 * d * std::log1p(-x * x);
}

BarrierMinimum log_barrier_minimum(double a, double d) {
  if (!(d > 0.0)) throw DomainError("d must be positive");
  const double x = -2.0 * a / (d + std::sqrt(d * d + 4.0 * a * a));
  const double gamma = (2.0 * a / d) * (2.0 * a / d);
  const double root = std::sqrt(gamma + 1.0);
  return {x, 0.5 * d * (std::log((root + 1.0) / 2.0) + 1.0 - root)};
}

double exponent_gap_h(double x) {
  const double r = std::sqrt(1.0 - x + x * x);
  return std::log((r + 1.0 - x) / (std::sqrt(1.0 + x) + 1.0));
}

double exponent_gap_g(double x) {
  // (x - r) / (1 - x) = -1 / (x + r), which stays finite at x = 1.
  const double r = std::sqrt(1.0 - x + x * x);
  return -1.0 / (x + r) + std::sqrt(1.0 + x);
}

}  // namespace dbcorr
