// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/detect.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dbcorr/errors.hpp"
#include "dbcorr/parallel.hpp"

namespace dbcorr {

double sip_statistic(const DatabasePair& pair, int rho_sign) {
  if (rho_sign != 1 && rho_sign != -1) {
    throw DomainError("rho_sign must be +1 or -1");
  }
  const Eigen::RowVectorXd sx = pair.x.colwise().sum();
  const Eigen::RowVectorXd sy = pair.y.colwise().sum();
  return rho_sign * sx.dot(sy);
}

int threshold_test(double t_stat, double threshold) {
  if (!std::isfinite(threshold)) throw DomainError("threshold must be finite");
  return t_stat >= threshold ? 1 : 0;
}

double standard_threshold(const ProblemParams& params) {
  if (params.rho == 0.0) {
    throw InvalidAlternate("threshold requires rho != 0");
  }
  return std::abs(params.rho) * static_cast<double>(params.d) *
         static_cast<double>(params.n) / 2.0;
}

GammaMinimum optimal_gamma(const ProblemParams& params) {
  if (params.rho == 0.0) {
    throw InvalidAlternate("optimal gamma requires rho != 0");
  }
  return minimize_detection_bound(static_cast<double>(params.d), params.rho2());
}

double threshold_for_gamma(const ProblemParams& params, double gamma) {
  return std::sqrt(gamma) * static_cast<double>(params.d) *
         static_cast<double>(params.n) / 2.0;
}

Sampler resolve_sampler(Sampler s, const ProblemParams& params) {
  if (s != Sampler::kAuto) return s;
  return params.n * params.d <= 10000 ? Sampler::kDatabases
                                      : Sampler::kColumnSums;
}

double draw_statistic(const ProblemParams& params, bool alternate,
                      Sampler sampler, Rng& rng) {
  const bool correlated = alternate && params.rho != 0.0;
  const int sign = params.rho_sign();
  if (resolve_sampler(sampler, params) == Sampler::kDatabases) {
    const DatabasePair pair =
        correlated ? sample_alt(params, Permutation::identity(params.n), rng)
                   : sample_null(params, rng);
    return sip_statistic(pair, sign);
  }
  // Column sums: S_y = sqrt(n) g1 and S_x = rho S_y + sqrt(1-rho^2) sqrt(n) g2
  // (rho = 0 under the null), whatever the planted permutation.
  std::normal_distribution<double> normal(0.0, 1.0);
  const double root_n = std::sqrt(static_cast<double>(params.n));
  const double rho = correlated ? params.rho : 0.0;
  const double noise = std::sqrt(1.0 - rho * rho);
  double t = 0.0;
  for (std::uint64_t k = 0; k < params.d; ++k) {
    const double sy = root_n * normal(rng);
    const double sx = rho * sy + noise * root_n * normal(rng);
    t += sx * sy;
  }
  return sign * t;
}

RiskEstimate monte_carlo_risk(const ProblemParams& params, double threshold,
                              std::uint64_t trials, const SeedSpec& seed,
                              const McOptions& options) {
  if (trials == 0) throw DomainError("trials must be at least 1");
  if (!std::isfinite(threshold)) throw DomainError("threshold must be finite");
  const Sampler sampler = resolve_sampler(options.sampler, params);
  const SeedSpec null_seed = seed.child("null");
  const SeedSpec alt_seed = seed.child("alt");

  auto count = [&](const SeedSpec& s, bool alternate) {
    auto blocks = parallel_blocks(
        trials, kTrialBlock, options.threads,
        [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
          std::uint64_t hits = 0;
          for (std::uint64_t i = b; i < e; ++i) {
            Rng rng(s.trial_seed(i));
            const int label =
                threshold_test(draw_statistic(params, alternate, sampler, rng),
                               threshold);
            hits += alternate ? (label == 0) : (label == 1);
          }
          return hits;
        });
    std::uint64_t total = 0;
    for (auto h : blocks) total += h;
    return total;
  };

  RiskEstimate r;
  r.trials = trials;
  const double nt = static_cast<double>(trials);
  r.fa_rate = static_cast<double>(count(null_seed, false)) / nt;
  r.md_rate = static_cast<double>(count(alt_seed, true)) / nt;
  auto sigma = [nt](double p) { return std::sqrt(p * (1.0 - p) / nt); };
  r.ci_radius = 3.0 * std::max(sigma(r.fa_rate), sigma(r.md_rate));
  return r;
}

}  // namespace dbcorr
