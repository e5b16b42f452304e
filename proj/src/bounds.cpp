// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "dbcorr/errors.hpp"

namespace dbcorr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void require_rho2(double rho2) {
  if (!(rho2 >= 0.0 && rho2 < 1.0)) {
    throw DomainError("rho^2 must lie in [0, 1)");
  }
}

double g_md_rho2(double gamma, double rho2) {
  const double q = 1.0 - rho2;
  const double s = std::sqrt(q * q + gamma);
  // (s - sqrt(rho2 gamma)) / q rewritten via s^2 - rho2 gamma = q (q + gamma).
  return (q + gamma) / (s + std::sqrt(rho2 * gamma)) - 1.0 -
         std::log((q + s) / 2.0);
}

}  // namespace

double g_fa(double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be nonnegative");
  const double s = std::sqrt(1.0 + gamma);
  // s - 1 = gamma / (s + 1) avoids cancellation for small gamma.
  const double u = gamma / (s + 1.0);
  return u - std::log1p(u / 2.0);
}

double g_md(double gamma, double rho) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be nonnegative");
  if (!(std::abs(rho) < 1.0)) throw DomainError("|rho| must be below 1");
  return g_md_rho2(gamma, rho * rho);
}

ExponentPair exponents(double gamma, double rho) {
  return {g_fa(gamma), g_md(gamma, rho)};
}

double log_detection_bound_at(double d, double rho2, double gamma) {
  require_rho2(rho2);
  return log_add_exp(-0.5 * d * g_fa(gamma), -0.5 * d * g_md_rho2(gamma, rho2));
}

double detection_bound_at(double d, double rho2, double gamma) {
  return std::exp(log_detection_bound_at(d, rho2, gamma));
}

GammaMinimum minimize_detection_bound(double d, double rho2) {
  require_rho2(rho2);
  if (!(d > 0.0)) throw DomainError("d must be positive");
  if (rho2 == 0.0) return {0.0, 2.0};
  const double hi = 4.0 * rho2;
  const double eps = 1e-12 * hi;
  auto f = [&](double g) { return log_detection_bound_at(d, rho2, g); };

  constexpr int kScan = 64;
  std::array<double, kScan> xs{}, fs{};
  int best = 0;
  for (int i = 0; i < kScan; ++i) {
    xs[i] = eps + (hi - 2.0 * eps) * i / (kScan - 1);
    fs[i] = f(xs[i]);
    if (fs[i] < fs[best]) best = i;
  }
  double a = xs[std::max(best - 1, 0)];
  double b = xs[std::min(best + 1, kScan - 1)];

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = f(c), fe = f(e);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * hi; ++it) {
    if (fc <= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = f(e);
    }
  }
  GammaMinimum out{c, fc};
  if (fe < out.bound) out = {e, fe};
  if (fs[best] < out.bound) out = {xs[best], fs[best]};
  // The interior point gamma = rho^2 is the reference choice; never do worse.
  const double at_rho2 = f(rho2);
  if (at_rho2 < out.bound) out = {rho2, at_rho2};
  // The objective extends continuously to both ends, where the infimum can
  // sit when the bound exceeds 1 (g_md falls like -sqrt(gamma) near 0).
  for (double edge : {0.0, hi}) {
    const double fe_edge = f(edge);
    if (fe_edge < out.bound) out = {edge, fe_edge};
  }
  out.bound = std::exp(out.bound);
  return out;
}

double detection_ach_risk(double d, double rho2) {
  return minimize_detection_bound(d, rho2).bound;
}

ChernoffLambdas chernoff_lambdas(double t, double n, double d, double rho) {
  const double a = std::abs(rho);
  if (!(a < 1.0)) throw DomainError("|rho| must be below 1");
  if (!(t > 0.0 && t < a * n * d)) {
    throw DomainError("threshold must lie in (0, |rho| n d)");
  }
  const double q = 1.0 - rho * rho;
  const double half = d / (2.0 * t);
  const double inv_n = 1.0 / n;
  const double root_fa = std::sqrt(inv_n * inv_n + half * half);
  const double lambda_fa = inv_n * inv_n / (half + root_fa);
  const double big = 1.0 / (n * q);
  const double root_md = std::sqrt(big * big + half * half);
  const double lambda_md = a * big + half - root_md;
  return {lambda_fa, lambda_md};
}

double log_mgf_alt(double lambda, double n, double d, double rho) {
  const double a = std::abs(rho);
  if (!(a < 1.0)) throw DomainError("|rho| must be below 1");
  const double nl = n * lambda;
  const double base = 1.0 - 2.0 * nl * a - nl * nl * (1.0 - rho * rho);
  if (!(base > 0.0)) {
    throw DomainError("lambda outside the MGF domain "
                      "(1 - 2 n lambda |rho| - n^2 lambda^2 (1 - rho^2) > 0)");
  }
  return -0.5 * d * std::log(base);
}

double mgf_alt(double lambda, double n, double d, double rho) {
  return std::exp(log_mgf_alt(lambda, n, d, rho));
}

double log_mgf_null(double lambda, double n, double d) {
  return log_mgf_alt(lambda, n, d, 0.0);
}

double mgf_null(double lambda, double n, double d) {
  return mgf_alt(lambda, n, d, 0.0);
}

double unconditional_converse_risk(double n, double d, double rho2) {
  require_rho2(rho2);
  const double excess = std::expm1(-d * n * std::log1p(-rho2));
  return std::max(0.0, 1.0 - std::sqrt(excess));
}

std::uint64_t default_k_star(double n) {
  return static_cast<std::uint64_t>(std::ceil(13.0 * std::sqrt(n)));
}

TruncationSchedule build_truncation_schedule(double n, double d, double rho2,
                                             std::uint64_t k_star,
                                             double margin) {
  TruncationSchedule sch;
  sch.k_star = k_star;
  sch.margin = margin;
  sch.k_max = static_cast<std::uint64_t>(std::floor(n));
  auto fail = [&](const char* what) { sch.violations.emplace_back(what); };
  if (!(margin > 0.0)) fail("margin > 0");
  if (!(rho2 > 0.0 && rho2 < 1.0)) fail("0 < rho^2 < 1");
  if (k_star < 1) fail("k_star >= 1");
  if (k_star > sch.k_max) fail("k_star <= n");
  if (!sch.valid()) return sch;
  const double log_en_kstar = 1.0 + std::log(n / static_cast<double>(k_star));
  if (!(d >= 4.0 * log_en_kstar)) fail("d >= 4 ln(e n / k_star)");

  const double rho = std::sqrt(rho2);
  const double sd = std::sqrt(d);
  const double s_factor = std::max(2.0, std::sqrt((1.0 - rho2) / rho2));
  const std::size_t len = sch.k_max - k_star + 1;
  sch.r.resize(len);
  sch.s.resize(len);
  sch.w.resize(len);
  sch.v.resize(len);
  bool r_ok = true, w_ok = true;
  for (std::size_t i = 0; i < len; ++i) {
    const double k = static_cast<double>(k_star + i);
    const double root = std::sqrt(1.0 + std::log(n / k));
    sch.r[i] = (1.0 + margin) * root;
    sch.s[i] = (1.0 + margin) * root * s_factor;
    sch.w[i] = d * k - 2.0 * sd * k * sch.r[i];
    sch.v[i] = rho * d * k + 4.0 * rho * sd * k * sch.s[i];
    if (!(sch.r[i] < sd / 2.0)) r_ok = false;
    if (!(sch.w[i] > 0.0)) w_ok = false;
  }
  if (!r_ok) fail("r_k < sqrt(d) / 2");
  if (!w_ok) fail("w_k > 0");
  return sch;
}

TruncationSchedule truncation_schedule(double n, double d, double rho2,
                                       std::uint64_t k_star, double margin) {
  TruncationSchedule sch = build_truncation_schedule(n, d, rho2, k_star, margin);
  if (!sch.valid()) {
    throw ConditionViolated("truncation schedule violates " +
                            sch.violations.front());
  }
  return sch;
}

PsiValues psi_values(const TruncationSchedule& sch, double n, double d,
                     double rho2) {
  if (!sch.valid()) {
    throw ConditionViolated("truncation schedule violates " +
                            sch.violations.front());
  }
  const double rho = std::sqrt(rho2);
  const double q = 1.0 - rho2;
  const double sd = std::sqrt(d);
  const double rho4 = rho2 * rho2;
  const double xi2 = rho2 / q;
  PsiValues p{kInf, kInf, kInf};
  for (std::size_t i = 0; i < sch.r.size(); ++i) {
    const double k = static_cast<double>(sch.k_at(i));
    const double log_en_k = 1.0 + std::log(n / k);
    const double r = sch.r[i], s = sch.s[i];
    p.psi1 = std::min(p.psi1, r * r - log_en_k);
    const double inner = std::min({1.0 / rho, 2.0 / std::sqrt(q),
                                   s / (rho * sd), 4.0 * rho * s / (q * sd)});
    p.psi2 = std::min(p.psi2, rho * sd * s / 4.0 * inner - log_en_k);
    const double psi_k = -(d * n / (2.0 * k)) * rho4 / (1.0 - rho4) - d * xi2 +
                         2.0 * xi2 * (sch.w[i] / k - sch.v[i] / (k * rho)) +
                         std::log(k) - 1.0;
    p.psi = std::min(p.psi, psi_k);
  }
  return p;
}

TruncatedConverse truncated_converse_detail(double n, double d, double rho2,
                                            std::uint64_t k_star,
                                            double margin) {
  require_rho2(rho2);
  TruncatedConverse out;
  out.unconditional = unconditional_converse_risk(n, d, rho2);
  out.risk = out.unconditional;
  if (rho2 == 0.0) return out;
  if (k_star == 0) k_star = default_k_star(n);
  const TruncationSchedule sch =
      build_truncation_schedule(n, d, rho2, k_star, margin);
  out.schedule_valid = sch.valid();
  if (!sch.valid()) return out;
  out.psi = psi_values(sch, n, d, rho2);
  const double m = std::min(out.psi.psi1, out.psi.psi2);
  if (!(m > 0.0) || !(out.psi.psi > 0.0)) return out;

  const double ks = static_cast<double>(k_star);
  out.first_moment_deficit = 4.0 * std::exp(-ks * m) / -std::expm1(-m);
  const double xi2 = rho2 / (1.0 - rho2);
  const double exponent = 0.5 * d * n * xi2 * xi2 + d * ks * xi2;
  out.second_moment_excess =
      std::expm1(exponent) +
      std::exp(-ks * out.psi.psi) / -std::expm1(-out.psi.psi);
  const double radicand =
      out.second_moment_excess + 2.0 * out.first_moment_deficit;
  if (std::isfinite(radicand)) {
    out.truncated = std::max(
        0.0, 1.0 - (std::sqrt(radicand) + out.first_moment_deficit));
  }
  out.risk = std::max(out.unconditional, out.truncated);
  return out;
}

double truncated_converse_risk(double n, double d, double rho2,
                               std::uint64_t k_star, double margin) {
  return truncated_converse_detail(n, d, rho2, k_star, margin).risk;
}

double recovery_ach_log_perr(double n, double d, double rho2) {
  require_rho2(rho2);
  const double log_b = std::log(n) + 0.25 * d * std::log1p(-rho2);
  if (log_b == 0.0) return std::log(n);
  // b (1 - b^n) / (1 - b) = b expm1(n log b) / expm1(log b); both factors
  // share a sign so the ratio is positive.
  const double num = std::expm1(n * log_b);
  const double den = std::expm1(log_b);
  if (std::isinf(num)) {
    // b > 1 with b^n overflowing: log(b^n - 1) ~ n log b.
    return log_b + n * log_b - std::log(den);
  }
  return log_b + std::log(num / den);
}

double recovery_ach_perr(double n, double d, double rho2) {
  return std::exp(recovery_ach_log_perr(n, d, rho2));
}

double recovery_conv_perr(double n, double d, double rho2, double epsilon_d) {
  require_rho2(rho2);
  if (!(epsilon_d >= 0.0)) throw DomainError("epsilon_d must be nonnegative");
  const double log_a =
      std::log(n) + 0.25 * d * (1.0 + epsilon_d) * std::log1p(-rho2);
  const double inv_a = std::exp(-log_a);
  return std::max(0.0, 1.0 - inv_a * inv_a - 4.0 * inv_a);
}

const char* bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::kDetectionAchievable:
      return "detection achievable";
    case BoundKind::kDetectionConverse:
      return "detection converse";
    case BoundKind::kRecoveryAchievable:
      return "recovery achievable";
    case BoundKind::kRecoveryConverse:
      return "recovery converse";
  }
  return "unknown";
}

namespace {

// rho^2 grid for the monotonicity pre-scan: log-spaced up to 1/2, then
// log-spaced in 1 - rho^2 towards 1.
const std::vector<double>& prescan_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    constexpr int kLow = 160, kHigh = 48;
    for (int i = 0; i < kLow; ++i) {
      g.push_back(std::pow(10.0, -12.0 + (12.0 - std::log10(2.0)) * i / kLow));
    }
    for (int i = 0; i < kHigh; ++i) {
      const double gap =
          std::pow(10.0, -std::log10(2.0) - (12.0 - std::log10(2.0)) * i /
                                                (kHigh - 1));
      g.push_back(1.0 - gap);
    }
    return g;
  }();
  return grid;
}

}  // namespace

double invert_for_rho2(BoundKind kind, double n, double d, double target_risk,
                       const InversionOptions& opt) {
  if (!(target_risk > 0.0 && target_risk < 1.0)) {
    throw DomainError("target risk must lie in (0, 1)");
  }
  if (!(n >= 1.0) || !(d > 0.0)) throw DomainError("n >= 1 and d > 0 required");
  std::function<double(double)> value;
  double level = target_risk;
  bool smallest_below = true;  // else: largest with value >= level
  switch (kind) {
    case BoundKind::kDetectionAchievable:
      value = [d](double r2) { return detection_ach_risk(d, r2); };
      break;
    case BoundKind::kRecoveryAchievable:
      value = [n, d](double r2) { return recovery_ach_perr(n, d, r2); };
      level = target_risk / 2.0;
      break;
    case BoundKind::kDetectionConverse:
      value = [n, d, &opt](double r2) {
        return truncated_converse_risk(n, d, r2, opt.k_star, opt.margin);
      };
      smallest_below = false;
      break;
    case BoundKind::kRecoveryConverse:
      value = [n, d, &opt](double r2) {
        return recovery_conv_perr(n, d, r2, opt.epsilon_d);
      };
      smallest_below = false;
      break;
  }

  const auto& grid = prescan_grid();
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = value(grid[i]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (vals[i] > vals[i - 1] * (1.0 + 1e-9) + 1e-300) {
      throw InversionUndefined(std::string(bound_kind_name(kind)) +
                               " bound is not monotone in rho^2");
    }
  }
  // `inside(v)` is the side of the crossing that the answer lies on.
  auto inside = [&](double v) {
    return smallest_below ? (v <= level) : (v >= level);
  };
  std::size_t lo_idx = 0, hi_idx = 0;
  bool found = false;
  if (smallest_below) {
    if (inside(vals.front()) || !inside(vals.back())) {
      throw InversionUndefined(std::string(bound_kind_name(kind)) +
                               ": target risk not crossed on (0, 1)");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (inside(vals[i])) {
        lo_idx = i - 1;
        hi_idx = i;
        found = true;
        break;
      }
    }
  } else {
    if (!inside(vals.front()) || inside(vals.back())) {
      throw InversionUndefined(std::string(bound_kind_name(kind)) +
                               ": target risk not crossed on (0, 1)");
    }
    for (std::size_t i = grid.size() - 1; i > 0; --i) {
      if (inside(vals[i - 1])) {
        lo_idx = i - 1;
        hi_idx = i;
        found = true;
        break;
      }
    }
  }
  if (!found) {
    throw InversionUndefined(std::string(bound_kind_name(kind)) +
                             ": no bracketing interval");
  }
  double lo = grid[lo_idx], hi = grid[hi_idx];
  while (hi - lo > opt.tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const bool in = inside(value(mid));
    if (smallest_below) {
      (in ? hi : lo) = mid;
    } else {
      (in ? lo : hi) = mid;
    }
  }
  return smallest_below ? hi : lo;
}

BoundCurvePoint curve_point(double axis, double n, double d,
                            double target_risk,
                            const InversionOptions& options) {
  BoundCurvePoint pt;
  pt.axis = axis;
  auto attempt = [&](BoundKind kind, std::optional<double>& slot) {
    try {
      slot = invert_for_rho2(kind, n, d, target_risk, options);
    } catch (const InversionUndefined& e) {
      pt.warnings.emplace_back(e.what());
    }
  };
  attempt(BoundKind::kDetectionAchievable, pt.rho2_det_ach);
  attempt(BoundKind::kDetectionConverse, pt.rho2_det_conv);
  attempt(BoundKind::kRecoveryAchievable, pt.rho2_rec_ach);
  attempt(BoundKind::kRecoveryConverse, pt.rho2_rec_conv);
  return pt;
}

}  // namespace dbcorr
