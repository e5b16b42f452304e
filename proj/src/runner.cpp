// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/runner.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "dbcorr/align.hpp"
#include "dbcorr/bounds.hpp"
#include "dbcorr/detect.hpp"
#include "dbcorr/errors.hpp"
#include "dbcorr/parallel.hpp"
#include "dbcorr/verify.hpp"

namespace dbcorr {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general,
                           17);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string render_json(const ExperimentConfig& c, const json& results) {
  json j;
  j["schema"] = 1;
  j["command"] = command_name(c.command);
  j["config"] = experiment_record(c);
  j["results"] = results;
  return j.dump(2) + "\n";
}

// One header row and one data row, keys in the JSON (sorted) order.
std::string render_flat_csv(const json& results) {
  std::string header, row;
  for (const auto& [key, value] : results.items()) {
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += csv_field(key);
    if (value.is_number_float()) {
      row += format_number(value.get<double>());
    } else if (value.is_string()) {
      row += csv_field(value.get<std::string>());
    } else if (!value.is_null()) {
      row += value.dump();
    }
  }
  return header + "\n" + row + "\n";
}

std::string render(const ExperimentConfig& c, const json& results) {
  return c.format == Format::kJson ? render_json(c, results)
                                   : render_flat_csv(results);
}

const char* sampler_name(Sampler s) {
  switch (s) {
    case Sampler::kDatabases:
      return "databases";
    case Sampler::kColumnSums:
      return "column-sums";
    case Sampler::kAuto:
      break;
  }
  return "auto";
}

}  // namespace

RunOutput run_simulate_detection(const ExperimentConfig& c) {
  const ProblemParams p = ProblemParams::alternate(c.n, c.d, c.rho);
  const GammaMinimum best = optimal_gamma(p);
  const double gamma =
      c.threshold == ThresholdMode::kStandard ? p.rho2() : best.gamma;
  const double threshold = threshold_for_gamma(p, gamma);
  const RiskEstimate r =
      monte_carlo_risk(p, threshold, c.trials,
                       {c.master_seed, "simulate-detection"},
                       {c.threads, c.sampler});
  const double d = static_cast<double>(c.d);
  json res;
  res["threshold_mode"] = c.threshold == ThresholdMode::kStandard ? "standard" : "optimal";
  res["threshold"] = threshold;
  res["gamma"] = gamma;
  res["sampler"] = sampler_name(resolve_sampler(c.sampler, p));
  res["trials"] = r.trials;
  res["fa_rate"] = r.fa_rate;
  res["md_rate"] = r.md_rate;
  res["risk"] = r.risk();
  res["ci_radius"] = r.ci_radius;
  res["bound_minimized"] = best.bound;
  res["bound_gamma_star"] = best.gamma;
  res["bound_at_threshold"] = detection_bound_at(d, p.rho2(), gamma);
  res["bound_simple"] = 2.0 * std::exp(-d * p.rho2() / 60.0);
  res["risk_within_bound"] = r.risk() <= best.bound + 3.0 * r.ci_radius;
  return {render(c, res), kExitOk, {}};
}

RunOutput run_simulate_recovery(const ExperimentConfig& c) {
  const ProblemParams p = ProblemParams::alternate(c.n, c.d, c.rho);
  const ErrorRate e = recovery_error_mc(p, c.trials,
                                        {c.master_seed, "simulate-recovery"},
                                        c.threads);
  const double n = static_cast<double>(c.n), d = static_cast<double>(c.d);
  json res;
  res["trials"] = e.trials;
  res["error_rate"] = e.rate;
  res["ci_radius"] = e.ci_radius;
  res["bound_achievable"] = number_or_null(recovery_ach_perr(n, d, p.rho2()));
  res["epsilon_d"] = c.epsilon_d.value_or(0.0);
  res["bound_converse"] =
      recovery_conv_perr(n, d, p.rho2(), c.epsilon_d.value_or(0.0));
  return {render(c, res), kExitOk, {}};
}

RunOutput run_curve(const ExperimentConfig& c) {
  const std::vector<double> axis = c.grid->values();
  InversionOptions opt;
  opt.k_star = c.k_star;
  opt.margin = c.margin;
  opt.epsilon_d = *c.epsilon_d;
  const auto points = parallel_map(axis.size(), c.threads, [&](std::uint64_t i) {
    const double v = axis[i];
    const double n = c.axis == Axis::kN ? v : static_cast<double>(c.n);
    const double d = c.axis == Axis::kD ? v : static_cast<double>(c.d);
    return curve_point(v, n, d, c.target_risk, opt);
  });

  RunOutput out;
  for (const auto& pt : points) {
    for (const auto& w : pt.warnings) {
      out.diagnostics.push_back("warning: axis=" + format_number(pt.axis) +
                                ": " + w);
    }
  }
  auto cell = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  if (c.format == Format::kCsv) {
    std::string body = std::string(kCurveHeader) + "\n";
    for (const auto& pt : points) {
      body += format_number(pt.axis) + "," + cell(pt.rho2_det_ach) + "," +
              cell(pt.rho2_det_conv) + "," + cell(pt.rho2_rec_ach) + "," +
              cell(pt.rho2_rec_conv) + "\n";
    }
    out.body = std::move(body);
  } else {
    auto opt_json = [](const std::optional<double>& v) {
      return v ? json(*v) : json(nullptr);
    };
    json rows = json::array();
    for (const auto& pt : points) {
      rows.push_back({{"axis", pt.axis},
                      {"rho2_det_ach", opt_json(pt.rho2_det_ach)},
                      {"rho2_det_conv", opt_json(pt.rho2_det_conv)},
                      {"rho2_rec_ach", opt_json(pt.rho2_rec_ach)},
                      {"rho2_rec_conv", opt_json(pt.rho2_rec_conv)}});
    }
    out.body = render_json(c, {{"points", rows}});
  }
  for (const auto& pt : points) {
    if (pt.rho2_det_ach && pt.rho2_det_conv &&
        *pt.rho2_det_conv > *pt.rho2_det_ach) {
      out.exit_code = kExitVerifyFailed;
      out.diagnostics.push_back("error: axis=" + format_number(pt.axis) +
                                ": detection converse exceeds achievable");
    }
  }
  return out;
}

RunOutput run_verify(const ExperimentConfig& c) {
  VerifyOptions o;
  o.master_seed = c.master_seed;
  o.trials = c.trials;
  o.threads = c.threads;
  o.inject_fault = c.inject_fault;
  const VerifyReport report = run_verify_suite(o);

  RunOutput out;
  if (c.format == Format::kJson) {
    json checks = json::array();
    for (const auto& k : report.checks) {
      checks.push_back({{"name", k.name},
                        {"passed", k.passed},
                        {"statistic", number_or_null(k.statistic)},
                        {"reference", number_or_null(k.reference)},
                        {"sigma", number_or_null(k.sigma)},
                        {"relation", k.relation}});
    }
    json res;
    res["checks"] = checks;
    res["total"] = report.checks.size();
    res["failed"] = report.failures();
    res["all_passed"] = report.all_passed();
    out.body = render_json(c, res);
  } else {
    std::string body = "name,passed,statistic,relation,reference,sigma\n";
    for (const auto& k : report.checks) {
      body += csv_field(k.name) + "," + (k.passed ? "true" : "false") + "," +
              format_number(k.statistic) + "," + k.relation + "," +
              format_number(k.reference) + "," + format_number(k.sigma) + "\n";
    }
    out.body = std::move(body);
  }
  for (const auto& k : report.checks) {
    if (!k.passed) out.diagnostics.push_back("FAILED: " + k.name);
  }
  if (!report.all_passed()) out.exit_code = kExitVerifyFailed;
  return out;
}

RunOutput run(const ExperimentConfig& c) {
  validate(c);
  switch (c.command) {
    case Command::kSimulateDetection:
      return run_simulate_detection(c);
    case Command::kSimulateRecovery:
      return run_simulate_recovery(c);
    case Command::kCurve:
      return run_curve(c);
    case Command::kVerify:
      return run_verify(c);
  }
  throw UsageError("command: unsupported");
}

void emit(const ExperimentConfig& c, const RunOutput& r, std::ostream& out,
          std::ostream& diag) {
  for (const auto& line : r.diagnostics) diag << line << '\n';
  if (c.output_path.empty()) {
    out << r.body;
    out.flush();
    return;
  }
  std::ofstream f(c.output_path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(c.output_path + ": cannot open for writing");
  f << r.body;
  f.close();
  if (!f) throw IoError(c.output_path + ": write failed");
}

}  // namespace dbcorr
