// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dbcorr/align.hpp"
#include "dbcorr/bounds.hpp"
#include "dbcorr/config.hpp"
#include "dbcorr/detect.hpp"
#include "dbcorr/errors.hpp"
#include "dbcorr/gen.hpp"
#include "dbcorr/oracle.hpp"
#include "dbcorr/runner.hpp"

namespace py = pybind11;
using namespace dbcorr;

namespace {

BoundKind parse_kind(const std::string& s) {
  for (BoundKind k : {BoundKind::kDetectionAchievable,
                      BoundKind::kDetectionConverse,
                      BoundKind::kRecoveryAchievable,
                      BoundKind::kRecoveryConverse}) {
    if (s == bound_kind_name(k)) return k;
  }
  throw UsageError("kind: unknown bound '" + s + "'");
}

Permutation to_perm(const std::vector<std::size_t>& v) {
  return Permutation(v);
}

py::tuple pair_tuple(const DatabasePair& p) { return py::make_tuple(p.x, p.y); }

}  // namespace

PYBIND11_MODULE(_dbcorr, m) {
  m.doc() = "Correlation detection and alignment of Gaussian databases";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def("g_fa", &g_fa, py::arg("gamma"));
  m.def("g_md", &g_md, py::arg("gamma"), py::arg("rho"));
  m.def("detection_ach_risk", &detection_ach_risk, py::arg("d"),
        py::arg("rho2"));
  m.def("unconditional_converse_risk", &unconditional_converse_risk,
        py::arg("n"), py::arg("d"), py::arg("rho2"));
  m.def("truncated_converse_risk", &truncated_converse_risk, py::arg("n"),
        py::arg("d"), py::arg("rho2"), py::arg("k_star") = 0,
        py::arg("margin") = 0.1);
  m.def("recovery_ach_perr", &recovery_ach_perr, py::arg("n"), py::arg("d"),
        py::arg("rho2"));
  m.def("recovery_conv_perr", &recovery_conv_perr, py::arg("n"), py::arg("d"),
        py::arg("rho2"), py::arg("epsilon_d") = 0.0);
  m.def(
      "invert_for_rho2",
      [](const std::string& kind, double n, double d, double risk,
         std::uint64_t k_star, double margin, double epsilon_d) {
        InversionOptions o;
        o.k_star = k_star;
        o.margin = margin;
        o.epsilon_d = epsilon_d;
        return invert_for_rho2(parse_kind(kind), n, d, risk, o);
      },
      py::arg("kind"), py::arg("n"), py::arg("d"), py::arg("target_risk"),
      py::arg("k_star") = 0, py::arg("margin") = 0.1,
      py::arg("epsilon_d") = 0.0);

  m.def(
      "sample_null",
      [](std::uint64_t n, std::uint64_t d, std::uint64_t seed) {
        return pair_tuple(sample_null(ProblemParams(n, d, 0.0), seed));
      },
      py::arg("n"), py::arg("d"), py::arg("seed"));
  m.def(
      "sample_alt",
      [](std::uint64_t n, std::uint64_t d, double rho,
         const std::vector<std::size_t>& perm, std::uint64_t seed) {
        return pair_tuple(
            sample_alt(ProblemParams(n, d, rho), to_perm(perm), seed));
      },
      py::arg("n"), py::arg("d"), py::arg("rho"), py::arg("perm"),
      py::arg("seed"));
  m.def(
      "sip_statistic",
      [](const RowMatrix& x, const RowMatrix& y, int sign) {
        return sip_statistic(DatabasePair(x, y), sign);
      },
      py::arg("x"), py::arg("y"), py::arg("rho_sign") = 1);
  m.def(
      "ml_decode",
      [](const RowMatrix& x, const RowMatrix& y, double rho) {
        const AlignmentResult r = ml_decode(DatabasePair(x, y), rho);
        return py::make_tuple(r.perm.map(), r.score);
      },
      py::arg("x"), py::arg("y"), py::arg("rho"));
  m.def("exact_second_moment", &exact_second_moment, py::arg("n"),
        py::arg("d"), py::arg("rho2"));

  m.def(
      "default_config",
      [](const std::string& command) {
        return render_config(default_config(parse_command(command)));
      },
      py::arg("command"));
  m.def(
      "run",
      [](const std::string& config_json) {
        RunOutput r;
        {
          py::gil_scoped_release release;
          r = run(parse_config(config_json));
        }
        return py::make_tuple(r.body, r.exit_code, r.diagnostics);
      },
      py::arg("config_json"),
      "Runs a JSON config; returns (body, exit_code, diagnostics).");
}
