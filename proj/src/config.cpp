// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dbcorr/errors.hpp"

namespace dbcorr {

using nlohmann::json;

std::vector<double> GridSpec::values() const {
  std::vector<double> v;
  if (count == 1) {
    v.push_back(start);
    return v;
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    v.push_back(start + (stop - start) * static_cast<double>(i) /
                            static_cast<double>(count - 1));
  }
  return v;
}

GridSpec parse_grid(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) {
    throw UsageError("grid: expected start:stop:count, got '" +
                     std::string(text) + "'");
  }
  GridSpec g;
  try {
    std::size_t used = 0;
    const std::string s0(text.substr(0, a)), s1(text.substr(a + 1, b - a - 1)),
        s2(text.substr(b + 1));
    g.start = std::stod(s0, &used);
    if (used != s0.size()) throw std::invalid_argument(s0);
    g.stop = std::stod(s1, &used);
    if (used != s1.size()) throw std::invalid_argument(s1);
    const long long c = std::stoll(s2, &used);
    if (used != s2.size() || c < 1) throw std::invalid_argument(s2);
    g.count = static_cast<std::uint64_t>(c);
  } catch (const std::logic_error&) {
    throw UsageError("grid: cannot parse '" + std::string(text) + "'");
  }
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) {
    throw UsageError("grid: endpoints must be finite");
  }
  return g;
}

std::string format_grid(const GridSpec& g) {
  auto num = [](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  return num(g.start) + ":" + num(g.stop) + ":" + std::to_string(g.count);
}

const char* command_name(Command c) {
  switch (c) {
    case Command::kSimulateDetection:
      return "simulate-detection";
    case Command::kSimulateRecovery:
      return "simulate-recovery";
    case Command::kCurve:
      return "curve";
    case Command::kVerify:
      return "verify";
  }
  return "";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::kSimulateDetection, Command::kSimulateRecovery,
                    Command::kCurve, Command::kVerify}) {
    if (name == command_name(c)) return c;
  }
  throw UsageError("command: unknown '" + std::string(name) + "'");
}

ExperimentConfig default_config(Command command) {
  ExperimentConfig c;
  c.command = command;
  switch (command) {
    case Command::kSimulateDetection:
      c.trials = 10000;
      break;
    case Command::kSimulateRecovery:
      c.trials = 1000;
      break;
    case Command::kCurve:
      c.format = Format::kCsv;
      c.n = 10000;
      c.trials = 0;
      break;
    case Command::kVerify:
      c.trials = 200000;
      break;
  }
  return c;
}

namespace {

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<Format> kFormats[] = {{Format::kCsv, "csv"},
                                         {Format::kJson, "json"}};
constexpr EnumName<ThresholdMode> kThresholds[] = {
    {ThresholdMode::kStandard, "standard"}, {ThresholdMode::kOptimal, "optimal"}};
constexpr EnumName<Axis> kAxes[] = {{Axis::kD, "d"}, {Axis::kN, "n"}};
constexpr EnumName<Sampler> kSamplers[] = {{Sampler::kAuto, "auto"},
                                           {Sampler::kDatabases, "databases"},
                                           {Sampler::kColumnSums, "column-sums"}};

template <class E, std::size_t N>
const char* name_of(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "";
}

template <class E, std::size_t N>
E value_of(const EnumName<E> (&table)[N], const std::string& s,
           const char* field) {
  for (const auto& e : table) {
    if (s == e.name) return e.value;
  }
  throw UsageError(std::string(field) + ": unknown value '" + s + "'");
}

template <class T>
T get_field(const json& j, const char* field) {
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string(field) + ": wrong type");
  }
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["command"] = command_name(c.command);
  j["n"] = c.n;
  j["d"] = c.d;
  j["rho"] = c.rho;
  j["trials"] = c.trials;
  j["seed"] = c.master_seed;
  j["output"] = c.output_path;
  j["format"] = name_of(kFormats, c.format);
  j["threads"] = c.threads;
  j["threshold"] = name_of(kThresholds, c.threshold);
  j["sampler"] = name_of(kSamplers, c.sampler);
  j["axis"] = name_of(kAxes, c.axis);
  j["grid"] = c.grid ? json(format_grid(*c.grid)) : json(nullptr);
  j["target_risk"] = c.target_risk;
  j["k_star"] = c.k_star;
  j["margin"] = c.margin;
  j["epsilon_d"] = c.epsilon_d ? json(*c.epsilon_d) : json(nullptr);
  j["inject_fault"] = c.inject_fault;
  return j;
}

void apply_json(ExperimentConfig& c, const json& j) {
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      if (parse_command(get_field<std::string>(j, "command")) != c.command) {
        throw UsageError("command: config file is for a different command");
      }
    } else if (key == "n") {
      c.n = get_field<std::uint64_t>(j, "n");
    } else if (key == "d") {
      c.d = get_field<std::uint64_t>(j, "d");
    } else if (key == "rho") {
      c.rho = get_field<double>(j, "rho");
    } else if (key == "trials") {
      c.trials = get_field<std::uint64_t>(j, "trials");
    } else if (key == "seed") {
      c.master_seed = get_field<std::uint64_t>(j, "seed");
    } else if (key == "output") {
      c.output_path = get_field<std::string>(j, "output");
    } else if (key == "format") {
      c.format = value_of(kFormats, get_field<std::string>(j, "format"), "format");
    } else if (key == "threads") {
      c.threads = get_field<unsigned>(j, "threads");
    } else if (key == "threshold") {
      c.threshold = value_of(kThresholds, get_field<std::string>(j, "threshold"),
                             "threshold");
    } else if (key == "sampler") {
      c.sampler =
          value_of(kSamplers, get_field<std::string>(j, "sampler"), "sampler");
    } else if (key == "axis") {
      c.axis = value_of(kAxes, get_field<std::string>(j, "axis"), "axis");
    } else if (key == "grid") {
      if (value.is_null()) {
        c.grid.reset();
      } else {
        c.grid = parse_grid(get_field<std::string>(j, "grid"));
      }
    } else if (key == "target_risk") {
      c.target_risk = get_field<double>(j, "target_risk");
    } else if (key == "k_star") {
      c.k_star = get_field<std::uint64_t>(j, "k_star");
    } else if (key == "margin") {
      c.margin = get_field<double>(j, "margin");
    } else if (key == "epsilon_d") {
      if (value.is_null()) {
        c.epsilon_d.reset();
      } else {
        c.epsilon_d = get_field<double>(j, "epsilon_d");
      }
    } else if (key == "inject_fault") {
      c.inject_fault = get_field<bool>(j, "inject_fault");
    } else {
      throw UsageError(key + ": unknown config field");
    }
  }
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object() || !j.contains("command")) {
    throw UsageError("command: missing from config");
  }
  ExperimentConfig c =
      default_config(parse_command(get_field<std::string>(j, "command")));
  apply_json(c, j);
  return c;
}

std::string render_config(const ExperimentConfig& c) {
  return config_to_json(c).dump(2) + "\n";
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

json experiment_record(const ExperimentConfig& c) {
  json j = config_to_json(c);
  j.erase("threads");
  j.erase("output");
  return j;
}

void validate(const ExperimentConfig& c) {
  if (c.n == 0) throw UsageError("n: must be at least 1");
  if (c.d == 0) throw UsageError("d: must be at least 1");
  switch (c.command) {
    case Command::kSimulateDetection:
    case Command::kSimulateRecovery:
      if (!(std::abs(c.rho) < 1.0) || c.rho == 0.0) {
        throw UsageError("rho: must satisfy 0 < |rho| < 1");
      }
      if (c.trials == 0) throw UsageError("trials: must be at least 1");
      break;
    case Command::kCurve:
      if (!c.grid) throw UsageError("grid: required for curve");
      if (!c.epsilon_d) throw UsageError("epsilon_d: required for curve");
      if (!(*c.epsilon_d >= 0.0)) throw UsageError("epsilon_d: must be >= 0");
      if (!(c.target_risk > 0.0 && c.target_risk < 1.0)) {
        throw UsageError("target_risk: must lie in (0, 1)");
      }
      if (!(c.margin > 0.0)) throw UsageError("margin: must be positive");
      for (double v : c.grid->values()) {
        if (!(v >= 1.0)) throw UsageError("grid: axis values must be >= 1");
      }
      break;
    case Command::kVerify:
      if (c.trials == 0) throw UsageError("trials: must be at least 1");
      break;
  }
}

}  // namespace dbcorr
