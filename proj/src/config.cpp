// Copyright 2026 The invlqg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "invlqg/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "invlqg/csv.hpp"

namespace invlqg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// list values are separated by commas and/or whitespace
std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> items;
  std::string current;
  for (const char c : value) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) items.push_back(std::move(current)), current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) items.push_back(std::move(current));
  return items;
}

class Collector {
 public:
  explicit Collector(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& key, const std::string& what) {
    errors_.push_back(key + ": " + what);
  }

  std::optional<double> number(const std::string& key, std::string_view value) {
    try {
      return parse_double(value);
    } catch (const std::exception&) {
      error(key, "not a number: '" + std::string(value) + "'");
      return std::nullopt;
    }
  }

  std::optional<std::vector<double>> number_list(const std::string& key, std::string_view value,
                                                 std::size_t expected = 0) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) {
      const auto v = number(key, item);
      if (!v) return std::nullopt;
      out.push_back(*v);
    }
    if (expected != 0 && out.size() != expected) {
      error(key, "expected " + std::to_string(expected) + " values, got " +
                     std::to_string(out.size()));
      return std::nullopt;
    }
    return out;
  }

  std::optional<bool> boolean(const std::string& key, std::string_view value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    error(key, "expected true/false");
    return std::nullopt;
  }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace

ConfigParseResult parse_config(std::string_view text) {
  ExperimentConfig config;
  std::vector<std::string> errors;
  Collector collect(errors);
  std::set<std::string> seen;

  std::istringstream stream{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      collect.error(key, "duplicate key");
      continue;
    }

    if (key == "tau") {
      if (const auto v = collect.number(key, value)) config.tau = *v;
    } else if (key == "segments") {
      // duration u omega triples separated by ';'
      std::vector<Segment> segments;
      bool ok = true;
      for (const auto& part : split(value, ';')) {
        const auto triple = collect.number_list(key, part, 3);
        if (!triple) {
          ok = false;
          break;
        }
        segments.push_back({(*triple)[0], (*triple)[1], (*triple)[2]});
      }
      if (ok) config.segments = std::move(segments);
    } else if (key == "weights_c") {
      if (const auto v = collect.number_list(key, value, 3))
        config.weights_c = Eigen::Vector3d((*v)[0], (*v)[1], (*v)[2]);
    } else if (key == "weights_d") {
      if (const auto v = collect.number_list(key, value, 2))
        config.weights_d = Eigen::Vector2d((*v)[0], (*v)[1]);
    } else if (key == "p0") {
      if (const auto v = collect.number_list(key, value, 3))
        config.p0_diag = Eigen::Vector3d((*v)[0], (*v)[1], (*v)[2]);
    } else if (key == "m0") {
      if (const auto v = collect.number_list(key, value, 2))
        config.m0_diag = Eigen::Vector2d((*v)[0], (*v)[1]);
    } else if (key == "lambda0") {
      if (const auto v = collect.number(key, value)) config.lambda0 = *v;
    } else if (key == "alpha_sq") {
      if (const auto v = collect.number_list(key, value)) config.alpha_sq = *v;
    } else if (key == "beta_sq") {
      if (const auto v = collect.number_list(key, value)) config.beta_sq = *v;
    } else if (key == "trials_per_cell") {
      if (const auto v = collect.number(key, value)) config.trials_per_cell = static_cast<int>(*v);
    } else if (key == "base_seed") {
      if (const auto v = collect.number(key, value))
        config.base_seed = static_cast<std::uint64_t>(*v);
    } else if (key == "out_dir") {
      config.out_dir = std::string(value);
    } else if (key == "log_trials") {
      if (const auto v = collect.boolean(key, value)) config.log_trials = *v;
    } else if (key == "dump_trajectory") {
      if (value == "none") {
        config.dump_trajectory.reset();
      } else if (const auto v = collect.number(key, value)) {
        if (*v < 0) {
          collect.error(key, "trial id must be >= 0");
        } else {
          config.dump_trajectory = static_cast<std::uint64_t>(*v);
        }
      }
    } else if (key == "time_averaged_kl") {
      if (const auto v = collect.boolean(key, value)) config.time_averaged_kl = *v;
    } else if (key == "threads") {
      if (const auto v = collect.number(key, value)) config.threads = static_cast<int>(*v);
    } else {
      collect.error(key, "unknown key");
    }
  }

  // semantic validation; keeps going to report every violation
  if (!(config.tau > 0.0)) collect.error("tau", "must be > 0");
  for (std::size_t i = 0; i < config.segments.size(); ++i) {
    if (!(config.segments[i].duration > 0.0)) {
      collect.error("segments", "segment " + std::to_string(i) + ": duration must be > 0");
    }
  }
  if (config.segments.empty()) collect.error("segments", "must not be empty");
  if (!(config.weights_c.minCoeff() > 0.0)) collect.error("weights_c", "entries must be > 0");
  if (!(config.weights_d.minCoeff() > 0.0)) collect.error("weights_d", "entries must be > 0");
  if (config.p0_diag.minCoeff() < 0.0) collect.error("p0", "entries must be >= 0");
  if (config.m0_diag.minCoeff() < 0.0) collect.error("m0", "entries must be >= 0");
  if (config.lambda0 < 0.0) collect.error("lambda0", "must be >= 0");
  if (config.alpha_sq.empty()) collect.error("alpha_sq", "grid must be non-empty");
  if (config.beta_sq.empty()) collect.error("beta_sq", "grid must be non-empty");
  for (const double a : config.alpha_sq) {
    if (!(a > 0.0)) collect.error("alpha_sq", "factors must be > 0");
  }
  for (const double b : config.beta_sq) {
    if (!(b > 0.0)) collect.error("beta_sq", "factors must be > 0");
  }
  if (config.trials_per_cell < 1) collect.error("trials_per_cell", "must be >= 1");
  if (config.threads < 0) collect.error("threads", "must be >= 0");

  ConfigParseResult result;
  result.errors = std::move(errors);
  if (result.errors.empty()) result.config = std::move(config);
  return result;
}

ConfigParseResult parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return {std::nullopt, {"cannot open config file: " + path}};
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string render_config(const ExperimentConfig& config) {
  std::ostringstream out;
  auto list = [](const auto& values) {
    std::string s;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (i) s += ",";
      s += format_double(values[i]);
    }
    return s;
  };
  auto stdlist = [](const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ",";
      s += format_double(values[i]);
    }
    return s;
  };
  out << "tau = " << format_double(config.tau) << "\n";
  out << "segments = ";
  for (std::size_t i = 0; i < config.segments.size(); ++i) {
    if (i) out << " ; ";
    out << format_double(config.segments[i].duration) << " " << format_double(config.segments[i].u)
        << " " << format_double(config.segments[i].omega);
  }
  out << "\n";
  out << "weights_c = " << list(config.weights_c) << "\n";
  out << "weights_d = " << list(config.weights_d) << "\n";
  out << "p0 = " << list(config.p0_diag) << "\n";
  out << "m0 = " << list(config.m0_diag) << "\n";
  out << "lambda0 = " << format_double(config.lambda0) << "\n";
  out << "alpha_sq = " << stdlist(config.alpha_sq) << "\n";
  out << "beta_sq = " << stdlist(config.beta_sq) << "\n";
  out << "trials_per_cell = " << config.trials_per_cell << "\n";
  out << "base_seed = " << config.base_seed << "\n";
  out << "out_dir = " << config.out_dir << "\n";
  out << "log_trials = " << (config.log_trials ? "true" : "false") << "\n";
  out << "dump_trajectory = "
      << (config.dump_trajectory ? std::to_string(*config.dump_trajectory) : std::string("none"))
      << "\n";
  out << "time_averaged_kl = " << (config.time_averaged_kl ? "true" : "false") << "\n";
  out << "threads = " << config.threads << "\n";
  return out.str();
}

}  // namespace invlqg
