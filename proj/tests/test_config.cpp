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

#include <string>

#include <doctest.h>

#include "invlqg/config.hpp"

using namespace invlqg;

namespace {
bool has_error(const ConfigParseResult& result, const std::string& needle) {
  for (const auto& e : result.errors) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}
}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty text yields the documented defaults") {
  const ConfigParseResult result = parse_config("");
  REQUIRE(result.config.has_value());
  const ExperimentConfig& c = *result.config;
  CHECK(c.tau == 0.05);
  CHECK(c.segments.size() == 5);
  CHECK(c.alpha_sq == std::vector<double>{1.0, 10.0, 100.0});
  CHECK(c.beta_sq == std::vector<double>{1.0, 10.0, 100.0});
  CHECK(c.trials_per_cell == 500);
  CHECK(c.lambda0 == 0.01);
  CHECK_FALSE(c.log_trials);
  CHECK_FALSE(c.dump_trajectory.has_value());
}

TEST_CASE("negative tau is rejected by key name") {
  const ConfigParseResult result = parse_config("tau = -0.5\n");
  CHECK_FALSE(result.config.has_value());
  CHECK(has_error(result, "tau"));
}

TEST_CASE("factor lists parse to grid axes") {
  const ConfigParseResult result = parse_config("alpha_sq = 1,10,100\nbeta_sq = 2 4\n");
  REQUIRE(result.config.has_value());
  CHECK(result.config->alpha_sq == std::vector<double>{1.0, 10.0, 100.0});
  CHECK(result.config->beta_sq == std::vector<double>{2.0, 4.0});
}

TEST_CASE("unknown keys are errors and every violation is reported") {
  const ConfigParseResult result =
      parse_config("tua = 0.05\ntau = -1\ntrials_per_cell = 0\nalpha_sq =\n");
  CHECK_FALSE(result.config.has_value());
  CHECK(has_error(result, "tua"));
  CHECK(has_error(result, "tau"));
  CHECK(has_error(result, "trials_per_cell"));
  CHECK(has_error(result, "alpha_sq"));
  CHECK(result.errors.size() >= 4);
}

TEST_CASE("duplicate keys are rejected") {
  const ConfigParseResult result = parse_config("tau = 0.05\ntau = 0.1\n");
  CHECK_FALSE(result.config.has_value());
  CHECK(has_error(result, "duplicate"));
}

TEST_CASE("segments parse duration-u-omega triples") {
  const ConfigParseResult result = parse_config("segments = 2 1 0 ; 3 0.5 -0.4\n");
  REQUIRE(result.config.has_value());
  REQUIRE(result.config->segments.size() == 2);
  CHECK(result.config->segments[0].duration == 2.0);
  CHECK(result.config->segments[1].omega == -0.4);

  CHECK_FALSE(parse_config("segments = 2 1\n").config.has_value());
  CHECK_FALSE(parse_config("segments = -2 1 0\n").config.has_value());
}

TEST_CASE("comments and flags") {
  const ConfigParseResult result = parse_config(
      "# benchmark tweaks\n"
      "log_trials = true\n"
      "dump_trajectory = 7\n"
      "time_averaged_kl = true  # trailing comment\n"
      "threads = 4\n");
  REQUIRE(result.config.has_value());
  CHECK(result.config->log_trials);
  CHECK(result.config->dump_trajectory == 7);
  CHECK(result.config->time_averaged_kl);
  CHECK(result.config->threads == 4);
}

TEST_CASE("rendered config parses back to itself") {
  ExperimentConfig config;
  config.trials_per_cell = 123;
  config.base_seed = 99;
  config.alpha_sq = {1.0, 2.5};
  config.dump_trajectory = 3;
  const ConfigParseResult round = parse_config(render_config(config));
  REQUIRE(round.config.has_value());
  CHECK(round.config->trials_per_cell == 123);
  CHECK(round.config->base_seed == 99);
  CHECK(round.config->alpha_sq == config.alpha_sq);
  CHECK(round.config->dump_trajectory == 3);
}

}  // TEST_SUITE
