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

#ifndef INVLQG_CSV_HPP_
#define INVLQG_CSV_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace invlqg {

/// Shortest decimal representation that round-trips the exact double
/// (std::to_chars); locale-independent.
std::string format_double(double value);

std::string format_int(std::int64_t value);

/// Splits on `sep`, no quoting/escaping (the project's CSVs never need it).
std::vector<std::string> split(std::string_view line, char sep);

/// Parses a double, rejecting trailing garbage. Throws std::runtime_error.
double parse_double(std::string_view text);

}  // namespace invlqg

#endif  // INVLQG_CSV_HPP_
