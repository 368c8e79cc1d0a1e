/*
 Copyright 2026 The flatopt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "flatopt/cost.hpp"

namespace flatopt {

inline constexpr int kSchemaVersion = 1;

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

// Header row "t,<channels...>" then one row per sample.
void write_csv(std::ostream& os, const Trajectory& traj);
void write_csv_file(const std::string& path, const Trajectory& traj);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace flatopt
