// Copyright 2026 The mtk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mtk::cli {

/// Command-line flags layered over the JSON config: each one, when set,
/// replaces the matching top-level config key before validation.
struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<long> iters;
};

/// Each command reads one JSON config (relative paths inside it resolve
/// against the config file's directory), runs its pipeline, and writes
/// artifacts into the "out" directory. Configuration problems raise
/// ConfigError; training/optimization aborts raise NumericalError.
void cmd_fit_shape(const std::string& config_path, const Overrides& o = {});
void cmd_invert(const std::string& config_path, const Overrides& o = {});
void cmd_render(const std::string& config_path, const Overrides& o = {});
void cmd_eval(const std::string& config_path, const Overrides& o = {});
void cmd_extract_mesh(const std::string& config_path, const Overrides& o = {});

/// Runs the named command and maps errors onto the exit-code contract:
/// 0 success, 2 configuration or input error, 3 numerical abort,
/// 1 anything unexpected. Error text goes to stderr.
int run_command(const std::string& name, const std::string& config_path,
                const Overrides& o = {});

}  // namespace mtk::cli
