// SPDX-License-Identifier: Apache-2.0
//
// mdcmap: position-indexed multi-dimensional constellation maps for OAM/WDM links
// Copyright (C) 2026 The mdcmap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#ifndef MDCMAP_COMMANDS_HPP
#define MDCMAP_COMMANDS_HPP

#include "mdcmap/run_config.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace mdcmap {

inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_verification = 3, exit_io = 4 };

struct CommandResult
{
    nlohmann::json summary;
    bool verified = true; // false on any hard verification failure
};

// Output files, all under config.out:
//   gain-field  gain_field.csv
//   design      constellation.txt, design.json
//   map         map.txt, assignments.csv, map.json
//   verify      verify_theorem1.json | verify_theorem2.json | verify_chains.json
//   ser         ser.json

CommandResult cmd_gain_field(const RunConfig &config);

// Fixed-power design when `power` is given, total-power design otherwise.
CommandResult cmd_design(const RunConfig &config, double beta, double z,
                         const std::optional<PowerVector> &power = std::nullopt);

CommandResult cmd_map(const RunConfig &config);

enum class VerifyMode { theorem1, theorem2, chains };

/// Random grid instances. Theorem 1 draws two positions; Theorem 2 draws one position and
/// sets p_f = p_o + perturbation * (random nonnegative unit vector).
CommandResult cmd_verify(const RunConfig &config, VerifyMode mode, std::size_t samples, double perturbation = 0.05);

CommandResult cmd_ser(const RunConfig &config, double beta, double z, bool baseline, std::size_t trials = 100000);

// Maps the exception hierarchy onto exit codes.
int exit_code_for(const std::exception &e);

} // namespace mdcmap

#endif
