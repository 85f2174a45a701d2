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
#ifndef MDCMAP_RUN_CONFIG_HPP
#define MDCMAP_RUN_CONFIG_HPP

#include "mdcmap/beam_channel.hpp"
#include "mdcmap/constellation.hpp"
#include "mdcmap/mapgen.hpp"

#include <cstdint>
#include <string>

namespace mdcmap {

/// Flat `key = value` configuration. Lines starting with '#' are comments.
///
///   carriers_ghz        comma list, strictly increasing          (60,61)
///   modes               comma list of signed integers            (0,1)
///   rayleigh_distance_m                                          (4)
///   noise_power         N0                                       (1e-10)
///   power_budget        P_sum                                    (1)
///   symbol_count        M                                        (64)
///   antenna_gain        comma list, one per sub-channel; empty = all 1
///   antenna_spacing_m                                            (0)
///   frame_carrier       carrier index of the beta frame          (0)
///   frame_mode          mode of the beta frame                   (1)
///   beta_lo beta_hi beta_step z_lo z_hi z_step                   (0.2 2.2 0.1 0.5 4 0.25)
///   restarts max_iterations tolerance pair_fraction              (10 200 1e-6 1)
///   tau trials seed                                              (0.15 100 1)
///   workers             OpenMP threads, 0 = runtime default      (0)
///   out                 output directory                         (.)
struct RunConfig
{
    SystemConfig system;
    GridSpec grid;
    std::size_t frame_carrier = 0;
    int frame_mode = 1;
    DesignOptions design;
    double tau = 0.15;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out = ".";

    RunConfig();

    // Fills grid.frame and design.seed from the scalar fields, then validates everything.
    void finalize();

    // Sorted key = value lines of every result-affecting key (workers and out excluded).
    std::string canonical() const;
    std::uint64_t hash() const { return fnv1a(canonical()); }
};

// Throws ValidationError naming the offending key or line.
RunConfig parse_run_config(const std::string &text);
RunConfig load_run_config(const std::string &path);

} // namespace mdcmap

#endif
