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
#ifndef MDCMAP_MAPGEN_HPP
#define MDCMAP_MAPGEN_HPP

#include "mdcmap/beam_channel.hpp"
#include "mdcmap/constellation.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdcmap {

/// Rectangular (beta, z) grid. Position index = iz * beta_count + ibeta.
struct GridSpec
{
    double beta_lo = 0.2;
    double beta_hi = 2.2;
    double beta_step = 0.1;
    double z_lo = 0.5;
    double z_hi = 4.0;
    double z_step = 0.25;
    ReferenceFrame frame;

    void validate() const;
    std::vector<double> betas() const;
    std::vector<double> zs() const;
    std::size_t beta_count() const;
    std::size_t z_count() const;
    std::size_t size() const { return beta_count() * z_count(); }
    Position position(std::size_t index, double rayleigh_distance) const;
};

struct PositionDesign
{
    std::size_t index = 0;
    Position position;
    ChannelMatrix channel;
    std::optional<DesignResult> design;
    std::string failure;

    // Converged designs only; everything else is quarantined from clustering.
    bool usable() const { return design && design->converged && failure.empty(); }
};

struct DesignTable
{
    SystemConfig config;
    GridSpec grid;
    std::vector<PositionDesign> positions;

    std::vector<std::size_t> quarantined() const;
};

/// Designs every grid position independently (position k uses seed mix_seed(options.seed, k)).
/// Failures are recorded per position, never thrown.
DesignTable design_grid(const SystemConfig &config, const GridSpec &grid, const DesignOptions &options,
                        Execution execution = Execution::parallel);

struct Category
{
    std::size_t id = 0;
    std::size_t representative = 0; // position index
    Position position;
    double d_min = 0.0;
    Constellation constellation;
    std::size_t members = 0;
};

struct Assignment
{
    std::size_t index = 0;
    double beta = 0.0;
    double z = 0.0;
    std::size_t category = 0;
    double distortion = 0.0; // normalized MED difference of the representative at this position
    double optimal_d_min = 0.0;
};

struct ConstellationMap
{
    GridSpec grid;
    std::vector<double> carrier_hz;
    std::vector<int> modes;
    std::vector<Category> categories;
    std::vector<Assignment> assignments; // ordered by position index
    std::vector<std::size_t> quarantined;
    double total_distortion = 0.0;
    double tau = 0.15;
    std::size_t trials = 1;
    std::uint64_t seed = 0;         // base seed passed to build_map
    std::size_t winning_trial = 0;
    std::uint64_t winning_seed = 0; // seed actually used by the winning clustering pass
    std::string config_text;        // canonical configuration the map was built from
    std::uint64_t config_hash = 0;  // fnv1a(config_text)

    const Assignment *find(std::size_t position_index) const;
};

/// D(a, q) = normalized_med_diff(H_q, C_a, C_q) over usable positions, row-major in the order
/// of `usable`.
std::vector<double> distortion_matrix(const DesignTable &table, const std::vector<std::size_t> &usable,
                                      Execution execution = Execution::parallel);

/// One randomized clustering pass: draw an unclassified position as representative, absorb every
/// unclassified position whose distortion is below tau, repeat until none is left.
ConstellationMap cluster_once(const DesignTable &table, double tau, std::uint64_t seed);

/// Best of `trials` clustering passes (trial t uses mix_seed(seed, t)) by total distortion,
/// lowest trial index on ties.
ConstellationMap build_map(const DesignTable &table, double tau, std::size_t trials, std::uint64_t seed,
                           Execution execution = Execution::parallel);

// Attaches the configuration the map was built from and its hash.
void stamp_config(ConstellationMap &map, const std::string &config_text);

inline constexpr int kMapFormatVersion = 1;

void save_map(const ConstellationMap &map, const std::string &path);
// Throws MalformedFileError, FormatVersionError or ConfigHashError. When `expected_hash` is set
// the stored hash must also match it.
ConstellationMap load_map(const std::string &path, std::optional<std::uint64_t> expected_hash = std::nullopt);
std::string format_map(const ConstellationMap &map);
ConstellationMap parse_map(const std::string &text, std::optional<std::uint64_t> expected_hash = std::nullopt);

void write_assignment_csv(const ConstellationMap &map, const std::string &path);

} // namespace mdcmap

#endif
