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
#include "mdcmap/mapgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mdcmap {

namespace {

std::size_t axis_count(double lo, double hi, double step)
{
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

std::vector<double> axis(double lo, double hi, double step)
{
    std::vector<double> v(axis_count(lo, hi, step));
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = lo + static_cast<double>(k) * step;
    return v;
}

} // namespace

void GridSpec::validate() const
{
    frame.validate();
    if (!(beta_step > 0.0) || !(z_step > 0.0))
        throw ValidationError("grid steps must be positive");
    if (!(beta_lo >= 0.0) || !(beta_hi >= beta_lo))
        throw ValidationError("beta range must satisfy 0 <= beta_lo <= beta_hi");
    if (!(z_lo >= kMinAxialDistance) || !(z_hi >= z_lo))
        throw ValidationError("z range must satisfy z_min <= z_lo <= z_hi");
}

std::vector<double> GridSpec::betas() const { return axis(beta_lo, beta_hi, beta_step); }
std::vector<double> GridSpec::zs() const { return axis(z_lo, z_hi, z_step); }
std::size_t GridSpec::beta_count() const { return axis_count(beta_lo, beta_hi, beta_step); }
std::size_t GridSpec::z_count() const { return axis_count(z_lo, z_hi, z_step); }

Position GridSpec::position(std::size_t index, double rayleigh_distance) const
{
    if (index >= size())
        throw ValidationError("grid index out of range");
    const std::size_t nb = beta_count();
    const double beta = beta_lo + static_cast<double>(index % nb) * beta_step;
    const double z = z_lo + static_cast<double>(index / nb) * z_step;
    return Position::from_beta(frame, rayleigh_distance, beta, z);
}

std::vector<std::size_t> DesignTable::quarantined() const
{
    std::vector<std::size_t> out;
    for (const auto &p : positions)
        if (!p.usable())
            out.push_back(p.index);
    return out;
}

DesignTable design_grid(const SystemConfig &config, const GridSpec &grid, const DesignOptions &options,
                        Execution execution)
{
    config.validate();
    grid.validate();
    options.validate();
    DesignTable table;
    table.config = config;
    table.grid = grid;
    table.positions.resize(grid.size());

    auto run = [&](std::size_t k) {
        PositionDesign &p = table.positions[k];
        p.index = k;
        try
        {
            p.position = grid.position(k, config.rayleigh_distance);
            p.channel = channel_matrix(config, p.position);
            DesignOptions local = options;
            local.seed = mix_seed(options.seed, k);
            local.execution = Execution::serial;
            p.design = design_total_power(p.channel, config, local);
            if (!p.design->converged)
                p.failure = "no restart converged within the iteration budget";
        }
        catch (const std::exception &e)
        {
            p.failure = e.what();
        }
    };

    if (execution == Execution::parallel)
    {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(grid.size()); ++k)
            run(static_cast<std::size_t>(k));
    }
    else
    {
        for (std::size_t k = 0; k < grid.size(); ++k)
            run(k);
    }
    return table;
}

std::vector<double> distortion_matrix(const DesignTable &table, const std::vector<std::size_t> &usable,
                                      Execution execution)
{
    const std::size_t n = usable.size();
    std::vector<double> d(n * n, 0.0);
    auto row = [&](std::size_t a) {
        const auto &rep = table.positions[usable[a]].design->constellation;
        for (std::size_t q = 0; q < n; ++q)
        {
            if (q == a)
                continue;
            const auto &target = table.positions[usable[q]];
            d[a * n + q] = normalized_med_diff(target.channel, rep, target.design->constellation);
        }
    };
    if (execution == Execution::parallel)
    {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(n); ++a)
            row(static_cast<std::size_t>(a));
    }
    else
    {
        for (std::size_t a = 0; a < n; ++a)
            row(a);
    }
    return d;
}

namespace {

std::vector<std::size_t> usable_positions(const DesignTable &table)
{
    std::vector<std::size_t> usable;
    for (const auto &p : table.positions)
        if (p.usable())
            usable.push_back(p.index);
    return usable;
}

ConstellationMap cluster_with(const DesignTable &table, const std::vector<std::size_t> &usable,
                              const std::vector<double> &d, double tau, std::uint64_t seed)
{
    if (usable.empty())
        throw ValidationError("no usable position designs to cluster");
    if (!(tau >= 0.0))
        throw ValidationError("tau must be nonnegative");
    const std::size_t n = usable.size();

    ConstellationMap map;
    map.grid = table.grid;
    map.carrier_hz = table.config.carrier_hz;
    map.modes = table.config.modes;
    map.tau = tau;
    map.winning_seed = seed;
    map.quarantined = table.quarantined();

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> open(n);
    for (std::size_t k = 0; k < n; ++k)
        open[k] = k;
    std::vector<Assignment> assigned;
    assigned.reserve(n);
    while (!open.empty())
    {
        const std::size_t a = open[rng() % open.size()];
        const auto &rep = table.positions[usable[a]];
        Category cat;
        cat.id = map.categories.size();
        cat.representative = rep.index;
        cat.position = rep.position;
        cat.d_min = rep.design->d_min;
        cat.constellation = rep.design->constellation;

        std::vector<std::size_t> still_open;
        still_open.reserve(open.size());
        for (std::size_t q : open)
        {
            const double dist = q == a ? 0.0 : d[a * n + q];
            if (q == a || dist < tau)
            {
                const auto &member = table.positions[usable[q]];
                Assignment as;
                as.index = member.index;
                as.beta = member.position.beta.value_or(0.0);
                as.z = member.position.z;
                as.category = cat.id;
                as.distortion = dist;
                as.optimal_d_min = member.design->d_min;
                assigned.push_back(as);
                ++cat.members;
            }
            else
            {
                still_open.push_back(q);
            }
        }
        open = std::move(still_open);
        map.categories.push_back(std::move(cat));
    }
    std::sort(assigned.begin(), assigned.end(), [](const Assignment &x, const Assignment &y) { return x.index < y.index; });
    map.assignments = std::move(assigned);
    double total = 0.0;
    for (const auto &as : map.assignments)
        total += as.distortion;
    map.total_distortion = total;
    return map;
}

} // namespace

ConstellationMap cluster_once(const DesignTable &table, double tau, std::uint64_t seed)
{
    const auto usable = usable_positions(table);
    const auto d = distortion_matrix(table, usable, Execution::serial);
    auto map = cluster_with(table, usable, d, tau, seed);
    map.seed = seed;
    return map;
}

ConstellationMap build_map(const DesignTable &table, double tau, std::size_t trials, std::uint64_t seed,
                           Execution execution)
{
    if (trials < 1)
        throw ValidationError("clustering trial count must be at least 1");
    const auto usable = usable_positions(table);
    const auto d = distortion_matrix(table, usable, execution);

    std::vector<ConstellationMap> maps(trials);
    if (execution == Execution::parallel)
    {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(trials); ++t)
            maps[static_cast<std::size_t>(t)] =
                cluster_with(table, usable, d, tau, mix_seed(seed, static_cast<std::uint64_t>(t)));
    }
    else
    {
        for (std::size_t t = 0; t < trials; ++t)
            maps[t] = cluster_with(table, usable, d, tau, mix_seed(seed, t));
    }

    std::size_t best = 0;
    for (std::size_t t = 1; t < trials; ++t)
        if (maps[t].total_distortion < maps[best].total_distortion)
            best = t;
    ConstellationMap out = std::move(maps[best]);
    out.trials = trials;
    out.seed = seed;
    out.winning_trial = best;
    return out;
}

void stamp_config(ConstellationMap &map, const std::string &config_text)
{
    map.config_text = config_text;
    map.config_hash = fnv1a(config_text);
}

const Assignment *ConstellationMap::find(std::size_t position_index) const
{
    auto it = std::lower_bound(assignments.begin(), assignments.end(), position_index,
                               [](const Assignment &a, std::size_t i) { return a.index < i; });
    return it != assignments.end() && it->index == position_index ? &*it : nullptr;
}

} // namespace mdcmap
