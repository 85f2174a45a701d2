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
// Serial reference vs OpenMP kernel timings. Usage: bench_kernels [repeats]
#include "mdcmap/analysis.hpp"
#include "mdcmap/mapgen.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace mdcmap;

namespace {

double seconds(const std::function<void()> &f, int repeats)
{
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < repeats; ++k)
        f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeats;
}

void row(const char *name, const std::function<void(Execution)> &kernel, int repeats)
{
    const double s = seconds([&] { kernel(Execution::serial); }, repeats);
    const double p = seconds([&] { kernel(Execution::parallel); }, repeats);
    std::printf("%-22s %12.6f %12.6f %8.2fx\n", name, s, p, s / p);
}

} // namespace

int main(int argc, char **argv)
{
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    SystemConfig cfg;
    cfg.carrier_hz = {60e9, 61e9};
    cfg.modes = {0, 1};
    cfg.symbol_count = 16;
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    const auto h = channel_matrix(cfg, Position::from_beta(frame, cfg.rayleigh_distance, 1.0, 1.0));

    std::printf("threads %d, repeats %d\n", omp_get_max_threads(), repeats);
    std::printf("%-22s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

    const auto big = random_start(256, 4, PowerConstraint::total_power(1.0), 7);
    row("med M=256", [&](Execution e) { (void)med(h, big, e); }, repeats);

    GridSpec grid;
    grid.frame = frame;
    const auto betas = grid.betas();
    const auto zs = grid.zs();
    row("gain_field", [&](Execution e) { (void)gain_field(cfg, frame, betas, zs, e); }, repeats);

    DesignOptions opts;
    opts.restarts = 4;
    cfg.symbol_count = 8;
    row("design M=8 R=4",
        [&](Execution e) {
            opts.execution = e;
            (void)design_total_power(h, cfg, opts);
        },
        repeats);

    GridSpec small = grid;
    small.beta_lo = 0.5;
    small.beta_hi = 1.5;
    small.beta_step = 0.25;
    small.z_lo = 1.0;
    small.z_hi = 2.0;
    small.z_step = 0.5;
    opts.restarts = 2;
    opts.execution = Execution::serial;
    const auto table = design_grid(cfg, small, opts);
    std::vector<std::size_t> usable;
    for (const auto &p : table.positions)
        if (p.usable())
            usable.push_back(p.index);
    row("distortion_matrix", [&](Execution e) { (void)distortion_matrix(table, usable, e); }, repeats);

    const auto c = design_total_power(h, cfg, opts).constellation;
    row("monte_carlo_ser 1e5", [&](Execution e) { (void)monte_carlo_ser(h, c, 1e-9, 100000, 3, e); }, repeats);
    return 0;
}
