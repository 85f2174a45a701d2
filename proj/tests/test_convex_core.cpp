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
#include "doctest.h"

#include "mdcmap/common.hpp"
#include "mdcmap/convex_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace mdcmap;

namespace {

AffineBound dense_bound(const std::vector<double> &g, double c)
{
    AffineBound b;
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        b.index.push_back(i);
        b.value.push_back(g[i]);
    }
    b.offset = c;
    return b;
}

// max_{|x|^2<=B} min_k a_k.x + c_k equals min over the simplex of  lambda.c + sqrt(B) |sum lambda_k a_k|.
// Brute force: coarse simplex lattice followed by pairwise mass transfers with shrinking step.
double dual_oracle(const std::vector<std::vector<double>> &a, const std::vector<double> &c, double ball)
{
    const std::size_t m = a.size();
    const std::size_t n = a[0].size();
    auto value = [&](const std::vector<double> &w) {
        std::vector<double> g(n, 0.0);
        double lin = 0.0;
        for (std::size_t k = 0; k < m; ++k)
        {
            lin += w[k] * c[k];
            for (std::size_t i = 0; i < n; ++i)
                g[i] += w[k] * a[k][i];
        }
        double nrm = 0.0;
        for (double v : g)
            nrm += v * v;
        return lin + std::sqrt(ball * nrm);
    };

    const int steps = 12;
    std::vector<double> best_w(m, 1.0 / static_cast<double>(m));
    double best = value(best_w);
    std::vector<int> counts(m, 0);
    // enumerate compositions of `steps` into m parts
    auto recurse = [&](auto &&self, std::size_t k, int left) -> void {
        if (k + 1 == m)
        {
            counts[k] = left;
            std::vector<double> w(m);
            for (std::size_t i = 0; i < m; ++i)
                w[i] = counts[i] / static_cast<double>(steps);
            const double v = value(w);
            if (v < best)
            {
                best = v;
                best_w = w;
            }
            return;
        }
        for (int q = 0; q <= left; ++q)
        {
            counts[k] = q;
            self(self, k + 1, left - q);
        }
    };
    recurse(recurse, 0, steps);

    for (double h = 1.0 / steps; h > 1e-12; h *= 0.5)
    {
        bool improved = true;
        while (improved)
        {
            improved = false;
            for (std::size_t p = 0; p < m; ++p)
                for (std::size_t q = 0; q < m; ++q)
                {
                    if (p == q || best_w[q] <= 0.0)
                        continue;
                    std::vector<double> w = best_w;
                    const double t = std::min(h, w[q]);
                    w[q] -= t;
                    w[p] += t;
                    const double v = value(w);
                    if (v < best - 1e-15)
                    {
                        best = v;
                        best_w = w;
                        improved = true;
                    }
                }
        }
    }
    return best;
}

} // namespace

TEST_CASE("opposing bounds on the unit disc balance at zero")
{
    SubproblemSpec spec;
    spec.dimension = 2;
    spec.bounds = {dense_bound({1.0, 0.0}, 0.0), dense_bound({-1.0, 0.0}, 0.0)};
    spec.ball_bound = 1.0;
    const std::vector<double> warm{0.3, 0.2};
    const auto sol = solve_subproblem(spec, warm);
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(std::abs(sol.s) < 1e-8);
}

TEST_CASE("single coordinate bound reaches the disc edge")
{
    SubproblemSpec spec;
    spec.dimension = 2;
    spec.bounds = {dense_bound({1.0, 0.0}, 0.0)};
    spec.ball_bound = 1.0;
    const std::vector<double> warm{0.0, 0.0};
    const auto sol = solve_subproblem(spec, warm);
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(sol.s == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(sol.x[1]) < 1e-4);
}

TEST_CASE("random eight-dimensional instances match the dual brute force")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial)
    {
        std::vector<std::vector<double>> a(6, std::vector<double>(8));
        std::vector<double> c(6);
        SubproblemSpec spec;
        spec.dimension = 8;
        spec.ball_bound = 2.0;
        for (std::size_t k = 0; k < 6; ++k)
        {
            for (double &v : a[k])
                v = gauss(rng);
            c[k] = gauss(rng);
            spec.bounds.push_back(dense_bound(a[k], c[k]));
        }
        std::vector<double> warm(8);
        for (double &v : warm)
            v = gauss(rng);
        const auto sol = solve_subproblem(spec, warm);
        REQUIRE(sol.status == SolveStatus::optimal);
        double n2 = 0.0;
        for (double v : sol.x)
            n2 += v * v;
        CHECK(n2 <= 2.0 + 1e-9);
        const double oracle = dual_oracle(a, c, 2.0);
        CHECK(sol.s <= oracle + 1e-9);
        CHECK(sol.s == doctest::Approx(oracle).epsilon(1e-4));
    }
}

TEST_CASE("returned objective is the recomputed minimum and warm restarts do not lose ground")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    SubproblemSpec spec;
    spec.dimension = 12;
    spec.ball_bound = 3.0;
    for (int k = 0; k < 20; ++k)
    {
        std::vector<double> g(12);
        for (double &v : g)
            v = gauss(rng);
        spec.bounds.push_back(dense_bound(g, gauss(rng)));
    }
    std::vector<double> warm(12, 0.1);
    const auto first = solve_subproblem(spec, warm);
    double recomputed = 1e300;
    for (const auto &b : spec.bounds)
        recomputed = std::min(recomputed, b.evaluate(first.x));
    CHECK(std::abs(recomputed - first.s) <= 1e-9);
    const auto second = solve_subproblem(spec, first.x);
    CHECK(second.s >= first.s - 1e-8 * std::abs(first.s));
}

TEST_CASE("group caps pin coordinates and report infeasibility when everything is pinned")
{
    SubproblemSpec spec;
    spec.dimension = 4;
    spec.bounds = {dense_bound({1.0, 0.0, 1.0, 0.0}, 0.0), dense_bound({-1.0, 0.0, 0.0, 1.0}, 0.0)};
    spec.caps = {GroupCap{{0, 1}, 1.0}, GroupCap{{2, 3}, 0.0}};
    const std::vector<double> warm{0.5, 0.5, 0.5, 0.5};
    const auto sol = solve_subproblem(spec, warm);
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(sol.x[2] == 0.0);
    CHECK(sol.x[3] == 0.0);
    CHECK(std::abs(sol.s) < 1e-8);

    spec.caps[0].bound = 0.0;
    const auto none = solve_subproblem(spec, warm);
    CHECK(none.status == SolveStatus::infeasible);
}

TEST_CASE("all-zero bounds are dropped and counted")
{
    SubproblemSpec spec;
    spec.dimension = 2;
    spec.bounds = {dense_bound({0.0, 0.0}, -1.0), dense_bound({0.0, 1.0}, 0.0)};
    spec.ball_bound = 4.0;
    const std::vector<double> warm{0.0, 0.0};
    const auto sol = solve_subproblem(spec, warm);
    CHECK(sol.dropped_bounds == 1);
    CHECK(sol.s == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("solver input validation")
{
    SubproblemSpec spec;
    spec.dimension = 2;
    spec.bounds = {dense_bound({1.0, 0.0}, 0.0)};
    const std::vector<double> warm{0.0, 0.0};
    CHECK_THROWS_AS(solve_subproblem(spec, warm), ValidationError);
    spec.ball_bound = 1.0;
    const std::vector<double> short_warm{0.0};
    CHECK_THROWS_AS(solve_subproblem(spec, short_warm), ValidationError);
}
