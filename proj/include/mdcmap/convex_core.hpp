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
#ifndef MDCMAP_CONVEX_CORE_HPP
#define MDCMAP_CONVEX_CORE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdcmap {

/// One affine lower bound  g . x + offset >= s, with g stored sparsely.
struct AffineBound
{
    std::vector<std::size_t> index;
    std::vector<double> value;
    double offset = 0.0;

    double evaluate(std::span<const double> x) const;
    bool is_zero() const;
};

/// Quadratic cap  sum_{k in indices} x_k^2 <= bound.
struct GroupCap
{
    std::vector<std::size_t> indices;
    double bound = 0.0;
};

/// maximize s  s.t.  bounds[k](x) >= s,  ||x||^2 <= ball_bound (if set),  every group cap.
struct SubproblemSpec
{
    std::size_t dimension = 0;
    std::vector<AffineBound> bounds;
    std::optional<double> ball_bound;
    std::vector<GroupCap> caps;

    void validate() const;
};

enum class SolveStatus { optimal, max_iter, infeasible };

std::string to_string(SolveStatus status);

struct SubproblemSolution
{
    std::vector<double> x;
    double s = 0.0;
    SolveStatus status = SolveStatus::infeasible;
    double kkt_residual = 0.0;
    double duality_gap = 0.0;
    std::size_t iterations = 0;
    std::size_t dropped_bounds = 0; // degenerate bounds with g = 0
};

struct SolverSettings
{
    double relative_tolerance = 1e-8; // on the objective s
    double feasibility_tolerance = 1e-9;
    std::size_t max_iterations = 5000;
};

/// Primal-dual interior-point solve of the epigraph subproblem. The warm start is projected onto
/// the caps and pulled into the interior; the returned x is strictly feasible and s is recomputed
/// as min_k bounds[k](x). Bounds with an all-zero gradient are dropped and counted.
/// Groups with a zero bound pin their coordinates to 0; if no free coordinate remains the
/// status is `infeasible`.
SubproblemSolution solve_subproblem(const SubproblemSpec &spec, std::span<const double> warm_start,
                                    const SolverSettings &settings = {});

} // namespace mdcmap

#endif
