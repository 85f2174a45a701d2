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
#ifndef MDCMAP_CONSTELLATION_HPP
#define MDCMAP_CONSTELLATION_HPP

#include "mdcmap/beam_channel.hpp"
#include "mdcmap/common.hpp"
#include "mdcmap/convex_core.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdcmap {

/// M symbols in U complex dimensions, stored stacked: symbol m occupies
/// [Re x_m(0..U-1), Im x_m(0..U-1)] at offset m * 2U.
class Constellation
{
public:
    Constellation() = default;
    Constellation(std::size_t symbols, std::size_t subchannels);
    static Constellation from_stacked(std::size_t symbols, std::size_t subchannels, std::vector<double> stacked);
    static Constellation from_points(const std::vector<std::vector<std::complex<double>>> &points);

    std::size_t symbol_count() const { return symbols_; }
    std::size_t subchannel_count() const { return subchannels_; }
    std::size_t symbol_dimension() const { return 2 * subchannels_; }

    std::complex<double> point(std::size_t m, std::size_t u) const;
    void set_point(std::size_t m, std::size_t u, std::complex<double> value);
    std::vector<std::vector<std::complex<double>>> points() const;

    std::span<const double> stacked() const { return stacked_; }
    std::span<double> stacked() { return stacked_; }
    std::span<const double> symbol(std::size_t m) const;

    Constellation scaled(double factor) const;
    // (1/M) ||x_p||^2
    double average_power() const;

    bool operator==(const Constellation &) const = default;

private:
    std::size_t symbols_ = 0;
    std::size_t subchannels_ = 0;
    std::vector<double> stacked_;
};

using PowerVector = std::vector<double>;

struct SymbolPair
{
    std::size_t m = 0;
    std::size_t n = 0;
    bool operator==(const SymbolPair &) const = default;
};

struct MedResult
{
    double distance = 0.0;
    SymbolPair pair;
};

/// min over m < n of ||H (x_m - x_n)||. Ties go to the lexicographically first pair, so the
/// serial and parallel kernels agree exactly. Throws DomainError for M < 2.
MedResult med(const ChannelMatrix &h, const Constellation &c, Execution execution = Execution::serial);
MedResult med(std::span<const double> amplitudes, const Constellation &c, Execution execution = Execution::serial);

// x_p^T E_mn x_p = ||H (x_m - x_n)||^2, evaluated from the two affected blocks.
double pairwise_quadratic_form(const ChannelMatrix &h, const Constellation &c, std::size_t m, std::size_t n);

/// Power constraint of the outer problem: total (1/M)||x||^2 <= P_sum, or per sub-channel
/// (1/M) sum_{k in S_n} x_k^2 <= P_n with S_n the 2M coordinates of sub-channel n.
struct PowerConstraint
{
    std::optional<double> total;
    PowerVector per_subchannel;

    static PowerConstraint total_power(double budget) { return {budget, {}}; }
    static PowerConstraint fixed(PowerVector p) { return {std::nullopt, std::move(p)}; }
};

// Indices of sub-channel u across all symbols (Re and Im parts).
std::vector<std::size_t> subchannel_indices(std::size_t symbols, std::size_t subchannels, std::size_t u);

/// Supporting-hyperplane bounds 2 x_prev^T E_mn x - x_prev^T E_mn x_prev >= s for every pair
/// (or only `pairs` when given), packaged with the power constraint.
SubproblemSpec linearize_constraints(std::span<const double> amplitudes, const Constellation &previous,
                                     const PowerConstraint &power,
                                     const std::vector<SymbolPair> *pairs = nullptr);

struct DesignOptions
{
    std::size_t restarts = 10;
    std::size_t max_iterations = 200;
    double tolerance = 1e-6; // relative d_min change
    std::uint64_t seed = 1;
    // Keep only this fraction of closest pairs per iteration when M >= 32. 1 disables pruning.
    double pair_fraction = 1.0;
    // Additional chains started from these constellations, indexed after the random restarts.
    std::vector<Constellation> extra_starts;
    SolverSettings solver;
    Execution execution = Execution::parallel;

    void validate() const;
};

struct RestartTrace
{
    std::vector<double> d_min; // accepted iterates, starting with the initial point
    std::size_t iterations = 0;
    bool converged = false;
    std::string failure;
};

struct DesignResult
{
    Constellation constellation;
    double d_min = 0.0;
    std::size_t iterations = 0;
    std::size_t restart_index = 0;
    bool converged = false;
    SymbolPair med_pair;
    std::vector<RestartTrace> restarts;
};

// Gaussian start scaled exactly onto the power constraint.
Constellation random_start(std::size_t symbols, std::size_t subchannels, const PowerConstraint &power,
                           std::uint64_t seed);

// Scales the whole constellation (total) or each sub-channel group (fixed) onto its bound.
// Groups with zero energy are left at zero.
Constellation snap_to_power(const Constellation &c, const PowerConstraint &power);

/// One SCA chain from `start`.
RestartTrace refine_design(std::span<const double> amplitudes, Constellation &x, const PowerConstraint &power,
                           const DesignOptions &options);

DesignResult design(const ChannelMatrix &h, std::size_t symbols, const PowerConstraint &power,
                    const DesignOptions &options);
DesignResult design_total_power(const ChannelMatrix &h, const SystemConfig &config, const DesignOptions &options);
// Returned points already carry the per-sub-channel power. Throws ValidationError when p is all zero.
DesignResult design_fixed_power(const ChannelMatrix &h, const SystemConfig &config, const PowerVector &p,
                                const DesignOptions &options);

// P_n = (1/M) sum_m |x_m[n]|^2
PowerVector extract_power(const Constellation &c);

// |1 - med(H, rep) / med(H, opt)|. Throws DomainError when med(H, opt) = 0.
double normalized_med_diff(const ChannelMatrix &h_eval, const Constellation &representative,
                           const Constellation &optimal);

/// Constellation file. Points are written Re/Im interleaved per sub-channel.
struct ConstellationRecord
{
    Constellation constellation;
    std::vector<double> carrier_hz;
    std::vector<int> modes;
    Position position;
    double d_min = 0.0;
};

inline constexpr int kConstellationFormatVersion = 1;

void write_constellation(std::ostream &out, const ConstellationRecord &record);
ConstellationRecord read_constellation(std::istream &in);
void save_constellation(const std::string &path, const ConstellationRecord &record);
ConstellationRecord load_constellation(const std::string &path);

} // namespace mdcmap

#endif
