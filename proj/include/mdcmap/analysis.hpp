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
#ifndef MDCMAP_ANALYSIS_HPP
#define MDCMAP_ANALYSIS_HPP

#include "mdcmap/beam_channel.hpp"
#include "mdcmap/constellation.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mdcmap {

inline constexpr double kBoundSlack = 1e-9;
// Negative normalized differences down to -kClampNoise are attributed to solver noise and clamped.
inline constexpr double kClampNoise = 0.02;

struct BoundReport
{
    std::string check;
    double lhs = 0.0;     // after clamping
    double raw_lhs = 0.0; // before clamping
    double rhs = 0.0;
    bool holds = false;   // lhs <= rhs + kBoundSlack
    std::map<std::string, double> components;
    std::vector<std::string> flags;
    std::string inputs_digest;

    double margin() const { return rhs - lhs; }
    bool has_flag(const std::string &flag) const;
};

enum class Relation { equal, less_equal };

struct ChainStep
{
    std::string label;
    Relation relation = Relation::less_equal;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool needs_optimality = false; // valid only when the designs are true optima
};

struct ChainReport
{
    std::string check;
    std::vector<ChainStep> steps;
    bool overall = false;
};

// argmin_a ||H2 - a H1||_F = sum h1 h2 / sum h1^2
double least_squares_alpha(const ChannelMatrix &h1, const ChannelMatrix &h2);

/// Bound of the normalized MED loss when the constellation designed for alpha H1 is used on H2.
BoundReport theorem1_bound(const ChannelMatrix &h1, const ChannelMatrix &h2, double alpha, const Constellation &c1,
                           const Constellation &c2);
/// Step-by-step evaluation of the proof chain; C1 designed for alpha H1, C2 for H2.
ChainReport appendix_a_chain(const ChannelMatrix &h1, const ChannelMatrix &h2, double alpha, const Constellation &c1,
                             const Constellation &c2);

struct Theorem1Result
{
    BoundReport bound;
    ChainReport chain;
    double alpha = 0.0;
    Constellation c1;
    Constellation c2;
};

/// Designs C1 for alpha H1 and C2 for H2, then polishes each from the other's constellation
/// until neither improves on the other's channel (at most `polish_rounds` rounds).
Theorem1Result theorem1_check(const ChannelMatrix &h1, const ChannelMatrix &h2, const SystemConfig &config,
                              const DesignOptions &options, std::size_t polish_rounds = 5);

// s = A^{-1} x with A = sqrt(diag(p)); coordinates of zero-power sub-channels become 0.
Constellation unit_power_form(const Constellation &x, const PowerVector &p);
// x = A s
Constellation with_power(const Constellation &s, const PowerVector &p);

/// Bound of the MED loss of a fixed power vector p_f against p_o; S_o and S_f in unit-power form.
/// Throws DomainError when some difference vector has ||H A_o s_d|| = 0.
BoundReport theorem2_bound(const ChannelMatrix &h, const PowerVector &p_o, const PowerVector &p_f,
                           const Constellation &s_o, const Constellation &s_f, double noise_power = 1.0);
ChainReport appendix_b_chain(const ChannelMatrix &h, const PowerVector &p_o, const PowerVector &p_f,
                             const Constellation &s_o, const Constellation &s_f, double noise_power = 1.0);

struct Theorem2Result
{
    BoundReport bound;
    ChainReport chain;
    Constellation s_o;
    Constellation s_f;
};

/// Designs under p_o and p_f with cross-seeding. `hints` are extra starts for the p_o design,
/// typically the total-power optimum p_o was extracted from.
Theorem2Result theorem2_check(const ChannelMatrix &h, const PowerVector &p_o, const PowerVector &p_f,
                              const SystemConfig &config, const DesignOptions &options,
                              const std::vector<Constellation> &hints = {}, std::size_t polish_rounds = 5);

struct SerEstimate
{
    double ser = 0.0;
    std::size_t errors = 0;
    std::size_t trials = 0;
    double standard_error() const;
};

/// Uniform symbols, y = H x + n with n ~ CN(0, N0 I), nearest-point detection under H.
/// Trials are split into fixed shards seeded mix_seed(seed, shard); the serial and parallel
/// paths give identical counts.
SerEstimate monte_carlo_ser(const ChannelMatrix &h, const Constellation &c, double noise_power,
                            std::size_t trials, std::uint64_t seed, Execution execution = Execution::parallel);

// Q(d / (2 sigma)) with sigma^2 = N0 / 2 per real dimension.
double binary_error_probability(double distance, double noise_power);

/// Equal power per sub-channel, log2(M) bits dealt round-robin over the real rails
/// (Re of every sub-channel first, then Im), each rail an independent symmetric PAM.
/// For log2(M) = 2U this is independent QPSK on every sub-channel.
Constellation equal_power_baseline(std::size_t symbols, std::size_t subchannels, double power_budget);

nlohmann::json to_json(const BoundReport &report);
nlohmann::json to_json(const ChainReport &report);

} // namespace mdcmap

#endif
