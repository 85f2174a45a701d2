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
#ifndef MDCMAP_BEAM_CHANNEL_HPP
#define MDCMAP_BEAM_CHANNEL_HPP

#include "mdcmap/common.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdcmap {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

// Smallest axial distance accepted by the gain formulas. The curvature radius and the
// same-mode ratio z-term are singular as z -> 0.
inline constexpr double kMinAxialDistance = 0.05; // m

// Receiver counts as inside the beam when r <= kBeamExtent * max_i omega_i(z).
inline constexpr double kBeamExtent = 3.0;

/// Carriers, OAM mode set and link-budget constants. Fixes the sub-channel universe:
/// U = I * L sub-channels ordered carrier-major, mode-minor.
struct SystemConfig
{
    std::vector<double> carrier_hz;    // strictly increasing
    std::vector<int> modes;            // distinct OAM modes
    double rayleigh_distance = 4.0;    // z_R in m, shared by all carriers
    std::vector<double> antenna_gain;  // zeta per sub-channel; empty means all 1
    double noise_power = 1e-10;        // N0
    double power_budget = 1.0;         // P_sum
    std::size_t symbol_count = 64;     // M, a power of two
    double antenna_spacing = 0.0;      // d_a, m; stored only

    void validate() const;

    std::size_t carrier_count() const { return carrier_hz.size(); }
    std::size_t mode_count() const { return modes.size(); }
    std::size_t subchannel_count() const { return carrier_hz.size() * modes.size(); }

    double wavelength(std::size_t carrier) const;
    // Beam waist omega_i derived from the shared Rayleigh distance: sqrt(z_R * lambda_i / pi).
    double waist(std::size_t carrier) const;
    double zeta(std::size_t subchannel) const;

    std::size_t carrier_of(std::size_t subchannel) const { return subchannel / modes.size(); }
    int mode_of(std::size_t subchannel) const { return modes[subchannel % modes.size()]; }
};

/// Reference (lambda_a, l_m) pair defining the dimensionless radius beta = r / r_max(lambda_a, l_m, z).
struct ReferenceFrame
{
    double wavelength = 0.0; // lambda_a, m
    int mode = 1;            // l_m, nonzero

    static ReferenceFrame from_carrier(const SystemConfig &config, std::size_t carrier, int mode);
    void validate() const;
};

/// Receiver position in the (r, z) half-plane. `beta` is set when the position was built from
/// the beta form; r is then exactly beta * r_max(frame, z).
struct Position
{
    double r = 0.0;
    double z = 1.0;
    std::optional<double> beta;

    static Position cartesian(double r, double z);
    static Position from_beta(const ReferenceFrame &frame, double rayleigh_distance, double beta, double z);
};

/// Diagonal channel amplitudes h_u = sqrt(g_u) at one position.
struct ChannelMatrix
{
    std::vector<double> amplitudes;
    Position position;
    bool inside_beam = true;

    static ChannelMatrix from_amplitudes(std::vector<double> amplitudes);
    std::size_t size() const { return amplitudes.size(); }
    double max_amplitude() const;
    ChannelMatrix scaled(double factor) const;
};

// omega_i(z) = omega_i * sqrt(1 + (z/z_R)^2). Throws DomainError for z <= 0.
double beam_spot(const SystemConfig &config, std::size_t carrier, double z);

// Radius of maximum intensity, sqrt(|l|/2) * omega_i(z); zero for l = 0.
double max_intensity_radius(const SystemConfig &config, std::size_t carrier, int mode, double z);

// r_max of the reference pair (lambda_a, l_m) at z.
double reference_radius(const ReferenceFrame &frame, double rayleigh_distance, double z);

/// Laguerre-Gaussian link gain
///   g = zeta * lambda^2 / ((4 pi)^2 d_m^2) * (r / r_max)^(2|l|) * exp(2 (r_max^2 - r^2) / omega(z)^2)
/// with d_m = sqrt(r_max^2 + z^2). For l = 0 the radial power factor is 1.
/// Throws DomainError when z < kMinAxialDistance or r < 0.
double link_gain(const SystemConfig &config, std::size_t carrier, int mode, double r, double z);

// link_gain evaluated at r = beta * r_max(frame, z).
double link_gain_beta(const SystemConfig &config, std::size_t carrier, int mode,
                      const ReferenceFrame &frame, double beta, double z);

// beta at which link_gain_beta peaks: sqrt(lambda_i |l| / (lambda_a |l_m|)). Zero for l = 0.
double peak_beta(const SystemConfig &config, std::size_t carrier, int mode, const ReferenceFrame &frame);

// Full complex response including curvature, propagation and helical phases. Diagnostic only;
// the channel matrix keeps magnitudes because every phase factor has unit modulus.
std::complex<double> channel_response(const SystemConfig &config, std::size_t carrier, int mode,
                                      double r, double phi, double z);

bool inside_beam(const SystemConfig &config, double r, double z);

// Amplitudes sqrt(g) in carrier-major, mode-minor order. Outside the beam every
// sub-channel falls back to the plane-wave (l = 0) gain of its carrier.
ChannelMatrix channel_matrix(const SystemConfig &config, const Position &position);

enum class RatioVariant { exact, approx };

// g_i^l / g_j^l at the same beta for lambda_i > lambda_j. `exact` keeps the z-dependent
// beam-size term, `approx` drops it.
double gain_ratio_same_mode(const SystemConfig &config, std::size_t carrier_i, std::size_t carrier_j,
                            int mode, const ReferenceFrame &frame, double beta, double z,
                            RatioVariant variant);

// The z-dependent factor of gain_ratio_same_mode; increases to 1 with z.
double same_mode_distance_term(const SystemConfig &config, std::size_t carrier_i, std::size_t carrier_j,
                               int mode, double z);

// Approximate g_i^{l1} / g_i^{l2} for |l1| > |l2| (0^0 = 1 convention for l2 = 0).
double gain_ratio_same_carrier(const SystemConfig &config, std::size_t carrier, int mode_1, int mode_2,
                               const ReferenceFrame &frame, double beta, double z);

// a_{i,j}^l(beta_1) / a_{i,j}^l(beta_2).
double cross_position_ratio_same_mode(const SystemConfig &config, std::size_t carrier_i,
                                      std::size_t carrier_j, const ReferenceFrame &frame,
                                      double beta_1, double beta_2);

// a_i^{l1,l2}(beta_1) / a_i^{l1,l2}(beta_2) = (beta_1 / beta_2)^(2(|l1| - |l2|)).
double cross_position_ratio_same_carrier(int mode_1, int mode_2, double beta_1, double beta_2);

/// Right-over-left gain asymmetry around the peak ring:
///   a_r = g(beta_max + db) / g(beta_max - db)
///       = (1 + 2 db / (beta_max - db))^(2|l|) * exp(-4 db beta_max lambda_a |l_m| / lambda_i).
/// Always > 1 on 0 < db < beta_max.
double boundary_asymmetry(const SystemConfig &config, std::size_t carrier, int mode,
                          const ReferenceFrame &frame, double delta_beta, double z);

struct GainFieldRow
{
    double beta;
    double z;
    std::size_t subchannel;
    double carrier_hz;
    int mode;
    double gain;
    double amplitude;
};

// One row per (z, beta, sub-channel), z-major then beta then sub-channel.
std::vector<GainFieldRow> gain_field(const SystemConfig &config, const ReferenceFrame &frame,
                                     std::span<const double> betas, std::span<const double> zs,
                                     Execution execution = Execution::parallel);

void write_gain_field_csv(const std::string &path, std::span<const GainFieldRow> rows);

} // namespace mdcmap

#endif
