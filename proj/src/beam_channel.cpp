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
#include "mdcmap/beam_channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace mdcmap {

namespace {

void require_distance(double z)
{
    if (!(z >= kMinAxialDistance))
        throw DomainError("axial distance z = " + format_double(z) + " m is below the guard " +
                          format_double(kMinAxialDistance) + " m");
}

void require_carrier(const SystemConfig &config, std::size_t carrier)
{
    if (carrier >= config.carrier_count())
        throw ValidationError("carrier index " + std::to_string(carrier) + " out of range");
}

double beta_exponent_scale(const SystemConfig &config, std::size_t carrier, const ReferenceFrame &frame)
{
    // lambda_a |l_m| / lambda_i : coefficient of beta^2 in the Gaussian envelope exponent.
    return frame.wavelength * std::abs(frame.mode) / config.wavelength(carrier);
}

} // namespace

// ---------------------------------------------------------------------------------------------
// SystemConfig / frame / position
// ---------------------------------------------------------------------------------------------

void SystemConfig::validate() const
{
    if (carrier_hz.empty())
        throw ValidationError("at least one carrier frequency is required");
    for (std::size_t i = 0; i < carrier_hz.size(); ++i)
    {
        if (!(carrier_hz[i] > 0.0) || !std::isfinite(carrier_hz[i]))
            throw ValidationError("carrier frequencies must be positive");
        if (i > 0 && !(carrier_hz[i] > carrier_hz[i - 1]))
            throw ValidationError("carrier frequencies must be strictly increasing");
    }
    if (modes.empty())
        throw ValidationError("at least one OAM mode is required");
    if (std::set<int>(modes.begin(), modes.end()).size() != modes.size())
        throw ValidationError("OAM modes must be distinct");
    if (!(rayleigh_distance > 0.0))
        throw ValidationError("Rayleigh distance must be positive");
    if (!antenna_gain.empty())
    {
        if (antenna_gain.size() != subchannel_count())
            throw ValidationError("antenna_gain needs one entry per sub-channel");
        for (double g : antenna_gain)
            if (!(g > 0.0))
                throw ValidationError("antenna gains must be positive");
    }
    if (!(noise_power > 0.0))
        throw ValidationError("noise power must be positive");
    if (!(power_budget > 0.0))
        throw ValidationError("power budget must be positive");
    if (symbol_count < 2 || (symbol_count & (symbol_count - 1)) != 0)
        throw ValidationError("symbol count must be a power of two >= 2");
}

double SystemConfig::wavelength(std::size_t carrier) const
{
    return kSpeedOfLight / carrier_hz.at(carrier);
}

double SystemConfig::waist(std::size_t carrier) const
{
    return std::sqrt(rayleigh_distance * wavelength(carrier) / kPi);
}

double SystemConfig::zeta(std::size_t subchannel) const
{
    return antenna_gain.empty() ? 1.0 : antenna_gain.at(subchannel);
}

ReferenceFrame ReferenceFrame::from_carrier(const SystemConfig &config, std::size_t carrier, int mode)
{
    require_carrier(config, carrier);
    ReferenceFrame frame{config.wavelength(carrier), mode};
    frame.validate();
    return frame;
}

void ReferenceFrame::validate() const
{
    if (!(wavelength > 0.0))
        throw ValidationError("reference wavelength must be positive");
    if (mode == 0)
        throw ValidationError("reference mode l_m must be nonzero");
}

Position Position::cartesian(double r, double z)
{
    if (!(r >= 0.0))
        throw DomainError("radius must be nonnegative");
    if (!(z > 0.0))
        throw DomainError("axial distance must be positive");
    return Position{r, z, std::nullopt};
}

Position Position::from_beta(const ReferenceFrame &frame, double rayleigh_distance, double beta, double z)
{
    if (!(beta >= 0.0))
        throw DomainError("beta must be nonnegative");
    if (!(z > 0.0))
        throw DomainError("axial distance must be positive");
    return Position{beta * reference_radius(frame, rayleigh_distance, z), z, beta};
}

ChannelMatrix ChannelMatrix::from_amplitudes(std::vector<double> amplitudes)
{
    for (double a : amplitudes)
        if (!(a >= 0.0) || !std::isfinite(a))
            throw ValidationError("channel amplitudes must be finite and nonnegative");
    ChannelMatrix h;
    h.amplitudes = std::move(amplitudes);
    return h;
}

double ChannelMatrix::max_amplitude() const
{
    return amplitudes.empty() ? 0.0 : *std::max_element(amplitudes.begin(), amplitudes.end());
}

ChannelMatrix ChannelMatrix::scaled(double factor) const
{
    ChannelMatrix h = *this;
    for (double &a : h.amplitudes)
        a *= factor;
    return h;
}

// ---------------------------------------------------------------------------------------------
// Beam geometry and gains
// ---------------------------------------------------------------------------------------------

double beam_spot(const SystemConfig &config, std::size_t carrier, double z)
{
    require_carrier(config, carrier);
    if (!(z > 0.0))
        throw DomainError("beam_spot requires z > 0");
    const double q = z / config.rayleigh_distance;
    return config.waist(carrier) * std::sqrt(1.0 + q * q);
}

double max_intensity_radius(const SystemConfig &config, std::size_t carrier, int mode, double z)
{
    if (mode == 0)
    {
        if (!(z > 0.0))
            throw DomainError("max_intensity_radius requires z > 0");
        return 0.0;
    }
    return std::sqrt(std::abs(mode) / 2.0) * beam_spot(config, carrier, z);
}

double reference_radius(const ReferenceFrame &frame, double rayleigh_distance, double z)
{
    frame.validate();
    if (!(z > 0.0))
        throw DomainError("reference_radius requires z > 0");
    const double waist = std::sqrt(rayleigh_distance * frame.wavelength / kPi);
    const double q = z / rayleigh_distance;
    return std::sqrt(std::abs(frame.mode) / 2.0) * waist * std::sqrt(1.0 + q * q);
}

namespace {

double gain_with_zeta(const SystemConfig &config, std::size_t carrier, int mode, double r, double z, double zeta)
{
    require_carrier(config, carrier);
    require_distance(z);
    if (!(r >= 0.0))
        throw DomainError("radius must be nonnegative");

    const double lambda = config.wavelength(carrier);
    const double spot = beam_spot(config, carrier, z);
    const double r_max = max_intensity_radius(config, carrier, mode, z);
    const double d_m2 = r_max * r_max + z * z;
    const double friis = zeta * lambda * lambda / (16.0 * kPi * kPi * d_m2);
    const double radial = mode == 0 ? 1.0 : std::pow(r / r_max, 2.0 * std::abs(mode));
    const double envelope = std::exp(2.0 * (r_max * r_max - r * r) / (spot * spot));
    return friis * radial * envelope;
}

} // namespace

double link_gain(const SystemConfig &config, std::size_t carrier, int mode, double r, double z)
{
    require_carrier(config, carrier);
    const auto it = std::find(config.modes.begin(), config.modes.end(), mode);
    const double zeta = it == config.modes.end()
                            ? 1.0
                            : config.zeta(carrier * config.mode_count() +
                                          static_cast<std::size_t>(it - config.modes.begin()));
    return gain_with_zeta(config, carrier, mode, r, z, zeta);
}

double link_gain_beta(const SystemConfig &config, std::size_t carrier, int mode,
                      const ReferenceFrame &frame, double beta, double z)
{
    if (!(beta >= 0.0))
        throw DomainError("beta must be nonnegative");
    require_distance(z);
    const double r = beta * reference_radius(frame, config.rayleigh_distance, z);
    return link_gain(config, carrier, mode, r, z);
}

double peak_beta(const SystemConfig &config, std::size_t carrier, int mode, const ReferenceFrame &frame)
{
    require_carrier(config, carrier);
    frame.validate();
    if (mode == 0)
        return 0.0;
    return std::sqrt(config.wavelength(carrier) * std::abs(mode) / (frame.wavelength * std::abs(frame.mode)));
}

std::complex<double> channel_response(const SystemConfig &config, std::size_t carrier, int mode,
                                      double r, double phi, double z)
{
    const double magnitude = std::sqrt(link_gain(config, carrier, mode, r, z));
    const double lambda = config.wavelength(carrier);
    const double w0 = config.waist(carrier);
    const double r_max = max_intensity_radius(config, carrier, mode, z);
    const double d_m = std::sqrt(r_max * r_max + z * z);
    const double k = kPi * w0 * w0 / (lambda * z);
    const double curvature = z * (1.0 + k * k);
    const double phase = -kPi * (r * r - r_max * r_max) / (lambda * curvature) -
                         2.0 * kPi * d_m / lambda - static_cast<double>(mode) * phi;
    return std::polar(magnitude, phase);
}

bool inside_beam(const SystemConfig &config, double r, double z)
{
    double widest = 0.0;
    for (std::size_t i = 0; i < config.carrier_count(); ++i)
        widest = std::max(widest, beam_spot(config, i, z));
    return r <= kBeamExtent * widest;
}

ChannelMatrix channel_matrix(const SystemConfig &config, const Position &position)
{
    require_distance(position.z);
    ChannelMatrix h;
    h.position = position;
    h.inside_beam = inside_beam(config, position.r, position.z);
    h.amplitudes.resize(config.subchannel_count());
    for (std::size_t u = 0; u < h.amplitudes.size(); ++u)
    {
        const std::size_t carrier = config.carrier_of(u);
        const int mode = h.inside_beam ? config.mode_of(u) : 0;
        h.amplitudes[u] = std::sqrt(gain_with_zeta(config, carrier, mode, position.r, position.z, config.zeta(u)));
    }
    return h;
}

// ---------------------------------------------------------------------------------------------
// Gain ratios
// ---------------------------------------------------------------------------------------------

double same_mode_distance_term(const SystemConfig &config, std::size_t carrier_i, std::size_t carrier_j,
                               int mode, double z)
{
    require_carrier(config, carrier_i);
    require_carrier(config, carrier_j);
    require_distance(z);
    const double q = z / config.rayleigh_distance;
    const double spread = std::abs(mode) / 2.0 * (1.0 + q * q);
    const double wi = config.waist(carrier_i);
    const double wj = config.waist(carrier_j);
    return (wj * wj * spread + z * z) / (wi * wi * spread + z * z);
}

double gain_ratio_same_mode(const SystemConfig &config, std::size_t carrier_i, std::size_t carrier_j,
                            int mode, const ReferenceFrame &frame, double beta, double z,
                            RatioVariant variant)
{
    require_carrier(config, carrier_i);
    require_carrier(config, carrier_j);
    frame.validate();
    require_distance(z);
    const double li = config.wavelength(carrier_i);
    const double lj = config.wavelength(carrier_j);
    if (carrier_i == carrier_j)
        return 1.0;
    if (!(li > lj))
        throw ArgumentOrderError("gain_ratio_same_mode requires lambda_i > lambda_j");

    const double exponent = frame.wavelength * std::abs(frame.mode) * beta * beta * (1.0 / lj - 1.0 / li);
    const double base = std::pow(lj / li, std::abs(mode) - 2.0) * std::exp(exponent);
    if (variant == RatioVariant::approx)
        return base;
    return base * same_mode_distance_term(config, carrier_i, carrier_j, mode, z);
}

double gain_ratio_same_carrier(const SystemConfig &config, std::size_t carrier, int mode_1, int mode_2,
                               const ReferenceFrame &frame, double beta, double z)
{
    require_carrier(config, carrier);
    frame.validate();
    require_distance(z);
    const int a1 = std::abs(mode_1);
    const int a2 = std::abs(mode_2);
    if (a1 <= a2)
        throw ArgumentOrderError("gain_ratio_same_carrier requires |l1| > |l2|");
    if (!(beta > 0.0))
        throw DomainError("gain_ratio_same_carrier requires beta > 0");
    const int delta = a1 - a2;
    const double lambda_ratio = frame.wavelength / config.wavelength(carrier);
    const double self_power_2 = a2 == 0 ? 1.0 : std::pow(a2, a2);
    return std::pow(lambda_ratio, delta) * std::pow(beta * beta * std::abs(frame.mode), delta) *
           self_power_2 / std::pow(a1, a1) * std::exp(delta);
}

double cross_position_ratio_same_mode(const SystemConfig &config, std::size_t carrier_i,
                                      std::size_t carrier_j, const ReferenceFrame &frame,
                                      double beta_1, double beta_2)
{
    require_carrier(config, carrier_i);
    require_carrier(config, carrier_j);
    frame.validate();
    const double li = config.wavelength(carrier_i);
    const double lj = config.wavelength(carrier_j);
    return std::exp(frame.wavelength * std::abs(frame.mode) * (1.0 / lj - 1.0 / li) *
                    (beta_1 * beta_1 - beta_2 * beta_2));
}

double cross_position_ratio_same_carrier(int mode_1, int mode_2, double beta_1, double beta_2)
{
    const int delta = std::abs(mode_1) - std::abs(mode_2);
    if (delta == 0)
        return 1.0;
    if (!(beta_2 > 0.0))
        throw DomainError("cross_position_ratio_same_carrier requires beta_2 > 0");
    return std::pow(beta_1 / beta_2, 2.0 * delta);
}

double boundary_asymmetry(const SystemConfig &config, std::size_t carrier, int mode,
                          const ReferenceFrame &frame, double delta_beta, double z)
{
    require_carrier(config, carrier);
    require_distance(z);
    if (mode == 0)
        throw DomainError("boundary_asymmetry requires a nonzero mode");
    const double peak = peak_beta(config, carrier, mode, frame);
    if (!(delta_beta > 0.0 && delta_beta < peak))
        throw DomainError("boundary_asymmetry requires 0 < delta_beta < beta_max");
    const double k = beta_exponent_scale(config, carrier, frame);
    return std::pow(1.0 + 2.0 * delta_beta / (peak - delta_beta), 2.0 * std::abs(mode)) *
           std::exp(-4.0 * k * delta_beta * peak);
}

// ---------------------------------------------------------------------------------------------
// Gain field
// ---------------------------------------------------------------------------------------------

std::vector<GainFieldRow> gain_field(const SystemConfig &config, const ReferenceFrame &frame,
                                     std::span<const double> betas, std::span<const double> zs,
                                     Execution execution)
{
    config.validate();
    frame.validate();
    const std::size_t nu = config.subchannel_count();
    const std::size_t nb = betas.size();
    const std::size_t cells = zs.size() * nb;
    std::vector<GainFieldRow> rows(cells * nu);

    auto fill = [&](std::size_t cell) {
        const double z = zs[cell / nb];
        const double beta = betas[cell % nb];
        const ChannelMatrix h = channel_matrix(config, Position::from_beta(frame, config.rayleigh_distance, beta, z));
        for (std::size_t u = 0; u < nu; ++u)
        {
            const double a = h.amplitudes[u];
            rows[cell * nu + u] = GainFieldRow{beta, z, u, config.carrier_hz[config.carrier_of(u)],
                                               config.mode_of(u), a * a, a};
        }
    };

    // Validate the z axis up front so the parallel loop never throws.
    for (double z : zs)
        require_distance(z);
    for (double beta : betas)
        if (!(beta >= 0.0))
            throw DomainError("beta must be nonnegative");

    if (execution == Execution::serial)
    {
        for (std::size_t cell = 0; cell < cells; ++cell)
            fill(cell);
    }
    else
    {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t cell = 0; cell < static_cast<std::ptrdiff_t>(cells); ++cell)
            fill(static_cast<std::size_t>(cell));
    }
    return rows;
}

void write_gain_field_csv(const std::string &path, std::span<const GainFieldRow> rows)
{
    std::ostringstream out;
    out << "beta,z_m,subchannel_index,carrier_hz,mode,gain,amplitude\n";
    for (const auto &row : rows)
    {
        out << format_double(row.beta) << ',' << format_double(row.z) << ',' << row.subchannel << ','
            << format_double(row.carrier_hz) << ',' << row.mode << ',' << format_double(row.gain) << ','
            << format_double(row.amplitude) << '\n';
    }
    write_text_atomic(path, out.str());
}

} // namespace mdcmap
