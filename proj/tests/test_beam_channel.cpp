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

#include "mdcmap/beam_channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace mdcmap;

namespace {

constexpr double c0 = 299792458.0;
constexpr double pi = std::numbers::pi;

// Standalone formula oracles.
double o_waist(double f, double zr) { return std::sqrt(zr * (c0 / f) / pi); }
double o_spot(double f, double zr, double z) { return o_waist(f, zr) * std::sqrt(1.0 + (z / zr) * (z / zr)); }
double o_rmax(double f, double zr, int l, double z) { return o_spot(f, zr, z) * std::sqrt(std::abs(l) / 2.0); }
double o_gain(double f, double zr, int l, double r, double z)
{
    const double lam = c0 / f;
    const double rm = o_rmax(f, zr, l, z);
    const double w = o_spot(f, zr, z);
    const double radial = l == 0 ? 1.0 : std::pow(r / rm, 2 * std::abs(l));
    return lam * lam / (16 * pi * pi * (rm * rm + z * z)) * radial * std::exp(2 * (rm * rm - r * r) / (w * w));
}

SystemConfig two_carrier(double f1, double f2, std::vector<int> modes)
{
    SystemConfig c;
    c.carrier_hz = {f1, f2};
    c.modes = std::move(modes);
    return c;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

} // namespace

TEST_CASE("beam spot radius")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1});
    CHECK(rel_close(beam_spot(cfg, 0, kMinAxialDistance), cfg.waist(0), 1e-3));
    CHECK(rel_close(beam_spot(cfg, 0, cfg.rayleigh_distance), cfg.waist(0) * std::sqrt(2.0), 1e-14));
    CHECK(rel_close(beam_spot(cfg, 0, 2.0), o_spot(60e9, 4.0, 2.0), 1e-14));
    CHECK(cfg.wavelength(0) > cfg.wavelength(1));
}

TEST_CASE("maximum intensity radius")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1, 2});
    for (double z : {0.5, 1.0, 3.0})
    {
        CHECK(max_intensity_radius(cfg, 0, 0, z) == 0.0);
        CHECK(rel_close(max_intensity_radius(cfg, 1, -2, z), std::sqrt(2.0) * max_intensity_radius(cfg, 1, 1, z), 1e-14));
    }
    CHECK(rel_close(max_intensity_radius(cfg, 0, 1, 1.0), o_rmax(60e9, 4.0, 1, 1.0), 1e-14));
}

TEST_CASE("link gain")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1});
    const double lam = cfg.wavelength(0);
    for (double z : {0.1, 1.0, 4.0})
        CHECK(rel_close(link_gain(cfg, 0, 0, 0.0, z), std::pow(lam / (4 * pi * z), 2), 1e-14));

    // On the maximum-intensity ring: Friis at the slant distance.
    const double z = 1.5;
    const double rm = max_intensity_radius(cfg, 0, 1, z);
    CHECK(rel_close(link_gain(cfg, 0, 1, rm, z), lam * lam / (16 * pi * pi * (rm * rm + z * z)), 1e-14));

    CHECK(rel_close(link_gain(cfg, 0, 1, 0.05, 2.0), o_gain(60e9, 4.0, 1, 0.05, 2.0), 1e-13));
    CHECK(rel_close(link_gain(cfg, 1, -1, 0.02, 0.7), o_gain(61e9, 4.0, 1, 0.02, 0.7), 1e-13));

    CHECK_THROWS_AS(link_gain(cfg, 0, 0, 0.0, 0.01), DomainError);
    CHECK_THROWS_AS(link_gain(cfg, 0, 1, -0.1, 1.0), DomainError);
}

TEST_CASE("antenna gain scales every sub-channel")
{
    auto cfg = two_carrier(60e9, 61e9, {0, 1});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    const auto pos = Position::from_beta(frame, cfg.rayleigh_distance, 0.8, 1.0);
    const auto h1 = channel_matrix(cfg, pos);
    cfg.antenna_gain = {4.0, 4.0, 4.0, 4.0};
    const auto h4 = channel_matrix(cfg, pos);
    for (std::size_t u = 0; u < 4; ++u)
        CHECK(rel_close(h4.amplitudes[u], 2.0 * h1.amplitudes[u], 1e-14));
}

TEST_CASE("beta frame conversion")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    for (double beta : {0.0, 0.3, 1.0, 2.2})
    {
        const auto p = Position::from_beta(frame, 4.0, beta, 2.0);
        CHECK(rel_close(p.r, beta * o_rmax(60e9, 4.0, 1, 2.0), 1e-14));
        CHECK(*p.beta == beta);
    }
    CHECK_THROWS(ReferenceFrame::from_carrier(cfg, 0, 0));
}

TEST_CASE("peak beta")
{
    const auto cfg = two_carrier(60e9, 65e9, {0, 1, 2});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    CHECK(peak_beta(cfg, 0, 1, frame) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(peak_beta(cfg, 0, 2, frame) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    // sqrt(lambda_2 / lambda_1) = sqrt(60 / 65)
    CHECK(peak_beta(cfg, 1, 1, frame) == doctest::Approx(0.96076892283052284).epsilon(1e-12));
    CHECK(peak_beta(cfg, 0, 0, frame) == 0.0);

    // Numerical argmax agrees with the closed form.
    for (std::size_t i = 0; i < 2; ++i)
        for (int l : {1, 2})
        {
            double best = 0.0, best_g = -1.0;
            for (int k = 1; k <= 30000; ++k)
            {
                const double b = k * 1e-4;
                const double g = link_gain_beta(cfg, i, l, frame, b, 1.3);
                if (g > best_g)
                {
                    best_g = g;
                    best = b;
                }
            }
            CHECK(best == doctest::Approx(peak_beta(cfg, i, l, frame)).epsilon(2e-4));
        }
}

TEST_CASE("channel matrix")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1});
    const auto axis = channel_matrix(cfg, Position::cartesian(0.0, 1.0));
    REQUIRE(axis.size() == 4);
    CHECK(axis.amplitudes[1] == 0.0);
    CHECK(axis.amplitudes[3] == 0.0);
    CHECK(axis.amplitudes[0] > 0.0);

    // Carrier-major ordering.
    const auto p = Position::cartesian(0.03, 1.0);
    const auto h = channel_matrix(cfg, p);
    CHECK(rel_close(h.amplitudes[2], std::sqrt(o_gain(61e9, 4.0, 0, 0.03, 1.0)), 1e-13));
    CHECK(rel_close(h.amplitudes[1], std::sqrt(o_gain(60e9, 4.0, 1, 0.03, 1.0)), 1e-13));

    // Outside the beam every sub-channel uses the l = 0 gain of its carrier.
    const double far = 4.0 * beam_spot(cfg, 0, 1.0);
    const auto out = channel_matrix(cfg, Position::cartesian(far, 1.0));
    CHECK_FALSE(out.inside_beam);
    CHECK(out.amplitudes[0] == out.amplitudes[1]);
    CHECK(out.amplitudes[2] == out.amplitudes[3]);
}

TEST_CASE("equal beta channels are nearly proportional")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    for (double beta : {0.5, 1.0, 1.5})
    {
        const auto h0 = channel_matrix(cfg, Position::from_beta(frame, 4.0, beta, 0.5));
        for (double z : {1.0, 2.0, 4.0})
        {
            const auto h = channel_matrix(cfg, Position::from_beta(frame, 4.0, beta, z));
            double lo = 1e300, hi = 0.0;
            for (std::size_t u = 0; u < 4; ++u)
            {
                const double r = h.amplitudes[u] / h0.amplitudes[u];
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            CHECK((hi - lo) / lo < 0.01);
        }
    }
}

TEST_CASE("same-mode gain ratio")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    const double quotient = link_gain_beta(cfg, 0, 1, frame, 1.0, 2.0) / link_gain_beta(cfg, 1, 1, frame, 1.0, 2.0);
    const double exact = gain_ratio_same_mode(cfg, 0, 1, 1, frame, 1.0, 2.0, RatioVariant::exact);
    const double approx = gain_ratio_same_mode(cfg, 0, 1, 1, frame, 1.0, 2.0, RatioVariant::approx);
    CHECK(rel_close(exact, quotient, 1e-12));
    CHECK(rel_close(exact, approx, 0.01));
    CHECK(gain_ratio_same_mode(cfg, 1, 1, 1, frame, 1.0, 2.0, RatioVariant::exact) == 1.0);
    CHECK_THROWS_AS(gain_ratio_same_mode(cfg, 1, 0, 1, frame, 1.0, 2.0, RatioVariant::exact), ArgumentOrderError);

    // 60/65 GHz, l=+2: ratios at two z > 0.5 m differ by < 0.5%.
    const auto wide = two_carrier(60e9, 65e9, {0, 2});
    const auto wf = ReferenceFrame::from_carrier(wide, 0, 1);
    const double r1 = gain_ratio_same_mode(wide, 0, 1, 2, wf, 1.2, 0.5, RatioVariant::exact);
    const double r2 = gain_ratio_same_mode(wide, 0, 1, 2, wf, 1.2, 4.0, RatioVariant::exact);
    CHECK(std::abs(r1 / r2 - 1.0) < 0.005);
    // The distance term rises towards 1 and crosses 0.995 near z = 0.31 m.
    CHECK(same_mode_distance_term(wide, 0, 1, 2, 0.1) < 0.995);
    CHECK(same_mode_distance_term(wide, 0, 1, 2, 0.35) > 0.995);
    CHECK(same_mode_distance_term(wide, 0, 1, 2, 1.0) < same_mode_distance_term(wide, 0, 1, 2, 2.0));
}

TEST_CASE("same-carrier gain ratio")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1, 2});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    CHECK(gain_ratio_same_carrier(cfg, 0, 1, 0, frame, peak_beta(cfg, 0, 1, frame), 1.0) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    double prev = 0.0;
    for (double b = 0.2; b < 2.5; b += 0.1)
    {
        const double r = gain_ratio_same_carrier(cfg, 0, 2, 0, frame, b, 1.0);
        CHECK(r > prev);
        prev = r;
    }
    const double quotient = link_gain_beta(cfg, 0, 2, frame, 1.0, 2.0) / link_gain_beta(cfg, 0, 1, frame, 1.0, 2.0);
    CHECK(rel_close(gain_ratio_same_carrier(cfg, 0, 2, 1, frame, 1.0, 2.0), quotient, 0.05));
    CHECK_THROWS_AS(gain_ratio_same_carrier(cfg, 0, 1, 2, frame, 1.0, 1.0), ArgumentOrderError);
}

TEST_CASE("cross-position ratios")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    CHECK(cross_position_ratio_same_mode(cfg, 0, 1, frame, 0.9, 0.9) == 1.0);
    CHECK(cross_position_ratio_same_carrier(2, 0, 0.9, 0.9) == 1.0);
    CHECK(cross_position_ratio_same_carrier(1, -1, 0.3, 2.0) == 1.0);
    CHECK(cross_position_ratio_same_carrier(2, 0, 1.2, 0.8) == doctest::Approx(std::pow(1.5, 4)).epsilon(1e-14));

    // Same-mode cross ratio equals the quotient of exact ratios up to the z-term, which cancels at equal z.
    const double q = gain_ratio_same_mode(cfg, 0, 1, 1, frame, 1.3, 2.0, RatioVariant::exact) /
                     gain_ratio_same_mode(cfg, 0, 1, 1, frame, 0.7, 2.0, RatioVariant::exact);
    CHECK(rel_close(cross_position_ratio_same_mode(cfg, 0, 1, frame, 1.3, 0.7), q, 1e-12));
}

TEST_CASE("boundary asymmetry")
{
    const auto cfg = two_carrier(60e9, 61e9, {0, 1});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    const double peak = peak_beta(cfg, 0, 1, frame);
    const double db = 0.5;
    const double quotient = link_gain_beta(cfg, 0, 1, frame, peak + db, 1.0) /
                            link_gain_beta(cfg, 0, 1, frame, peak - db, 1.0);
    CHECK(rel_close(boundary_asymmetry(cfg, 0, 1, frame, db, 1.0), quotient, 1e-9));
    CHECK(boundary_asymmetry(cfg, 0, 1, frame, 1e-7, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    double prev = 1.0;
    for (double d = 0.05; d < 0.99; d += 0.05)
    {
        const double a = boundary_asymmetry(cfg, 0, 1, frame, d, 1.0);
        CHECK(a > prev);
        prev = a;
    }
    CHECK_THROWS_AS(boundary_asymmetry(cfg, 0, 1, frame, 1.5, 1.0), DomainError);
}

TEST_CASE("gain field")
{
    const auto cfg = two_carrier(60e9, 61e9, {0});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    const std::vector<double> betas = {0.0, 1.0}, zs = {1.0, 2.0};
    const auto rows = gain_field(cfg, frame, betas, zs, Execution::parallel);
    CHECK(rows.size() == 8);
    CHECK(rows[0].gain == doctest::Approx(std::pow(cfg.wavelength(0) / (4 * pi * 1.0), 2)).epsilon(1e-14));

    const auto wide = two_carrier(60e9, 61e9, {0, 1, 2});
    std::vector<double> bs, zz = {0.5, 1.0, 2.0, 4.0};
    for (int k = 2; k <= 22; ++k)
        bs.push_back(0.1 * k);
    const auto serial = gain_field(wide, frame, bs, zz, Execution::serial);
    const auto parallel = gain_field(wide, frame, bs, zz, Execution::parallel);
    REQUIRE(serial.size() == parallel.size());
    bool same = true;
    for (std::size_t k = 0; k < serial.size(); ++k)
        same = same && serial[k].gain == parallel[k].gain && serial[k].beta == parallel[k].beta;
    CHECK(same);

    const std::string path = "gain_field_test.csv";
    write_gain_field_csv(path, rows);
    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line))
        ++lines;
    CHECK(lines == 9);
    std::remove(path.c_str());
    CHECK_THROWS_AS(write_gain_field_csv("/nonexistent-dir/x.csv", rows), IoError);
}

TEST_CASE("gain field ridge for modes 0 and +2")
{
    // Mode +2 peaks at beta = 1.414 in the (60 GHz, +1) frame.
    const auto cfg = two_carrier(60e9, 61e9, {0, 2});
    const auto frame = ReferenceFrame::from_carrier(cfg, 0, 1);
    std::vector<double> bs;
    for (int k = 1; k <= 440; ++k)
        bs.push_back(0.005 * k);
    const std::vector<double> zs = {1.0};
    const auto rows = gain_field(cfg, frame, bs, zs);
    double best = 0.0, best_g = -1.0;
    for (const auto &r : rows)
        if (r.subchannel == 1 && r.gain > best_g)
        {
            best_g = r.gain;
            best = r.beta;
        }
    CHECK(best == doctest::Approx(1.414).epsilon(0.01 / 1.414));
}

TEST_CASE("validation")
{
    SystemConfig c;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.carrier_hz = {61e9, 60e9};
    c.modes = {0};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.carrier_hz = {60e9};
    c.modes = {1, 1};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.modes = {0, 1};
    c.antenna_gain = {1.0};
    CHECK_THROWS_AS(c.validate(), ValidationError);
}
