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
#include "mdcmap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace mdcmap {

bool BoundReport::has_flag(const std::string &flag) const
{
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

namespace {

using Vec = std::vector<double>;

Vec pair_difference(const Constellation &c, const SymbolPair &p)
{
    const auto a = c.symbol(p.m);
    const auto b = c.symbol(p.n);
    Vec d(a.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        d[k] = a[k] - b[k];
    return d;
}

// sum_u w_u^2 |d_u|^2 for a stacked difference d = [Re(U); Im(U)]
double weighted_square(const Vec &amplitudes, const Vec &d)
{
    const std::size_t u = amplitudes.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k)
        acc += amplitudes[k % u] * amplitudes[k % u] * d[k] * d[k];
    return acc;
}

double weighted_norm(const Vec &amplitudes, const Vec &d) { return std::sqrt(weighted_square(amplitudes, d)); }

double plain_norm(const Vec &d)
{
    double acc = 0.0;
    for (double v : d)
        acc += v * v;
    return std::sqrt(acc);
}

// |d_u|^2 per sub-channel
Vec subchannel_energy(const Vec &d, std::size_t u)
{
    Vec e(u);
    for (std::size_t k = 0; k < u; ++k)
        e[k] = d[k] * d[k] + d[k + u] * d[k + u];
    return e;
}

ChainStep make_step(std::string label, Relation rel, double lhs, double rhs, bool needs_optimality = false)
{
    ChainStep s;
    s.label = std::move(label);
    s.relation = rel;
    s.lhs = lhs;
    s.rhs = rhs;
    s.needs_optimality = needs_optimality;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    s.holds = rel == Relation::equal ? std::abs(lhs - rhs) <= kBoundSlack * scale : lhs <= rhs + kBoundSlack * scale;
    return s;
}

void finish(ChainReport &r)
{
    r.overall = std::all_of(r.steps.begin(), r.steps.end(), [](const ChainStep &s) { return s.holds; });
}

std::string digest(std::initializer_list<const Vec *> parts)
{
    std::string text;
    for (const Vec *v : parts)
    {
        for (double x : *v)
            text += format_double(x) + ',';
        text += ';';
    }
    return hex64(fnv1a(text));
}

void finish_bound(BoundReport &r)
{
    r.lhs = r.raw_lhs;
    if (r.raw_lhs < 0.0 && r.raw_lhs >= -kClampNoise)
    {
        r.lhs = 0.0;
        r.flags.push_back("lhs_clamped");
    }
    else if (r.raw_lhs < -kClampNoise)
    {
        r.flags.push_back("lhs_below_noise_floor");
    }
    r.holds = r.lhs <= r.rhs + kBoundSlack;
}

void check_nonzero(const ChannelMatrix &h, const char *name)
{
    if (!(h.max_amplitude() > 0.0))
        throw DomainError(std::string(name) + " is identically zero");
}

struct Theorem1Terms
{
    Vec a1, h2, dh;
    MedResult m11, m12, m21, m22;
    Vec d11, d12, d21, d22;
    double denom = 0.0;
    double dh_fro = 0.0;
};

Theorem1Terms theorem1_terms(const ChannelMatrix &h1, const ChannelMatrix &h2, double alpha, const Constellation &c1,
                             const Constellation &c2)
{
    check_nonzero(h1, "H1");
    check_nonzero(h2, "H2");
    if (h1.size() != h2.size())
        throw ValidationError("H1 and H2 have different sizes");
    Theorem1Terms t;
    t.h2 = h2.amplitudes;
    t.a1.resize(h1.size());
    t.dh.resize(h1.size());
    double fro = 0.0;
    for (std::size_t u = 0; u < h1.size(); ++u)
    {
        t.a1[u] = alpha * h1.amplitudes[u];
        t.dh[u] = t.h2[u] - t.a1[u];
        fro += t.dh[u] * t.dh[u];
    }
    t.dh_fro = std::sqrt(fro);
    t.m11 = med(t.a1, c1);
    t.m12 = med(t.a1, c2);
    t.m21 = med(t.h2, c1);
    t.m22 = med(t.h2, c2);
    t.d11 = pair_difference(c1, t.m11.pair);
    t.d12 = pair_difference(c2, t.m12.pair);
    t.d21 = pair_difference(c1, t.m21.pair);
    t.d22 = pair_difference(c2, t.m22.pair);
    t.denom = weighted_norm(t.h2, t.d22);
    if (!(t.denom > 0.0))
        throw DomainError("constellation designed for H2 has zero MED under H2");
    return t;
}

} // namespace

double least_squares_alpha(const ChannelMatrix &h1, const ChannelMatrix &h2)
{
    check_nonzero(h1, "H1");
    if (h1.size() != h2.size())
        throw ValidationError("H1 and H2 have different sizes");
    double num = 0.0, den = 0.0;
    for (std::size_t u = 0; u < h1.size(); ++u)
    {
        num += h1.amplitudes[u] * h2.amplitudes[u];
        den += h1.amplitudes[u] * h1.amplitudes[u];
    }
    return num / den;
}

BoundReport theorem1_bound(const ChannelMatrix &h1, const ChannelMatrix &h2, double alpha, const Constellation &c1,
                           const Constellation &c2)
{
    const auto t = theorem1_terms(h1, h2, alpha, c1, c2);
    BoundReport r;
    r.check = "theorem1";
    r.raw_lhs = 1.0 - t.m21.distance / t.m22.distance;
    r.rhs = t.dh_fro * (plain_norm(t.d12) + plain_norm(t.d21)) / t.denom;
    r.components = {
        {"alpha", alpha},
        {"delta_h_frobenius", t.dh_fro},
        {"d_alpha_h1_c1", t.m11.distance},
        {"d_alpha_h1_c2", t.m12.distance},
        {"d_h2_c1", t.m21.distance},
        {"d_h2_c2", t.m22.distance},
        {"pair_norm_12", plain_norm(t.d12)},
        {"pair_norm_21", plain_norm(t.d21)},
    };
    Vec h1v = h1.amplitudes;
    r.inputs_digest = digest({&h1v, &t.h2});
    finish_bound(r);
    // A bound above 1 says nothing about a normalized loss; typical for a near-degenerate C2.
    if (r.rhs > 1.0)
        r.flags.push_back("large_rhs");
    return r;
}

ChainReport appendix_a_chain(const ChannelMatrix &h1, const ChannelMatrix &h2, double alpha, const Constellation &c1,
                             const Constellation &c2)
{
    const auto t = theorem1_terms(h1, h2, alpha, c1, c2);
    const double D = t.denom;
    Vec sum(t.a1.size());
    for (std::size_t u = 0; u < sum.size(); ++u)
        sum[u] = t.a1[u] + t.dh[u];
    const double dh21 = weighted_norm(t.dh, t.d21);
    const double dh12 = weighted_norm(t.dh, t.d12);

    const double v0 = 1.0 - t.m21.distance / t.m22.distance;
    const double v1 = 1.0 - weighted_norm(t.h2, t.d21) / D;
    const double v2 = 1.0 - weighted_norm(sum, t.d21) / D;
    const double v3 = 1.0 - (weighted_norm(t.a1, t.d21) - dh21) / D;
    const double v4 = 1.0 - (weighted_norm(t.a1, t.d11) - dh21) / D;
    const double v5 = 1.0 - (weighted_norm(t.a1, t.d12) - dh21) / D;
    const double v6 = 1.0 - weighted_norm(t.h2, t.d12) / D + (dh12 + dh21) / D;
    const double v7 = 1.0 - weighted_norm(t.h2, t.d22) / D + (dh12 + dh21) / D;
    const double v8 = (dh12 + dh21) / D;
    const double v9 = t.dh_fro * (plain_norm(t.d12) + plain_norm(t.d21)) / D;

    ChainReport r;
    r.check = "appendix_a";
    r.steps.push_back(make_step("1: MED pair of C1 under H2", Relation::equal, v0, v1));
    r.steps.push_back(make_step("2: H2 = alpha H1 + dH", Relation::equal, v1, v2));
    r.steps.push_back(make_step("3: triangle inequality", Relation::less_equal, v2, v3));
    r.steps.push_back(make_step("4: MED pair of C1 under alpha H1", Relation::less_equal, v3, v4));
    r.steps.push_back(make_step("5: C1 optimal for alpha H1", Relation::less_equal, v4, v5, true));
    r.steps.push_back(make_step("6: triangle inequality", Relation::less_equal, v5, v6));
    r.steps.push_back(make_step("7: MED pair of C2 under H2", Relation::less_equal, v6, v7));
    r.steps.push_back(make_step("8: cancellation", Relation::equal, v7, v8));
    r.steps.push_back(make_step("9: spectral norm below Frobenius norm", Relation::less_equal, v8, v9));
    finish(r);
    return r;
}

Theorem1Result theorem1_check(const ChannelMatrix &h1, const ChannelMatrix &h2, const SystemConfig &config,
                              const DesignOptions &options, std::size_t polish_rounds)
{
    Theorem1Result out;
    out.alpha = least_squares_alpha(h1, h2);
    if (!(out.alpha > 0.0))
        throw DomainError("least-squares alpha is not positive");
    const ChannelMatrix a1 = h1.scaled(out.alpha);
    const auto power = PowerConstraint::total_power(config.power_budget);
    const std::size_t M = config.symbol_count;

    Constellation c1 = design(a1, M, power, options).constellation;
    Constellation c2 = design(h2, M, power, options).constellation;

    DesignOptions polish = options;
    polish.restarts = 0;
    std::size_t rounds = 0;
    for (; rounds < polish_rounds; ++rounds)
    {
        bool changed = false;
        if (med(a1, c2).distance > med(a1, c1).distance)
        {
            polish.extra_starts = {c2};
            auto r = design(a1, M, power, polish);
            if (r.d_min > med(a1, c1).distance)
            {
                c1 = std::move(r.constellation);
                changed = true;
            }
        }
        if (med(h2, c1).distance > med(h2, c2).distance)
        {
            polish.extra_starts = {c1};
            auto r = design(h2, M, power, polish);
            if (r.d_min > med(h2, c2).distance)
            {
                c2 = std::move(r.constellation);
                changed = true;
            }
        }
        if (!changed)
            break;
    }

    out.bound = theorem1_bound(h1, h2, out.alpha, c1, c2);
    out.bound.components["polish_rounds"] = static_cast<double>(rounds);
    if (med(a1, c2).distance > med(a1, c1).distance || med(h2, c1).distance > med(h2, c2).distance)
        out.bound.flags.push_back("optimality_premise_unmet");
    out.chain = appendix_a_chain(h1, h2, out.alpha, c1, c2);
    out.c1 = std::move(c1);
    out.c2 = std::move(c2);
    return out;
}

Constellation unit_power_form(const Constellation &x, const PowerVector &p)
{
    if (p.size() != x.subchannel_count())
        throw ValidationError("power vector length must equal the sub-channel count");
    Constellation s = x;
    for (std::size_t m = 0; m < x.symbol_count(); ++m)
        for (std::size_t u = 0; u < p.size(); ++u)
            s.set_point(m, u, p[u] > 0.0 ? x.point(m, u) / std::sqrt(p[u]) : std::complex<double>{});
    return s;
}

Constellation with_power(const Constellation &s, const PowerVector &p)
{
    if (p.size() != s.subchannel_count())
        throw ValidationError("power vector length must equal the sub-channel count");
    Constellation x = s;
    for (std::size_t m = 0; m < s.symbol_count(); ++m)
        for (std::size_t u = 0; u < p.size(); ++u)
            x.set_point(m, u, s.point(m, u) * std::sqrt(p[u]));
    return x;
}

namespace {

struct Theorem2Terms
{
    Vec hw, amp_o, amp_f, dp;
    double dp_norm = 0.0;
    MedResult oo, of, fo, ff; // <evaluation power><constellation>
    Vec d_oo, d_of, d_fo, d_ff;
};

Theorem2Terms theorem2_terms(const ChannelMatrix &h, const PowerVector &p_o, const PowerVector &p_f,
                             const Constellation &s_o, const Constellation &s_f, double noise_power)
{
    check_nonzero(h, "H");
    const std::size_t U = h.size();
    if (p_o.size() != U || p_f.size() != U)
        throw ValidationError("power vector length must equal the sub-channel count");
    for (std::size_t u = 0; u < U; ++u)
        if (!(p_o[u] >= 0.0) || !(p_f[u] >= 0.0))
            throw ValidationError("power vectors must be nonnegative");
    if (!(noise_power > 0.0))
        throw ValidationError("noise power must be positive");
    Theorem2Terms t;
    t.hw.resize(U);
    t.amp_o.resize(U);
    t.amp_f.resize(U);
    t.dp.resize(U);
    double n2 = 0.0;
    for (std::size_t u = 0; u < U; ++u)
    {
        t.hw[u] = h.amplitudes[u] / std::sqrt(noise_power);
        t.amp_o[u] = t.hw[u] * std::sqrt(p_o[u]);
        t.amp_f[u] = t.hw[u] * std::sqrt(p_f[u]);
        t.dp[u] = p_o[u] - p_f[u];
        n2 += t.dp[u] * t.dp[u];
    }
    t.dp_norm = std::sqrt(n2);
    t.oo = med(t.amp_o, s_o);
    t.of = med(t.amp_f, s_o);
    t.fo = med(t.amp_o, s_f);
    t.ff = med(t.amp_f, s_f);
    t.d_oo = pair_difference(s_o, t.oo.pair);
    t.d_of = pair_difference(s_o, t.of.pair);
    t.d_fo = pair_difference(s_f, t.fo.pair);
    t.d_ff = pair_difference(s_f, t.ff.pair);
    for (const Vec *d : {&t.d_oo, &t.d_of, &t.d_fo, &t.d_ff})
        if (!(weighted_square(t.amp_o, *d) > 0.0))
            throw DomainError("degenerate support: a MED difference vector vanishes under H A_o");
    return t;
}

double rho(const Theorem2Terms &t, const Vec &d) { return weighted_square(t.hw, d) / weighted_square(t.amp_o, d); }

void relaxation_steps(ChainReport &r, const Theorem2Terms &t, const Vec &d, const std::string &tag)
{
    const std::size_t U = t.hw.size();
    const double den = weighted_square(t.amp_o, d);
    const auto e = subchannel_energy(d, U);
    double signed_sum = 0.0, abs_sum = 0.0, fourth = 0.0, second = 0.0;
    for (std::size_t u = 0; u < U; ++u)
    {
        const double w = t.hw[u] * t.hw[u];
        signed_sum += w * t.dp[u] * e[u];
        abs_sum += w * std::abs(t.dp[u]) * e[u];
        fourth += w * w * e[u] * e[u];
        second += w * e[u];
    }
    const double t0 = std::abs(1.0 - weighted_square(t.amp_f, d) / den);
    const double t1 = std::abs(signed_sum) / den;
    const double t2 = abs_sum / den;
    const double t3 = std::sqrt(fourth) * t.dp_norm / den;
    const double t4 = second * t.dp_norm / den;
    const double t5 = rho(t, d) * t.dp_norm;
    r.steps.push_back(make_step("[" + tag + "] power difference expansion", Relation::equal, t0, t1));
    r.steps.push_back(make_step("[" + tag + "] triangle inequality", Relation::less_equal, t1, t2));
    r.steps.push_back(make_step("[" + tag + "] Cauchy-Schwarz", Relation::less_equal, t2, t3));
    r.steps.push_back(make_step("[" + tag + "] l2 norm below l1 norm", Relation::less_equal, t3, t4));
    r.steps.push_back(make_step("[" + tag + "] regroup as ||H s_d||^2", Relation::equal, t4, t5));
}

// |1 - D_num / D_den| chain for one constellation set. `num` is evaluated under p_f, `den` under p_o.
double side_steps(ChainReport &r, const Theorem2Terms &t, const MedResult &num, const Vec &d_num,
                  const MedResult &den, const Vec &d_den, const std::string &side)
{
    const double ratio = num.distance / den.distance;
    const double a = std::abs(1.0 - ratio);
    const double b = std::abs(1.0 - ratio * ratio);
    const double c = std::abs(1.0 - weighted_square(t.amp_f, d_num) / weighted_square(t.amp_o, d_den));
    const auto r_of = [&](const Vec &d) { return std::abs(1.0 - weighted_square(t.amp_f, d) / weighted_square(t.amp_o, d)); };
    const double m = std::max(r_of(d_num), r_of(d_den));
    r.steps.push_back(make_step("[" + side + "] |1-r| <= |1-r^2|", Relation::less_equal, a, b));
    r.steps.push_back(make_step("[" + side + "] MED pairs", Relation::equal, b, c));
    r.steps.push_back(make_step("[" + side + "] MED pair minimality", Relation::less_equal, c, m));
    relaxation_steps(r, t, d_num, side + ",num");
    relaxation_steps(r, t, d_den, side + ",den");
    const double bound = t.dp_norm * std::max(rho(t, d_num), rho(t, d_den));
    r.steps.push_back(make_step("[" + side + "] combine", Relation::less_equal, a, bound));
    return a;
}

double theorem2_rhs(const Theorem2Terms &t)
{
    return t.dp_norm * std::max({rho(t, t.d_oo), rho(t, t.d_of), rho(t, t.d_fo), rho(t, t.d_ff)});
}

} // namespace

BoundReport theorem2_bound(const ChannelMatrix &h, const PowerVector &p_o, const PowerVector &p_f,
                           const Constellation &s_o, const Constellation &s_f, double noise_power)
{
    const auto t = theorem2_terms(h, p_o, p_f, s_o, s_f, noise_power);
    BoundReport r;
    r.check = "theorem2";
    r.raw_lhs = std::abs(1.0 - t.ff.distance / t.oo.distance);
    r.rhs = theorem2_rhs(t);
    r.components = {
        {"power_difference_l2", t.dp_norm},
        {"d_po_so", t.oo.distance},
        {"d_pf_so", t.of.distance},
        {"d_po_sf", t.fo.distance},
        {"d_pf_sf", t.ff.distance},
        {"max_ratio", t.dp_norm > 0.0 ? theorem2_rhs(t) / t.dp_norm : 0.0},
    };
    Vec hv = h.amplitudes;
    r.inputs_digest = digest({&hv, &p_o, &p_f});
    finish_bound(r);
    return r;
}

ChainReport appendix_b_chain(const ChannelMatrix &h, const PowerVector &p_o, const PowerVector &p_f,
                             const Constellation &s_o, const Constellation &s_f, double noise_power)
{
    const auto t = theorem2_terms(h, p_o, p_f, s_o, s_f, noise_power);
    ChainReport r;
    r.check = "appendix_b";
    const double side_f = side_steps(r, t, t.ff, t.d_ff, t.fo, t.d_fo, "S_f");
    const double side_o = side_steps(r, t, t.of, t.d_of, t.oo, t.d_oo, "S_o");
    const double lhs = std::abs(1.0 - t.ff.distance / t.oo.distance);
    const double combined = std::max(side_f, side_o);
    r.steps.push_back(make_step("optimality of S_o and S_f", Relation::less_equal, lhs, combined, true));
    r.steps.push_back(make_step("bound over all pair differences", Relation::less_equal, combined, theorem2_rhs(t)));
    finish(r);
    return r;
}

Theorem2Result theorem2_check(const ChannelMatrix &h, const PowerVector &p_o, const PowerVector &p_f,
                              const SystemConfig &config, const DesignOptions &options,
                              const std::vector<Constellation> &hints, std::size_t polish_rounds)
{
    const std::size_t M = config.symbol_count;
    const auto cap_o = PowerConstraint::fixed(p_o);
    const auto cap_f = PowerConstraint::fixed(p_f);
    DesignOptions seeded = options;
    seeded.extra_starts = hints;
    Constellation x_o = design(h, M, cap_o, seeded).constellation;
    Constellation x_f = design(h, M, cap_f, seeded).constellation;

    // MED of a unit-power set under power p is the MED of A s under H.
    auto d_under = [&](const Constellation &x, const PowerVector &from, const PowerVector &to) {
        return med(h, with_power(unit_power_form(x, from), to)).distance;
    };

    DesignOptions polish = options;
    polish.restarts = 0;
    std::size_t rounds = 0;
    for (; rounds < polish_rounds; ++rounds)
    {
        bool changed = false;
        if (d_under(x_o, p_o, p_f) > med(h, x_f).distance)
        {
            polish.extra_starts = {with_power(unit_power_form(x_o, p_o), p_f)};
            auto r = design(h, M, cap_f, polish);
            if (r.d_min > med(h, x_f).distance)
            {
                x_f = std::move(r.constellation);
                changed = true;
            }
        }
        if (d_under(x_f, p_f, p_o) > med(h, x_o).distance)
        {
            polish.extra_starts = {with_power(unit_power_form(x_f, p_f), p_o)};
            auto r = design(h, M, cap_o, polish);
            if (r.d_min > med(h, x_o).distance)
            {
                x_o = std::move(r.constellation);
                changed = true;
            }
        }
        if (!changed)
            break;
    }

    Theorem2Result out;
    out.s_o = unit_power_form(x_o, p_o);
    out.s_f = unit_power_form(x_f, p_f);
    out.bound = theorem2_bound(h, p_o, p_f, out.s_o, out.s_f, config.noise_power);
    out.bound.components["polish_rounds"] = static_cast<double>(rounds);
    if (d_under(x_o, p_o, p_f) > med(h, x_f).distance || d_under(x_f, p_f, p_o) > med(h, x_o).distance)
        out.bound.flags.push_back("optimality_premise_unmet");
    out.chain = appendix_b_chain(h, p_o, p_f, out.s_o, out.s_f, config.noise_power);
    return out;
}

double SerEstimate::standard_error() const
{
    if (trials == 0)
        return 0.0;
    return std::sqrt(ser * (1.0 - ser) / static_cast<double>(trials));
}

SerEstimate monte_carlo_ser(const ChannelMatrix &h, const Constellation &c, double noise_power, std::size_t trials,
                            std::uint64_t seed, Execution execution)
{
    if (trials < 1)
        throw ValidationError("trial count must be at least 1");
    if (!(noise_power >= 0.0))
        throw ValidationError("noise power must be nonnegative");
    const std::size_t U = c.subchannel_count();
    const std::size_t M = c.symbol_count();
    const std::size_t D = 2 * U;
    if (h.size() != U)
        throw ValidationError("channel and constellation dimensions differ");

    // Received noiseless points H x_m.
    Vec rx(M * D);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < D; ++k)
            rx[m * D + k] = h.amplitudes[k % U] * c.stacked()[m * D + k];
    const double sigma = std::sqrt(noise_power / 2.0);

    constexpr std::size_t kShard = 1u << 14;
    const std::size_t shards = (trials + kShard - 1) / kShard;
    std::vector<std::size_t> errors(shards, 0);

    auto run_shard = [&](std::size_t s) {
        std::mt19937_64 rng(mix_seed(seed, s));
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::size_t count = std::min(kShard, trials - s * kShard);
        Vec y(D);
        std::size_t err = 0;
        for (std::size_t t = 0; t < count; ++t)
        {
            const std::size_t sent = static_cast<std::size_t>(rng() % M);
            for (std::size_t k = 0; k < D; ++k)
                y[k] = rx[sent * D + k] + sigma * gauss(rng);
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < M; ++m)
            {
                double acc = 0.0;
                for (std::size_t k = 0; k < D; ++k)
                {
                    const double v = y[k] - rx[m * D + k];
                    acc += v * v;
                }
                if (acc < best_d)
                {
                    best_d = acc;
                    best = m;
                }
            }
            err += best != sent;
        }
        errors[s] = err;
    };

    if (execution == Execution::parallel)
    {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(shards); ++s)
            run_shard(static_cast<std::size_t>(s));
    }
    else
    {
        for (std::size_t s = 0; s < shards; ++s)
            run_shard(s);
    }

    SerEstimate est;
    est.trials = trials;
    for (std::size_t e : errors)
        est.errors += e;
    est.ser = static_cast<double>(est.errors) / static_cast<double>(trials);
    return est;
}

double binary_error_probability(double distance, double noise_power)
{
    if (!(noise_power > 0.0))
        return 0.0;
    const double sigma = std::sqrt(noise_power / 2.0);
    return 0.5 * std::erfc(distance / (2.0 * sigma) / std::sqrt(2.0));
}

Constellation equal_power_baseline(std::size_t symbols, std::size_t subchannels, double power_budget)
{
    if (symbols < 2 || (symbols & (symbols - 1)) != 0)
        throw ValidationError("baseline needs a power-of-two symbol count");
    if (subchannels == 0 || !(power_budget > 0.0))
        throw ValidationError("baseline needs sub-channels and a positive budget");
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < symbols)
        ++bits;
    const std::size_t rails = 2 * subchannels;
    // rail r: Re of sub-channel r for r < U, Im of sub-channel r - U otherwise
    std::vector<std::size_t> rail_bits(rails, 0);
    for (std::size_t b = 0; b < bits; ++b)
        rail_bits[b % rails] += 1;

    Constellation c(symbols, subchannels);
    for (std::size_t m = 0; m < symbols; ++m)
    {
        std::size_t label = m;
        for (std::size_t r = 0; r < rails; ++r)
        {
            const std::size_t levels = std::size_t{1} << rail_bits[r];
            const std::size_t level = label % levels;
            label /= levels;
            // symmetric PAM: -(L-1), ..., L-1 in steps of 2; a single level sits at 0
            const double v = 2.0 * static_cast<double>(level) - static_cast<double>(levels - 1);
            c.stacked()[m * rails + r] = v;
        }
    }
    // Equal power per active sub-channel.
    std::size_t active = 0;
    for (std::size_t u = 0; u < subchannels; ++u)
        active += (rail_bits[u] + rail_bits[u + subchannels]) > 0;
    for (std::size_t u = 0; u < subchannels; ++u)
    {
        const auto idx = subchannel_indices(symbols, subchannels, u);
        double e = 0.0;
        for (std::size_t i : idx)
            e += c.stacked()[i] * c.stacked()[i];
        if (e == 0.0)
            continue;
        const double target = static_cast<double>(symbols) * power_budget / static_cast<double>(active);
        const double scale = std::sqrt(target / e);
        for (std::size_t i : idx)
            c.stacked()[i] *= scale;
    }
    return c;
}

nlohmann::json to_json(const BoundReport &report)
{
    nlohmann::json j;
    j["check"] = report.check;
    j["inputs_digest"] = report.inputs_digest;
    j["lhs"] = report.lhs;
    j["raw_lhs"] = report.raw_lhs;
    j["rhs"] = report.rhs;
    j["holds"] = report.holds;
    j["margin"] = report.margin();
    j["components"] = report.components;
    j["flags"] = report.flags;
    return j;
}

nlohmann::json to_json(const ChainReport &report)
{
    nlohmann::json j;
    j["check"] = report.check;
    j["overall"] = report.overall;
    auto steps = nlohmann::json::array();
    for (const auto &s : report.steps)
        steps.push_back({{"label", s.label},
                         {"relation", s.relation == Relation::equal ? "=" : "<="},
                         {"lhs", s.lhs},
                         {"rhs", s.rhs},
                         {"holds", s.holds},
                         {"needs_optimality", s.needs_optimality}});
    j["steps"] = steps;
    return j;
}

} // namespace mdcmap
