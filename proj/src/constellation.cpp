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
#include "mdcmap/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mdcmap {

Constellation::Constellation(std::size_t symbols, std::size_t subchannels)
    : symbols_(symbols), subchannels_(subchannels), stacked_(symbols * 2 * subchannels, 0.0)
{
}

Constellation Constellation::from_stacked(std::size_t symbols, std::size_t subchannels, std::vector<double> stacked)
{
    if (stacked.size() != symbols * 2 * subchannels)
        throw ValidationError("stacked vector length does not match M * 2U");
    Constellation c;
    c.symbols_ = symbols;
    c.subchannels_ = subchannels;
    c.stacked_ = std::move(stacked);
    return c;
}

Constellation Constellation::from_points(const std::vector<std::vector<std::complex<double>>> &points)
{
    if (points.empty())
        throw ValidationError("constellation needs at least one point");
    const std::size_t u = points.front().size();
    Constellation c(points.size(), u);
    for (std::size_t m = 0; m < points.size(); ++m)
    {
        if (points[m].size() != u)
            throw ValidationError("constellation points have different dimensions");
        for (std::size_t k = 0; k < u; ++k)
            c.set_point(m, k, points[m][k]);
    }
    return c;
}

std::complex<double> Constellation::point(std::size_t m, std::size_t u) const
{
    const std::size_t base = m * 2 * subchannels_;
    return {stacked_[base + u], stacked_[base + subchannels_ + u]};
}

void Constellation::set_point(std::size_t m, std::size_t u, std::complex<double> value)
{
    const std::size_t base = m * 2 * subchannels_;
    stacked_[base + u] = value.real();
    stacked_[base + subchannels_ + u] = value.imag();
}

std::vector<std::vector<std::complex<double>>> Constellation::points() const
{
    std::vector<std::vector<std::complex<double>>> out(symbols_, std::vector<std::complex<double>>(subchannels_));
    for (std::size_t m = 0; m < symbols_; ++m)
        for (std::size_t u = 0; u < subchannels_; ++u)
            out[m][u] = point(m, u);
    return out;
}

std::span<const double> Constellation::symbol(std::size_t m) const
{
    return std::span<const double>(stacked_).subspan(m * 2 * subchannels_, 2 * subchannels_);
}

Constellation Constellation::scaled(double factor) const
{
    Constellation c = *this;
    for (double &v : c.stacked_)
        v *= factor;
    return c;
}

double Constellation::average_power() const
{
    double e = 0.0;
    for (double v : stacked_)
        e += v * v;
    return e / static_cast<double>(symbols_);
}

namespace {

std::vector<double> squared_weights(std::span<const double> amplitudes)
{
    const std::size_t u = amplitudes.size();
    std::vector<double> w(2 * u);
    for (std::size_t k = 0; k < u; ++k)
        w[k] = w[k + u] = amplitudes[k] * amplitudes[k];
    return w;
}

inline double weighted_distance2(const double *a, const double *b, const double *w, std::size_t d)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k)
    {
        const double t = a[k] - b[k];
        acc += w[k] * t * t;
    }
    return acc;
}

struct PairBest
{
    double d2 = std::numeric_limits<double>::infinity();
    std::size_t m = 0;
    std::size_t n = 0;

    void offer(double value, std::size_t i, std::size_t j)
    {
        if (value < d2)
        {
            d2 = value;
            m = i;
            n = j;
        }
    }
    // Deterministic merge: smaller distance, then earlier pair.
    void merge(const PairBest &o)
    {
        if (o.d2 < d2 || (o.d2 == d2 && (o.m < m || (o.m == m && o.n < n))))
            *this = o;
    }
};

void check_dimensions(std::span<const double> amplitudes, const Constellation &c)
{
    if (c.symbol_count() < 2)
        throw DomainError("MED needs at least two symbols");
    if (amplitudes.size() != c.subchannel_count())
        throw ValidationError("channel and constellation dimensions differ");
}

} // namespace

MedResult med(std::span<const double> amplitudes, const Constellation &c, Execution execution)
{
    check_dimensions(amplitudes, c);
    const std::size_t M = c.symbol_count();
    const std::size_t D = c.symbol_dimension();
    const auto w = squared_weights(amplitudes);
    const double *x = c.stacked().data();

    PairBest best;
    if (execution == Execution::serial)
    {
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t n = m + 1; n < M; ++n)
                best.offer(weighted_distance2(x + m * D, x + n * D, w.data(), D), m, n);
    }
    else
    {
#pragma omp parallel
        {
            PairBest local;
#pragma omp for schedule(dynamic, 4) nowait
            for (std::ptrdiff_t mi = 0; mi < static_cast<std::ptrdiff_t>(M); ++mi)
            {
                const auto m = static_cast<std::size_t>(mi);
                for (std::size_t n = m + 1; n < M; ++n)
                    local.offer(weighted_distance2(x + m * D, x + n * D, w.data(), D), m, n);
            }
#pragma omp critical(mdcmap_med_merge)
            best.merge(local);
        }
    }
    return {std::sqrt(best.d2), {best.m, best.n}};
}

MedResult med(const ChannelMatrix &h, const Constellation &c, Execution execution)
{
    return med(h.amplitudes, c, execution);
}

double pairwise_quadratic_form(const ChannelMatrix &h, const Constellation &c, std::size_t m, std::size_t n)
{
    check_dimensions(h.amplitudes, c);
    if (m >= c.symbol_count() || n >= c.symbol_count() || m == n)
        throw ValidationError("pair index out of range");
    const auto w = squared_weights(h.amplitudes);
    const auto xm = c.symbol(m);
    const auto xn = c.symbol(n);
    // x^T E_mn x = x_m^T V x_m - x_m^T V x_n - x_n^T V x_m + x_n^T V x_n
    double mm = 0.0, mn = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
    {
        mm += w[k] * xm[k] * xm[k];
        mn += w[k] * xm[k] * xn[k];
        nn += w[k] * xn[k] * xn[k];
    }
    return mm - 2.0 * mn + nn;
}

std::vector<std::size_t> subchannel_indices(std::size_t symbols, std::size_t subchannels, std::size_t u)
{
    std::vector<std::size_t> idx;
    idx.reserve(2 * symbols);
    for (std::size_t m = 0; m < symbols; ++m)
    {
        idx.push_back(m * 2 * subchannels + u);
        idx.push_back(m * 2 * subchannels + subchannels + u);
    }
    return idx;
}

namespace {

void apply_power(SubproblemSpec &spec, std::size_t symbols, std::size_t subchannels, const PowerConstraint &power)
{
    const double m = static_cast<double>(symbols);
    if (power.total)
    {
        spec.ball_bound = m * *power.total;
        return;
    }
    if (power.per_subchannel.size() != subchannels)
        throw ValidationError("power vector length must equal the sub-channel count");
    for (std::size_t u = 0; u < subchannels; ++u)
        spec.caps.push_back(GroupCap{subchannel_indices(symbols, subchannels, u), m * power.per_subchannel[u]});
}

} // namespace

SubproblemSpec linearize_constraints(std::span<const double> amplitudes, const Constellation &previous,
                                     const PowerConstraint &power, const std::vector<SymbolPair> *pairs)
{
    check_dimensions(amplitudes, previous);
    const std::size_t M = previous.symbol_count();
    const std::size_t D = previous.symbol_dimension();
    const auto w = squared_weights(amplitudes);
    const double *x = previous.stacked().data();

    SubproblemSpec spec;
    spec.dimension = M * D;
    auto add = [&](std::size_t m, std::size_t n) {
        AffineBound b;
        b.index.resize(2 * D);
        b.value.resize(2 * D);
        double q = 0.0;
        for (std::size_t k = 0; k < D; ++k)
        {
            const double d = x[m * D + k] - x[n * D + k];
            const double g = 2.0 * w[k] * d;
            b.index[k] = m * D + k;
            b.value[k] = g;
            b.index[D + k] = n * D + k;
            b.value[D + k] = -g;
            q += w[k] * d * d;
        }
        b.offset = -q;
        spec.bounds.push_back(std::move(b));
    };
    if (pairs)
    {
        spec.bounds.reserve(pairs->size());
        for (const auto &p : *pairs)
            add(p.m, p.n);
    }
    else
    {
        spec.bounds.reserve(M * (M - 1) / 2);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t n = m + 1; n < M; ++n)
                add(m, n);
    }
    apply_power(spec, M, previous.subchannel_count(), power);
    return spec;
}

void DesignOptions::validate() const
{
    if (restarts < 1 && extra_starts.empty())
        throw ValidationError("restarts must be at least 1");
    if (max_iterations < 1)
        throw ValidationError("max_iterations must be at least 1");
    if (!(tolerance > 0.0))
        throw ValidationError("tolerance must be positive");
    if (!(pair_fraction > 0.0 && pair_fraction <= 1.0))
        throw ValidationError("pair_fraction must lie in (0, 1]");
}

Constellation snap_to_power(const Constellation &c, const PowerConstraint &power)
{
    Constellation out = c;
    const double m = static_cast<double>(c.symbol_count());
    auto x = out.stacked();
    if (power.total)
    {
        double e = 0.0;
        for (double v : x)
            e += v * v;
        if (e > 0.0)
        {
            const double scale = std::sqrt(m * *power.total / e);
            for (double &v : x)
                v *= scale;
        }
        return out;
    }
    for (std::size_t u = 0; u < c.subchannel_count(); ++u)
    {
        const auto idx = subchannel_indices(c.symbol_count(), c.subchannel_count(), u);
        double e = 0.0;
        for (std::size_t i : idx)
            e += x[i] * x[i];
        const double cap = m * power.per_subchannel[u];
        const double scale = (e > 0.0 && cap > 0.0) ? std::sqrt(cap / e) : 0.0;
        for (std::size_t i : idx)
            x[i] *= scale;
    }
    return out;
}

Constellation random_start(std::size_t symbols, std::size_t subchannels, const PowerConstraint &power,
                           std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Constellation c(symbols, subchannels);
    for (double &v : c.stacked())
        v = gauss(rng);
    return snap_to_power(c, power);
}

namespace {

std::vector<SymbolPair> closest_pairs(std::span<const double> amplitudes, const Constellation &c, double fraction)
{
    const std::size_t M = c.symbol_count();
    const std::size_t D = c.symbol_dimension();
    const auto w = squared_weights(amplitudes);
    const double *x = c.stacked().data();
    std::vector<std::pair<double, SymbolPair>> all;
    all.reserve(M * (M - 1) / 2);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t n = m + 1; n < M; ++n)
            all.push_back({weighted_distance2(x + m * D, x + n * D, w.data(), D), {m, n}});
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(all.size()))));
    std::stable_sort(all.begin(), all.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    std::vector<SymbolPair> out;
    out.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k)
        out.push_back(all[k].second);
    return out;
}

} // namespace

RestartTrace refine_design(std::span<const double> amplitudes, Constellation &x, const PowerConstraint &power,
                           const DesignOptions &options)
{
    check_dimensions(amplitudes, x);
    const double hmax = *std::max_element(amplitudes.begin(), amplitudes.end());
    if (!(hmax > 0.0))
        throw DomainError("channel is identically zero");
    // The subproblem sees H / max|h|; distances are always reported on the true channel.
    std::vector<double> normalized(amplitudes.begin(), amplitudes.end());
    for (double &v : normalized)
        v /= hmax;

    const bool prune = options.pair_fraction < 1.0 && x.symbol_count() >= 32;
    RestartTrace trace;
    double d = med(amplitudes, x).distance;
    trace.d_min.push_back(d);
    for (std::size_t k = 0; k < options.max_iterations; ++k)
    {
        std::vector<SymbolPair> subset;
        if (prune)
            subset = closest_pairs(normalized, x, options.pair_fraction);
        const auto spec = linearize_constraints(normalized, x, power, prune ? &subset : nullptr);
        const auto sol = solve_subproblem(spec, x.stacked(), options.solver);
        trace.iterations = k + 1;
        if (sol.status == SolveStatus::infeasible)
        {
            trace.failure = "infeasible subproblem";
            return trace;
        }
        Constellation candidate = snap_to_power(
            Constellation::from_stacked(x.symbol_count(), x.subchannel_count(), sol.x), power);
        const double dn = med(amplitudes, candidate).distance;
        if (dn < d)
        {
            // Solver noise at the plateau; keep the previous iterate.
            trace.converged = true;
            return trace;
        }
        x = std::move(candidate);
        trace.d_min.push_back(dn);
        if (dn - d <= options.tolerance * dn)
        {
            trace.converged = true;
            return trace;
        }
        d = dn;
    }
    return trace;
}

namespace {

void validate_power(const PowerConstraint &power, std::size_t subchannels)
{
    if (power.total)
    {
        if (!(*power.total > 0.0))
            throw ValidationError("power budget must be positive");
        return;
    }
    if (power.per_subchannel.size() != subchannels)
        throw ValidationError("power vector length must equal the sub-channel count");
    bool any = false;
    for (double p : power.per_subchannel)
    {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw ValidationError("power vector entries must be finite and nonnegative");
        any = any || p > 0.0;
    }
    if (!any)
        throw ValidationError("power vector is all zero; the design is infeasible");
}

} // namespace

DesignResult design(const ChannelMatrix &h, std::size_t symbols, const PowerConstraint &power,
                    const DesignOptions &options)
{
    options.validate();
    const std::size_t U = h.size();
    if (symbols < 2)
        throw DomainError("design needs at least two symbols");
    if (U == 0)
        throw ValidationError("channel has no sub-channels");
    validate_power(power, U);
    for (const auto &s : options.extra_starts)
        if (s.symbol_count() != symbols || s.subchannel_count() != U)
            throw ValidationError("extra start has the wrong shape");

    const std::size_t chains = options.restarts + options.extra_starts.size();
    std::vector<Constellation> finals(chains);
    std::vector<RestartTrace> traces(chains);

    auto run_chain = [&](std::size_t r) {
        try
        {
            Constellation x = r < options.restarts
                                  ? random_start(symbols, U, power, mix_seed(options.seed, r))
                                  : snap_to_power(options.extra_starts[r - options.restarts], power);
            traces[r] = refine_design(h.amplitudes, x, power, options);
            finals[r] = std::move(x);
        }
        catch (const std::exception &e)
        {
            traces[r].failure = e.what();
        }
    };

    if (options.execution == Execution::parallel)
    {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(chains); ++r)
            run_chain(static_cast<std::size_t>(r));
    }
    else
    {
        for (std::size_t r = 0; r < chains; ++r)
            run_chain(r);
    }

    std::optional<std::size_t> best;
    double best_d = -1.0;
    for (std::size_t r = 0; r < chains; ++r)
    {
        if (!traces[r].failure.empty() || traces[r].d_min.empty())
            continue;
        const double d = traces[r].d_min.back();
        if (!best || d > best_d * (1.0 + 1e-12))
        {
            best = r;
            best_d = d;
        }
    }
    if (!best)
        throw std::runtime_error("every restart failed: " + traces.front().failure);

    DesignResult result;
    result.restart_index = *best;
    result.constellation = std::move(finals[*best]);
    const auto m = med(h, result.constellation);
    result.d_min = m.distance;
    result.med_pair = m.pair;
    result.iterations = traces[*best].iterations;
    result.converged = traces[*best].converged;
    result.restarts = std::move(traces);
    return result;
}

DesignResult design_total_power(const ChannelMatrix &h, const SystemConfig &config, const DesignOptions &options)
{
    return design(h, config.symbol_count, PowerConstraint::total_power(config.power_budget), options);
}

DesignResult design_fixed_power(const ChannelMatrix &h, const SystemConfig &config, const PowerVector &p,
                                const DesignOptions &options)
{
    return design(h, config.symbol_count, PowerConstraint::fixed(p), options);
}

PowerVector extract_power(const Constellation &c)
{
    const std::size_t U = c.subchannel_count();
    PowerVector p(U, 0.0);
    for (std::size_t m = 0; m < c.symbol_count(); ++m)
        for (std::size_t u = 0; u < U; ++u)
            p[u] += std::norm(c.point(m, u));
    for (double &v : p)
        v /= static_cast<double>(c.symbol_count());
    return p;
}

double normalized_med_diff(const ChannelMatrix &h_eval, const Constellation &representative,
                           const Constellation &optimal)
{
    if (representative.symbol_count() != optimal.symbol_count() ||
        representative.subchannel_count() != optimal.subchannel_count())
        throw ValidationError("constellations have different shapes");
    const double d_opt = med(h_eval, optimal).distance;
    if (!(d_opt > 0.0))
        throw DomainError("reference constellation has zero MED under the evaluation channel");
    return std::abs(1.0 - med(h_eval, representative).distance / d_opt);
}

} // namespace mdcmap
