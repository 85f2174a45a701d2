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
#include "mdcmap/commands.hpp"

#include "mdcmap/analysis.hpp"

#include <filesystem>
#include <random>
#include <sstream>

namespace mdcmap {

namespace {

using nlohmann::json;

std::string output_path(const RunConfig &config, const std::string &name)
{
    std::error_code ec;
    std::filesystem::create_directories(config.out, ec);
    if (ec)
        throw IoError("cannot create output directory '" + config.out + "': " + ec.message());
    return (std::filesystem::path(config.out) / name).string();
}

void write_json(const std::string &path, const json &j)
{
    write_text_atomic(path, j.dump(2) + "\n");
}

json header(const RunConfig &config, const std::string &command)
{
    return json{{"schema_version", kReportSchemaVersion}, {"command", command}, {"config_hash", hex64(config.hash())},
                {"seed", config.seed}};
}

json position_json(const Position &p, const ChannelMatrix &h)
{
    json j{{"r_m", p.r}, {"z_m", p.z}, {"inside_beam", h.inside_beam}, {"amplitudes", h.amplitudes}};
    if (p.beta)
        j["beta"] = *p.beta;
    return j;
}

Position grid_position(const RunConfig &config, double beta, double z)
{
    return Position::from_beta(config.grid.frame, config.system.rayleigh_distance, beta, z);
}

PowerVector random_direction(std::mt19937_64 &rng, std::size_t n)
{
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    PowerVector d(n);
    double norm = 0.0;
    while (!(norm > 0.0))
    {
        norm = 0.0;
        for (auto &v : d)
        {
            v = uni(rng);
            norm += v * v;
        }
    }
    norm = std::sqrt(norm);
    for (auto &v : d)
        v /= norm;
    return d;
}

struct Tally
{
    std::size_t holds = 0;
    std::size_t clamped = 0;
    std::size_t chains_ok = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
};

} // namespace

CommandResult cmd_gain_field(const RunConfig &config)
{
    const auto betas = config.grid.betas();
    const auto zs = config.grid.zs();
    const auto rows = gain_field(config.system, config.grid.frame, betas, zs);
    const auto path = output_path(config, "gain_field.csv");
    write_gain_field_csv(path, rows);
    CommandResult r;
    r.summary = header(config, "gain-field");
    r.summary["rows"] = rows.size();
    r.summary["file"] = path;
    return r;
}

CommandResult cmd_design(const RunConfig &config, double beta, double z, const std::optional<PowerVector> &power)
{
    const Position pos = grid_position(config, beta, z);
    const ChannelMatrix h = channel_matrix(config.system, pos);
    const DesignResult res = power ? design_fixed_power(h, config.system, *power, config.design)
                                   : design_total_power(h, config.system, config.design);

    save_constellation(output_path(config, "constellation.txt"),
                       {res.constellation, config.system.carrier_hz, config.system.modes, pos, res.d_min});

    CommandResult r;
    json &s = r.summary;
    s = header(config, "design");
    s["position"] = position_json(pos, h);
    s["power_mode"] = power ? "fixed" : "total";
    if (power)
        s["power_vector"] = *power;
    s["d_min"] = res.d_min;
    s["iterations"] = res.iterations;
    s["restarts"] = res.restarts.size();
    s["restart_index"] = res.restart_index;
    s["converged"] = res.converged;
    s["status"] = res.converged ? "converged" : "not_converged";
    s["med_pair"] = {res.med_pair.m, res.med_pair.n};
    s["subchannel_power"] = extract_power(res.constellation);
    json failures = json::array();
    for (std::size_t k = 0; k < res.restarts.size(); ++k)
        if (!res.restarts[k].failure.empty())
            failures.push_back({{"restart", k}, {"failure", res.restarts[k].failure}});
    s["failures"] = failures;
    write_json(output_path(config, "design.json"), s);
    return r;
}

CommandResult cmd_map(const RunConfig &config)
{
    const DesignTable table = design_grid(config.system, config.grid, config.design);
    ConstellationMap map = build_map(table, config.tau, config.trials, config.seed);
    stamp_config(map, config.canonical());
    save_map(map, output_path(config, "map.txt"));
    write_assignment_csv(map, output_path(config, "assignments.csv"));

    CommandResult r;
    json &s = r.summary;
    s = header(config, "map");
    s["positions"] = table.positions.size();
    s["categories"] = map.categories.size();
    s["total_distortion"] = map.total_distortion;
    s["winning_trial"] = map.winning_trial;
    json quarantine = json::array();
    for (std::size_t q : map.quarantined)
        quarantine.push_back({{"index", q}, {"reason", table.positions[q].failure}});
    s["quarantined"] = quarantine;
    json cats = json::array();
    for (const auto &c : map.categories)
        cats.push_back({{"id", c.id}, {"representative", c.representative}, {"members", c.members}, {"d_min", c.d_min}});
    s["category_list"] = cats;
    write_json(output_path(config, "map.json"), s);
    return r;
}

CommandResult cmd_verify(const RunConfig &config, VerifyMode mode, std::size_t samples, double perturbation)
{
    if (samples < 1)
        throw ValidationError("--samples must be at least 1");
    if (!(perturbation >= 0.0))
        throw ValidationError("perturbation must be nonnegative");
    const std::size_t n = config.grid.size();
    const double zr = config.system.rayleigh_distance;
    Tally tally;
    json reports = json::array();

    auto record = [&](json entry, const BoundReport &bound, const ChainReport &chain) {
        const bool ok = mode == VerifyMode::chains ? chain.overall : bound.holds;
        tally.holds += ok;
        tally.chains_ok += chain.overall;
        tally.clamped += bound.has_flag("lhs_clamped");
        tally.worst_margin = std::min(tally.worst_margin, bound.margin());
        entry["bound"] = to_json(bound);
        entry["chain"] = to_json(chain);
        entry["holds"] = ok;
        reports.push_back(std::move(entry));
    };

    for (std::size_t k = 0; k < samples; ++k)
    {
        std::mt19937_64 rng(mix_seed(config.seed, 0x7665726966ULL + k));
        DesignOptions opts = config.design;
        opts.seed = mix_seed(config.seed, k);

        if (mode == VerifyMode::theorem1 || mode == VerifyMode::chains)
        {
            const std::size_t i1 = rng() % n;
            const std::size_t i2 = rng() % n;
            const ChannelMatrix h1 = channel_matrix(config.system, config.grid.position(i1, zr));
            const ChannelMatrix h2 = channel_matrix(config.system, config.grid.position(i2, zr));
            const auto res = theorem1_check(h1, h2, config.system, opts);
            record(json{{"sample", k}, {"theorem", 1}, {"positions", {i1, i2}}}, res.bound, res.chain);
        }
        if (mode == VerifyMode::theorem2 || mode == VerifyMode::chains)
        {
            const std::size_t i = rng() % n;
            const ChannelMatrix h = channel_matrix(config.system, config.grid.position(i, zr));
            const auto opt = design_total_power(h, config.system, opts);
            const PowerVector p_o = extract_power(opt.constellation);
            const PowerVector dir = random_direction(rng, p_o.size());
            PowerVector p_f = p_o;
            for (std::size_t u = 0; u < p_f.size(); ++u)
                p_f[u] += perturbation * dir[u];
            const auto res = theorem2_check(h, p_o, p_f, config.system, opts, {opt.constellation});
            record(json{{"sample", k}, {"theorem", 2}, {"position", i}, {"p_o", p_o}, {"p_f", p_f}}, res.bound,
                   res.chain);
        }
    }

    const char *name = mode == VerifyMode::theorem1 ? "theorem1" : mode == VerifyMode::theorem2 ? "theorem2" : "chains";
    CommandResult r;
    json &s = r.summary;
    s = header(config, "verify");
    s["mode"] = name;
    s["samples"] = reports.size();
    s["holds_count"] = tally.holds;
    s["chains_overall_count"] = tally.chains_ok;
    s["clamped_count"] = tally.clamped;
    s["worst_margin"] = tally.worst_margin;
    s["perturbation"] = perturbation;
    s["reports"] = reports;
    r.verified = tally.holds == reports.size();
    write_json(output_path(config, std::string("verify_") + name + ".json"), s);
    return r;
}

CommandResult cmd_ser(const RunConfig &config, double beta, double z, bool baseline, std::size_t trials)
{
    const Position pos = grid_position(config, beta, z);
    const ChannelMatrix h = channel_matrix(config.system, pos);
    const auto res = design_total_power(h, config.system, config.design);
    const double n0 = config.system.noise_power;
    const std::uint64_t ser_seed = mix_seed(config.seed, 0x736572ULL);

    auto entry = [&](const Constellation &c) {
        const auto est = monte_carlo_ser(h, c, n0, trials, ser_seed);
        return json{{"ser", est.ser},
                    {"errors", est.errors},
                    {"trials", est.trials},
                    {"standard_error", est.standard_error()},
                    {"d_min", med(h, c).distance}};
    };

    CommandResult r;
    json &s = r.summary;
    s = header(config, "ser");
    s["position"] = position_json(pos, h);
    s["noise_power"] = n0;
    s["designed"] = entry(res.constellation);
    if (baseline)
        s["baseline"] = entry(equal_power_baseline(config.system.symbol_count, h.size(), config.system.power_budget));
    write_json(output_path(config, "ser.json"), s);
    return r;
}

int exit_code_for(const std::exception &e)
{
    if (dynamic_cast<const IoError *>(&e))
        return exit_io;
    if (dynamic_cast<const ValidationError *>(&e) || dynamic_cast<const DomainError *>(&e) ||
        dynamic_cast<const ArgumentOrderError *>(&e))
        return exit_validation;
    return 1;
}

} // namespace mdcmap
