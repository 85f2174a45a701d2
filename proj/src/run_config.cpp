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
#include "mdcmap/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

namespace mdcmap {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string &value)
{
    std::vector<std::string> out;
    if (trim(value).empty())
        return out;
    std::size_t start = 0;
    while (true)
    {
        const auto comma = value.find(',', start);
        out.push_back(trim(std::string_view(value).substr(start, comma - start)));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

double to_double(const std::string &key, const std::string &value)
{
    try
    {
        return parse_double(value);
    }
    catch (const std::exception &)
    {
        throw ValidationError("config key '" + key + "': not a number: '" + value + "'");
    }
}

template <class Int> Int to_int(const std::string &key, const std::string &value)
{
    Int v{};
    const auto *end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (value.empty() || ec != std::errc{} || ptr != end)
        throw ValidationError("config key '" + key + "': not an integer: '" + value + "'");
    return v;
}

std::string join(const std::vector<std::string> &items)
{
    std::string out;
    for (std::size_t k = 0; k < items.size(); ++k)
        out += (k ? "," : "") + items[k];
    return out;
}

} // namespace

RunConfig::RunConfig()
{
    system.carrier_hz = {60e9, 61e9};
    system.modes = {0, 1};
}

void RunConfig::finalize()
{
    system.validate();
    if (frame_carrier >= system.carrier_count())
        throw ValidationError("frame_carrier out of range");
    grid.frame = ReferenceFrame::from_carrier(system, frame_carrier, frame_mode);
    grid.validate();
    design.seed = seed;
    design.validate();
    if (!(tau >= 0.0))
        throw ValidationError("tau must be nonnegative");
    if (trials < 1)
        throw ValidationError("trials must be at least 1");
    if (workers < 0)
        throw ValidationError("workers must be nonnegative");
}

std::string RunConfig::canonical() const
{
    std::map<std::string, std::string> kv;
    std::vector<std::string> items;
    for (double f : system.carrier_hz)
        items.push_back(format_double(f / 1e9));
    kv["carriers_ghz"] = join(items);
    items.clear();
    for (int l : system.modes)
        items.push_back(std::to_string(l));
    kv["modes"] = join(items);
    items.clear();
    for (double g : system.antenna_gain)
        items.push_back(format_double(g));
    kv["antenna_gain"] = join(items);
    kv["rayleigh_distance_m"] = format_double(system.rayleigh_distance);
    kv["noise_power"] = format_double(system.noise_power);
    kv["power_budget"] = format_double(system.power_budget);
    kv["symbol_count"] = std::to_string(system.symbol_count);
    kv["antenna_spacing_m"] = format_double(system.antenna_spacing);
    kv["frame_carrier"] = std::to_string(frame_carrier);
    kv["frame_mode"] = std::to_string(frame_mode);
    kv["beta_lo"] = format_double(grid.beta_lo);
    kv["beta_hi"] = format_double(grid.beta_hi);
    kv["beta_step"] = format_double(grid.beta_step);
    kv["z_lo"] = format_double(grid.z_lo);
    kv["z_hi"] = format_double(grid.z_hi);
    kv["z_step"] = format_double(grid.z_step);
    kv["restarts"] = std::to_string(design.restarts);
    kv["max_iterations"] = std::to_string(design.max_iterations);
    kv["tolerance"] = format_double(design.tolerance);
    kv["pair_fraction"] = format_double(design.pair_fraction);
    kv["tau"] = format_double(tau);
    kv["trials"] = std::to_string(trials);
    kv["seed"] = std::to_string(seed);
    std::string out;
    for (const auto &[k, v] : kv)
        out += k + " = " + v + "\n";
    return out;
}

RunConfig parse_run_config(const std::string &text)
{
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));

        if (key == "carriers_ghz")
        {
            c.system.carrier_hz.clear();
            for (const auto &v : split_list(value))
                c.system.carrier_hz.push_back(to_double(key, v) * 1e9);
        }
        else if (key == "modes")
        {
            c.system.modes.clear();
            for (const auto &v : split_list(value))
                c.system.modes.push_back(to_int<int>(key, v));
        }
        else if (key == "antenna_gain")
        {
            c.system.antenna_gain.clear();
            for (const auto &v : split_list(value))
                c.system.antenna_gain.push_back(to_double(key, v));
        }
        else if (key == "rayleigh_distance_m")
            c.system.rayleigh_distance = to_double(key, value);
        else if (key == "noise_power")
            c.system.noise_power = to_double(key, value);
        else if (key == "power_budget")
            c.system.power_budget = to_double(key, value);
        else if (key == "symbol_count")
            c.system.symbol_count = to_int<std::size_t>(key, value);
        else if (key == "antenna_spacing_m")
            c.system.antenna_spacing = to_double(key, value);
        else if (key == "frame_carrier")
            c.frame_carrier = to_int<std::size_t>(key, value);
        else if (key == "frame_mode")
            c.frame_mode = to_int<int>(key, value);
        else if (key == "beta_lo")
            c.grid.beta_lo = to_double(key, value);
        else if (key == "beta_hi")
            c.grid.beta_hi = to_double(key, value);
        else if (key == "beta_step")
            c.grid.beta_step = to_double(key, value);
        else if (key == "z_lo")
            c.grid.z_lo = to_double(key, value);
        else if (key == "z_hi")
            c.grid.z_hi = to_double(key, value);
        else if (key == "z_step")
            c.grid.z_step = to_double(key, value);
        else if (key == "restarts")
            c.design.restarts = to_int<std::size_t>(key, value);
        else if (key == "max_iterations")
            c.design.max_iterations = to_int<std::size_t>(key, value);
        else if (key == "tolerance")
            c.design.tolerance = to_double(key, value);
        else if (key == "pair_fraction")
            c.design.pair_fraction = to_double(key, value);
        else if (key == "tau")
            c.tau = to_double(key, value);
        else if (key == "trials")
            c.trials = to_int<std::size_t>(key, value);
        else if (key == "seed")
            c.seed = to_int<std::uint64_t>(key, value);
        else if (key == "workers")
            c.workers = to_int<int>(key, value);
        else if (key == "out")
            c.out = value;
        else
            throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    c.finalize();
    return c;
}

RunConfig load_run_config(const std::string &path)
{
    return parse_run_config(read_text(path));
}

} // namespace mdcmap
