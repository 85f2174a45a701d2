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
#include "mdcmap/mapgen.hpp"

#include <cmath>
#include <sstream>

namespace mdcmap {

namespace {

std::vector<std::string> words_of(const std::string &line)
{
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string w;
    while (ss >> w)
        out.push_back(w);
    return out;
}

std::vector<std::string> keyed(std::istream &in, const std::string &key, std::size_t count)
{
    std::string line;
    if (!std::getline(in, line))
        throw MalformedFileError("map file ends before '" + key + "'");
    auto w = words_of(line);
    if (w.empty() || w[0] != key)
        throw MalformedFileError("expected '" + key + "' in map file, got '" + line + "'");
    w.erase(w.begin());
    if (w.size() != count)
        throw MalformedFileError("wrong number of fields after '" + key + "'");
    return w;
}

std::uint64_t parse_u64(const std::string &token, int base = 10)
{
    std::size_t used = 0;
    std::uint64_t v = 0;
    try
    {
        v = std::stoull(token, &used, base);
    }
    catch (const std::exception &)
    {
        throw MalformedFileError("not an unsigned integer: '" + token + "'");
    }
    if (used != token.size() || token.front() == '-')
        throw MalformedFileError("not an unsigned integer: '" + token + "'");
    return v;
}

int parse_int(const std::string &token)
{
    const double v = parse_double(token);
    if (v != std::floor(v))
        throw MalformedFileError("not an integer: '" + token + "'");
    return static_cast<int>(v);
}

} // namespace

std::string format_map(const ConstellationMap &map)
{
    std::ostringstream out;
    const auto &g = map.grid;
    out << "mdcmap-map " << kMapFormatVersion << '\n';
    out << "config_hash " << hex64(map.config_hash) << '\n';
    out << "config " << map.config_text.size() << '\n' << map.config_text << '\n';
    out << "grid " << format_double(g.beta_lo) << ' ' << format_double(g.beta_hi) << ' '
        << format_double(g.beta_step) << ' ' << format_double(g.z_lo) << ' ' << format_double(g.z_hi) << ' '
        << format_double(g.z_step) << ' ' << format_double(g.frame.wavelength) << ' ' << g.frame.mode << '\n';
    out << "tau " << format_double(map.tau) << '\n';
    out << "trials " << map.trials << '\n';
    out << "seed " << map.seed << '\n';
    out << "winning_trial " << map.winning_trial << '\n';
    out << "winning_seed " << map.winning_seed << '\n';
    out << "total_distortion " << format_double(map.total_distortion) << '\n';
    out << "categories " << map.categories.size() << '\n';
    for (const auto &c : map.categories)
    {
        out << "category " << c.id << ' ' << c.representative << ' ' << c.members << '\n';
        ConstellationRecord rec{c.constellation, map.carrier_hz, map.modes, c.position, c.d_min};
        write_constellation(out, rec);
    }
    out << "assignments " << map.assignments.size() << '\n';
    for (const auto &a : map.assignments)
        out << a.index << ' ' << format_double(a.beta) << ' ' << format_double(a.z) << ' ' << a.category << ' '
            << format_double(a.distortion) << ' ' << format_double(a.optimal_d_min) << '\n';
    out << "quarantine " << map.quarantined.size();
    for (std::size_t q : map.quarantined)
        out << ' ' << q;
    out << "\nend\n";
    return out.str();
}

ConstellationMap parse_map(const std::string &text, std::optional<std::uint64_t> expected_hash)
{
    std::istringstream in(text);
    ConstellationMap map;

    const auto version = keyed(in, "mdcmap-map", 1)[0];
    if (version != std::to_string(kMapFormatVersion))
        throw FormatVersionError("unsupported map format version " + version);
    const std::uint64_t stored_hash = parse_u64(keyed(in, "config_hash", 1)[0], 16);
    const std::size_t config_bytes = parse_u64(keyed(in, "config", 1)[0]);
    map.config_text.resize(config_bytes);
    in.read(map.config_text.data(), static_cast<std::streamsize>(config_bytes));
    if (static_cast<std::size_t>(in.gcount()) != config_bytes || in.get() != '\n')
        throw MalformedFileError("truncated configuration block in map file");
    map.config_hash = fnv1a(map.config_text);
    if (map.config_hash != stored_hash)
        throw ConfigHashError("map configuration hash mismatch: stored " + hex64(stored_hash) + ", computed " +
                              hex64(map.config_hash));
    if (expected_hash && *expected_hash != stored_hash)
        throw ConfigHashError("map was built for configuration " + hex64(stored_hash) + ", expected " +
                              hex64(*expected_hash));

    const auto g = keyed(in, "grid", 8);
    map.grid.beta_lo = parse_double(g[0]);
    map.grid.beta_hi = parse_double(g[1]);
    map.grid.beta_step = parse_double(g[2]);
    map.grid.z_lo = parse_double(g[3]);
    map.grid.z_hi = parse_double(g[4]);
    map.grid.z_step = parse_double(g[5]);
    map.grid.frame.wavelength = parse_double(g[6]);
    map.grid.frame.mode = parse_int(g[7]);
    map.tau = parse_double(keyed(in, "tau", 1)[0]);
    map.trials = parse_u64(keyed(in, "trials", 1)[0]);
    map.seed = parse_u64(keyed(in, "seed", 1)[0]);
    map.winning_trial = parse_u64(keyed(in, "winning_trial", 1)[0]);
    map.winning_seed = parse_u64(keyed(in, "winning_seed", 1)[0]);
    map.total_distortion = parse_double(keyed(in, "total_distortion", 1)[0]);

    const std::size_t ncat = parse_u64(keyed(in, "categories", 1)[0]);
    for (std::size_t k = 0; k < ncat; ++k)
    {
        const auto c = keyed(in, "category", 3);
        Category cat;
        cat.id = parse_u64(c[0]);
        cat.representative = parse_u64(c[1]);
        cat.members = parse_u64(c[2]);
        auto rec = read_constellation(in);
        cat.constellation = std::move(rec.constellation);
        cat.position = rec.position;
        cat.d_min = rec.d_min;
        if (k == 0)
        {
            map.carrier_hz = rec.carrier_hz;
            map.modes = rec.modes;
        }
        map.categories.push_back(std::move(cat));
    }

    const std::size_t nassign = parse_u64(keyed(in, "assignments", 1)[0]);
    std::string line;
    for (std::size_t k = 0; k < nassign; ++k)
    {
        if (!std::getline(in, line))
            throw MalformedFileError("map file ends inside the assignment table");
        const auto w = words_of(line);
        if (w.size() != 6)
            throw MalformedFileError("malformed assignment row: '" + line + "'");
        Assignment a;
        a.index = parse_u64(w[0]);
        a.beta = parse_double(w[1]);
        a.z = parse_double(w[2]);
        a.category = parse_u64(w[3]);
        a.distortion = parse_double(w[4]);
        a.optimal_d_min = parse_double(w[5]);
        if (a.category >= ncat)
            throw MalformedFileError("assignment refers to an unknown category");
        map.assignments.push_back(a);
    }

    if (!std::getline(in, line))
        throw MalformedFileError("map file ends before the quarantine list");
    const auto q = words_of(line);
    if (q.size() < 2 || q[0] != "quarantine" || parse_u64(q[1]) != q.size() - 2)
        throw MalformedFileError("malformed quarantine list");
    for (std::size_t k = 2; k < q.size(); ++k)
        map.quarantined.push_back(parse_u64(q[k]));
    keyed(in, "end", 0);
    return map;
}

void save_map(const ConstellationMap &map, const std::string &path)
{
    write_text_atomic(path, format_map(map));
}

ConstellationMap load_map(const std::string &path, std::optional<std::uint64_t> expected_hash)
{
    return parse_map(read_text(path), expected_hash);
}

void write_assignment_csv(const ConstellationMap &map, const std::string &path)
{
    std::ostringstream out;
    out << "beta,z_m,category,distortion\n";
    for (const auto &a : map.assignments)
        out << format_double(a.beta) << ',' << format_double(a.z) << ',' << a.category << ','
            << format_double(a.distortion) << '\n';
    write_text_atomic(path, out.str());
}

} // namespace mdcmap
