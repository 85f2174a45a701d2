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

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace mdcmap {

namespace {

std::vector<std::string> split_words(const std::string &line)
{
    std::istringstream ss(line);
    std::vector<std::string> words;
    std::string w;
    while (ss >> w)
        words.push_back(w);
    return words;
}

std::vector<std::string> expect_line(std::istream &in, const std::string &key, std::size_t values)
{
    std::string line;
    if (!std::getline(in, line))
        throw MalformedFileError("unexpected end of file, expected '" + key + "'");
    auto words = split_words(line);
    if (words.empty() || words[0] != key)
        throw MalformedFileError("expected '" + key + "', got '" + line + "'");
    words.erase(words.begin());
    if (values != static_cast<std::size_t>(-1) && words.size() != values)
        throw MalformedFileError("wrong number of values after '" + key + "'");
    return words;
}

std::size_t parse_count(const std::string &token)
{
    const double v = parse_double(token);
    if (!(v >= 0.0) || v != std::floor(v))
        throw MalformedFileError("not a count: '" + token + "'");
    return static_cast<std::size_t>(v);
}

} // namespace

void write_constellation(std::ostream &out, const ConstellationRecord &record)
{
    const auto &c = record.constellation;
    out << "mdcmap-constellation " << kConstellationFormatVersion << '\n';
    out << "symbols " << c.symbol_count() << '\n';
    out << "subchannels " << c.subchannel_count() << '\n';
    out << "carriers_hz";
    for (double f : record.carrier_hz)
        out << ' ' << format_double(f);
    out << '\n' << "modes";
    for (int l : record.modes)
        out << ' ' << l;
    out << '\n'
        << "position " << format_double(record.position.r) << ' ' << format_double(record.position.z) << ' '
        << (record.position.beta ? format_double(*record.position.beta) : std::string("none")) << '\n';
    out << "d_min " << format_double(record.d_min) << '\n';
    out << "points\n";
    for (std::size_t m = 0; m < c.symbol_count(); ++m)
    {
        for (std::size_t u = 0; u < c.subchannel_count(); ++u)
        {
            const auto p = c.point(m, u);
            out << (u ? " " : "") << format_double(p.real()) << ' ' << format_double(p.imag());
        }
        out << '\n';
    }
    out << "end\n";
}

ConstellationRecord read_constellation(std::istream &in)
{
    const auto header = expect_line(in, "mdcmap-constellation", 1);
    if (header[0] != std::to_string(kConstellationFormatVersion))
        throw FormatVersionError("unsupported constellation format version " + header[0]);
    const std::size_t M = parse_count(expect_line(in, "symbols", 1)[0]);
    const std::size_t U = parse_count(expect_line(in, "subchannels", 1)[0]);
    if (M < 1 || U < 1)
        throw MalformedFileError("constellation must have symbols and sub-channels");

    ConstellationRecord record;
    for (const auto &w : expect_line(in, "carriers_hz", static_cast<std::size_t>(-1)))
        record.carrier_hz.push_back(parse_double(w));
    for (const auto &w : expect_line(in, "modes", static_cast<std::size_t>(-1)))
    {
        const double v = parse_double(w);
        if (v != std::floor(v))
            throw MalformedFileError("mode is not an integer: " + w);
        record.modes.push_back(static_cast<int>(v));
    }
    const auto pos = expect_line(in, "position", 3);
    record.position.r = parse_double(pos[0]);
    record.position.z = parse_double(pos[1]);
    if (pos[2] != "none")
        record.position.beta = parse_double(pos[2]);
    record.d_min = parse_double(expect_line(in, "d_min", 1)[0]);
    expect_line(in, "points", 0);

    Constellation c(M, U);
    std::string line;
    for (std::size_t m = 0; m < M; ++m)
    {
        if (!std::getline(in, line))
            throw MalformedFileError("truncated point list");
        const auto words = split_words(line);
        if (words.size() != 2 * U)
            throw MalformedFileError("point line " + std::to_string(m) + " has the wrong length");
        for (std::size_t u = 0; u < U; ++u)
            c.set_point(m, u, {parse_double(words[2 * u]), parse_double(words[2 * u + 1])});
    }
    expect_line(in, "end", 0);
    record.constellation = std::move(c);
    return record;
}

void save_constellation(const std::string &path, const ConstellationRecord &record)
{
    std::ostringstream ss;
    write_constellation(ss, record);
    write_text_atomic(path, ss.str());
}

ConstellationRecord load_constellation(const std::string &path)
{
    std::istringstream ss(read_text(path));
    return read_constellation(ss);
}

} // namespace mdcmap
