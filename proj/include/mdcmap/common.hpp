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
#ifndef MDCMAP_COMMON_HPP
#define MDCMAP_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mdcmap {

// Argument outside the mathematical domain of an operation (z below the guard, beta out of range, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Arguments supplied in the wrong order for an ordered ratio (lambda_i <= lambda_j, |l1| <= |l2|).
class ArgumentOrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid configuration or inconsistent inputs.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Map / constellation file errors. Each kind is distinguishable by type.
class MalformedFileError : public IoError {
public:
    using IoError::IoError;
};
class FormatVersionError : public IoError {
public:
    using IoError::IoError;
};
class ConfigHashError : public IoError {
public:
    using IoError::IoError;
};

// Selects the OpenMP kernel or its serial reference. Both produce bit-identical results.
enum class Execution { serial, parallel };

// splitmix64 finalizer; used to derive independent stream seeds from (seed, index).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a(std::string_view text, std::uint64_t hash = 0xcbf29ce484222325ULL)
{
    for (unsigned char c : text)
    {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value);

// Decimal text with 17 significant digits (round-trips every double).
std::string format_double(double value);

// Strict parse of a full token; throws MalformedFileError on trailing junk.
double parse_double(std::string_view token);

// Writes to `path + ".tmp"` and renames over `path`. Throws IoError with the path on failure.
void write_text_atomic(const std::string &path, std::string_view content);

std::string read_text(const std::string &path);

} // namespace mdcmap

#endif
