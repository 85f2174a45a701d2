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

#include "mdcmap/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

using namespace mdcmap;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json read_json(const fs::path &p) { return nlohmann::json::parse(slurp(p)); }

std::size_t line_count(const fs::path &p)
{
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        ++n;
    return n;
}

struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string &name) : path(fs::temp_directory_path() / ("mdcmap_test_" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// One grid position at beta = 1, z = 1 m.
RunConfig small_config(const fs::path &out, const std::string &extra = "")
{
    return parse_run_config("symbol_count = 4\nrestarts = 2\n"
                            "beta_lo = 1\nbeta_hi = 1\nbeta_step = 0.1\nz_lo = 1\nz_hi = 1\nz_step = 0.5\n" +
                            extra + "out = " + out.string() + "\n");
}

} // namespace

TEST_CASE("config parsing")
{
    const auto c = parse_run_config("# desk profile\n"
                                    "carriers_ghz = 60, 61\n"
                                    "modes = 0,2\n"
                                    "symbol_count = 16\n"
                                    "\n"
                                    "  tau = 0.2  \n"
                                    "seed = 9\n");
    CHECK(c.system.carrier_hz == std::vector<double>{60e9, 61e9});
    CHECK(c.system.modes == std::vector<int>{0, 2});
    CHECK(c.system.symbol_count == 16);
    CHECK(c.tau == 0.2);
    CHECK(c.seed == 9);
    CHECK(c.design.seed == 9);
    CHECK(c.design.restarts == 10);
    CHECK(c.design.max_iterations == 200);
    CHECK(c.design.tolerance == 1e-6);
    CHECK(c.grid.frame.mode == 1);

    const RunConfig d = parse_run_config("");
    CHECK(d.system.symbol_count == 64);
    CHECK(d.grid.beta_count() == 21);
    CHECK(d.grid.z_count() == 15);
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(parse_run_config("colour = red\n"), ValidationError);
    CHECK_THROWS_AS(parse_run_config("symbol_count\n"), ValidationError);
    CHECK_THROWS_AS(parse_run_config("symbol_count = 4.5\n"), ValidationError);
    CHECK_THROWS_AS(parse_run_config("tau = abc\n"), ValidationError);
    CHECK_THROWS_AS(parse_run_config("tau = -1\n"), ValidationError);
    CHECK_THROWS_AS(parse_run_config("carriers_ghz = 61, 60\n"), ValidationError);
    CHECK_THROWS_AS(parse_run_config("frame_carrier = 5\n"), ValidationError);
    CHECK_THROWS_AS(parse_run_config("z_lo = 0.01\n"), ValidationError);
    CHECK_THROWS_AS(parse_run_config("workers = -2\n"), ValidationError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.cfg"), IoError);
    try
    {
        parse_run_config("seed = 1\nbogus = 2\n");
        FAIL("no error");
    }
    catch (const ValidationError &e)
    {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
}

TEST_CASE("canonical config and hash")
{
    const auto a = parse_run_config("seed = 3\ntau = 0.1\nworkers = 4\nout = /tmp/a\n");
    const auto b = parse_run_config("tau = 0.1\n# reordered\nseed = 3\n");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() == fnv1a(a.canonical()));
    CHECK(a.canonical().find("workers") == std::string::npos);
    CHECK(a.canonical().find("out") == std::string::npos);
    CHECK(parse_run_config("seed = 4\ntau = 0.1\n").hash() != a.hash());

    // keys come out sorted, and the canonical text parses back to itself
    const auto text = a.canonical();
    std::istringstream in(text);
    std::string prev, line;
    while (std::getline(in, line))
    {
        CHECK(prev < line);
        prev = line;
    }
    CHECK(parse_run_config(text).canonical() == text);
}

TEST_CASE("gain-field command")
{
    TempDir dir("gain");
    auto c = parse_run_config("carriers_ghz = 60\nbeta_lo = 0.5\nbeta_hi = 1\nbeta_step = 0.5\n"
                              "z_lo = 1\nz_hi = 2\nz_step = 1\nout = " +
                              dir.path.string() + "\n");
    const auto r = cmd_gain_field(c);
    CHECK(r.summary["schema_version"] == kReportSchemaVersion);
    CHECK(r.summary["rows"] == 8);
    CHECK(line_count(dir.path / "gain_field.csv") == 9);
}

TEST_CASE("design command")
{
    TempDir dir("design");
    const auto c = small_config(dir.path, "symbol_count = 2\n");
    const auto r = cmd_design(c, 1.0, 1.0);
    const auto j = read_json(dir.path / "design.json");
    CHECK(j == r.summary);
    CHECK(j["schema_version"] == 1);
    CHECK(j["config_hash"] == hex64(c.hash()));
    CHECK(j["status"] == "converged");
    CHECK(j["power_mode"] == "total");

    // antipodal on the strongest sub-channel is feasible
    double hmax = 0.0;
    for (double a : j["position"]["amplitudes"])
        hmax = std::max(hmax, a);
    CHECK(j["d_min"].get<double>() >= 2.0 * hmax * (1.0 - 1e-3));

    const std::string first = slurp(dir.path / "constellation.txt");
    cmd_design(c, 1.0, 1.0);
    CHECK(slurp(dir.path / "constellation.txt") == first);
    const auto back = load_constellation((dir.path / "constellation.txt").string());
    CHECK(back.constellation.symbol_count() == 2);

    const auto fixed = cmd_design(small_config(dir.path), 1.0, 1.0, PowerVector{0.25, 0.25, 0.25, 0.25});
    CHECK(fixed.summary["power_mode"] == "fixed");
    for (double p : fixed.summary["subchannel_power"])
        CHECK(p <= 0.25 + 1e-9);
    CHECK_THROWS_AS(cmd_design(small_config(dir.path), 1.0, 1.0, PowerVector{1.0}), ValidationError);
}

TEST_CASE("map command")
{
    TempDir dir("map");
    const auto c = small_config(dir.path, "trials = 3\n");
    const auto r = cmd_map(c);
    CHECK(r.summary["positions"] == 1);
    CHECK(r.summary["categories"] == 1);
    CHECK(r.summary["quarantined"].empty());
    const auto map = load_map((dir.path / "map.txt").string(), c.hash());
    CHECK(map.categories.size() == 1);
    CHECK(line_count(dir.path / "assignments.csv") == 2);
    const std::string first = slurp(dir.path / "map.txt");
    cmd_map(c);
    CHECK(slurp(dir.path / "map.txt") == first);
    CHECK(read_json(dir.path / "map.json")["category_list"].size() == 1);
}

TEST_CASE("verify command")
{
    TempDir dir("verify");
    const auto c = small_config(dir.path);
    // Both positions of the single-point grid coincide.
    const auto t1 = cmd_verify(c, VerifyMode::theorem1, 1);
    CHECK(t1.verified);
    CHECK(t1.summary["holds_count"] == 1);
    CHECK(t1.summary["worst_margin"].get<double>() == 0.0);
    CHECK(fs::exists(dir.path / "verify_theorem1.json"));

    const auto t2 = cmd_verify(c, VerifyMode::theorem2, 1, 0.0);
    CHECK(t2.verified);
    const auto &rep = t2.summary["reports"][0];
    CHECK(rep["bound"]["rhs"].get<double>() == 0.0);
    CHECK(rep["bound"]["lhs"].get<double>() <= 1e-9);

    const auto ch = cmd_verify(c, VerifyMode::chains, 2);
    CHECK(ch.summary["samples"] == 4);
    CHECK(ch.summary["chains_overall_count"] == 4);
    CHECK(fs::exists(dir.path / "verify_chains.json"));

    CHECK_THROWS_AS(cmd_verify(c, VerifyMode::theorem1, 0), ValidationError);
    CHECK_THROWS_AS(cmd_verify(c, VerifyMode::theorem2, 1, -0.1), ValidationError);
}

TEST_CASE("ser command")
{
    TempDir dir("ser");
    // Pick N0 so the designed constellation sits at a few percent SER.
    auto c = small_config(dir.path, "symbol_count = 16\n");
    const double d = cmd_design(c, 1.0, 1.0).summary["d_min"];
    const double n0 = 2.0 * std::pow(d / 4.0, 2);
    auto quiet = small_config(dir.path, "symbol_count = 16\nnoise_power = " + format_double(n0) + "\n");
    auto loud = small_config(dir.path, "symbol_count = 16\nnoise_power = " + format_double(100.0 * n0) + "\n");
    const auto a = cmd_ser(quiet, 1.0, 1.0, true, 20000);
    const auto b = cmd_ser(loud, 1.0, 1.0, false, 20000);
    CHECK(a.summary["designed"]["trials"] == 20000);
    CHECK(a.summary.contains("baseline"));
    CHECK(!b.summary.contains("baseline"));
    CHECK(b.summary["designed"]["ser"].get<double>() > a.summary["designed"]["ser"].get<double>());
    CHECK(read_json(dir.path / "ser.json") == b.summary);
    CHECK(cmd_ser(quiet, 1.0, 1.0, false, 20000).summary["designed"] == a.summary["designed"]);
}

TEST_CASE("exit codes")
{
    CHECK(exit_code_for(ValidationError("x")) == exit_validation);
    CHECK(exit_code_for(DomainError("x")) == exit_validation);
    CHECK(exit_code_for(IoError("x")) == exit_io);
    CHECK(exit_code_for(MalformedFileError("x")) == exit_io);
    CHECK(exit_code_for(ConfigHashError("x")) == exit_io);
    CHECK(exit_code_for(std::runtime_error("x")) == 1);
}

#ifdef MDCMAP_CLI
TEST_CASE("command-line binary")
{
    TempDir dir("binary");
    const std::string cli = MDCMAP_CLI;
    const std::string cfg = (dir.path / "run.cfg").string();
    std::ofstream(cfg) << "symbol_count = 4\nrestarts = 2\nbeta_lo = 1\nbeta_hi = 1.1\nz_lo = 1\nz_hi = 1\n";
    auto run = [&](const std::string &args) {
        const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    const std::string base = "--config " + cfg + " --out " + dir.path.string();
    CHECK(run(base + " design --beta 1 --z 1") == exit_ok);
    CHECK(fs::exists(dir.path / "design.json"));
    CHECK(run(base + " verify --theorem 1 --samples 1") == exit_ok);
    CHECK(run(base + " design --beta 1") == exit_validation);
    CHECK(run(base + " verify --theorem 3") == exit_validation);
    CHECK(run(base + " design --beta 1 --z 1 --power-vector 1,1") == exit_validation);
    CHECK(run("--config /nonexistent/run.cfg design --beta 1 --z 1") == exit_io);
    std::ofstream(cfg) << "symbol_count = banana\n";
    CHECK(run(base + " map") == exit_validation);
}
#endif
