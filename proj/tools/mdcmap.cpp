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

#include "CLI11.hpp"

#include <omp.h>

#include <iostream>

using namespace mdcmap;

int main(int argc, char **argv)
{
    CLI::App app{"Map-assisted constellation design for WDM + OAM links"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--workers", workers, "OpenMP threads (0 = runtime default)");
    app.add_option("--out", out, "output directory");

    auto *gain = app.add_subcommand("gain-field", "gain field CSV over the configured grid");

    double beta = 1.0, z = 1.0;
    std::vector<double> power_vector;
    auto *design_cmd = app.add_subcommand("design", "design one constellation");
    design_cmd->add_option("--beta", beta, "radial coordinate in the beta frame")->required();
    design_cmd->add_option("--z", z, "axial distance in m")->required();
    design_cmd->add_option("--power-vector", power_vector, "fixed per-sub-channel power")->delimiter(',');

    auto *map_cmd = app.add_subcommand("map", "build and store the constellation map");

    std::string theorem = "1";
    std::size_t samples = 100;
    double perturbation = 0.05;
    auto *verify = app.add_subcommand("verify", "Monte-Carlo check of the MED loss bounds");
    verify->add_option("--theorem", theorem, "1, 2 or chains")->check(CLI::IsMember({"1", "2", "chains"}));
    verify->add_option("--samples", samples, "random instances");
    verify->add_option("--perturbation", perturbation, "l2 size of the fixed-power perturbation");

    bool baseline = false;
    std::size_t trials = 100000;
    auto *ser = app.add_subcommand("ser", "Monte-Carlo symbol error rate");
    ser->add_option("--beta", beta, "radial coordinate in the beta frame")->required();
    ser->add_option("--z", z, "axial distance in m")->required();
    ser->add_flag("--baseline", baseline, "also simulate the equal-power baseline");
    ser->add_option("--trials", trials, "transmitted symbols");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    try
    {
        RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (seed)
            config.seed = *seed;
        if (workers)
            config.workers = *workers;
        if (out)
            config.out = *out;
        config.finalize();
        if (config.workers > 0)
            omp_set_num_threads(config.workers);

        CommandResult result;
        if (gain->parsed())
            result = cmd_gain_field(config);
        else if (design_cmd->parsed())
            result = cmd_design(config, beta, z,
                                power_vector.empty() ? std::nullopt : std::optional<PowerVector>(power_vector));
        else if (map_cmd->parsed())
            result = cmd_map(config);
        else if (verify->parsed())
            result = cmd_verify(config,
                                theorem == "1"   ? VerifyMode::theorem1
                                : theorem == "2" ? VerifyMode::theorem2
                                                 : VerifyMode::chains,
                                samples, perturbation);
        else
            result = cmd_ser(config, beta, z, baseline, trials);

        result.summary.erase("reports");
        std::cout << result.summary.dump(2) << '\n';
        return result.verified ? exit_ok : exit_verification;
    }
    catch (const std::exception &e)
    {
        std::cerr << "mdcmap: " << e.what() << '\n';
        return exit_code_for(e);
    }
}
