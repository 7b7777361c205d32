/*
 * Copyright 2026 The spinflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spinflow/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spinflow: stochastic LLG / Schrodinger map simulator"};
    app.set_version_flag("--version", std::string(spinflow::kVersion));
    app.require_subcommand(1);

    spinflow::CliOptions opt;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    const char* descriptions[][2] = {{"simulate", "integrate one trajectory and write its observable series"},
                                     {"stationary", "estimate the stationary ensemble at one nu"},
                                     {"sweep", "stationary ensembles along a decreasing nu ladder"},
                                     {"analyze", "statistics report of a stored ensemble"},
                                     {"bcf", "lift stored fields to curves and check the norm dictionary"}};
    for (const auto& d : descriptions) {
        auto* sub = app.add_subcommand(d[0], d[1]);
        sub->add_option("--config", opt.config_path, "key = value config file (or a previous manifest.json)")->required();
        sub->add_option("--out", opt.out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "override sim.seed");
        sub->add_option("--threads", threads, "worker threads (default: SPINFLOW_THREADS or 1)");
        sub->add_flag("--quiet", opt.quiet, "suppress progress output");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : spinflow::kExitConfig;
    }

    const auto* chosen = app.get_subcommands().front();
    if (chosen->count("--seed") > 0) opt.seed = seed;
    if (chosen->count("--threads") > 0) opt.threads = threads;
    return spinflow::run_command(chosen->get_name(), opt);
}
