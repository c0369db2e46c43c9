// SPDX-License-Identifier: Apache-2.0
//
// Copyright (c) 2026 nfbeam contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nfbeam/csv_io.hpp"
#include "nfbeam/experiments.hpp"
#include "nfbeam/scenario.hpp"

namespace
{

using nfbeam::experiments::Architecture;

struct CommonArgs
{
    std::string scenario_path;
    std::string out_dir = ".";
    std::string arch_selector; // empty = take the scenario's choice
    std::uint64_t seed = 1;
    bool far_field_baseline = false;
};

void add_common(CLI::App *cmd, CommonArgs &args)
{
    cmd->add_option("scenario", args.scenario_path, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", args.seed,
                    "seed for user placement and the hybrid analog initialization");
    cmd->add_option("--arch", args.arch_selector, "fd | hybrid | dma | all")
        ->check(CLI::IsMember({"fd", "hybrid", "dma", "all"}));
    cmd->add_flag("--far-field-baseline", args.far_field_baseline,
                  "design with planar-wavefront steering vectors, evaluate on the true "
                  "near-field channel");
}

std::vector<Architecture> selected_architectures(const nfbeam::scenario::Scenario &sc,
                                                 const CommonArgs &args)
{
    const std::string selector =
        args.arch_selector.empty() ? sc.architecture : args.arch_selector;
    return nfbeam::experiments::parse_architectures(selector);
}

std::string artifact_path(const CommonArgs &args, const nfbeam::scenario::Scenario &sc,
                          const std::string &stem)
{
    return args.out_dir + "/" + sc.name + "_" + stem;
}

bool wants(const nfbeam::scenario::Scenario &sc, const std::string &artifact)
{
    return std::find(sc.outputs.begin(), sc.outputs.end(), artifact) != sc.outputs.end();
}

std::vector<std::size_t> count_range(std::size_t max_users)
{
    std::vector<std::size_t> counts(max_users);
    std::iota(counts.begin(), counts.end(), std::size_t{1});
    return counts;
}

void print_info(const nfbeam::scenario::Scenario &sc)
{
    using nfbeam::channel::fraunhofer_distance;
    using nfbeam::channel::fresnel_distance;
    using nfbeam::csv::format_double;

    const double lambda = sc.wavelength();
    std::cout << "scenario: " << sc.name << "\n"
              << "carrier_frequency_hz: " << format_double(sc.carrier_frequency) << "\n"
              << "wavelength_m: " << format_double(lambda) << "\n"
              << "p_max_watts: " << format_double(sc.p_max) << "\n"
              << "noise_watts: " << format_double(sc.noise_power) << "\n"
              << "users: " << sc.users.size() << "\n";
    for (Architecture arch : nfbeam::experiments::parse_architectures("all"))
    {
        const nfbeam::channel::ArrayGeometry geo =
            nfbeam::experiments::geometry_for(sc, arch);
        const double d = geo.aperture_diameter();
        std::cout << "[" << nfbeam::experiments::architecture_label(arch) << "] elements="
                  << geo.n_rows << "x" << geo.n_cols << " (" << geo.size() << ")";
        if (arch == Architecture::Hybrid)
            std::cout << " rf_chains=" << geo.n_rf;
        std::cout << " aperture_m=" << format_double(d)
                  << " fresnel_m=" << format_double(fresnel_distance(d, lambda))
                  << " fraunhofer_m=" << format_double(fraunhofer_distance(d, lambda))
                  << "\n";
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"near-field planar-array multi-user precoding experiments"};
    app.require_subcommand(1);

    CommonArgs args;
    std::size_t max_users = 8;

    CLI::App *cmd_run =
        app.add_subcommand("run", "produce every artifact the scenario requests");
    add_common(cmd_run, args);
    cmd_run->add_option("--max-users", max_users, "largest user count for the sum-rate table");

    CLI::App *cmd_sweep = app.add_subcommand("sweep", "sum rate versus number of users");
    add_common(cmd_sweep, args);
    cmd_sweep->add_option("--max-users", max_users, "largest user count");

    CLI::App *cmd_map = app.add_subcommand("map", "normalized received-power rasters");
    add_common(cmd_map, args);

    CLI::App *cmd_info =
        app.add_subcommand("info", "print derived quantities for a scenario");
    cmd_info->add_option("scenario", args.scenario_path, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try
    {
        namespace ex = nfbeam::experiments;
        const nfbeam::scenario::Scenario sc =
            nfbeam::scenario::load_scenario(args.scenario_path);

        if (cmd_info->parsed())
        {
            print_info(sc);
            return 0;
        }

        const std::vector<Architecture> archs = selected_architectures(sc, args);
        std::filesystem::create_directories(args.out_dir);
        std::vector<std::string> artifacts;

        const auto emit_curves = [&]() {
            for (Architecture arch : archs)
            {
                const ex::RateCurve curve =
                    ex::run_rate_curve(sc, arch, args.far_field_baseline, args.seed);
                const std::string path =
                    artifact_path(args, sc, "rate_curve_" + curve.architecture + ".csv");
                nfbeam::csv::emit_csv(curve, path);
                artifacts.push_back(path);
            }
        };
        const auto emit_maps = [&]() {
            for (Architecture arch : archs)
            {
                const std::vector<ex::PowerMap> maps =
                    ex::run_power_map(sc, arch, args.far_field_baseline, args.seed);
                const std::string path = artifact_path(
                    args, sc,
                    "power_map_" + ex::architecture_label(arch, args.far_field_baseline) +
                        ".csv");
                nfbeam::csv::emit_csv(maps, path);
                artifacts.push_back(path);
            }
        };
        const auto emit_sweep = [&]() {
            const ex::SweepTable table = ex::run_sum_rate_sweep(
                sc, archs, args.far_field_baseline, args.seed, count_range(max_users));
            const std::string path = artifact_path(args, sc, "sum_rate_table.csv");
            nfbeam::csv::emit_csv(table, path);
            artifacts.push_back(path);
        };

        if (cmd_run->parsed())
        {
            if (wants(sc, "rate_curve"))
                emit_curves();
            if (wants(sc, "power_map"))
                emit_maps();
            if (wants(sc, "sum_rate_table"))
                emit_sweep();
        }
        else if (cmd_sweep->parsed())
            emit_sweep();
        else if (cmd_map->parsed())
            emit_maps();

        // The manifest records basenames so a run is byte-reproducible no
        // matter where its artifacts land.
        std::vector<std::string> names;
        names.reserve(artifacts.size());
        for (const std::string &path : artifacts)
            names.push_back(std::filesystem::path(path).filename().string());
        const std::string manifest = artifact_path(args, sc, "manifest.json");
        nfbeam::csv::emit_report(sc, args.seed, names, manifest);
        for (const std::string &path : artifacts)
            std::cout << "wrote " << path << "\n";
        std::cout << "wrote " << manifest << "\n";
        return 0;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
