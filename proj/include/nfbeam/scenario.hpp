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

#ifndef NFBEAM_SCENARIO_HPP
#define NFBEAM_SCENARIO_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "nfbeam/channel.hpp"
#include "nfbeam/dma.hpp"
#include "nfbeam/hybrid.hpp"
#include "nfbeam/wmmse.hpp"

namespace nfbeam::scenario
{

struct SolverConfig
{
    wmmse::SolveOptions wmmse;
    hybrid::SolveOptions hybrid;
    dma::SolveOptions dma;
};

// One experiment configuration, fully resolved: every dBm input has already
// been converted to watts at the parse boundary and every optional field
// carries its default. See the README for the JSON schema.
struct Scenario
{
    std::string name = "scenario";
    double carrier_frequency = 28e9; // Hz
    double antenna_length = 0.10;    // m, aperture side L
    double boresight_b = 2.0;        // element radiation exponent
    double p_max = 5.011872336272722e-05;   // W (-13 dBm)
    double noise_power = 3.981071705534969e-15; // W (-114 dBm)
    double digital_spacing_wavelengths = 0.5;
    double dma_column_spacing_wavelengths = 0.2;
    double dma_alpha = 0.6;   // 1/m
    double dma_beta = 827.67; // 1/m
    std::size_t n_rf = 0;     // 0 = one RF chain per row
    std::string architecture = "all"; // fd | hybrid | dma | all
    std::vector<channel::User> users;
    std::vector<std::string> outputs = {"rate_curve", "power_map", "sum_rate_table"};
    SolverConfig solvers;

    double wavelength() const { return channel::speed_of_light / carrier_frequency; }
};

// P[W] = 10^((dBm - 30)/10); the only unit conversion in the codebase.
double dbm_to_watts(double dbm);

// Parses and validates a scenario from JSON text. Malformed JSON, missing
// required fields, or wrongly-typed values raise ParseError naming the field;
// physically impossible values raise ValidationError naming the field.
Scenario parse_scenario(const std::string &text);

// parse_scenario on the contents of a file; IoError if unreadable.
Scenario load_scenario(const std::string &path);

// Deterministic serialization of the resolved scenario (alphabetical keys);
// the basis for run-manifest fingerprints.
std::string canonical_json(const Scenario &sc);

} // namespace nfbeam::scenario

#endif
