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

#ifndef NFBEAM_EXPERIMENTS_HPP
#define NFBEAM_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nfbeam/scenario.hpp"

namespace nfbeam::experiments
{

using channel::ArrayGeometry;
using numerics::ComplexVector;
using scenario::Scenario;

enum class Architecture
{
    FullyDigital,
    Hybrid,
    Dma
};

// "fd" / "hybrid" / "dma"; with a "_far_field" suffix for baseline designs.
std::string architecture_label(Architecture arch, bool far_field_baseline = false);

// The architectures an `--arch`-style selector names ("all" expands).
std::vector<Architecture> parse_architectures(const std::string &selector);

// Lattice the scenario implies for the given architecture: rows always at the
// digital spacing; fully-digital and hybrid arrays are square, the
// metasurface densifies its columns to the DMA spacing. Element counts are
// floor(L / spacing).
ArrayGeometry geometry_for(const Scenario &sc, Architecture arch);

channel::DmaParams dma_params_for(const Scenario &sc, const ArrayGeometry &geometry);

// A designed transmitter: the per-user effective vectors on its geometry.
// Far-field-baseline designs are produced by the same solvers fed with
// planar-wavefront steering vectors; they are always *evaluated* on the true
// near-field channel.
struct PrecoderDesign
{
    Architecture architecture = Architecture::FullyDigital;
    bool far_field_baseline = false;
    ArrayGeometry geometry;
    std::vector<ComplexVector> w_tilde;
};

// Designs a precoder for the scenario's focal users. The seed drives the
// hybrid solver's analog initialization; the other solvers are deterministic.
PrecoderDesign design_precoder(const Scenario &sc, Architecture arch, bool far_field_baseline,
                               std::uint64_t seed);

// Rates of the scenario's focal users on the true near-field channel.
std::vector<double> user_rates(const Scenario &sc, const PrecoderDesign &design);

// Per-stream rates at a probe position under a fixed design: the probe user
// receives stream m against the interference of the other streams.
std::vector<double> probe_rates(const Scenario &sc, const PrecoderDesign &design,
                                const channel::Point3 &probe);

struct RateCurve
{
    std::string architecture; // label, self-describing
    std::vector<double> axis; // probe z, meters
    arma::mat rates;          // axis.size() x M, bits/s/Hz
};

// 200 probe distances log-spaced between the radiating-near-field inner
// boundary and twice the far-field boundary of the design geometry.
std::vector<double> default_probe_axis(const Scenario &sc, const ArrayGeometry &geometry);

// Fixed-precoder boresight scan: the evaluation user is placed at each
// (0, 0, z) in turn. Empty probe list = the default axis.
RateCurve run_rate_curve(const Scenario &sc, Architecture arch, bool far_field_baseline,
                         std::uint64_t seed, std::vector<double> probe_z = {});

struct PowerMap
{
    std::string architecture;
    std::size_t user_index = 0;
    std::vector<double> x; // meters
    std::vector<double> z; // meters
    arma::mat values;      // z.size() x x.size(), |a(p)ᴴw̃|²/‖a(p)‖²
};

// One normalized received-power raster per user: 101x101 cells over
// x ∈ [-d_F/2, d_F/2], z ∈ (0, d_F].
std::vector<PowerMap> run_power_map(const Scenario &sc, Architecture arch,
                                    bool far_field_baseline, std::uint64_t seed);

// Deterministic random drop of `count` users in the xz-plane wedge
// z ∈ [1.2·d_N, 0.9·d_F], |x| ≤ z·tan(60°), on the fully-digital geometry's
// boundaries; drops are cumulative in count (prefixes agree).
std::vector<channel::User> annulus_users(const Scenario &sc, std::uint64_t seed,
                                         std::size_t count);

struct SweepTable
{
    std::vector<std::size_t> user_counts;
    std::vector<std::string> architectures; // column labels
    arma::mat sum_rates;                    // counts x architectures, bits/s/Hz
};

// Sum rate versus number of users, adding users cumulatively from the seeded
// drop above; every architecture sees the same user set.
SweepTable run_sum_rate_sweep(const Scenario &sc, const std::vector<Architecture> &archs,
                              bool far_field_baseline, std::uint64_t seed,
                              const std::vector<std::size_t> &user_counts);

} // namespace nfbeam::experiments

#endif
