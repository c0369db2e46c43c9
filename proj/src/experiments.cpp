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

#include "nfbeam/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nfbeam/rng.hpp"

namespace nfbeam::experiments
{

namespace
{

using channel::NearFieldChannel;
using channel::User;

NearFieldChannel channel_for(const Scenario &sc, const std::vector<User> &users,
                             const ArrayGeometry &geometry, bool far_field)
{
    if (far_field)
        return channel::build_far_field_channel(users, geometry, sc.wavelength(),
                                                sc.boresight_b, sc.noise_power);
    return channel::build_channel(users, geometry, sc.wavelength(), sc.boresight_b,
                                  sc.noise_power);
}

std::vector<ComplexVector> design_on(const Scenario &sc, Architecture arch,
                                     const ArrayGeometry &geometry,
                                     const NearFieldChannel &ch,
                                     const std::vector<User> &users, std::uint64_t seed)
{
    switch (arch)
    {
    case Architecture::FullyDigital:
        return wmmse::solve_fully_digital(ch, sc.p_max, sc.solvers.wmmse).w_tilde;
    case Architecture::Hybrid:
    {
        hybrid::SolveOptions opts = sc.solvers.hybrid;
        opts.inner_wmmse = sc.solvers.wmmse;
        opts.seed = seed;
        return hybrid::solve_hybrid(ch, geometry, sc.p_max, opts).effective();
    }
    case Architecture::Dma:
    {
        const channel::DmaParams params = dma_params_for(sc, geometry);
        return dma::solve_dma(ch, users, geometry, params, sc.p_max, sc.solvers.dma)
            .effective();
    }
    }
    throw DomainError("design_on: unknown architecture");
}

} // namespace

std::string architecture_label(Architecture arch, bool far_field_baseline)
{
    std::string label;
    switch (arch)
    {
    case Architecture::FullyDigital:
        label = "fd";
        break;
    case Architecture::Hybrid:
        label = "hybrid";
        break;
    case Architecture::Dma:
        label = "dma";
        break;
    }
    if (far_field_baseline)
        label += "_far_field";
    return label;
}

std::vector<Architecture> parse_architectures(const std::string &selector)
{
    if (selector == "fd")
        return {Architecture::FullyDigital};
    if (selector == "hybrid")
        return {Architecture::Hybrid};
    if (selector == "dma")
        return {Architecture::Dma};
    if (selector == "all")
        return {Architecture::FullyDigital, Architecture::Hybrid, Architecture::Dma};
    throw DomainError("unknown architecture selector '" + selector +
                      "' (expected fd, hybrid, dma, or all)");
}

ArrayGeometry geometry_for(const Scenario &sc, Architecture arch)
{
    const double lambda = sc.wavelength();
    const double row_spacing = sc.digital_spacing_wavelengths * lambda;
    const auto rows = static_cast<std::size_t>(std::floor(sc.antenna_length / row_spacing));
    switch (arch)
    {
    case Architecture::FullyDigital:
        return channel::make_upa(rows, rows, row_spacing, row_spacing,
                                 channel::ArrayKind::FullyDigital);
    case Architecture::Hybrid:
        return channel::make_upa(rows, rows, row_spacing, row_spacing,
                                 channel::ArrayKind::Hybrid,
                                 sc.n_rf == 0 ? rows : sc.n_rf);
    case Architecture::Dma:
    {
        const double col_spacing = sc.dma_column_spacing_wavelengths * lambda;
        const auto cols = static_cast<std::size_t>(std::floor(sc.antenna_length / col_spacing));
        return channel::make_upa(rows, cols, row_spacing, col_spacing,
                                 channel::ArrayKind::Dma);
    }
    }
    throw DomainError("geometry_for: unknown architecture");
}

channel::DmaParams dma_params_for(const Scenario &sc, const ArrayGeometry &geometry)
{
    return channel::make_dma_params(geometry, sc.dma_alpha, sc.dma_beta);
}

PrecoderDesign design_precoder(const Scenario &sc, Architecture arch, bool far_field_baseline,
                               std::uint64_t seed)
{
    PrecoderDesign design;
    design.architecture = arch;
    design.far_field_baseline = far_field_baseline;
    design.geometry = geometry_for(sc, arch);
    const NearFieldChannel ch = channel_for(sc, sc.users, design.geometry, far_field_baseline);
    design.w_tilde = design_on(sc, arch, design.geometry, ch, sc.users, seed);
    return design;
}

std::vector<double> user_rates(const Scenario &sc, const PrecoderDesign &design)
{
    const NearFieldChannel truth = channel_for(sc, sc.users, design.geometry, false);
    return wmmse::rate_per_user(truth, design.w_tilde);
}

std::vector<double> probe_rates(const Scenario &sc, const PrecoderDesign &design,
                                const channel::Point3 &probe)
{
    const ComplexVector a = channel::steering_vector(User{probe}, design.geometry,
                                                     sc.wavelength(), sc.boresight_b);
    const std::size_t m_users = design.w_tilde.size();
    std::vector<double> received(m_users);
    double total = 0.0;
    for (std::size_t j = 0; j < m_users; ++j)
    {
        received[j] = std::norm(arma::cdot(a, design.w_tilde[j]));
        total += received[j];
    }
    std::vector<double> rates(m_users);
    for (std::size_t m = 0; m < m_users; ++m)
        rates[m] =
            std::log2(1.0 + received[m] / (total - received[m] + sc.noise_power));
    return rates;
}

std::vector<double> default_probe_axis(const Scenario &sc, const ArrayGeometry &geometry)
{
    const double lambda = sc.wavelength();
    const double d = geometry.aperture_diameter();
    const double z_lo = channel::fresnel_distance(d, lambda);
    const double z_hi = 2.0 * channel::fraunhofer_distance(d, lambda);
    const std::size_t points = 200;
    std::vector<double> axis(points);
    for (std::size_t k = 0; k < points; ++k)
        axis[k] = z_lo * std::pow(z_hi / z_lo, static_cast<double>(k) /
                                                   static_cast<double>(points - 1));
    return axis;
}

RateCurve run_rate_curve(const Scenario &sc, Architecture arch, bool far_field_baseline,
                         std::uint64_t seed, std::vector<double> probe_z)
{
    const PrecoderDesign design = design_precoder(sc, arch, far_field_baseline, seed);
    RateCurve curve;
    curve.architecture = architecture_label(arch, far_field_baseline);
    curve.axis = probe_z.empty() ? default_probe_axis(sc, design.geometry)
                                 : std::move(probe_z);
    curve.rates.set_size(curve.axis.size(), design.w_tilde.size());
    for (std::size_t k = 0; k < curve.axis.size(); ++k)
    {
        const std::vector<double> r =
            probe_rates(sc, design, channel::Point3{0.0, 0.0, curve.axis[k]});
        for (std::size_t m = 0; m < r.size(); ++m)
            curve.rates(k, m) = r[m];
    }
    return curve;
}

std::vector<PowerMap> run_power_map(const Scenario &sc, Architecture arch,
                                    bool far_field_baseline, std::uint64_t seed)
{
    const PrecoderDesign design = design_precoder(sc, arch, far_field_baseline, seed);
    const double lambda = sc.wavelength();
    const double d_f =
        channel::fraunhofer_distance(design.geometry.aperture_diameter(), lambda);
    const std::size_t cells = 101;

    std::vector<double> xs(cells), zs(cells);
    for (std::size_t i = 0; i < cells; ++i)
        xs[i] = -0.5 * d_f + d_f * static_cast<double>(i) / static_cast<double>(cells - 1);
    for (std::size_t k = 0; k < cells; ++k)
        zs[k] = d_f * static_cast<double>(k + 1) / static_cast<double>(cells);

    const std::size_t m_users = design.w_tilde.size();
    std::vector<PowerMap> maps(m_users);
    for (std::size_t m = 0; m < m_users; ++m)
    {
        maps[m].architecture = architecture_label(arch, far_field_baseline);
        maps[m].user_index = m;
        maps[m].x = xs;
        maps[m].z = zs;
        maps[m].values.set_size(cells, cells);
    }

    for (std::size_t k = 0; k < cells; ++k)
        for (std::size_t i = 0; i < cells; ++i)
        {
            const ComplexVector a =
                channel::steering_vector(User{{xs[i], 0.0, zs[k]}}, design.geometry, lambda,
                                         sc.boresight_b);
            const double gain = std::pow(arma::norm(a), 2);
            for (std::size_t m = 0; m < m_users; ++m)
                maps[m].values(k, i) =
                    gain > 0.0 ? std::norm(arma::cdot(a, design.w_tilde[m])) / gain : 0.0;
        }
    return maps;
}

std::vector<channel::User> annulus_users(const Scenario &sc, std::uint64_t seed,
                                         std::size_t count)
{
    // Placement boundaries come from the fully-digital lattice so that every
    // architecture sweeps exactly the same user set.
    const ArrayGeometry geo = geometry_for(sc, Architecture::FullyDigital);
    const double lambda = sc.wavelength();
    const double d = geo.aperture_diameter();
    const double z_lo = 1.2 * channel::fresnel_distance(d, lambda);
    const double z_hi = 0.9 * channel::fraunhofer_distance(d, lambda);
    const double tan60 = std::sqrt(3.0);

    Rng rng(seed);
    std::vector<User> users;
    users.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
    {
        User u;
        u.position.z = rng.uniform(z_lo, z_hi);
        u.position.x = rng.uniform(-u.position.z * tan60, u.position.z * tan60);
        u.position.y = 0.0;
        users.push_back(u);
    }
    return users;
}

SweepTable run_sum_rate_sweep(const Scenario &sc, const std::vector<Architecture> &archs,
                              bool far_field_baseline, std::uint64_t seed,
                              const std::vector<std::size_t> &user_counts)
{
    if (archs.empty())
        throw DomainError("run_sum_rate_sweep: no architectures selected");
    for (std::size_t count : user_counts)
        if (count == 0)
            throw DomainError("run_sum_rate_sweep: user counts must be positive");

    SweepTable table;
    table.user_counts = user_counts;
    for (Architecture arch : archs)
        table.architectures.push_back(architecture_label(arch, far_field_baseline));
    table.sum_rates.set_size(user_counts.size(), archs.size());
    if (user_counts.empty())
        return table;

    const std::size_t max_count = *std::max_element(user_counts.begin(), user_counts.end());
    const std::vector<User> pool = annulus_users(sc, seed, max_count);

    for (std::size_t ci = 0; ci < user_counts.size(); ++ci)
    {
        Scenario staged = sc;
        staged.users.assign(pool.begin(),
                            pool.begin() + static_cast<std::ptrdiff_t>(user_counts[ci]));
        for (std::size_t ai = 0; ai < archs.size(); ++ai)
        {
            const PrecoderDesign design =
                design_precoder(staged, archs[ai], far_field_baseline, seed);
            double total = 0.0;
            for (double r : user_rates(staged, design))
                total += r;
            table.sum_rates(ci, ai) = total;
        }
    }
    return table;
}

} // namespace nfbeam::experiments
