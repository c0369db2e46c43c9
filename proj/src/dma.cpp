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

#include "nfbeam/dma.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "nfbeam/wmmse.hpp"

namespace nfbeam::dma
{

namespace
{

void check_geometry(const ArrayGeometry &geometry, const DmaParams &params)
{
    if (geometry.kind != channel::ArrayKind::Dma)
        throw DomainError("dma: geometry is not a metasurface array");
    if (params.rho.n_rows != geometry.n_rows || params.rho.n_cols != geometry.n_cols)
        throw DomainError("dma: waveguide distance table is " + std::to_string(params.rho.n_rows) +
                          "x" + std::to_string(params.rho.n_cols) + ", expected " +
                          std::to_string(geometry.n_rows) + "x" + std::to_string(geometry.n_cols));
}

ComplexVector weights_from_phases(const arma::mat &phases, bool phase_only)
{
    const std::size_t n_rows = phases.n_rows;
    const std::size_t n_cols = phases.n_cols;
    ComplexVector q_bar(n_rows * n_cols);
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t l = 0; l < n_cols; ++l)
        {
            const Complex unit = std::polar(1.0, phases(i, l));
            q_bar(i * n_cols + l) = phase_only ? unit : Complex(0.5 * (Complex(0.0, 1.0) + unit));
        }
    return q_bar;
}

double sweep_objective(const ComplexMatrix &t, double noise_power)
{
    const std::size_t m_users = t.n_rows;
    double total = 0.0;
    for (std::size_t m = 0; m < m_users; ++m)
    {
        const double direct = std::norm(t(m, m));
        double interference = 0.0;
        for (std::size_t j = 0; j < m_users; ++j)
            if (j != m)
                interference += std::norm(t(j, m));
        total += std::log2(1.0 + direct / (interference + noise_power));
    }
    return total;
}

// Shared 1-D kernel: t_current(j, m) = z̄_{j,m}ᴴ·q̄ for the weights as they
// stand. The sweep in solve_dma maintains these products incrementally; the
// public op recomputes them from scratch.
double element_update_kernel(const ComplexVector &q_bar, std::size_t l,
                             const std::vector<std::vector<ComplexVector>> &z,
                             double noise_power, const ComplexMatrix &t_current,
                             std::size_t grid_points, double refine_tol)
{
    const std::size_t m_users = z.size();
    ComplexMatrix base(m_users, m_users);
    ComplexMatrix coeff(m_users, m_users);
    for (std::size_t j = 0; j < m_users; ++j)
        for (std::size_t m = 0; m < m_users; ++m)
        {
            coeff(j, m) = std::conj(z[j][m](l));
            base(j, m) = t_current(j, m) - coeff(j, m) * q_bar(l);
        }

    const auto value_at = [&](double phi) {
        const Complex q_l = 0.5 * (Complex(0.0, 1.0) + std::polar(1.0, phi));
        return sweep_objective(base + coeff * q_l, noise_power);
    };

    // The incumbent phase stays in the candidate set, so the update can only
    // hold or improve the objective.
    double best_phi = std::arg(2.0 * q_bar(l) - Complex(0.0, 1.0));
    double best_value = value_at(best_phi);

    double grid_phi = best_phi;
    double grid_value = best_value;
    const double two_pi = 2.0 * channel::pi;
    for (std::size_t g = 0; g < grid_points; ++g)
    {
        const double phi = -channel::pi + two_pi * static_cast<double>(g) /
                                              static_cast<double>(grid_points);
        const double value = value_at(phi);
        if (value > grid_value)
        {
            grid_value = value;
            grid_phi = phi;
        }
    }
    if (grid_value > best_value)
    {
        best_value = grid_value;
        best_phi = grid_phi;
    }

    // Golden-section refinement in the basin around the best coarse point.
    constexpr double invphi = 0.6180339887498949;
    double lo = grid_phi - two_pi / static_cast<double>(grid_points);
    double hi = grid_phi + two_pi / static_cast<double>(grid_points);
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = value_at(x1);
    double f2 = value_at(x2);
    while (hi - lo > refine_tol)
    {
        if (f1 >= f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = value_at(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = value_at(x2);
        }
        const double inner_value = std::max(f1, f2);
        if (inner_value > best_value)
        {
            best_value = inner_value;
            best_phi = (f1 >= f2) ? x1 : x2;
        }
    }
    return best_phi;
}

ComplexMatrix current_products(const ComplexVector &q_bar,
                               const std::vector<std::vector<ComplexVector>> &z)
{
    const std::size_t m_users = z.size();
    ComplexMatrix t(m_users, m_users);
    for (std::size_t j = 0; j < m_users; ++j)
        for (std::size_t m = 0; m < m_users; ++m)
            t(j, m) = arma::cdot(z[j][m], q_bar);
    return t;
}

} // namespace

std::vector<ComplexVector> DmaPrecoder::effective() const
{
    std::vector<ComplexVector> out;
    out.reserve(w.n_cols);
    for (std::size_t m = 0; m < w.n_cols; ++m)
        out.push_back(ComplexVector(h % (q * w.col(m))));
    return out;
}

Complex lorentzian_project(Complex phase_only)
{
    const double mag = std::abs(phase_only);
    if (!(mag > 0.0))
        throw DomainError("lorentzian_project: zero input carries no phase");
    return 0.5 * (Complex(0.0, 1.0) + phase_only / mag);
}

arma::mat focusing_phases(const User &user, const ArrayGeometry &geometry,
                          const DmaParams &params, double wavelength)
{
    if (!(wavelength > 0.0))
        throw DomainError("focusing_phases: wavelength must be positive");
    check_geometry(geometry, params);

    const double k = 2.0 * channel::pi / wavelength;
    arma::mat psi(geometry.n_rows, geometry.n_cols);
    for (std::size_t i = 0; i < geometry.n_rows; ++i)
        for (std::size_t l = 0; l < geometry.n_cols; ++l)
        {
            const double r =
                channel::distance(user.position, geometry.element_positions[geometry.flat_index(i, l)]);
            psi(i, l) = k * r + params.beta * params.rho(i, l);
        }
    return psi;
}

arma::mat focusing_phases(const ComplexVector &a, const ArrayGeometry &geometry,
                          const DmaParams &params)
{
    check_geometry(geometry, params);
    if (a.n_elem != geometry.size())
        throw DomainError("focusing_phases: channel vector has length " +
                          std::to_string(a.n_elem) + ", expected " +
                          std::to_string(geometry.size()));

    // arg(a) recovers the propagation phase modulo 2π, which is all a phase
    // needs; entries that are exactly zero never radiate toward this user, so
    // their phase is immaterial and arg(0) = 0 is as good as any.
    arma::mat psi(geometry.n_rows, geometry.n_cols);
    for (std::size_t i = 0; i < geometry.n_rows; ++i)
        for (std::size_t l = 0; l < geometry.n_cols; ++l)
            psi(i, l) = std::arg(a(geometry.flat_index(i, l))) + params.beta * params.rho(i, l);
    return psi;
}

ComplexMatrix assemble_q(const ComplexVector &q_bar, std::size_t n_rows, std::size_t n_cols)
{
    if (q_bar.n_elem != n_rows * n_cols)
        throw DomainError("assemble_q: weight vector has length " + std::to_string(q_bar.n_elem) +
                          ", expected " + std::to_string(n_rows * n_cols));
    ComplexMatrix q(n_rows * n_cols, n_rows, arma::fill::zeros);
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t l = 0; l < n_cols; ++l)
            q(i * n_cols + l, i) = q_bar(i * n_cols + l);
    return q;
}

DmaPrecoder single_user_weights(const NearFieldChannel &channel, const ArrayGeometry &geometry,
                                const DmaParams &params, double p_max, bool phase_only)
{
    if (channel.n_users() != 1)
        throw DomainError("single_user_weights: channel has " +
                          std::to_string(channel.n_users()) + " users, expected 1");
    check_geometry(geometry, params);
    if (channel.a[0].n_elem != geometry.size())
        throw DomainError("single_user_weights: channel/geometry size mismatch");
    if (!(p_max > 0.0))
        throw DomainError("single_user_weights: p_max must be positive, got " +
                          std::to_string(p_max));

    DmaPrecoder out;
    out.phase_only = phase_only;
    out.h = channel::waveguide_diagonal(geometry, params);
    out.phases = focusing_phases(channel.a[0], geometry, params);
    out.q = assemble_q(weights_from_phases(out.phases, phase_only), geometry.n_rows,
                       geometry.n_cols);

    // Maximum-ratio transmission against the effective channel of the
    // realized (projected) weights.
    const ComplexVector g = effective_channel(channel, out.q, out.h).front();
    const double g_norm = arma::norm(g);
    out.w.set_size(geometry.n_rows, 1);
    if (g_norm > 0.0)
        out.w.col(0) = std::sqrt(p_max) / g_norm * g;
    else
        out.w.zeros();
    return out;
}

std::vector<ComplexVector> effective_channel(const NearFieldChannel &channel,
                                             const ComplexMatrix &q, const ComplexVector &h)
{
    if (q.n_rows != h.n_elem)
        throw DomainError("effective_channel: weight matrix and waveguide diagonal disagree");
    std::vector<ComplexVector> g;
    g.reserve(channel.n_users());
    for (const ComplexVector &a : channel.a)
    {
        if (a.n_elem != q.n_rows)
            throw DomainError("effective_channel: channel vector length " +
                              std::to_string(a.n_elem) + " does not match weight rows " +
                              std::to_string(q.n_rows));
        g.push_back(ComplexVector(q.t() * (arma::conj(h) % a)));
    }
    return g;
}

std::vector<ComplexVector> dma_digital_step(const NearFieldChannel &channel,
                                            const ComplexMatrix &q, const ComplexVector &h,
                                            const std::vector<ComplexVector> &w, double p_max)
{
    NearFieldChannel reduced;
    reduced.a = effective_channel(channel, q, h);
    reduced.noise_power = channel.noise_power;
    reduced.wavelength = channel.wavelength;

    wmmse::WmmseState state;
    state.u.assign(channel.n_users(), Complex(0.0, 0.0));
    state.v.assign(channel.n_users(), 1.0);
    state.w_tilde = w;
    return wmmse::wmmse_step(state, reduced, p_max).w_tilde;
}

std::vector<std::vector<ComplexVector>> build_z_vectors(const NearFieldChannel &channel,
                                                        const ComplexVector &h,
                                                        const std::vector<ComplexVector> &w)
{
    const std::size_t m_users = channel.n_users();
    if (m_users == 0 || w.size() != m_users)
        throw DomainError("build_z_vectors: need one digital vector per user");
    const std::size_t n = h.n_elem;
    const std::size_t n_d = w.front().n_elem;
    if (n_d == 0 || n % n_d != 0)
        throw DomainError("build_z_vectors: element count " + std::to_string(n) +
                          " is not a multiple of the strip count " + std::to_string(n_d));
    const std::size_t n_e = n / n_d;

    std::vector<std::vector<ComplexVector>> z(m_users);
    for (std::size_t j = 0; j < m_users; ++j)
    {
        if (w[j].n_elem != n_d)
            throw DomainError("build_z_vectors: digital vectors have inconsistent lengths");
        z[j].reserve(m_users);
        for (std::size_t m = 0; m < m_users; ++m)
        {
            if (channel.a[m].n_elem != n)
                throw DomainError("build_z_vectors: channel vector length mismatch");
            // Kronecker expansion of a_mᴴ·H·Q·w_j in vec(Q), then the rows of
            // the structural zeros dropped; what survives for strip i is the
            // run starting at i·(N + N_e), one entry per element in order.
            const ComplexMatrix row = arma::strans(arma::conj(channel.a[m]) % h);
            const ComplexMatrix full = numerics::kron(arma::strans(w[j]), row).t();
            ComplexVector pruned(n);
            for (std::size_t i = 0; i < n_d; ++i)
                for (std::size_t l = 0; l < n_e; ++l)
                    pruned(i * n_e + l) = full(i * n + i * n_e + l, 0);
            z[j].push_back(std::move(pruned));
        }
    }
    return z;
}

double element_1d_update(const ComplexVector &q_bar, std::size_t l,
                         const std::vector<std::vector<ComplexVector>> &z,
                         double noise_power, std::size_t grid_points, double refine_tol)
{
    const std::size_t m_users = z.size();
    if (m_users == 0)
        throw DomainError("element_1d_update: empty coefficient table");
    for (std::size_t j = 0; j < m_users; ++j)
    {
        if (z[j].size() != m_users)
            throw DomainError("element_1d_update: coefficient table is not square");
        for (std::size_t m = 0; m < m_users; ++m)
            if (z[j][m].n_elem != q_bar.n_elem)
                throw DomainError("element_1d_update: coefficient length mismatch");
    }
    if (l >= q_bar.n_elem)
        throw DomainError("element_1d_update: element index " + std::to_string(l) +
                          " out of range");
    if (grid_points < 4)
        throw DomainError("element_1d_update: need at least 4 grid points");
    if (!(refine_tol > 0.0))
        throw DomainError("element_1d_update: refine_tol must be positive");
    if (!(noise_power > 0.0))
        throw DomainError("element_1d_update: noise power must be positive");

    return element_update_kernel(q_bar, l, z, noise_power, current_products(q_bar, z),
                                 grid_points, refine_tol);
}

DmaPrecoder solve_dma(const NearFieldChannel &channel, const std::vector<User> &users,
                      const ArrayGeometry &geometry, const DmaParams &params, double p_max,
                      const SolveOptions &opts, std::vector<double> *objective_trace)
{
    check_geometry(geometry, params);
    if (channel.n_users() == 0)
        throw DomainError("solve_dma: channel has no users");
    if (users.size() != channel.n_users())
        throw DomainError("solve_dma: got " + std::to_string(users.size()) +
                          " user positions for " + std::to_string(channel.n_users()) +
                          " channel vectors");
    for (const ComplexVector &a : channel.a)
        if (a.n_elem != geometry.size())
            throw DomainError("solve_dma: channel/geometry size mismatch");
    if (!(p_max > 0.0))
        throw DomainError("solve_dma: p_max must be positive, got " + std::to_string(p_max));

    const std::size_t m_users = channel.n_users();
    if (m_users == 1)
    {
        DmaPrecoder out = single_user_weights(channel, geometry, params, p_max);
        if (objective_trace != nullptr)
            objective_trace->push_back(wmmse::sum_rate(channel, out.effective()));
        return out;
    }

    const std::size_t n = geometry.size();
    const std::size_t n_d = geometry.n_rows;
    const std::size_t n_e = geometry.n_cols;
    const ComplexVector h = channel::waveguide_diagonal(geometry, params);

    // Deterministic start: strip i focuses on user i mod M, so every user
    // begins with analog gain on roughly n_d/M microstrips. A single shared
    // focus (e.g. the user centroid) can leave angularly spread users with no
    // usable gain, and the alternation cannot recover from that.
    std::vector<arma::mat> per_user_phases;
    per_user_phases.reserve(m_users);
    for (const User &u : users)
        per_user_phases.push_back(focusing_phases(u, geometry, params, channel.wavelength));
    arma::mat phases(n_d, n_e);
    for (std::size_t i = 0; i < n_d; ++i)
        phases.row(i) = per_user_phases[i % m_users].row(i);
    ComplexVector q_bar = weights_from_phases(phases, false);
    ComplexMatrix q = assemble_q(q_bar, n_d, n_e);

    NearFieldChannel reduced;
    reduced.a = effective_channel(channel, q, h);
    reduced.noise_power = channel.noise_power;
    reduced.wavelength = channel.wavelength;

    std::vector<ComplexVector> w;
    w.reserve(m_users);
    const double per_user = std::sqrt(p_max / static_cast<double>(m_users));
    for (std::size_t m = 0; m < m_users; ++m)
    {
        const double g_norm = arma::norm(reduced.a[m]);
        if (g_norm > 0.0)
            w.push_back(ComplexVector(per_user / g_norm * reduced.a[m]));
        else
            w.push_back(ComplexVector(n_d, arma::fill::zeros));
    }

    if (objective_trace != nullptr)
        objective_trace->push_back(wmmse::sum_rate(reduced, w));

    for (std::size_t round = 0; round < opts.outer_rounds; ++round)
    {
        // Digital block: ascent steps on the reduced channel, warm-started
        // from the incumbent vectors so the objective cannot drop.
        wmmse::WmmseState state;
        state.u.assign(m_users, Complex(0.0, 0.0));
        state.v.assign(m_users, 1.0);
        state.w_tilde = w;
        double prev = wmmse::sum_rate(reduced, w);
        for (std::size_t it = 0; it < opts.inner_iters; ++it)
        {
            state = wmmse::wmmse_step(state, reduced, p_max);
            const double cur = state.objective_history.back();
            if (std::abs(cur - prev) <= opts.inner_tol * std::max(std::abs(prev), 1e-12))
                break;
            prev = cur;
        }
        w = state.w_tilde;

        // Analog block: row-major sweep of exact 1-D phase updates, with the
        // inner products maintained incrementally and refreshed per sweep.
        const std::vector<std::vector<ComplexVector>> z = build_z_vectors(channel, h, w);
        ComplexMatrix t = current_products(q_bar, z);
        for (std::size_t l = 0; l < n; ++l)
        {
            bool coupled = false;
            for (std::size_t j = 0; j < m_users && !coupled; ++j)
                for (std::size_t m = 0; m < m_users; ++m)
                    if (z[j][m](l) != Complex(0.0, 0.0))
                    {
                        coupled = true;
                        break;
                    }
            if (!coupled)
                continue; // the objective does not depend on this element

            const double phi = element_update_kernel(q_bar, l, z, channel.noise_power, t,
                                                     opts.grid_points, opts.refine_tol);
            const Complex q_new = 0.5 * (Complex(0.0, 1.0) + std::polar(1.0, phi));
            const Complex delta = q_new - q_bar(l);
            for (std::size_t j = 0; j < m_users; ++j)
                for (std::size_t m = 0; m < m_users; ++m)
                    t(j, m) += std::conj(z[j][m](l)) * delta;
            q_bar(l) = q_new;
            phases(l / n_e, l % n_e) = phi;
        }

        q = assemble_q(q_bar, n_d, n_e);
        reduced.a = effective_channel(channel, q, h);
        if (objective_trace != nullptr)
            objective_trace->push_back(wmmse::sum_rate(reduced, w));
    }

    DmaPrecoder out;
    out.q = std::move(q);
    out.h = h;
    out.phases = std::move(phases);
    out.w.set_size(n_d, m_users);
    for (std::size_t m = 0; m < m_users; ++m)
        out.w.col(m) = w[m];
    return out;
}

} // namespace nfbeam::dma
