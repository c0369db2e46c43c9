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

#include "nfbeam/wmmse.hpp"

#include <cmath>
#include <string>

namespace nfbeam::wmmse
{

namespace
{

void check_dims(const NearFieldChannel &channel, const std::vector<ComplexVector> &w_tilde)
{
    if (channel.n_users() != w_tilde.size())
        throw DomainError("wmmse: precoder count " + std::to_string(w_tilde.size()) +
                          " does not match user count " + std::to_string(channel.n_users()));
    for (std::size_t m = 0; m < w_tilde.size(); ++m)
        if (w_tilde[m].n_elem != channel.a[m].n_elem)
            throw DomainError("wmmse: precoder " + std::to_string(m) + " has length " +
                              std::to_string(w_tilde[m].n_elem) + ", expected " +
                              std::to_string(channel.a[m].n_elem));
}

// c(m, j) = a_mᴴ w̃_j; every formula below is a function of these scalars.
ComplexMatrix inner_products(const NearFieldChannel &channel,
                             const std::vector<ComplexVector> &w_tilde)
{
    const std::size_t m_users = channel.n_users();
    ComplexMatrix c(m_users, m_users);
    for (std::size_t m = 0; m < m_users; ++m)
        for (std::size_t j = 0; j < m_users; ++j)
            c(m, j) = arma::cdot(channel.a[m], w_tilde[j]);
    return c;
}

struct CandidatePrecoder
{
    std::vector<ComplexVector> w;
    double power = 0.0;
};

// Precoders for a fixed multiplier lambda, computed through the identity
// (G·Gᴴ + λI)⁻¹·G = G·(GᴴG + λI)⁻¹: only an order-K system is ever solved,
// and the λ→0 limit stays well defined even for N > K.
CandidatePrecoder evaluate_multiplier(const ComplexMatrix &g, const std::vector<Complex> &scale,
                                      const std::vector<std::size_t> &active, std::size_t n,
                                      std::size_t m_users, const ComplexMatrix &s0,
                                      double lambda)
{
    const std::size_t k = active.size();
    ComplexMatrix s = s0;
    s.diag() += lambda;

    ComplexMatrix identity(k, k, arma::fill::eye);
    const ComplexMatrix x = numerics::hermitian_solve(s, identity);
    const ComplexMatrix t = g * x;

    CandidatePrecoder out;
    out.w.assign(m_users, ComplexVector(n, arma::fill::zeros));
    for (std::size_t idx = 0; idx < k; ++idx)
    {
        const std::size_t m = active[idx];
        out.w[m] = scale[idx] * t.col(idx);
        out.power += std::norm(scale[idx]) * std::pow(arma::norm(t.col(idx)), 2);
    }
    return out;
}

} // namespace

double DigitalPrecoder::total_power() const
{
    double p = 0.0;
    for (const ComplexVector &w : w_tilde)
        p += std::pow(arma::norm(w), 2);
    return p;
}

std::vector<double> rate_per_user(const NearFieldChannel &channel,
                                  const std::vector<ComplexVector> &w_tilde)
{
    check_dims(channel, w_tilde);
    const std::size_t m_users = channel.n_users();
    const ComplexMatrix c = inner_products(channel, w_tilde);

    std::vector<double> rates(m_users, 0.0);
    for (std::size_t m = 0; m < m_users; ++m)
    {
        const double direct = std::norm(c(m, m));
        double interference = 0.0;
        for (std::size_t j = 0; j < m_users; ++j)
            if (j != m)
                interference += std::norm(c(m, j));
        rates[m] = std::log2(1.0 + direct / (interference + channel.noise_power));
    }
    return rates;
}

double sum_rate(const NearFieldChannel &channel, const std::vector<ComplexVector> &w_tilde)
{
    double total = 0.0;
    for (double r : rate_per_user(channel, w_tilde))
        total += r;
    return total;
}

double mse_term(Complex u_m, const NearFieldChannel &channel, std::size_t m,
                const std::vector<ComplexVector> &w_tilde)
{
    check_dims(channel, w_tilde);
    if (m >= channel.n_users())
        throw DomainError("mse_term: user index " + std::to_string(m) + " out of range");

    double e = 0.0;
    for (std::size_t j = 0; j < channel.n_users(); ++j)
    {
        const Complex cj = u_m * arma::cdot(channel.a[m], w_tilde[j]);
        if (j == m)
            e += std::norm(Complex(1.0, 0.0) - cj);
        else
            e += std::norm(cj);
    }
    return e + channel.noise_power * std::norm(u_m);
}

WmmseState init_state(const NearFieldChannel &channel, double p_max)
{
    if (channel.n_users() == 0)
        throw DomainError("init_state: channel has no users");
    if (!(p_max > 0.0))
        throw DomainError("init_state: p_max must be positive, got " + std::to_string(p_max));

    const std::size_t m_users = channel.n_users();
    WmmseState st;
    st.u.assign(m_users, Complex(0.0, 0.0));
    st.v.assign(m_users, 1.0);
    st.w_tilde.reserve(m_users);
    const double per_user = std::sqrt(p_max / static_cast<double>(m_users));
    for (std::size_t m = 0; m < m_users; ++m)
    {
        const double norm_a = arma::norm(channel.a[m]);
        if (norm_a > 0.0)
            st.w_tilde.push_back(ComplexVector(per_user / norm_a * channel.a[m]));
        else
            st.w_tilde.push_back(ComplexVector(channel.a[m].n_elem, arma::fill::zeros));
    }
    st.objective_history.push_back(sum_rate(channel, st.w_tilde));
    return st;
}

WmmseState wmmse_step(const WmmseState &state, const NearFieldChannel &channel, double p_max)
{
    check_dims(channel, state.w_tilde);
    if (!(p_max > 0.0))
        throw DomainError("wmmse_step: p_max must be positive, got " + std::to_string(p_max));

    const std::size_t m_users = channel.n_users();
    const std::size_t n = channel.a.front().n_elem;
    const double sigma2 = channel.noise_power;

    // Receive-scalar block: u_m minimizes e_m for the current precoders.
    const ComplexMatrix c = inner_products(channel, state.w_tilde);
    std::vector<Complex> u(m_users);
    for (std::size_t m = 0; m < m_users; ++m)
    {
        double denom = sigma2;
        for (std::size_t j = 0; j < m_users; ++j)
            denom += std::norm(c(m, j));
        u[m] = (denom > 0.0) ? Complex(std::conj(c(m, m)) / denom) : Complex(0.0, 0.0);
    }

    // Weight block: v_m = 1/e_m evaluated at the fresh u_m.
    std::vector<double> v(m_users);
    for (std::size_t m = 0; m < m_users; ++m)
    {
        const double e = mse_term(u[m], channel, m, state.w_tilde);
        v[m] = (e > 0.0) ? 1.0 / e : 1.0; // e = 0 only in noise-free corner cases
    }

    // Precoder block: w̃_m = v_m·conj(u_m)·(Σ_j v_j|u_j|² a_ja_jᴴ + λI)⁻¹ a_m.
    // Users with u_m = 0 receive the zero vector (their block optimum).
    std::vector<std::size_t> active;
    for (std::size_t m = 0; m < m_users; ++m)
        if (std::abs(u[m]) > 0.0)
            active.push_back(m);

    WmmseState next;
    next.u = std::move(u);
    next.v = std::move(v);
    next.iteration = state.iteration + 1;
    next.objective_history = state.objective_history;

    if (active.empty())
    {
        next.w_tilde.assign(m_users, ComplexVector(n, arma::fill::zeros));
        next.objective_history.push_back(sum_rate(channel, next.w_tilde));
        return next;
    }

    ComplexMatrix g(n, active.size());
    std::vector<Complex> scale(active.size());
    for (std::size_t idx = 0; idx < active.size(); ++idx)
    {
        const std::size_t m = active[idx];
        const double root_v = std::sqrt(next.v[m]);
        const double mag_u = std::abs(next.u[m]);
        g.col(idx) = (root_v * mag_u) * channel.a[m];
        scale[idx] = root_v * std::conj(next.u[m]) / mag_u;
    }

    ComplexMatrix s0 = g.t() * g;
    // Tiny uniform ridge keeps the factorization alive for duplicate users
    // and for multiplier probes near zero; its size is far below every
    // feasibility and ascent tolerance in play.
    const double ridge = 1e-12 * arma::trace(arma::real(s0)) /
                         static_cast<double>(active.size());
    s0.diag() += ridge;

    CandidatePrecoder best =
        evaluate_multiplier(g, scale, active, n, m_users, s0, 0.0);

    if (best.power > p_max)
    {
        // Complementary slackness requires λ > 0; bracket geometrically, then
        // bisect keeping the feasible endpoint so the budget always holds.
        double lo = 0.0;
        double hi = 1.0;
        CandidatePrecoder at_hi = evaluate_multiplier(g, scale, active, n, m_users, s0, hi);
        std::size_t growths = 0;
        while (at_hi.power > p_max)
        {
            if (++growths > 200)
                throw ConvergenceFailure(
                    "wmmse_step: could not bracket the power multiplier after 200 doublings");
            lo = hi;
            hi *= 2.0;
            at_hi = evaluate_multiplier(g, scale, active, n, m_users, s0, hi);
        }
        best = std::move(at_hi);

        for (int iter = 0; iter < 300; ++iter)
        {
            if (hi - lo <= 1e-14 * std::max(1.0, hi))
                break;
            if (std::abs(best.power - p_max) <= 1e-12 * p_max)
                break;
            const double mid = 0.5 * (lo + hi);
            CandidatePrecoder cand =
                evaluate_multiplier(g, scale, active, n, m_users, s0, mid);
            if (cand.power > p_max)
                lo = mid;
            else
            {
                hi = mid;
                best = std::move(cand);
            }
        }
    }

    next.w_tilde = std::move(best.w);
    next.objective_history.push_back(sum_rate(channel, next.w_tilde));
    return next;
}

DigitalPrecoder solve_fully_digital(const NearFieldChannel &channel, double p_max,
                                    const SolveOptions &opts)
{
    WmmseState state = init_state(channel, p_max);
    double prev = state.objective_history.back();
    for (std::size_t t = 0; t < opts.max_iters; ++t)
    {
        state = wmmse_step(state, channel, p_max);
        const double cur = state.objective_history.back();
        if (std::abs(cur - prev) <= opts.tol * std::max(std::abs(prev), 1e-12))
            break;
        prev = cur;
    }
    return DigitalPrecoder{std::move(state.w_tilde)};
}

} // namespace nfbeam::wmmse
