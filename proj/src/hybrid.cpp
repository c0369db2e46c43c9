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

#include "nfbeam/hybrid.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "nfbeam/rng.hpp"

namespace nfbeam::hybrid
{

namespace
{

void check_q_s(const ComplexVector &q_s, const ComplexMatrix &w, const ComplexMatrix &w_opt)
{
    if (q_s.n_elem != w_opt.n_rows * w.n_rows)
        throw DomainError("hybrid: q_s length " + std::to_string(q_s.n_elem) +
                          " does not match N*N_RF = " +
                          std::to_string(w_opt.n_rows * w.n_rows));
    if (w.n_cols != w_opt.n_cols)
        throw DomainError("hybrid: digital matrix has " + std::to_string(w.n_cols) +
                          " columns, target has " + std::to_string(w_opt.n_cols));
}

// Real inner product of the underlying 2L-dimensional real space; this is
// the Riemannian metric on the product of circles.
double real_inner(const ComplexVector &x, const ComplexVector &y)
{
    return arma::cdot(x, y).real();
}

} // namespace

std::vector<ComplexVector> HybridPrecoder::effective() const
{
    std::vector<ComplexVector> out;
    out.reserve(w.n_cols);
    const ComplexMatrix product = q * w;
    for (arma::uword m = 0; m < product.n_cols; ++m)
        out.emplace_back(product.col(m));
    return out;
}

ComplexMatrix ls_digital(const ComplexMatrix &q, const ComplexMatrix &w_opt)
{
    if (q.n_rows != w_opt.n_rows)
        throw DomainError("ls_digital: analog matrix has " + std::to_string(q.n_rows) +
                          " rows, target has " + std::to_string(w_opt.n_rows));

    ComplexMatrix gram = q.t() * q;
    arma::vec eigs;
    if (arma::eig_sym(eigs, gram))
    {
        const double emax = eigs.max();
        const double emin = eigs.min();
        if (!(emin > 0.0) || emax / emin > 1e12)
            gram.diag() += 1e-10 * arma::trace(arma::real(gram)) /
                           static_cast<double>(gram.n_rows);
    }
    return numerics::hermitian_solve(gram, ComplexMatrix(q.t() * w_opt));
}

double matching_objective(const ComplexVector &q_s, const ComplexMatrix &w,
                          const ComplexMatrix &w_opt)
{
    check_q_s(q_s, w, w_opt);
    const ComplexMatrix q = arma::reshape(q_s, w_opt.n_rows, w.n_rows);
    return std::pow(numerics::frobenius_norm(w_opt - q * w), 2);
}

ComplexVector euclidean_grad(const ComplexVector &q_s, const ComplexMatrix &w,
                             const ComplexMatrix &w_opt)
{
    check_q_s(q_s, w, w_opt);
    // 2·(W* ⊗ I)((Wᵀ ⊗ I)q_s − vec(W̃_opt)) = 2·vec((QW − W̃_opt)·Wᴴ);
    // the matrix form avoids materializing L×L Kronecker factors.
    const ComplexMatrix q = arma::reshape(q_s, w_opt.n_rows, w.n_rows);
    const ComplexMatrix residual = q * w - w_opt;
    return numerics::vec(ComplexMatrix(2.0 * residual * w.t()));
}

ComplexVector riemannian_grad(const ComplexVector &q_s, const ComplexVector &egrad)
{
    if (q_s.n_elem != egrad.n_elem)
        throw DomainError("riemannian_grad: dimension mismatch");
    ComplexVector g(q_s.n_elem);
    for (arma::uword l = 0; l < q_s.n_elem; ++l)
        g(l) = egrad(l) - (egrad(l) * std::conj(q_s(l))).real() * q_s(l);
    return g;
}

ComplexVector retract(const ComplexVector &q_s, const ComplexVector &direction, double step)
{
    if (q_s.n_elem != direction.n_elem)
        throw DomainError("retract: dimension mismatch");
    ComplexVector out(q_s.n_elem);
    for (arma::uword l = 0; l < q_s.n_elem; ++l)
    {
        const Complex moved = q_s(l) + step * direction(l);
        const double mag = std::abs(moved);
        if (mag < 1e-14)
            throw DegenerateRetraction("retract: entry " + std::to_string(l) +
                                       " collapsed to magnitude " + std::to_string(mag));
        out(l) = moved / mag;
    }
    return out;
}

ComplexVector vector_transport(const ComplexVector &q_s_new, const ComplexVector &eta_prev)
{
    return riemannian_grad(q_s_new, eta_prev); // same tangent projector
}

RcgResult rcg_minimize(const ComplexMatrix &w, const ComplexMatrix &w_opt,
                       const ManifoldPoint &q0, const RcgOptions &opts)
{
    check_q_s(q0.q_s, w, w_opt);

    RcgResult res;
    ComplexVector q = q0.q_s;
    double f = matching_objective(q, w, w_opt);
    ComplexVector grad = riemannian_grad(q, euclidean_grad(q, w, w_opt));
    ComplexVector eta = -grad;
    res.objective_history.push_back(f);

    double last_decrease = -1.0; // f drop of the previous accepted step

    for (std::size_t t = 0; t < opts.max_iters; ++t)
    {
        const double grad_norm = std::sqrt(real_inner(grad, grad));
        if (grad_norm < opts.grad_tol)
            break;

        // Guard against non-descent conjugate directions.
        double slope = real_inner(grad, eta);
        if (slope >= 0.0)
        {
            eta = -grad;
            slope = -grad_norm * grad_norm;
        }

        // First trial step: the configured step on iteration one, afterwards
        // the classical guess 2(f_{t-1} − f_t)/slope, which keeps the
        // conjugate-gradient rate instead of re-backtracking from scratch.
        double step = opts.initial_step;
        if (last_decrease > 0.0)
        {
            const double guess = 2.0 * last_decrease / (-slope);
            if (std::isfinite(guess) && guess > 0.0)
                step = std::min(opts.initial_step, guess);
        }
        bool accepted = false;
        ComplexVector q_next;
        double f_next = f;
        for (std::size_t bt = 0; bt <= opts.max_backtracks; ++bt)
        {
            bool valid = true;
            ComplexVector trial;
            try
            {
                trial = retract(q, eta, step);
            }
            catch (const DegenerateRetraction &)
            {
                valid = false;
            }
            if (valid)
            {
                const double f_trial = matching_objective(trial, w, w_opt);
                if (f_trial <= f + opts.armijo_c1 * step * slope)
                {
                    accepted = true;
                    q_next = std::move(trial);
                    f_next = f_trial;
                    break;
                }
            }
            step *= opts.backtrack;
        }

        if (!accepted)
        {
            res.line_search_failed = true;
            break; // return the best point found so far
        }

        // One quadratic-interpolation polish toward the exact line minimum;
        // this keeps conjugate directions effective in nearly flat basins.
        {
            const double denom = 2.0 * (f_next - f - slope * step);
            if (denom > 0.0)
            {
                const double s_star = -slope * step * step / denom;
                if (std::isfinite(s_star) && s_star > 0.0)
                {
                    try
                    {
                        ComplexVector polished = retract(q, eta, s_star);
                        const double f_polished = matching_objective(polished, w, w_opt);
                        if (f_polished < f_next)
                        {
                            q_next = std::move(polished);
                            f_next = f_polished;
                        }
                    }
                    catch (const DegenerateRetraction &)
                    {
                        // keep the Armijo point
                    }
                }
            }
        }
        last_decrease = f - f_next;

        const ComplexVector grad_next =
            riemannian_grad(q_next, euclidean_grad(q_next, w, w_opt));

        // Polak-Ribiere(+) with vector transport of the old quantities.
        const ComplexVector grad_old_moved = vector_transport(q_next, grad);
        const double denom = real_inner(grad, grad);
        double beta = 0.0;
        if (denom > 0.0)
            beta = std::max(0.0, real_inner(grad_next, grad_next - grad_old_moved) / denom);

        eta = -grad_next + beta * vector_transport(q_next, eta);
        q = std::move(q_next);
        f = f_next;
        grad = grad_next;
        res.iterations = t + 1;
        res.objective_history.push_back(f);
    }

    res.point.q_s = std::move(q);
    res.objective = f;
    res.grad_norm = std::sqrt(real_inner(grad, grad));
    return res;
}

HybridPrecoder solve_hybrid(const NearFieldChannel &channel, const ArrayGeometry &geometry,
                            double p_max, const SolveOptions &opts)
{
    if (geometry.kind != channel::ArrayKind::Hybrid)
        throw DomainError("solve_hybrid: geometry kind must be Hybrid");
    const std::size_t n = geometry.size();
    const std::size_t n_rf = geometry.n_rf;
    if (n_rf == 0)
        throw DomainError("solve_hybrid: geometry has no RF chains");
    for (const ComplexVector &a : channel.a)
        if (a.n_elem != n)
            throw DomainError("solve_hybrid: channel vector length does not match geometry");
    if (!(p_max > 0.0))
        throw DomainError("solve_hybrid: p_max must be positive");

    const std::size_t m_users = channel.n_users();

    // Stage 1: the unconstrained-architecture target.
    const wmmse::DigitalPrecoder digital = wmmse::solve_fully_digital(channel, p_max, opts.inner_wmmse);
    ComplexMatrix w_opt(n, m_users);
    for (std::size_t m = 0; m < m_users; ++m)
        w_opt.col(m) = digital.w_tilde[m];

    HybridPrecoder out;
    const double target_norm = numerics::frobenius_norm(w_opt);
    if (target_norm == 0.0)
    {
        // Degenerate channel: nothing to match; any feasible analog matrix.
        out.q = ComplexMatrix(n, n_rf, arma::fill::ones);
        out.w = ComplexMatrix(n_rf, m_users, arma::fill::zeros);
        return out;
    }

    // Normalizing the target makes the surrogate scale-free, so the Armijo
    // unit initial step is meaningful regardless of the power budget.
    const ComplexMatrix w_opt_n = w_opt / target_norm;

    // Stage 2 init: phases of the target's column-space projector applied to
    // a seeded random matrix — feasible, deterministic, never zero.
    ComplexMatrix q_mat(n, n_rf);
    {
        Rng rng(opts.seed);
        ComplexMatrix g_rand(n, n_rf);
        for (arma::uword j = 0; j < g_rand.n_cols; ++j)
            for (arma::uword i = 0; i < g_rand.n_rows; ++i)
                g_rand(i, j) = rng.complex_gaussian();

        ComplexMatrix basis, r_unused;
        if (!arma::qr_econ(basis, r_unused, w_opt_n))
            basis = w_opt_n; // fall back to raw columns
        const ComplexMatrix projected = basis * (basis.t() * g_rand);
        for (arma::uword j = 0; j < q_mat.n_cols; ++j)
            for (arma::uword i = 0; i < q_mat.n_rows; ++i)
            {
                const Complex z = projected(i, j);
                q_mat(i, j) = (std::abs(z) > 0.0) ? Complex(z / std::abs(z))
                                                  : Complex(1.0, 0.0);
            }
    }

    // Stage 3: alternate manifold descent on Q with least squares on W.
    ComplexMatrix w_dig = ls_digital(q_mat, w_opt_n);
    bool warned = false;
    for (std::size_t round = 0; round < opts.outer_rounds; ++round)
    {
        const RcgResult rcg =
            rcg_minimize(w_dig, w_opt_n, ManifoldPoint{numerics::vec(q_mat)}, opts.rcg);
        warned = warned || rcg.line_search_failed;
        q_mat = arma::reshape(rcg.point.q_s, n, n_rf);
        w_dig = ls_digital(q_mat, w_opt_n);
    }

    // Stage 4: exact transmit-power rescale (norm to the first power).
    const double product_norm = numerics::frobenius_norm(q_mat * w_dig);
    out.q = std::move(q_mat);
    out.line_search_warning = warned;
    if (product_norm > 0.0)
        out.w = std::sqrt(p_max) / product_norm * w_dig;
    else
        out.w = ComplexMatrix(n_rf, m_users, arma::fill::zeros);
    return out;
}

} // namespace nfbeam::hybrid
