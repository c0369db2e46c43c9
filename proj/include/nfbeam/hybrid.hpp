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

#ifndef NFBEAM_HYBRID_HPP
#define NFBEAM_HYBRID_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nfbeam/channel.hpp"
#include "nfbeam/numerics.hpp"
#include "nfbeam/wmmse.hpp"

namespace nfbeam::hybrid
{

using channel::ArrayGeometry;
using channel::NearFieldChannel;
using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::ComplexVector;

// Phase-shifter architecture: a fully-connected analog matrix with
// unit-modulus entries and a small digital matrix behind it.
struct HybridPrecoder
{
    ComplexMatrix q; // N x N_RF, |entry| = 1
    ComplexMatrix w; // N_RF x M
    bool line_search_warning = false;

    // Effective per-user vectors w̃_m = Q·w_m.
    std::vector<ComplexVector> effective() const;
};

// A point on the product-of-circles manifold (vectorized analog matrix).
struct ManifoldPoint
{
    ComplexVector q_s;
};

struct RcgOptions
{
    std::size_t max_iters = 200;
    double grad_tol = 1e-6;
    double armijo_c1 = 1e-4;       // sufficient-decrease constant
    double backtrack = 0.5;        // step-halving factor
    double initial_step = 1.0;
    std::size_t max_backtracks = 50;
};

struct RcgResult
{
    ManifoldPoint point;
    double objective = 0.0;
    double grad_norm = 0.0;
    std::size_t iterations = 0;
    bool line_search_failed = false;
    std::vector<double> objective_history; // f after each accepted step
};

struct SolveOptions
{
    std::size_t outer_rounds = 20;
    RcgOptions rcg;
    wmmse::SolveOptions inner_wmmse;
    std::uint64_t seed = 1;
};

// Digital least-squares half-step W = (QᴴQ)⁻¹QᴴW̃_opt; adds a relative ridge
// of 1e-10·tr(QᴴQ)/N_RF when the conditioning exceeds 1e12.
ComplexMatrix ls_digital(const ComplexMatrix &q, const ComplexMatrix &w_opt);

// Matching surrogate f(q_s) = ‖W̃_opt − Q·W‖_F² with Q = unvec(q_s).
double matching_objective(const ComplexVector &q_s, const ComplexMatrix &w,
                          const ComplexMatrix &w_opt);

// Euclidean (conjugate-Wirtinger) gradient of the surrogate,
// 2·(W* ⊗ I)((Wᵀ ⊗ I)q_s − vec(W̃_opt)), evaluated without forming Kroneckers.
ComplexVector euclidean_grad(const ComplexVector &q_s, const ComplexMatrix &w,
                             const ComplexMatrix &w_opt);

// Tangent-space projection at q_s: egrad − Re{egrad ∘ q_s*} ∘ q_s.
ComplexVector riemannian_grad(const ComplexVector &q_s, const ComplexVector &egrad);

// Entrywise normalization of q_s + step·direction back onto the circles.
ComplexVector retract(const ComplexVector &q_s, const ComplexVector &direction, double step);

// Projects a previous search direction into the tangent space at q_s_new.
ComplexVector vector_transport(const ComplexVector &q_s_new, const ComplexVector &eta_prev);

// Conjugate-gradient descent of the matching surrogate over the manifold:
// Polak-Ribiere(+) directions, Armijo backtracking, monotone objective.
RcgResult rcg_minimize(const ComplexMatrix &w, const ComplexMatrix &w_opt,
                       const ManifoldPoint &q0, const RcgOptions &opts = {});

// Full pipeline: fully-digital target via the WMMSE solver, alternating
// analog/digital matching rounds, then an exact transmit-power rescale.
HybridPrecoder solve_hybrid(const NearFieldChannel &channel, const ArrayGeometry &geometry,
                            double p_max, const SolveOptions &opts = {});

} // namespace nfbeam::hybrid

#endif
