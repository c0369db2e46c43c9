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

#ifndef NFBEAM_WMMSE_HPP
#define NFBEAM_WMMSE_HPP

#include <cstddef>
#include <vector>

#include "nfbeam/channel.hpp"
#include "nfbeam/numerics.hpp"

namespace nfbeam::wmmse
{

using channel::NearFieldChannel;
using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::ComplexVector;

// Fully-digital precoder: one length-N vector per user. Feasibility
// (total power within the budget) is maintained by the solver.
struct DigitalPrecoder
{
    std::vector<ComplexVector> w_tilde;

    double total_power() const;
};

// State of the alternating minimum-MSE ascent: per-user receive scalars u_m,
// positive MSE weights v_m, and the current precoding vectors.
struct WmmseState
{
    std::vector<Complex> u;
    std::vector<double> v;
    std::vector<ComplexVector> w_tilde;
    std::size_t iteration = 0;
    std::vector<double> objective_history; // sum-rate, one entry per step (plus the start)
};

struct SolveOptions
{
    std::size_t max_iters = 500;
    double tol = 1e-8; // relative sum-rate change
};

// Per-user achievable rate log2(1 + |a_mᴴw̃_m|² / (Σ_{j≠m}|a_mᴴw̃_j|² + σ²)).
// Serves every architecture: pass the effective per-user vectors.
std::vector<double> rate_per_user(const NearFieldChannel &channel,
                                  const std::vector<ComplexVector> &w_tilde);

double sum_rate(const NearFieldChannel &channel, const std::vector<ComplexVector> &w_tilde);

// The per-user mean-square error term
// e_m = |1 − u_m a_mᴴw̃_m|² + Σ_{j≠m} |u_m a_mᴴw̃_j|² + σ²|u_m|².
double mse_term(Complex u_m, const NearFieldChannel &channel, std::size_t m,
                const std::vector<ComplexVector> &w_tilde);

// Deterministic start: per-user matched filters at an equal power split.
WmmseState init_state(const NearFieldChannel &channel, double p_max);

// One full block update (u, v, then all w̃_m under the power budget, with the
// multiplier found by bisection). The sum rate never decreases across a step.
WmmseState wmmse_step(const WmmseState &state, const NearFieldChannel &channel, double p_max);

// Iterates wmmse_step until the relative sum-rate change drops below
// opts.tol or opts.max_iters is reached.
DigitalPrecoder solve_fully_digital(const NearFieldChannel &channel, double p_max,
                                    const SolveOptions &opts = {});

} // namespace nfbeam::wmmse

#endif
