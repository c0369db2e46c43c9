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

#ifndef NFBEAM_DMA_HPP
#define NFBEAM_DMA_HPP

#include <cstddef>
#include <vector>

#include "nfbeam/channel.hpp"
#include "nfbeam/numerics.hpp"

namespace nfbeam::dma
{

using channel::ArrayGeometry;
using channel::DmaParams;
using channel::NearFieldChannel;
using channel::User;
using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::ComplexVector;

// Metasurface precoder: per-element weights arranged in the structured N×N_d
// matrix q (column n feeds microstrip n; entries off the owning strip are
// bit-exact zeros), the digital matrix w behind the strips, and the waveguide
// response. The waveguide matrix is diagonal, so only its diagonal h is
// stored. All weight updates go through the phase parameterization (the
// `phases` matrix is the source of truth), which keeps every populated entry
// on the circle |q − j/2| = 1/2 by construction; `phase_only` marks the
// relaxed reference variant whose weights sit on the unit circle instead.
struct DmaPrecoder
{
    ComplexMatrix q;  // N x N_d, block structure
    ComplexMatrix w;  // N_d x M
    ComplexVector h;  // diagonal of the N x N waveguide matrix
    arma::mat phases; // N_d x N_e element phases
    bool phase_only = false;

    // Effective per-user vectors w̃_m = H·Q·w_m.
    std::vector<ComplexVector> effective() const;
};

struct SolveOptions
{
    std::size_t outer_rounds = 8;   // alternations of digital and element sweeps
    std::size_t inner_iters = 100;  // digital ascent steps per outer round
    double inner_tol = 1e-8;        // relative sum-rate change stopping the inner loop
    std::size_t grid_points = 360;  // coarse scan of one element phase
    double refine_tol = 1e-6;       // golden-section window, radians
};

// Maps a unit-modulus weight e^{jψ} onto the realizable circle (j + e^{jψ})/2.
Complex lorentzian_project(Complex phase_only);

// Phases that align every element's radiated contribution at the target:
// per-element propagation phase plus the waveguide phase accumulated on the
// way to the element. Computed either from the exact geometry or (modulo 2π,
// which is all a phase needs) from a channel vector's entry arguments.
arma::mat focusing_phases(const User &user, const ArrayGeometry &geometry,
                          const DmaParams &params, double wavelength);
arma::mat focusing_phases(const ComplexVector &a, const ArrayGeometry &geometry,
                          const DmaParams &params);

// Element weights from q̄ laid out in the structured matrix form.
ComplexMatrix assemble_q(const ComplexVector &q_bar, std::size_t n_rows, std::size_t n_cols);

// Closed-form single-user precoder: focusing phases per element, projection
// onto the realizable circle, then maximum-ratio transmission against the
// effective channel of the projected weights. With phase_only = true the
// projection is skipped (relaxed upper-reference variant).
DmaPrecoder single_user_weights(const NearFieldChannel &channel, const ArrayGeometry &geometry,
                                const DmaParams &params, double p_max,
                                bool phase_only = false);

// Reduced per-user channels g_m = Qᴴ·Hᴴ·a_m seen by the digital stage.
std::vector<ComplexVector> effective_channel(const NearFieldChannel &channel,
                                             const ComplexMatrix &q, const ComplexVector &h);

// One digital block update: exactly the fully-digital ascent step applied to
// the reduced channels, with the power constraint on the digital vectors.
std::vector<ComplexVector> dma_digital_step(const NearFieldChannel &channel,
                                            const ComplexMatrix &q, const ComplexVector &h,
                                            const std::vector<ComplexVector> &w, double p_max);

// Per-(user, stream) vectors z̄_{j,m}: the Kronecker expansion of
// a_mᴴ·H·Q·w_j in the vectorized weights, with the rows belonging to the
// structural zeros of vec(Q) removed; z[j][m] has length N_d·N_e and is
// indexed like the flattened element order.
std::vector<std::vector<ComplexVector>> build_z_vectors(const NearFieldChannel &channel,
                                                        const ComplexVector &h,
                                                        const std::vector<ComplexVector> &w);

// Best phase for element l with all other weights fixed: coarse grid scan
// plus golden-section refinement; never worse than the incumbent phase.
double element_1d_update(const ComplexVector &q_bar, std::size_t l,
                         const std::vector<std::vector<ComplexVector>> &z,
                         double noise_power, std::size_t grid_points = 360,
                         double refine_tol = 1e-6);

// Multi-user alternating solver: digital ascent rounds interleaved with
// row-major element sweeps. user positions are needed for the deterministic
// centroid initialization. For a single user this dispatches to
// single_user_weights. The sum rate after each outer round is appended to
// *objective_trace when provided.
DmaPrecoder solve_dma(const NearFieldChannel &channel, const std::vector<User> &users,
                      const ArrayGeometry &geometry, const DmaParams &params, double p_max,
                      const SolveOptions &opts = {},
                      std::vector<double> *objective_trace = nullptr);

} // namespace nfbeam::dma

#endif
