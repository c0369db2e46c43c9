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

#ifndef NFBEAM_CHANNEL_HPP
#define NFBEAM_CHANNEL_HPP

#include <cstddef>
#include <vector>

#include "nfbeam/errors.hpp"
#include "nfbeam/numerics.hpp"

namespace nfbeam::channel
{

using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::ComplexVector;

inline constexpr double speed_of_light = 299'792'458.0; // m/s, exact
inline constexpr double pi = 3.14159265358979323846;

struct Point3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

double distance(const Point3 &a, const Point3 &b);

// A terminal at a known position in front of the array (z > 0).
struct User
{
    Point3 position;
};

enum class ArrayKind
{
    FullyDigital,
    Hybrid,
    Dma
};

enum class FieldRegion
{
    Reactive,
    NearField,
    FarField
};

// Rectangular planar array in the z = 0 plane, centered on the origin.
// Rows run along y (one microstrip per row for the DMA case), columns along
// x. Element (i, l) lives at flat index i*n_cols + l; this row-major mapping
// is shared by every module that indexes elements.
struct ArrayGeometry
{
    std::size_t n_rows = 0;     // N_d
    std::size_t n_cols = 0;     // N_e
    double row_spacing = 0.0;   // meters along y
    double col_spacing = 0.0;   // meters along x
    std::vector<Point3> element_positions;
    ArrayKind kind = ArrayKind::FullyDigital;
    std::size_t n_rf = 0;       // RF chain count, Hybrid only

    std::size_t size() const { return n_rows * n_cols; }
    std::size_t flat_index(std::size_t i, std::size_t l) const { return i * n_cols + l; }

    // Diagonal of the bounding rectangle of the element positions; the
    // aperture diameter D used by the field-region boundary formulas.
    double aperture_diameter() const;
};

// Builds the lattice described above. n_rf is required (and only meaningful)
// for ArrayKind::Hybrid. Throws DomainError on zero sizes, nonpositive
// spacings, or an n_rf outside [1, n_rows*n_cols].
ArrayGeometry make_upa(std::size_t n_rows, std::size_t n_cols, double row_spacing,
                       double col_spacing, ArrayKind kind, std::size_t n_rf = 0);

// Waveguide propagation parameters of a DMA: each row of the array is one
// microstrip fed from its first (lowest-x) element; rho(i, l) is the distance
// traveled inside strip i to reach element l.
struct DmaParams
{
    double alpha = 0.0; // attenuation [1/m]
    double beta = 0.0;  // waveguide wavenumber [1/m]
    arma::mat rho;      // n_rows x n_cols, meters
};

DmaParams make_dma_params(const ArrayGeometry &geometry, double alpha, double beta);

// The physical layer as seen by the solvers: per-user channel vectors a_m
// (stored so the received signal is a_mᴴ s), the noise power, and the
// wavelength they were built for.
struct NearFieldChannel
{
    std::vector<ComplexVector> a;
    double noise_power = 0.0; // watts
    double wavelength = 0.0;  // meters

    std::size_t n_users() const { return a.size(); }
    double wavenumber() const { return 2.0 * pi / wavelength; }
};

// Far-field boundary 2 D² / λ.
double fraunhofer_distance(double diameter, double wavelength);

// Radiating near-field inner boundary (D⁴ / 8λ)^(1/3).
double fresnel_distance(double diameter, double wavelength);

// Classifies the user's distance from the array center against the two
// boundaries; ties fall into the inner (more conservative) region.
FieldRegion region_of(const User &user, const ArrayGeometry &geometry, double wavelength);

// Element radiation profile 2(b+1)·cos^b(theta) on [0, pi/2], 0 elsewhere.
double radiation_profile(double theta, double b);

// Channel vector of one user: entry (i, l) is A_{i,l}·e^{+jk·r_{i,l}} with
// A_{i,l} = sqrt(F(theta_{i,l}))·λ/(4π·r_{i,l}) and r_{i,l} the exact
// element-to-user distance; the received-signal row aᴴ then carries the
// physical phase −k·r. Elements seeing the user beyond their half-space
// (theta outside [0, pi/2]) contribute exactly 0.
ComplexVector steering_vector(const User &user, const ArrayGeometry &geometry,
                              double wavelength, double b = 2.0);

// Planar-wavefront limit of steering_vector: one common gain evaluated at the
// array center and linear phases k·(r₀ − ⟨p/|p|, p_{i,l}⟩). This is the
// classical beamsteering vector the near-field model collapses to at range.
ComplexVector far_field_steering_vector(const User &user, const ArrayGeometry &geometry,
                                        double wavelength, double b = 2.0);

// Diagonal of the waveguide matrix: entry (i, l) is e^{−rho(i,l)·(alpha + j·beta)}.
ComplexVector waveguide_diagonal(const ArrayGeometry &geometry, const DmaParams &params);

// Dense N×N diagonal form of the same matrix.
ComplexMatrix waveguide_matrix(const ArrayGeometry &geometry, const DmaParams &params);

NearFieldChannel build_channel(const std::vector<User> &users, const ArrayGeometry &geometry,
                               double wavelength, double b, double noise_power);

// Builds a channel whose vectors are the far-field limits above; solvers fed
// this channel produce the beamsteering baseline designs.
NearFieldChannel build_far_field_channel(const std::vector<User> &users,
                                         const ArrayGeometry &geometry, double wavelength,
                                         double b, double noise_power);

} // namespace nfbeam::channel

#endif
