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

#include "nfbeam/channel.hpp"

#include <cmath>
#include <string>

namespace nfbeam::channel
{

namespace
{
constexpr double degenerate_distance = 1e-9; // meters

void check_positive(double value, const char *name)
{
    if (!(value > 0.0))
        throw DomainError(std::string(name) + " must be positive, got " + std::to_string(value));
}
} // namespace

double distance(const Point3 &a, const Point3 &b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double ArrayGeometry::aperture_diameter() const
{
    if (element_positions.empty())
        return 0.0;
    double x_min = element_positions.front().x, x_max = x_min;
    double y_min = element_positions.front().y, y_max = y_min;
    for (const Point3 &p : element_positions)
    {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }
    return std::hypot(x_max - x_min, y_max - y_min);
}

ArrayGeometry make_upa(std::size_t n_rows, std::size_t n_cols, double row_spacing,
                       double col_spacing, ArrayKind kind, std::size_t n_rf)
{
    if (n_rows == 0 || n_cols == 0)
        throw DomainError("make_upa: element counts must be nonzero");
    check_positive(row_spacing, "row_spacing");
    check_positive(col_spacing, "col_spacing");
    if (kind == ArrayKind::Hybrid && (n_rf < 1 || n_rf > n_rows * n_cols))
        throw DomainError("make_upa: n_rf must lie in [1, " +
                          std::to_string(n_rows * n_cols) + "], got " + std::to_string(n_rf));

    ArrayGeometry g;
    g.n_rows = n_rows;
    g.n_cols = n_cols;
    g.row_spacing = row_spacing;
    g.col_spacing = col_spacing;
    g.kind = kind;
    g.n_rf = (kind == ArrayKind::Hybrid) ? n_rf : 0;

    // Lattice centered on the origin in the z = 0 plane.
    const double x0 = -0.5 * static_cast<double>(n_cols - 1) * col_spacing;
    const double y0 = -0.5 * static_cast<double>(n_rows - 1) * row_spacing;
    g.element_positions.reserve(n_rows * n_cols);
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t l = 0; l < n_cols; ++l)
            g.element_positions.push_back(
                {x0 + static_cast<double>(l) * col_spacing,
                 y0 + static_cast<double>(i) * row_spacing, 0.0});
    return g;
}

DmaParams make_dma_params(const ArrayGeometry &geometry, double alpha, double beta)
{
    if (alpha < 0.0)
        throw DomainError("make_dma_params: alpha must be nonnegative, got " +
                          std::to_string(alpha));
    check_positive(beta, "beta");

    // Each row is a microstrip fed at its first (lowest-x) element; the
    // in-strip coordinate is the x-offset from that feed.
    DmaParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.rho.set_size(geometry.n_rows, geometry.n_cols);
    for (std::size_t i = 0; i < geometry.n_rows; ++i)
    {
        const double feed_x = geometry.element_positions[geometry.flat_index(i, 0)].x;
        for (std::size_t l = 0; l < geometry.n_cols; ++l)
            p.rho(i, l) = geometry.element_positions[geometry.flat_index(i, l)].x - feed_x;
    }
    return p;
}

double fraunhofer_distance(double diameter, double wavelength)
{
    check_positive(diameter, "diameter");
    check_positive(wavelength, "wavelength");
    return 2.0 * diameter * diameter / wavelength;
}

double fresnel_distance(double diameter, double wavelength)
{
    check_positive(diameter, "diameter");
    check_positive(wavelength, "wavelength");
    return std::cbrt(diameter * diameter * diameter * diameter / (8.0 * wavelength));
}

FieldRegion region_of(const User &user, const ArrayGeometry &geometry, double wavelength)
{
    check_positive(wavelength, "wavelength");
    const double d = geometry.aperture_diameter();
    const double d_f = (d > 0.0) ? fraunhofer_distance(d, wavelength) : 0.0;
    const double d_n = (d > 0.0) ? fresnel_distance(d, wavelength) : 0.0;
    const double r = distance(user.position, Point3{});
    if (r <= d_n)
        return FieldRegion::Reactive;
    if (r <= d_f)
        return FieldRegion::NearField;
    return FieldRegion::FarField;
}

double radiation_profile(double theta, double b)
{
    if (theta < 0.0 || theta > 0.5 * pi)
        return 0.0;
    return 2.0 * (b + 1.0) * std::pow(std::cos(theta), b);
}

ComplexVector steering_vector(const User &user, const ArrayGeometry &geometry,
                              double wavelength, double b)
{
    check_positive(wavelength, "wavelength");

    // Positions behind the array plane are allowed here on purpose: every
    // element then sees the point outside [0, pi/2] and contributes an exact
    // zero, which is what probe sweeps behind the aperture rely on.
    const double k = 2.0 * pi / wavelength;
    const std::size_t n = geometry.size();
    ComplexVector a(n, arma::fill::zeros);

    for (std::size_t idx = 0; idx < n; ++idx)
    {
        const Point3 &e = geometry.element_positions[idx];
        const double r = distance(user.position, e);
        if (r < degenerate_distance)
            throw DegenerateGeometry("steering_vector: user coincides with element " +
                                     std::to_string(idx) + " (distance " + std::to_string(r) +
                                     " m)");

        // Elevation from the element's broadside (+z); azimuth never enters
        // the radiation profile and is not needed here.
        const double lateral = std::hypot(user.position.x - e.x, user.position.y - e.y);
        const double theta = std::atan2(lateral, user.position.z - e.z);
        const double profile = radiation_profile(theta, b);
        if (profile == 0.0)
            continue; // structurally zero entry behind the element

        const double gain = std::sqrt(profile) * wavelength / (4.0 * pi * r);
        a(idx) = std::polar(gain, k * r);
    }
    return a;
}

ComplexVector far_field_steering_vector(const User &user, const ArrayGeometry &geometry,
                                        double wavelength, double b)
{
    check_positive(wavelength, "wavelength");

    const double k = 2.0 * pi / wavelength;
    const double r0 = distance(user.position, Point3{});
    if (r0 < degenerate_distance)
        throw DegenerateGeometry("far_field_steering_vector: user at the array center");

    const double lateral = std::hypot(user.position.x, user.position.y);
    const double theta0 = std::atan2(lateral, user.position.z);
    const double profile = radiation_profile(theta0, b);
    const double gain = std::sqrt(profile) * wavelength / (4.0 * pi * r0);

    // Unit direction toward the user; the wavefront is planar across the
    // aperture, so each element only sees the projection of its position.
    const double ux = user.position.x / r0;
    const double uy = user.position.y / r0;
    const double uz = user.position.z / r0;

    const std::size_t n = geometry.size();
    ComplexVector a(n, arma::fill::zeros);
    if (gain == 0.0)
        return a;
    for (std::size_t idx = 0; idx < n; ++idx)
    {
        const Point3 &e = geometry.element_positions[idx];
        const double projected = ux * e.x + uy * e.y + uz * e.z;
        a(idx) = std::polar(gain, k * (r0 - projected));
    }
    return a;
}

ComplexVector waveguide_diagonal(const ArrayGeometry &geometry, const DmaParams &params)
{
    if (params.rho.n_rows != geometry.n_rows || params.rho.n_cols != geometry.n_cols)
        throw DomainError("waveguide_diagonal: rho dimensions do not match the geometry");

    const std::size_t n = geometry.size();
    ComplexVector h(n);
    for (std::size_t i = 0; i < geometry.n_rows; ++i)
        for (std::size_t l = 0; l < geometry.n_cols; ++l)
        {
            const double rho = params.rho(i, l);
            h(geometry.flat_index(i, l)) =
                std::polar(std::exp(-rho * params.alpha), -rho * params.beta);
        }
    return h;
}

ComplexMatrix waveguide_matrix(const ArrayGeometry &geometry, const DmaParams &params)
{
    const ComplexVector h = waveguide_diagonal(geometry, params);
    ComplexMatrix m(h.n_elem, h.n_elem, arma::fill::zeros);
    m.diag() = h;
    return m;
}

NearFieldChannel build_channel(const std::vector<User> &users, const ArrayGeometry &geometry,
                               double wavelength, double b, double noise_power)
{
    if (users.empty())
        throw DomainError("build_channel: at least one user required");
    check_positive(noise_power, "noise_power");

    NearFieldChannel ch;
    ch.noise_power = noise_power;
    ch.wavelength = wavelength;
    ch.a.reserve(users.size());
    for (const User &u : users)
        ch.a.push_back(steering_vector(u, geometry, wavelength, b));
    return ch;
}

NearFieldChannel build_far_field_channel(const std::vector<User> &users,
                                         const ArrayGeometry &geometry, double wavelength,
                                         double b, double noise_power)
{
    if (users.empty())
        throw DomainError("build_far_field_channel: at least one user required");
    check_positive(noise_power, "noise_power");

    NearFieldChannel ch;
    ch.noise_power = noise_power;
    ch.wavelength = wavelength;
    ch.a.reserve(users.size());
    for (const User &u : users)
        ch.a.push_back(far_field_steering_vector(u, geometry, wavelength, b));
    return ch;
}

} // namespace nfbeam::channel
