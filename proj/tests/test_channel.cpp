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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nfbeam/channel.hpp"

using namespace nfbeam::channel;
using nfbeam::numerics::Complex;
using nfbeam::numerics::ComplexMatrix;
using nfbeam::numerics::ComplexVector;

namespace
{

// Independent scalar re-implementation of one channel entry, written from
// the defining formulas (elevation via acos rather than atan2 on purpose).
Complex oracle_entry(const Point3 &user, const Point3 &element, double wavelength, double b)
{
    const double dx = user.x - element.x;
    const double dy = user.y - element.y;
    const double dz = user.z - element.z;
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double theta = std::acos(dz / r);
    if (theta > 0.5 * pi)
        return {0.0, 0.0};
    const double profile = 2.0 * (b + 1.0) * std::pow(std::cos(theta), b);
    const double amp = std::sqrt(profile) * wavelength / (4.0 * pi * r);
    return std::polar(amp, 2.0 * pi / wavelength * r);
}

// Circular distance between the phase of z and an expected angle.
double phase_gap(Complex z, double expected)
{
    return std::abs(std::arg(z * std::polar(1.0, -expected)));
}

} // namespace

TEST_CASE("fraunhofer_distance reproduces the quoted boundary values")
{
    const double lambda_5ghz = speed_of_light / 5e9;
    CHECK(fraunhofer_distance(0.1, lambda_5ghz) ==
          doctest::Approx(0.333).epsilon(0.005));

    const double lambda_28ghz = speed_of_light / 28e9;
    CHECK(fraunhofer_distance(0.5, lambda_28ghz) == doctest::Approx(46.7).epsilon(0.01));

    CHECK(fraunhofer_distance(1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fraunhofer_distance rejects nonpositive inputs")
{
    CHECK_THROWS_AS((void)fraunhofer_distance(0.0, 0.01), nfbeam::DomainError);
    CHECK_THROWS_AS((void)fraunhofer_distance(0.5, -1.0), nfbeam::DomainError);
}

TEST_CASE("fresnel_distance matches the hand-evaluated closed form")
{
    // cbrt(0.5^4 / (8 * 0.010707)) evaluated by hand
    CHECK(fresnel_distance(0.5, 0.010707) == doctest::Approx(0.900273).epsilon(1e-4));
    CHECK(fresnel_distance(1e-6, 0.01) < 1e-7); // shrinks to zero with D
    CHECK(fresnel_distance(0.2, 0.01) > fresnel_distance(0.1, 0.01));
    CHECK(fresnel_distance(0.8, 0.01) > fresnel_distance(0.4, 0.01));
    CHECK_THROWS_AS((void)fresnel_distance(-0.1, 0.01), nfbeam::DomainError);
}

TEST_CASE("region_of classifies against the aperture-diagonal boundaries")
{
    const double lambda = speed_of_light / 28e9;
    const ArrayGeometry g = make_upa(8, 8, lambda / 2, lambda / 2, ArrayKind::FullyDigital);
    const double d = g.aperture_diameter();
    const double d_f = fraunhofer_distance(d, lambda);
    const double d_n = fresnel_distance(d, lambda);
    REQUIRE(d_n < d_f);

    CHECK(region_of({{0, 0, 0.5 * (d_n + d_f)}}, g, lambda) == FieldRegion::NearField);
    CHECK(region_of({{0, 0, 2.0 * d_f}}, g, lambda) == FieldRegion::FarField);
    CHECK(region_of({{0, 0, 0.5 * d_n}}, g, lambda) == FieldRegion::Reactive);
    // Ties resolve to the inner region.
    CHECK(region_of({{0, 0, d_n}}, g, lambda) == FieldRegion::Reactive);
    CHECK(region_of({{0, 0, d_f}}, g, lambda) == FieldRegion::NearField);
}

TEST_CASE("radiation_profile values")
{
    CHECK(radiation_profile(0.0, 2.0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(radiation_profile(0.5 * pi, 2.0) <= 1e-30);
    CHECK(radiation_profile(2.0, 2.0) == 0.0);
    CHECK(radiation_profile(2.0, 0.0) == 0.0);
    CHECK(radiation_profile(-0.1, 2.0) == 0.0);
    CHECK(radiation_profile(0.3, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("make_upa centers the lattice and validates arguments")
{
    const ArrayGeometry g = make_upa(2, 3, 0.1, 0.2, ArrayKind::FullyDigital);
    REQUIRE(g.element_positions.size() == 6);
    double sx = 0, sy = 0;
    for (const Point3 &p : g.element_positions)
    {
        sx += p.x;
        sy += p.y;
        CHECK(p.z == 0.0);
    }
    CHECK(std::abs(sx) < 1e-15);
    CHECK(std::abs(sy) < 1e-15);

    // Row-major flat index: (i, l) -> i*n_cols + l, x varies fastest.
    const Point3 &p01 = g.element_positions[g.flat_index(0, 1)];
    const Point3 &p00 = g.element_positions[g.flat_index(0, 0)];
    CHECK(p01.x - p00.x == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(p01.y == doctest::Approx(p00.y).epsilon(1e-14));
    const Point3 &p10 = g.element_positions[g.flat_index(1, 0)];
    CHECK(p10.y - p00.y == doctest::Approx(0.1).epsilon(1e-14));

    CHECK(g.aperture_diameter() == doctest::Approx(std::hypot(0.4, 0.1)).epsilon(1e-12));

    CHECK_THROWS_AS((void)make_upa(0, 3, 0.1, 0.1, ArrayKind::FullyDigital),
                    nfbeam::DomainError);
    CHECK_THROWS_AS((void)make_upa(2, 2, -0.1, 0.1, ArrayKind::FullyDigital),
                    nfbeam::DomainError);
    CHECK_THROWS_AS((void)make_upa(2, 2, 0.1, 0.1, ArrayKind::Hybrid, 0),
                    nfbeam::DomainError);
    CHECK_THROWS_AS((void)make_upa(2, 2, 0.1, 0.1, ArrayKind::Hybrid, 5),
                    nfbeam::DomainError);
}

TEST_CASE("steering_vector has equal magnitudes for a distant boresight user")
{
    const double lambda = speed_of_light / 28e9;
    const ArrayGeometry g = make_upa(4, 4, lambda / 2, lambda / 2, ArrayKind::FullyDigital);
    const ComplexVector a = steering_vector({{0, 0, 1000.0}}, g, lambda);
    const arma::vec mags = arma::abs(a);
    CHECK((mags.max() - mags.min()) / mags.max() <= 1e-6);
}

TEST_CASE("steering_vector single-element closed form")
{
    const double lambda = 0.0107;
    const double d = 0.3;
    const double b = 2.0;
    const ArrayGeometry g = make_upa(1, 1, lambda / 2, lambda / 2, ArrayKind::FullyDigital);
    const ComplexVector a = steering_vector({{0, 0, d}}, g, lambda, b);
    REQUIRE(a.n_elem == 1);

    const double expected_mag = std::sqrt(2.0 * (b + 1.0)) * lambda / (4.0 * pi * d);
    CHECK(std::abs(a(0)) == doctest::Approx(expected_mag).epsilon(1e-12));

    // Received-signal convention: the row a^H carries the physical phase
    // -k*d, so the stored entry has phase +k*d.
    const double k = 2.0 * pi / lambda;
    CHECK(phase_gap(std::conj(a(0)), -k * d) <= 1e-9);
}

TEST_CASE("steering_vector matches the scalar oracle at an oblique position")
{
    const double lambda = 0.0107;
    const ArrayGeometry g = make_upa(2, 2, lambda / 2, lambda / 2, ArrayKind::FullyDigital);
    const Point3 user{0.04, -0.03, 0.25};
    const ComplexVector a = steering_vector({user}, g, lambda);
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        const Complex expect = oracle_entry(user, g.element_positions[i], lambda, 2.0);
        CHECK(std::abs(a(i) - expect) <= 1e-12 * std::abs(expect));
    }
}

TEST_CASE("steering_vector throws when the user sits on an element")
{
    const ArrayGeometry g = make_upa(2, 2, 0.01, 0.01, ArrayKind::FullyDigital);
    const Point3 on_element = g.element_positions[1];
    CHECK_THROWS_AS((void)steering_vector({on_element}, g, 0.0107), nfbeam::DegenerateGeometry);
}

TEST_CASE("steering_vector is exactly zero behind the array")
{
    const ArrayGeometry g = make_upa(3, 3, 0.01, 0.01, ArrayKind::FullyDigital);
    const ComplexVector a = steering_vector({{0.02, 0.01, -0.5}}, g, 0.0107);
    for (std::size_t i = 0; i < a.n_elem; ++i)
    {
        CHECK(a(i).real() == 0.0);
        CHECK(a(i).imag() == 0.0);
    }
}

TEST_CASE("steering_vector approaches the planar-wavefront phases at 100 d_F")
{
    const double lambda = speed_of_light / 28e9;
    const ArrayGeometry g = make_upa(8, 8, lambda / 2, lambda / 2, ArrayKind::FullyDigital);
    const double d_f = fraunhofer_distance(g.aperture_diameter(), lambda);
    const User user{{0, 0, 100.0 * d_f}};

    const ComplexVector near = steering_vector(user, g, lambda);
    const ComplexVector ff = far_field_steering_vector(user, g, lambda);

    // Compare phases up to one global rotation (referenced to entry 0).
    const Complex ref = near(0) * std::conj(ff(0));
    double worst = 0.0;
    for (std::size_t i = 0; i < near.n_elem; ++i)
    {
        const Complex rel = near(i) * std::conj(ff(i)) * std::conj(ref);
        worst = std::max(worst, std::abs(std::arg(rel)));
    }
    CHECK(worst <= 0.05);
}

TEST_CASE("steering_vector magnitudes scale inversely with a global rescale")
{
    const double lambda = 0.0107;
    const double s = 3.7;
    const ArrayGeometry g1 = make_upa(3, 4, lambda / 2, lambda / 3, ArrayKind::FullyDigital);
    const ArrayGeometry g2 =
        make_upa(3, 4, s * lambda / 2, s * lambda / 3, ArrayKind::FullyDigital);
    const Point3 u{0.05, 0.02, 0.4};
    const ComplexVector a1 = steering_vector({u}, g1, lambda);
    const ComplexVector a2 = steering_vector({{s * u.x, s * u.y, s * u.z}}, g2, lambda);
    for (std::size_t i = 0; i < a1.n_elem; ++i)
        CHECK(std::abs(a2(i)) == doctest::Approx(std::abs(a1(i)) / s).epsilon(1e-9));
}

TEST_CASE("make_dma_params measures rho from each strip's feed end")
{
    const ArrayGeometry g = make_upa(2, 4, 0.005, 0.002, ArrayKind::Dma);
    const DmaParams p = make_dma_params(g, 0.6, 827.67);
    REQUIRE(p.rho.n_rows == 2);
    REQUIRE(p.rho.n_cols == 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t l = 0; l < 4; ++l)
            CHECK(p.rho(i, l) == doctest::Approx(0.002 * static_cast<double>(l)).epsilon(1e-12));

    CHECK_THROWS_AS((void)make_dma_params(g, -0.1, 800.0), nfbeam::DomainError);
    CHECK_THROWS_AS((void)make_dma_params(g, 0.6, 0.0), nfbeam::DomainError);
}

TEST_CASE("waveguide entries follow the attenuation/phase law")
{
    const ArrayGeometry g = make_upa(1, 2, 0.005, 0.01, ArrayKind::Dma);
    const DmaParams p = make_dma_params(g, 0.6, 827.67);
    const ComplexVector h = waveguide_diagonal(g, p);
    REQUIRE(h.n_elem == 2);

    CHECK(std::abs(h(0) - Complex(1.0, 0.0)) <= 1e-14); // feed element, rho = 0

    CHECK(std::abs(h(1)) == doctest::Approx(std::exp(-0.006)).epsilon(1e-12));
    CHECK(phase_gap(h(1), -8.2767) <= 1e-9);
}

TEST_CASE("waveguide magnitude decays strictly along a strip when alpha > 0")
{
    const ArrayGeometry g = make_upa(1, 6, 0.005, 0.002, ArrayKind::Dma);
    const DmaParams p = make_dma_params(g, 0.6, 827.67);
    const ComplexVector h = waveguide_diagonal(g, p);
    for (std::size_t l = 1; l < 6; ++l)
        CHECK(std::abs(h(l)) < std::abs(h(l - 1)));
}

TEST_CASE("waveguide_matrix is exactly diagonal and matches the diagonal form")
{
    const ArrayGeometry g = make_upa(2, 3, 0.005, 0.002, ArrayKind::Dma);
    const DmaParams p = make_dma_params(g, 0.6, 827.67);
    const ComplexMatrix m = waveguide_matrix(g, p);
    const ComplexVector h = waveguide_diagonal(g, p);
    REQUIRE(m.n_rows == 6);
    REQUIRE(m.n_cols == 6);
    for (arma::uword i = 0; i < 6; ++i)
        for (arma::uword j = 0; j < 6; ++j)
        {
            if (i == j)
                CHECK(std::abs(m(i, j) - h(i)) == 0.0);
            else
            {
                CHECK(m(i, j).real() == 0.0);
                CHECK(m(i, j).imag() == 0.0);
            }
        }
}

TEST_CASE("build_channel stacks per-user steering vectors")
{
    const double lambda = 0.0107;
    const ArrayGeometry g = make_upa(3, 3, lambda / 2, lambda / 2, ArrayKind::FullyDigital);

    const std::vector<User> one{{{0.01, 0.0, 0.3}}};
    const NearFieldChannel single = build_channel(one, g, lambda, 2.0, 1e-12);
    REQUIRE(single.n_users() == 1);
    const ComplexVector direct = steering_vector(one[0], g, lambda, 2.0);
    CHECK(arma::abs(single.a[0] - direct).max() == 0.0);

    const std::vector<User> dup{{{0.01, 0.0, 0.3}}, {{0.01, 0.0, 0.3}}};
    const NearFieldChannel twice = build_channel(dup, g, lambda, 2.0, 1e-12);
    CHECK(arma::abs(twice.a[0] - twice.a[1]).max() == 0.0);

    const std::vector<User> three{{{0.02, 0.01, 0.2}}, {{-0.05, 0.0, 0.35}}, {{0.0, 0.03, 0.5}}};
    const NearFieldChannel ch = build_channel(three, g, lambda, 2.0, 1e-12);
    for (std::size_t m = 0; m < 3; ++m)
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            const Complex expect =
                oracle_entry(three[m].position, g.element_positions[i], lambda, 2.0);
            CHECK(std::abs(ch.a[m](i) - expect) <= 1e-12 * (1.0 + std::abs(expect)));
        }
}

TEST_CASE("build_channel validates inputs")
{
    const ArrayGeometry g = make_upa(2, 2, 0.01, 0.01, ArrayKind::FullyDigital);
    CHECK_THROWS_AS((void)build_channel({}, g, 0.0107, 2.0, 1e-12), nfbeam::DomainError);
    CHECK_THROWS_AS((void)build_channel({{{0, 0, 0.3}}}, g, 0.0107, 2.0, 0.0),
                    nfbeam::DomainError);
}
