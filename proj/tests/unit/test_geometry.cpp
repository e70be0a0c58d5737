// SPDX-License-Identifier: Apache-2.0
//
// fapt - fluid antenna port prediction toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include "fapt/geometry.hpp"

using namespace fapt;

TEST_CASE("bs antenna positions follow the z-major element mapping")
{
    ArrayGeometry geom{2, 8, 0.5, 0.5};

    Vec3 p1 = bs_antenna_position(1, geom, 1.0);
    CHECK(p1[0] == 0.0);
    CHECK(p1[1] == 0.0);
    CHECK(p1[2] == 0.0);

    // k=2 -> (n_y, n_z) = (1, 2): one step along z.
    Vec3 p2 = bs_antenna_position(2, geom, 1.0);
    CHECK(p2[1] == doctest::Approx(0.0));
    CHECK(p2[2] == doctest::Approx(0.5));

    // k=9 -> (n_y, n_z) = (2, 1): one step along y.
    Vec3 p9 = bs_antenna_position(9, geom, 1.0);
    CHECK(p9[1] == doctest::Approx(0.5));
    CHECK(p9[2] == doctest::Approx(0.0));

    // Wavelength scales positions.
    Vec3 p9l = bs_antenna_position(9, geom, 2.0);
    CHECK(p9l[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(bs_antenna_position(0, geom, 1.0), std::out_of_range);
    CHECK_THROWS_AS(bs_antenna_position(17, geom, 1.0), std::out_of_range);
}

TEST_CASE("fa port positions and derived spacings")
{
    PortGrid grid{100, 50, 10.0, 20.0};

    Vec3 p11 = fa_port_position(1, 1, grid, 1.0);
    CHECK(p11[1] == 0.0);
    CHECK(p11[2] == 0.0);

    CHECK(grid.spacing_y_m(1.0) == doctest::Approx(10.0 / 49.0));
    CHECK(grid.spacing_z_m(1.0) == doctest::Approx(20.0 / 99.0));

    Vec3 p23 = fa_port_position(2, 3, grid, 1.0);
    CHECK(p23[1] == doctest::Approx(2.0 * 10.0 / 49.0));
    CHECK(p23[2] == doctest::Approx(20.0 / 99.0));

    CHECK(grid.density_y() == doctest::Approx(49.0 / 10.0));
    CHECK(grid.density_z() == doctest::Approx(99.0 / 20.0));

    CHECK_THROWS_AS(fa_port_position(0, 1, grid, 1.0), std::out_of_range);
    CHECK_THROWS_AS(fa_port_position(1, 51, grid, 1.0), std::out_of_range);
}

TEST_CASE("spherical unit vectors")
{
    Vec3 a = spherical_unit_vector(kPi / 2, 0.0);
    CHECK(a[0] == doctest::Approx(1.0));
    CHECK(a[1] == doctest::Approx(0.0));
    CHECK(a[2] == doctest::Approx(0.0).epsilon(1e-12));

    Vec3 b = spherical_unit_vector(0.0, 1.234);
    CHECK(b[2] == doctest::Approx(1.0));

    Vec3 c = spherical_unit_vector(kPi / 3, kPi / 4);
    CHECK(c[0] == doctest::Approx(0.6123724357).epsilon(1e-9));
    CHECK(c[1] == doctest::Approx(0.6123724357).epsilon(1e-9));
    CHECK(c[2] == doctest::Approx(0.5).epsilon(1e-12));

    // Unit norm over a sweep.
    for (double theta : {0.0, 0.3, 1.1, 2.2, kPi})
        for (double phi : {-3.0, -1.0, 0.0, 0.5, 3.1})
            CHECK(norm(spherical_unit_vector(theta, phi)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("doppler shift from arrival direction and velocity")
{
    Path p;
    p.theta_eoa = kPi / 2;
    p.phi_aoa = 0.0; // arrival direction +x

    CHECK(doppler_shift(p, Velocity{{0, 0, 0}}, 0.0076923) == 0.0);

    // 120 km/h aligned with the arrival direction at lambda = 3e8 / 39 GHz.
    double lambda = 3e8 / 39e9;
    double v = 120.0 / 3.6;
    double w = doppler_shift(p, Velocity{{v, 0, 0}}, lambda);
    CHECK(w == doctest::Approx(4333.3).epsilon(1e-4));

    // Orthogonal velocity projects to zero.
    CHECK(doppler_shift(p, Velocity{{0, 0, 7.0}}, lambda) == doctest::Approx(0.0));
}

TEST_CASE("steering vector structure")
{
    SUBCASE("single element")
    {
        ArrayGeometry geom{1, 1, 0.5, 0.5};
        auto a = steering_vector(0.7, -0.3, geom);
        REQUIRE(a.size() == 1);
        CHECK(a[0] == cxd(1.0, 0.0));
    }

    SUBCASE("1x2 array at theta=0 gives [1, -1]")
    {
        ArrayGeometry geom{1, 2, 0.5, 0.5};
        auto a = steering_vector(0.0, 0.0, geom);
        REQUIRE(a.size() == 2);
        CHECK(a[0].real() == doctest::Approx(1.0));
        CHECK(a[1].real() == doctest::Approx(-1.0));
        CHECK(std::abs(a[1].imag()) < 1e-12);
    }

    SUBCASE("unit modulus everywhere")
    {
        ArrayGeometry geom{3, 4, 0.5, 0.7};
        auto a = steering_vector(1.1, 2.0, geom);
        for (const cxd& v : a)
            CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
    }

    SUBCASE("kron ordering matches element positions")
    {
        // Phase of entry k must equal 2*pi*(r_tx . d_tx)/lambda for the k-th
        // element position; checks the a_y kron a_z ordering choice.
        ArrayGeometry geom{3, 2, 0.4, 0.6};
        double theta = 1.0, phi = -0.8, lambda = 0.01;
        auto a = steering_vector(theta, phi, geom);
        Vec3 r = spherical_unit_vector(theta, phi);
        for (int k = 1; k <= geom.n_elements(); ++k)
        {
            Vec3 d = bs_antenna_position(k, geom, lambda);
            cxd expected = std::polar(1.0, kTwoPi * dot(r, d) / lambda);
            CHECK(std::abs(a[static_cast<std::size_t>(k - 1)] - expected) < 1e-9);
        }
    }
}

TEST_CASE("angle canonicalization folds elevation and wraps azimuth")
{
    double theta = 218.0 * kPi / 180.0; // beyond pi
    double phi = 0.5;
    canonicalize_angles(theta, phi);
    CHECK(theta == doctest::Approx(142.0 * kPi / 180.0));
    CHECK(phi == doctest::Approx(0.5 + kPi - kTwoPi)); // wrapped into (-pi, pi]
    CHECK(theta >= 0.0);
    CHECK(theta <= kPi);

    double t2 = 1.0, p2 = 4.0; // azimuth beyond pi wraps negative
    canonicalize_angles(t2, p2);
    CHECK(p2 == doctest::Approx(4.0 - kTwoPi));
}
