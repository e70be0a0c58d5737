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

#include "fapt/geometry.hpp"

namespace fapt
{

    void canonicalize_angles(double& theta, double& phi)
    {
        theta = std::fmod(theta, kTwoPi);
        if (theta < 0.0)
            theta += kTwoPi;
        if (theta > kPi)
        {
            theta = kTwoPi - theta;
            phi += kPi;
        }
        phi = std::fmod(phi, kTwoPi);
        if (phi <= -kPi)
            phi += kTwoPi;
        else if (phi > kPi)
            phi -= kTwoPi;
    }

    Vec3 bs_antenna_position(int k, const ArrayGeometry& geom, double lambda_m)
    {
        if (k < 1 || k > geom.n_elements())
            throw std::out_of_range("bs_antenna_position: element index out of range");
        int iy = (k - 1) / geom.n_z; // n_y - 1
        int iz = (k - 1) % geom.n_z; // n_z - 1
        return {0.0, geom.d_ty * lambda_m * iy, geom.d_tz * lambda_m * iz};
    }

    Vec3 fa_port_position(int n, int m, const PortGrid& grid, double lambda_m)
    {
        if (n < 1 || n > grid.n_ports_z || m < 1 || m > grid.n_ports_y)
            throw std::out_of_range("fa_port_position: port index out of range");
        return {0.0, grid.spacing_y_m(lambda_m) * (m - 1), grid.spacing_z_m(lambda_m) * (n - 1)};
    }

    Vec3 spherical_unit_vector(double theta, double phi)
    {
        double st = std::sin(theta);
        return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
    }

    double doppler_shift(const Path& path, const Velocity& vel, double lambda_m)
    {
        Vec3 r_rx = spherical_unit_vector(path.theta_eoa, path.phi_aoa);
        return dot(r_rx, vel.v) / lambda_m;
    }

    std::vector<cxd> steering_vector(double theta_tx, double phi_tx, const ArrayGeometry& geom)
    {
        // Spacings are in wavelengths, so the 1/lambda factor cancels and phases
        // depend only on the electrical spacing.
        double psi_y = kTwoPi * std::sin(theta_tx) * std::sin(phi_tx) * geom.d_ty;
        double psi_z = kTwoPi * std::cos(theta_tx) * geom.d_tz;

        std::vector<cxd> a(static_cast<std::size_t>(geom.n_elements()));
        for (int iy = 0; iy < geom.n_y; ++iy)
        {
            cxd ay = std::polar(1.0, psi_y * iy);
            for (int iz = 0; iz < geom.n_z; ++iz)
                a[static_cast<std::size_t>(iy) * geom.n_z + iz] = ay * std::polar(1.0, psi_z * iz);
        }
        return a;
    }

} // namespace fapt
