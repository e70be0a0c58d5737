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

#ifndef FAPT_GEOMETRY_HPP
#define FAPT_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fapt
{
    inline constexpr double kSpeedOfLight = 299792458.0; // m/s
    inline constexpr double kPi = 3.141592653589793238462643383279502884;
    inline constexpr double kTwoPi = 2.0 * kPi;

    using Vec3 = std::array<double, 3>;
    using cxd = std::complex<double>;

    inline double dot(const Vec3& a, const Vec3& b)
    {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    }

    inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

    // Base-station uniform planar array in the yOz plane. Spacings are in
    // wavelengths; element count N_t = n_y * n_z.
    struct ArrayGeometry
    {
        int n_y = 1;       // columns (y axis)
        int n_z = 1;       // rows (z axis)
        double d_ty = 0.5; // spacing along y, wavelengths
        double d_tz = 0.5; // spacing along z, wavelengths

        int n_elements() const { return n_y * n_z; }

        void validate() const
        {
            if (n_y < 1 || n_z < 1)
                throw std::invalid_argument("ArrayGeometry: element counts must be >= 1");
            if (!(d_ty > 0.0) || !(d_tz > 0.0))
                throw std::invalid_argument("ArrayGeometry: spacings must be positive");
        }
    };

    // Receiver-side port lattice: N ports along z, M ports along y, spanning an
    // aperture of w_y x w_z wavelengths.
    struct PortGrid
    {
        int n_ports_z = 2;  // N
        int n_ports_y = 2;  // M
        double w_y = 1.0;   // aperture along y, wavelengths
        double w_z = 1.0;   // aperture along z, wavelengths

        int n_ports() const { return n_ports_z * n_ports_y; }

        // Inter-port distances in meters.
        double spacing_y_m(double lambda_m) const { return w_y * lambda_m / (n_ports_y - 1); }
        double spacing_z_m(double lambda_m) const { return w_z * lambda_m / (n_ports_z - 1); }

        // Port densities in ports per wavelength.
        double density_y() const { return (n_ports_y - 1) / w_y; }
        double density_z() const { return (n_ports_z - 1) / w_z; }

        void validate() const
        {
            if (n_ports_z < 2 || n_ports_y < 2)
                throw std::invalid_argument("PortGrid: port counts must be >= 2");
            if (!(w_y > 0.0) || !(w_z > 0.0))
                throw std::invalid_argument("PortGrid: apertures must be positive");
        }
    };

    // One propagation path. Angles in radians, theta in [0, pi], phi in (-pi, pi].
    struct Path
    {
        double theta_eod = kPi / 2; // departure elevation
        double phi_aod = 0.0;       // departure azimuth
        double theta_eoa = kPi / 2; // arrival elevation
        double phi_aoa = 0.0;       // arrival azimuth
        double tau = 0.0;           // delay, seconds
        double beta = 1.0;          // real amplitude
        bool is_los = false;
        double doppler_w = 0.0;     // Hz, derived from arrival direction and velocity
    };

    struct PathSet
    {
        std::vector<Path> paths;   // length P+1, exactly one LoS entry
        double ricean_k = 10.0;    // linear
        double carrier_lambda = 1.0; // meters
        double freq_offset = 0.0;  // Hz, the f in exp(j 2 pi f tau)

        // Ricean amplitude weight of a path.
        double alpha(const Path& p) const
        {
            return p.is_los ? std::sqrt(ricean_k / (ricean_k + 1.0))
                            : std::sqrt(1.0 / (ricean_k + 1.0));
        }
    };

    struct Velocity
    {
        Vec3 v{0.0, 0.0, 0.0}; // m/s

        double speed() const { return norm(v); }
    };

    // Wraps phi into (-pi, pi] and folds theta into [0, pi], adjusting phi when
    // the elevation flips hemisphere.
    void canonicalize_angles(double& theta, double& phi);

    // Position of the k-th (1-based) array element, meters. The element index
    // decodes z-major: k-1 = (n_y-1)*N_z + (n_z-1).
    Vec3 bs_antenna_position(int k, const ArrayGeometry& geom, double lambda_m);

    // Position of port (n, m), 1-based, meters.
    Vec3 fa_port_position(int n, int m, const PortGrid& grid, double lambda_m);

    // Unit direction [sin(t)cos(p), sin(t)sin(p), cos(t)].
    Vec3 spherical_unit_vector(double theta, double phi);

    // Doppler shift (r_rx . v) / lambda in Hz, from the path's arrival angles.
    double doppler_shift(const Path& path, const Velocity& vel, double lambda_m);

    // 3-D transmit steering vector a_y kron a_z; entry k follows the z-major
    // element mapping above. Every entry has unit modulus.
    std::vector<cxd> steering_vector(double theta_tx, double phi_tx, const ArrayGeometry& geom);

} // namespace fapt

#endif
