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

#include "fapt/channel.hpp"

namespace fapt
{

    cxd channel_coeff(int k, int n, int m, double t, const PathSet& ps,
                      const ArrayGeometry& geom, const PortGrid& grid)
    {
        double lambda = ps.carrier_lambda;
        Vec3 d_tx = bs_antenna_position(k, geom, lambda);
        Vec3 d_rx = fa_port_position(n, m, grid, lambda);

        cxd h(0.0, 0.0);
        for (const Path& p : ps.paths)
        {
            Vec3 r_rx = spherical_unit_vector(p.theta_eoa, p.phi_aoa);
            Vec3 r_tx = spherical_unit_vector(p.theta_eod, p.phi_aod);
            double phase = kTwoPi * (dot(r_rx, d_rx) / lambda + dot(r_tx, d_tx) / lambda +
                                     p.doppler_w * t + ps.freq_offset * p.tau);
            h += ps.alpha(p) * p.beta * std::polar(1.0, phase);
        }
        return h;
    }

    CxTable channel_table(int i, double t, const PathSet& ps, const ArrayGeometry& geom,
                          const PortGrid& grid)
    {
        CxTable out(grid.n_ports_z, grid.n_ports_y);
        for (int n = 1; n <= grid.n_ports_z; ++n)
            for (int m = 1; m <= grid.n_ports_y; ++m)
                out.at(n - 1, m - 1) = channel_coeff(i, n, m, t, ps, geom, grid);
        return out;
    }

    CxTable reference_table(cxd h_ref_i, const PortGrid& grid)
    {
        CxTable out(grid.n_ports_z, grid.n_ports_y);
        std::fill(out.a.begin(), out.a.end(), h_ref_i);
        return out;
    }

    std::vector<CxTable> channel_stack_series(const std::vector<double>& times, const PathSet& ps,
                                              const ArrayGeometry& geom, const PortGrid& grid)
    {
        const int n_t = geom.n_elements();
        const int N = grid.n_ports_z;
        const int M = grid.n_ports_y;
        const int P = static_cast<int>(ps.paths.size());
        const double lambda = ps.carrier_lambda;

        // Per-path factors: the coefficient splits into
        //   [alpha beta e^{j2pi f tau}] * rx(n,m) * tx(k) * time(t),
        // where rx and tx separate further into per-axis geometric factors.
        std::vector<cxd> rx(static_cast<std::size_t>(P) * N * M);
        std::vector<cxd> tx(static_cast<std::size_t>(P) * n_t);
        std::vector<cxd> base(P);

        double dry = grid.spacing_y_m(lambda);
        double drz = grid.spacing_z_m(lambda);

        for (int p = 0; p < P; ++p)
        {
            const Path& path = ps.paths[p];
            base[p] = ps.alpha(path) * path.beta *
                      std::polar(1.0, kTwoPi * ps.freq_offset * path.tau);

            Vec3 r_rx = spherical_unit_vector(path.theta_eoa, path.phi_aoa);
            cxd step_y = std::polar(1.0, kTwoPi * r_rx[1] * dry / lambda);
            cxd step_z = std::polar(1.0, kTwoPi * r_rx[2] * drz / lambda);

            cxd fz(1.0, 0.0);
            for (int n = 0; n < N; ++n)
            {
                cxd f = fz;
                cxd* row = rx.data() + (static_cast<std::size_t>(p) * N + n) * M;
                for (int m = 0; m < M; ++m)
                {
                    row[m] = f;
                    f *= step_y;
                }
                fz *= step_z;
            }

            std::vector<cxd> a = steering_vector(path.theta_eod, path.phi_aod, geom);
            std::copy(a.begin(), a.end(), tx.begin() + static_cast<std::size_t>(p) * n_t);
        }

        std::vector<CxTable> out;
        out.reserve(times.size() * static_cast<std::size_t>(n_t));
        std::vector<cxd> coef(P);
        for (double t : times)
        {
            for (int k = 0; k < n_t; ++k)
            {
                for (int p = 0; p < P; ++p)
                    coef[p] = base[p] * tx[static_cast<std::size_t>(p) * n_t + k] *
                              std::polar(1.0, kTwoPi * ps.paths[p].doppler_w * t);

                CxTable tab(N, M);
                for (int p = 0; p < P; ++p)
                {
                    const cxd c = coef[p];
                    const cxd* src = rx.data() + static_cast<std::size_t>(p) * N * M;
                    cxd* dst = tab.a.data();
                    for (std::size_t idx = 0; idx < tab.size(); ++idx)
                        dst[idx] += c * src[idx];
                }
                out.push_back(std::move(tab));
            }
        }
        return out;
    }

} // namespace fapt
