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

#ifndef FAPT_CHANNEL_HPP
#define FAPT_CHANNEL_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "fapt/geometry.hpp"

namespace fapt
{
    // N x M complex matrix, row-major; rows index z-ports (n), columns y-ports (m).
    struct CxTable
    {
        int rows = 0; // N
        int cols = 0; // M
        std::vector<cxd> a;

        CxTable() = default;
        CxTable(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}

        cxd& at(int n, int m) { return a[static_cast<std::size_t>(n) * cols + m]; } // 0-based
        const cxd& at(int n, int m) const { return a[static_cast<std::size_t>(n) * cols + m]; }
        std::size_t size() const { return a.size(); }
    };

    // A time series of tables: steps x N x M, row-major [t][n][m].
    struct CxSeries
    {
        int steps = 0;
        int rows = 0;
        int cols = 0;
        std::vector<cxd> a;

        CxSeries() = default;
        CxSeries(int t, int r, int c)
            : steps(t), rows(r), cols(c), a(static_cast<std::size_t>(t) * r * c)
        {
        }

        std::size_t table_size() const { return static_cast<std::size_t>(rows) * cols; }
        cxd* slice(int t) { return a.data() + static_cast<std::size_t>(t) * table_size(); }
        const cxd* slice(int t) const { return a.data() + static_cast<std::size_t>(t) * table_size(); }

        cxd& at(int t, int n, int m)
        {
            return a[(static_cast<std::size_t>(t) * rows + n) * cols + m];
        }
        const cxd& at(int t, int n, int m) const
        {
            return a[(static_cast<std::size_t>(t) * rows + n) * cols + m];
        }

        CxTable table(int t) const
        {
            CxTable out(rows, cols);
            const cxd* s = slice(t);
            std::copy(s, s + table_size(), out.a.begin());
            return out;
        }
    };

    // Channel coefficient between BS element k (1-based) and port (n, m) (1-based)
    // at time t seconds: sum over paths of
    //   alpha_p beta_p exp(j2pi r_rx.d_rx/lambda) exp(j2pi r_tx.d_tx/lambda)
    //                  exp(j2pi w_p t) exp(j2pi f tau_p).
    cxd channel_coeff(int k, int n, int m, double t, const PathSet& ps,
                      const ArrayGeometry& geom, const PortGrid& grid);

    // Table of channel_coeff values for BS element i over the whole port grid.
    CxTable channel_table(int i, double t, const PathSet& ps, const ArrayGeometry& geom,
                          const PortGrid& grid);

    // Constant table replicating a reference scalar over all ports.
    CxTable reference_table(cxd h_ref_i, const PortGrid& grid);

    // Tables for every BS element at a list of time instants, factorized over
    // paths for speed. Layout: result[t * N_t + (k-1)] is the table of element k
    // at times[t]. Matches channel_table within accumulated rounding (~1e-12).
    std::vector<CxTable> channel_stack_series(const std::vector<double>& times, const PathSet& ps,
                                              const ArrayGeometry& geom, const PortGrid& grid);

} // namespace fapt

#endif
