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

#ifndef FAPT_PORT_SELECT_HPP
#define FAPT_PORT_SELECT_HPP

#include <vector>

#include "fapt/channel.hpp"

namespace fapt
{
    // A port on the N x M lattice. n is the 1-based z index, m the 1-based y
    // index, flat the 0-based row-major index: flat = (n-1)*M + (m-1).
    struct PortIndex
    {
        int n = 1;
        int m = 1;
        int flat = 0;

        bool operator==(const PortIndex&) const = default;
    };

    PortIndex flat_to_port(int p, int n_rows, int n_cols);

    // Port minimizing |pred - ref| elementwise modulus; ties resolve to the
    // lowest flat index.
    PortIndex select_port_single(const CxTable& pred, const CxTable& ref);

    // Port minimizing the sum over antennas of |pred_i - ref_i|. Stacks hold one
    // table per BS antenna and must agree in shape.
    PortIndex select_port_miso(const std::vector<CxTable>& pred_stack,
                               const std::vector<CxTable>& ref_stack);

    // Intentionally naive reference implementation of select_port_miso: explicit
    // loops over (n, m), first minimizer wins. Kept independent of the selection
    // path above so the two can be checked against each other.
    PortIndex brute_force_port_oracle(const std::vector<CxTable>& pred_stack,
                                      const std::vector<CxTable>& ref_stack);

    // 10 log10(||h - h_ref||^2 / ||h_ref||^2). Exact match returns -infinity.
    double validation_nmse(const std::vector<cxd>& h, const std::vector<cxd>& h_ref);

    // (1 - sum|pred - truth| / sum|truth|) * 100, clamped to [0, 100].
    double table_accuracy(const CxSeries& pred, const CxSeries& truth);

} // namespace fapt

#endif
