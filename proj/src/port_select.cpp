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

#include "fapt/port_select.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fapt
{

    PortIndex flat_to_port(int p, int n_rows, int n_cols)
    {
        if (p < 0 || p >= n_rows * n_cols)
            throw std::out_of_range("flat_to_port: flat index out of range");
        return {p / n_cols + 1, p % n_cols + 1, p};
    }

    static void check_same_shape(const CxTable& a, const CxTable& b, const char* what)
    {
        if (a.rows != b.rows || a.cols != b.cols)
            throw std::invalid_argument(std::string(what) + ": table shapes differ");
    }

    PortIndex select_port_single(const CxTable& pred, const CxTable& ref)
    {
        check_same_shape(pred, ref, "select_port_single");
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pred.size(); ++i)
        {
            double d = std::abs(pred.a[i] - ref.a[i]);
            if (d < best_d)
            {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        return flat_to_port(best, pred.rows, pred.cols);
    }

    PortIndex select_port_miso(const std::vector<CxTable>& pred_stack,
                               const std::vector<CxTable>& ref_stack)
    {
        if (pred_stack.empty() || pred_stack.size() != ref_stack.size())
            throw std::invalid_argument("select_port_miso: stack sizes differ");
        for (std::size_t i = 0; i < pred_stack.size(); ++i)
            check_same_shape(pred_stack[i], ref_stack[i], "select_port_miso");

        const CxTable& first = pred_stack.front();
        std::vector<double> dist(first.size(), 0.0);
        for (std::size_t i = 0; i < pred_stack.size(); ++i)
        {
            const cxd* p = pred_stack[i].a.data();
            const cxd* r = ref_stack[i].a.data();
            for (std::size_t j = 0; j < dist.size(); ++j)
                dist[j] += std::abs(p[j] - r[j]);
        }

        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < dist.size(); ++j)
        {
            if (dist[j] < best_d)
            {
                best_d = dist[j];
                best = static_cast<int>(j);
            }
        }
        return flat_to_port(best, first.rows, first.cols);
    }

    PortIndex brute_force_port_oracle(const std::vector<CxTable>& pred_stack,
                                      const std::vector<CxTable>& ref_stack)
    {
        if (pred_stack.empty() || pred_stack.size() != ref_stack.size())
            throw std::invalid_argument("brute_force_port_oracle: stack sizes differ");
        for (std::size_t i = 0; i < pred_stack.size(); ++i)
            check_same_shape(pred_stack[i], ref_stack[i], "brute_force_port_oracle");

        const int N = pred_stack.front().rows;
        const int M = pred_stack.front().cols;
        PortIndex best{1, 1, 0};
        double best_d = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= N; ++n)
        {
            for (int m = 1; m <= M; ++m)
            {
                double d = 0.0;
                for (std::size_t i = 0; i < pred_stack.size(); ++i)
                    d += std::abs(pred_stack[i].at(n - 1, m - 1) - ref_stack[i].at(n - 1, m - 1));
                if (d < best_d)
                {
                    best_d = d;
                    best = {n, m, (n - 1) * M + (m - 1)};
                }
            }
        }
        return best;
    }

    double validation_nmse(const std::vector<cxd>& h, const std::vector<cxd>& h_ref)
    {
        if (h.size() != h_ref.size())
            throw std::invalid_argument("validation_nmse: length mismatch");
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i)
        {
            num += std::norm(h[i] - h_ref[i]);
            den += std::norm(h_ref[i]);
        }
        if (den <= 0.0)
            throw std::domain_error("validation_nmse: zero reference norm");
        if (num == 0.0)
            return -std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(num / den);
    }

    double table_accuracy(const CxSeries& pred, const CxSeries& truth)
    {
        if (pred.steps != truth.steps || pred.rows != truth.rows || pred.cols != truth.cols)
            throw std::invalid_argument("table_accuracy: shape mismatch");
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < truth.a.size(); ++i)
        {
            num += std::abs(pred.a[i] - truth.a[i]);
            den += std::abs(truth.a[i]);
        }
        if (den <= 0.0)
            throw std::domain_error("table_accuracy: zero truth mass");
        double acc = (1.0 - num / den) * 100.0;
        if (acc < 0.0)
            acc = 0.0;
        if (acc > 100.0)
            acc = 100.0;
        return acc;
    }

} // namespace fapt
