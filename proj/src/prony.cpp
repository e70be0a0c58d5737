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

#include "fapt/prony.hpp"

#include <stdexcept>

#include <Eigen/Dense>

namespace fapt
{

    namespace
    {
        constexpr double kDamping = 1e-10;
        using CMat = Eigen::MatrixXcd;
        using CVec = Eigen::VectorXcd;
    } // namespace

    PronyModel vec_prony_fit(const std::vector<std::vector<cxd>>& history, int order)
    {
        if (order < 1)
            throw std::invalid_argument("vec_prony_fit: order must be >= 1");
        const int T = static_cast<int>(history.size());
        if (T < 2 * order)
            throw std::invalid_argument("vec_prony_fit: need at least 2*order history rows");
        const std::size_t D = history.front().size();
        for (const auto& row : history)
            if (row.size() != D)
                throw std::invalid_argument("vec_prony_fit: ragged history");

        // Normal equations G a = g accumulated over all sliding windows of all
        // components: row (n, d) is [x_{n-1,d}, ..., x_{n-L,d}] -> x_{n,d}.
        CMat G = CMat::Zero(order, order);
        CVec g = CVec::Zero(order);
        CVec row(order);
        for (int n = order; n < T; ++n)
            for (std::size_t d = 0; d < D; ++d)
            {
                for (int l = 0; l < order; ++l)
                    row(l) = history[static_cast<std::size_t>(n - 1 - l)][d];
                G.noalias() += row * row.adjoint();
                g.noalias() += row * std::conj(history[static_cast<std::size_t>(n)][d]);
            }

        // The system solved is conj(a): G conj(a) = g with G = sum r r^H.
        double scale = G.cwiseAbs().maxCoeff();
        if (!(scale > 0.0))
            throw std::domain_error("vec_prony_fit: degenerate all-zero history");
        G.diagonal().array() += kDamping * scale;

        Eigen::FullPivLU<CMat> lu(G);
        if (!lu.isInvertible())
            throw std::domain_error("vec_prony_fit: rank-deficient system");
        CVec a_conj = lu.solve(g);

        PronyModel model;
        model.order = order;
        model.coeffs.resize(static_cast<std::size_t>(order));
        for (int l = 0; l < order; ++l)
            model.coeffs[static_cast<std::size_t>(l)] = std::conj(a_conj(l));
        return model;
    }

    std::vector<std::vector<cxd>> vec_prony_predict(const PronyModel& model,
                                                    const std::vector<std::vector<cxd>>& history,
                                                    int steps)
    {
        if (model.coeffs.empty())
            throw std::invalid_argument("vec_prony_predict: model not fitted");
        const int L = model.order;
        if (static_cast<int>(history.size()) < L)
            throw std::invalid_argument("vec_prony_predict: history shorter than the order");
        const std::size_t D = history.front().size();

        // Ring of the last L rows, newest first.
        std::vector<std::vector<cxd>> tail(static_cast<std::size_t>(L));
        for (int l = 0; l < L; ++l)
            tail[static_cast<std::size_t>(l)] = history[history.size() - 1 - static_cast<std::size_t>(l)];

        std::vector<std::vector<cxd>> out;
        out.reserve(static_cast<std::size_t>(steps));
        for (int s = 0; s < steps; ++s)
        {
            std::vector<cxd> next(D, cxd(0.0, 0.0));
            for (int l = 0; l < L; ++l)
            {
                cxd a = model.coeffs[static_cast<std::size_t>(l)];
                const std::vector<cxd>& past = tail[static_cast<std::size_t>(l)];
                for (std::size_t d = 0; d < D; ++d)
                    next[d] += a * past[d];
            }
            for (int l = L - 1; l > 0; --l)
                tail[static_cast<std::size_t>(l)] = tail[static_cast<std::size_t>(l - 1)];
            tail[0] = next;
            out.push_back(std::move(next));
        }
        return out;
    }

    CxSeries hold_last_predict(const CxSeries& history, int steps)
    {
        if (history.steps < 1)
            throw std::invalid_argument("hold_last_predict: empty history");
        CxSeries out(steps, history.rows, history.cols);
        const cxd* last = history.slice(history.steps - 1);
        for (int s = 0; s < steps; ++s)
            std::copy(last, last + history.table_size(), out.slice(s));
        return out;
    }

    CxSeries VecPronyPredictor::predict(const CxSeries& past, int steps)
    {
        const std::size_t D = past.table_size();
        std::vector<std::vector<cxd>> hist(static_cast<std::size_t>(past.steps));
        for (int t = 0; t < past.steps; ++t)
            hist[static_cast<std::size_t>(t)].assign(past.slice(t), past.slice(t) + D);

        PronyModel model = vec_prony_fit(hist, order_);
        auto pred = vec_prony_predict(model, hist, steps);

        CxSeries out(steps, past.rows, past.cols);
        for (int s = 0; s < steps; ++s)
            std::copy(pred[static_cast<std::size_t>(s)].begin(),
                      pred[static_cast<std::size_t>(s)].end(), out.slice(s));
        return out;
    }

} // namespace fapt
