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

#ifndef FAPT_PRONY_HPP
#define FAPT_PRONY_HPP

#include <memory>
#include <string>
#include <vector>

#include "fapt/channel.hpp"

namespace fapt
{
    // Shared linear recurrence x_n = sum_l a_l x_{n-l} fitted jointly over all
    // vector components.
    struct PronyModel
    {
        int order = 2;
        std::vector<cxd> coeffs; // length order
    };

    // Least-squares fit over a T x D history (rows are time steps, columns the
    // vectorized table entries). Requires T >= 2*order; the normal equations
    // carry a small Tikhonov damping for near-degenerate histories.
    PronyModel vec_prony_fit(const std::vector<std::vector<cxd>>& history, int order);

    // Recursive extrapolation of the fitted recurrence, steps rows ahead.
    std::vector<std::vector<cxd>> vec_prony_predict(const PronyModel& model,
                                                    const std::vector<std::vector<cxd>>& history,
                                                    int steps);

    // Repeats the last observed table over the horizon.
    CxSeries hold_last_predict(const CxSeries& history, int steps);

    // Plug-in contract every predictor satisfies: past tables in, predicted
    // tables out.
    class Predictor
    {
    public:
        virtual ~Predictor() = default;
        virtual std::string name() const = 0;
        virtual CxSeries predict(const CxSeries& past, int steps) = 0;
    };

    class HoldLastPredictor final : public Predictor
    {
    public:
        std::string name() const override { return "hold-last"; }
        CxSeries predict(const CxSeries& past, int steps) override
        {
            return hold_last_predict(past, steps);
        }
    };

    class VecPronyPredictor final : public Predictor
    {
    public:
        explicit VecPronyPredictor(int order = 2) : order_(order) {}
        std::string name() const override { return "vec-prony"; }
        CxSeries predict(const CxSeries& past, int steps) override;

    private:
        int order_;
    };

} // namespace fapt

#endif
