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

#ifndef FAPT_NEURAL_PREDICTOR_HPP
#define FAPT_NEURAL_PREDICTOR_HPP

#include <stdexcept>
#include <utility>

#include "fapt/model.hpp"
#include "fapt/prony.hpp"

namespace fapt
{
    // Adapts the trained network to the predictor plug-in contract. Holds its
    // own model copy, so benchmark workers can clone freely.
    class NeuralPredictor final : public Predictor
    {
    public:
        explicit NeuralPredictor(PortLLM model, std::string label = "port-llm")
            : model_(std::move(model)), label_(std::move(label))
        {
        }

        std::string name() const override { return label_; }

        CxSeries predict(const CxSeries& past, int steps) override
        {
            if (steps != model_.config().f_out)
                throw std::invalid_argument(
                    "NeuralPredictor: horizon differs from the trained configuration");
            return model_.forward(past, false).pred;
        }

        const PortLLM& model() const { return model_; }

    private:
        PortLLM model_;
        std::string label_;
    };

} // namespace fapt

#endif
