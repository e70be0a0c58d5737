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

#ifndef FAPT_TRAIN_HPP
#define FAPT_TRAIN_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fapt/model.hpp"
#include "fapt/scenario.hpp"

namespace fapt
{
    struct TrainConfig
    {
        double alpha_min = 4e-6;
        double alpha_max = 1e-3;
        int warmup_epochs = 100; // T_max
        int total_epochs = 600;  // K
        int batch_train = 200;   // m_1
        int batch_test = 200;    // m_2
        double beta1 = 0.9;
        double beta2 = 0.99;
        double adam_eps = 1e-8;
        double grad_clip = 0.0; // 0 disables clipping
        std::uint64_t seed = 1;

        void validate() const;
    };

    struct EpochRow
    {
        int epoch = 0;
        double lr = 0.0;
        double train_nmse_db = 0.0;
        double test_nmse_db = 0.0;
        double accuracy_pct = 0.0;
        double validation_nmse_db = 0.0;
    };

    struct TrainReport
    {
        std::vector<EpochRow> rows;
    };

    // ||truth - pred||^2 / ||truth||^2 over all entries.
    double nmse_loss(const CxSeries& pred, const CxSeries& truth);

    // Same plus the gradient w.r.t. the prediction's real and imaginary parts,
    // packed as (dL/dRe, dL/dIm) in the complex entries of grad.
    double nmse_loss_grad(const CxSeries& pred, const CxSeries& truth, CxSeries& grad);

    // Warm-up then cosine decay: linear from alpha_min to alpha_max over
    // warmup_epochs, then cosine back down to alpha_min at total_epochs.
    double lr_at_epoch(int t, const TrainConfig& cfg);

    struct AdamState
    {
        std::vector<Tensor> m, v; // first/second moments per parameter
        std::int64_t step = 0;
    };

    AdamState make_adam_state(const std::vector<Parameter*>& params);

    // Bias-corrected adaptive-moment update on the trainable parameters.
    // Non-finite gradients raise std::runtime_error naming the parameter.
    void adam_step(const std::vector<Parameter*>& params, AdamState& state, double lr,
                   const TrainConfig& cfg);

    // Per-sample evaluation bundle used for test-set metrics.
    struct EvalMetrics
    {
        double nmse = 0.0;          // linear ratio
        double accuracy_pct = 0.0;
        double validation_ratio = 0.0; // linear ratio of the selected-port channel
        std::vector<double> per_step_ratio; // validation ratio per horizon step
    };

    EvalMetrics evaluate_sample(PortLLM& model, const SampleRecord& rec);

    // Algorithm: per epoch, deterministic shuffle, minibatch forward/backward
    // with fixed-chunk parallel fan-out and in-order reduction, Adam update,
    // then test-set metrics. Aborts with std::runtime_error on divergence.
    TrainReport train(PortLLM& model, const Dataset& train_set, const Dataset& test_set,
                      const TrainConfig& cfg,
                      const std::function<void(const EpochRow&)>& on_epoch = {});

} // namespace fapt

#endif
