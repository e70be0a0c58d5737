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

#include "fapt/train.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <numeric>
#include <stdexcept>

#include "fapt/port_select.hpp"
#include "fapt/threading.hpp"

namespace fapt
{

    void TrainConfig::validate() const
    {
        if (!(alpha_min > 0.0) || !(alpha_min <= alpha_max))
            throw std::invalid_argument("train: need 0 < alpha_min <= alpha_max");
        if (warmup_epochs <= 0 || warmup_epochs >= total_epochs)
            throw std::invalid_argument("train: need 0 < warmup_epochs < total_epochs");
        if (batch_train < 1 || batch_test < 1)
            throw std::invalid_argument("train: batch sizes must be >= 1");
        if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
            throw std::invalid_argument("train: betas must lie in [0, 1)");
        if (!(adam_eps > 0.0))
            throw std::invalid_argument("train: adam_eps must be positive");
    }

    double nmse_loss(const CxSeries& pred, const CxSeries& truth)
    {
        if (pred.steps != truth.steps || pred.rows != truth.rows || pred.cols != truth.cols)
            throw std::invalid_argument("nmse_loss: shape mismatch");
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < truth.a.size(); ++i)
        {
            num += std::norm(truth.a[i] - pred.a[i]);
            den += std::norm(truth.a[i]);
        }
        if (den <= 0.0)
            throw std::domain_error("nmse_loss: zero truth norm");
        return num / den;
    }

    double nmse_loss_grad(const CxSeries& pred, const CxSeries& truth, CxSeries& grad)
    {
        if (pred.steps != truth.steps || pred.rows != truth.rows || pred.cols != truth.cols)
            throw std::invalid_argument("nmse_loss: shape mismatch");
        double den = 0.0;
        for (const cxd& v : truth.a)
            den += std::norm(v);
        if (den <= 0.0)
            throw std::domain_error("nmse_loss: zero truth norm");

        grad = CxSeries(pred.steps, pred.rows, pred.cols);
        double num = 0.0;
        for (std::size_t i = 0; i < truth.a.size(); ++i)
        {
            cxd diff = pred.a[i] - truth.a[i];
            num += std::norm(diff);
            grad.a[i] = cxd(2.0 * diff.real() / den, 2.0 * diff.imag() / den);
        }
        return num / den;
    }

    double lr_at_epoch(int t, const TrainConfig& cfg)
    {
        if (t < 0 || t > cfg.total_epochs)
            throw std::out_of_range("lr_at_epoch: epoch outside [0, total_epochs]");
        if (t <= cfg.warmup_epochs)
            return cfg.alpha_min + (cfg.alpha_max - cfg.alpha_min) * static_cast<double>(t) /
                                       cfg.warmup_epochs;
        double phase = static_cast<double>(t - cfg.warmup_epochs) /
                       (cfg.total_epochs - cfg.warmup_epochs);
        return cfg.alpha_min + 0.5 * (cfg.alpha_max - cfg.alpha_min) * (1.0 + std::cos(kPi * phase));
    }

    AdamState make_adam_state(const std::vector<Parameter*>& params)
    {
        AdamState st;
        st.m.reserve(params.size());
        st.v.reserve(params.size());
        for (const Parameter* p : params)
        {
            st.m.emplace_back(p->value.shape);
            st.v.emplace_back(p->value.shape);
        }
        return st;
    }

    void adam_step(const std::vector<Parameter*>& params, AdamState& state, double lr,
                   const TrainConfig& cfg)
    {
        state.step += 1;
        const double b1 = cfg.beta1, b2 = cfg.beta2;
        const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
        const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

        for (std::size_t i = 0; i < params.size(); ++i)
        {
            Parameter* p = params[i];
            if (!p->trainable || p->is_buffer)
                continue;

            double clip_scale = 1.0;
            if (cfg.grad_clip > 0.0)
            {
                double sq = 0.0;
                for (double g : p->grad.data)
                    sq += g * g;
                double nrm = std::sqrt(sq);
                if (nrm > cfg.grad_clip)
                    clip_scale = cfg.grad_clip / nrm;
            }

            for (std::size_t j = 0; j < p->value.data.size(); ++j)
            {
                double g = p->grad.data[j] * clip_scale;
                if (!std::isfinite(g))
                    throw std::runtime_error("adam_step: non-finite gradient in " + p->name);
                double& m = state.m[i].data[j];
                double& v = state.v[i].data[j];
                m = b1 * m + (1.0 - b1) * g;
                v = b2 * v + (1.0 - b2) * g * g;
                double mhat = m / bc1;
                double vhat = v / bc2;
                p->value.data[j] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
            }
        }
    }

    EvalMetrics evaluate_sample(PortLLM& model, const SampleRecord& rec)
    {
        PredictOutput out = model.forward(rec.past, false);

        EvalMetrics m;
        m.nmse = nmse_loss(out.pred, rec.future);
        m.accuracy_pct = table_accuracy(out.pred, rec.future);

        const int F = rec.future.steps;
        std::vector<cxd> h(static_cast<std::size_t>(F)), h_ref(static_cast<std::size_t>(F));
        m.per_step_ratio.resize(static_cast<std::size_t>(F));
        for (int i = 0; i < F; ++i)
        {
            CxTable pred_i = out.pred.table(i);
            CxTable ref_i = rec.reference.table(i);
            PortIndex p = select_port_single(pred_i, ref_i);
            h[static_cast<std::size_t>(i)] = rec.future.at(i, p.n - 1, p.m - 1);
            h_ref[static_cast<std::size_t>(i)] = rec.reference.at(i, 0, 0);
            double dn = std::norm(h_ref[static_cast<std::size_t>(i)]);
            m.per_step_ratio[static_cast<std::size_t>(i)] =
                dn > 0.0 ? std::norm(h[static_cast<std::size_t>(i)] -
                                     h_ref[static_cast<std::size_t>(i)]) /
                               dn
                         : 0.0;
        }
        double num = 0.0, den = 0.0;
        for (int i = 0; i < F; ++i)
        {
            num += std::norm(h[static_cast<std::size_t>(i)] - h_ref[static_cast<std::size_t>(i)]);
            den += std::norm(h_ref[static_cast<std::size_t>(i)]);
        }
        m.validation_ratio = den > 0.0 ? num / den : 0.0;
        return m;
    }

    namespace
    {
        double to_db(double ratio)
        {
            return ratio > 0.0 ? 10.0 * std::log10(ratio)
                               : -std::numeric_limits<double>::infinity();
        }

        struct ChunkAccum
        {
            std::vector<Tensor> grads;
            std::vector<PortLLM::BnLog> bn_logs; // in sample order within the chunk
            double loss_sum = 0.0;
        };
    } // namespace

    TrainReport train(PortLLM& model, const Dataset& train_set, const Dataset& test_set,
                      const TrainConfig& cfg, const std::function<void(const EpochRow&)>& on_epoch)
    {
        cfg.validate();
        if (train_set.samples.empty() || test_set.samples.empty())
            throw std::invalid_argument("train: datasets must be non-empty");

        auto params = model.parameters();
        AdamState adam = make_adam_state(params);

        // Worker clones; chunk structure is fixed so reductions are identical
        // for any worker count.
        std::vector<PortLLM> workers(pool_size(), model);

        std::vector<ChunkAccum> chunks(kReduceChunks);
        for (ChunkAccum& c : chunks)
        {
            c.grads.reserve(params.size());
            for (Parameter* p : params)
                c.grads.emplace_back(p->value.shape);
        }

        TrainReport report;
        std::vector<int> order(train_set.samples.size());
        std::iota(order.begin(), order.end(), 0);

        for (int epoch = 0; epoch < cfg.total_epochs; ++epoch)
        {
            double lr = lr_at_epoch(epoch, cfg);

            // Deterministic shuffle per (seed, epoch).
            Rng shuffle_rng(mix_seed(cfg.seed, 0x736875ull, static_cast<std::uint64_t>(epoch)));
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle_rng.uniform_int(i))]);

            double epoch_loss = 0.0;
            std::size_t n_batches = (order.size() + cfg.batch_train - 1) / cfg.batch_train;
            for (std::size_t bi = 0; bi < n_batches; ++bi)
            {
                std::size_t lo = bi * static_cast<std::size_t>(cfg.batch_train);
                std::size_t hi = std::min(order.size(), lo + cfg.batch_train);
                std::size_t bsz = hi - lo;

                for (PortLLM& w : workers)
                    w.copy_state_from(model);
                for (ChunkAccum& c : chunks)
                {
                    for (Tensor& g : c.grads)
                        g.zero();
                    c.bn_logs.clear();
                    c.loss_sum = 0.0;
                }

                parallel_chunks(bsz, [&](std::size_t tid, std::size_t chunk, std::size_t begin,
                                         std::size_t end) {
                    PortLLM& w = workers[tid];
                    ChunkAccum& acc = chunks[chunk];

                    auto wparams = w.parameters();
                    for (std::size_t s = begin; s < end; ++s)
                    {
                        const SampleRecord& rec =
                            train_set.samples[static_cast<std::size_t>(order[lo + s])];
                        w.zero_grads();
                        PredictOutput out = w.forward(rec.past, true);
                        CxSeries grad;
                        acc.loss_sum += nmse_loss_grad(out.pred, rec.future, grad);
                        w.backward(grad);
                        acc.bn_logs.push_back(w.take_bn_log());
                        for (std::size_t pi = 0; pi < wparams.size(); ++pi)
                            if (wparams[pi]->trainable && !wparams[pi]->is_buffer)
                                for (std::size_t j = 0; j < acc.grads[pi].data.size(); ++j)
                                    acc.grads[pi].data[j] += wparams[pi]->grad.data[j];
                    }
                });

                // In-order reduction: gradients by chunk, BN stats by sample.
                model.zero_grads();
                double batch_loss = 0.0;
                for (std::size_t c = 0; c < kReduceChunks; ++c)
                {
                    batch_loss += chunks[c].loss_sum;
                    for (std::size_t pi = 0; pi < params.size(); ++pi)
                        if (params[pi]->trainable && !params[pi]->is_buffer)
                            for (std::size_t j = 0; j < params[pi]->grad.data.size(); ++j)
                                params[pi]->grad.data[j] += chunks[c].grads[pi].data[j];
                    for (const PortLLM::BnLog& log : chunks[c].bn_logs)
                        model.apply_bn_log(log);
                }

                double inv = 1.0 / static_cast<double>(bsz);
                for (Parameter* p : params)
                    if (p->trainable && !p->is_buffer)
                        for (double& g : p->grad.data)
                            g *= inv;

                if (!std::isfinite(batch_loss))
                    throw std::runtime_error("train: loss diverged at epoch " +
                                             std::to_string(epoch));
                adam_step(params, adam, lr, cfg);
                epoch_loss += batch_loss;
            }
            epoch_loss /= static_cast<double>(order.size());

            // Test-set evaluation with the updated weights.
            for (PortLLM& w : workers)
                w.copy_state_from(model);
            std::vector<double> nmse(test_set.samples.size()), acc(test_set.samples.size()),
                val(test_set.samples.size());
            parallel_chunks(test_set.samples.size(),
                            [&](std::size_t tid, std::size_t, std::size_t begin, std::size_t end) {
                                PortLLM& w = workers[tid];
                                for (std::size_t s = begin; s < end; ++s)
                                {
                                    EvalMetrics m = evaluate_sample(w, test_set.samples[s]);
                                    nmse[s] = m.nmse;
                                    acc[s] = m.accuracy_pct;
                                    val[s] = m.validation_ratio;
                                }
                            });

            double mean_nmse = 0.0, mean_acc = 0.0, mean_val = 0.0;
            for (std::size_t s = 0; s < nmse.size(); ++s)
            {
                mean_nmse += nmse[s];
                mean_acc += acc[s];
                mean_val += val[s];
            }
            mean_nmse /= static_cast<double>(nmse.size());
            mean_acc /= static_cast<double>(nmse.size());
            mean_val /= static_cast<double>(nmse.size());

            EpochRow row;
            row.epoch = epoch;
            row.lr = lr;
            row.train_nmse_db = to_db(epoch_loss);
            row.test_nmse_db = to_db(mean_nmse);
            row.accuracy_pct = mean_acc;
            row.validation_nmse_db = to_db(mean_val);
            report.rows.push_back(row);
            if (on_epoch)
                on_epoch(row);
        }
        return report;
    }

} // namespace fapt
