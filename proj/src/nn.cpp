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

#include "fapt/nn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace fapt
{
    namespace nn
    {

        namespace
        {
            constexpr double kInvSqrt2 = 0.70710678118654752440;
            constexpr double kInvSqrt2Pi = 0.39894228040143267794;

            void fill_init(Parameter& p, Init init, Rng& rng, std::int64_t fan_in,
                           std::int64_t fan_out)
            {
                switch (init)
                {
                case Init::zeros:
                    p.value.zero();
                    break;
                case Init::xavier_uniform:
                {
                    double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
                    for (double& v : p.value.data)
                        v = rng.uniform(-limit, limit);
                    break;
                }
                case Init::gaussian_002:
                    for (double& v : p.value.data)
                        v = rng.normal(0.0, 0.02);
                    break;
                case Init::he_normal:
                {
                    double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
                    for (double& v : p.value.data)
                        v = rng.normal(0.0, std_dev);
                    break;
                }
                }
            }
        } // namespace

        double gelu_scalar(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

        double gelu_grad_scalar(double x)
        {
            double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
            double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
            return cdf + x * pdf;
        }

        Tensor gelu(const Tensor& x)
        {
            Tensor y = x;
            for (double& v : y.data)
                v = gelu_scalar(v);
            return y;
        }

        Tensor leaky_relu(const Tensor& x, double slope)
        {
            Tensor y = x;
            for (double& v : y.data)
                v = v > 0.0 ? v : slope * v;
            return y;
        }

        void softmax_rows(EMap m)
        {
            for (Eigen::Index r = 0; r < m.rows(); ++r)
            {
                double mx = m.row(r).maxCoeff();
                m.row(r) = (m.row(r).array() - mx).exp();
                m.row(r) /= m.row(r).sum();
            }
        }

        // ---- Linear ---------------------------------------------------------

        Linear::Linear(const std::string& name, std::int64_t d_out, std::int64_t d_in, Init init,
                       Rng& rng, bool trainable)
            : w(name + ".w", {d_out, d_in}, trainable), b(name + ".b", {d_out}, trainable)
        {
            fill_init(w, init, rng, d_in, d_out);
        }

        Tensor Linear::forward(const Tensor& x)
        {
            const std::int64_t rows = x.numel() / d_in();
            if (rows * d_in() != x.numel())
                throw std::invalid_argument("Linear: input width does not match " +
                                            std::to_string(d_in()));
            cached_x_ = x;

            Tensor y({rows, d_out()});
            as_mat(y, rows, d_out()).noalias() =
                as_mat(x, rows, d_in()) * as_mat(w.value, d_out(), d_in()).transpose();
            EMap ym = as_mat(y, rows, d_out());
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < d_out(); ++c)
                    ym(r, c) += b.value[static_cast<std::size_t>(c)];
            return y;
        }

        Tensor Linear::backward(const Tensor& grad_out)
        {
            const std::int64_t rows = grad_out.numel() / d_out();
            ECMap g = as_mat(grad_out, rows, d_out());
            ECMap x = as_mat(std::as_const(cached_x_), rows, d_in());

            if (w.trainable)
            {
                as_mat(w.grad, d_out(), d_in()).noalias() += g.transpose() * x;
                for (Eigen::Index c = 0; c < d_out(); ++c)
                    b.grad[static_cast<std::size_t>(c)] += g.col(c).sum();
            }

            Tensor dx({rows, d_in()});
            as_mat(dx, rows, d_in()).noalias() = g * as_mat(w.value, d_out(), d_in());
            return dx;
        }

        void Linear::params(std::vector<Parameter*>& out)
        {
            out.push_back(&w);
            out.push_back(&b);
        }

        // ---- Activations ----------------------------------------------------

        Tensor GeluLayer::forward(const Tensor& x)
        {
            cached_x_ = x;
            return gelu(x);
        }

        Tensor GeluLayer::backward(const Tensor& grad_out)
        {
            Tensor dx = grad_out;
            for (std::size_t i = 0; i < dx.data.size(); ++i)
                dx.data[i] *= gelu_grad_scalar(cached_x_.data[i]);
            return dx;
        }

        Tensor LeakyReluLayer::forward(const Tensor& x)
        {
            cached_x_ = x;
            return leaky_relu(x, slope);
        }

        Tensor LeakyReluLayer::backward(const Tensor& grad_out)
        {
            Tensor dx = grad_out;
            for (std::size_t i = 0; i < dx.data.size(); ++i)
                dx.data[i] *= cached_x_.data[i] > 0.0 ? 1.0 : slope;
            return dx;
        }

        // ---- Conv2d ---------------------------------------------------------

        Conv2d::Conv2d(const std::string& name, const ConvSpec& s, Rng& rng, bool trainable)
            : spec(s),
              w(name + ".w", {s.out_channels, s.in_channels, s.kernel, s.kernel}, trainable),
              b(name + ".b", {s.out_channels}, trainable)
        {
            if (s.kernel < 1 || s.stride < 1 || s.padding < 0)
                throw std::invalid_argument("Conv2d: invalid spec");
            fill_init(w, Init::he_normal, rng, s.in_channels * s.kernel * s.kernel, 0);
        }

        Tensor Conv2d::forward(const Tensor& x)
        {
            const std::int64_t ci = spec.in_channels, h = x.dim(1), wd = x.dim(2);
            if (x.dim(0) != ci)
                throw std::invalid_argument("Conv2d: channel mismatch");
            if (h + 2 * spec.padding < spec.kernel || wd + 2 * spec.padding < spec.kernel)
                throw std::invalid_argument("Conv2d: kernel larger than padded input");
            cached_x_ = x;

            const std::int64_t ho = spec.out_size(h), wo = spec.out_size(wd);
            Tensor y({spec.out_channels, ho, wo});

            for (std::int64_t oc = 0; oc < spec.out_channels; ++oc)
                for (std::int64_t oy = 0; oy < ho; ++oy)
                    for (std::int64_t ox = 0; ox < wo; ++ox)
                    {
                        double acc = b.value[static_cast<std::size_t>(oc)];
                        for (std::int64_t ic = 0; ic < ci; ++ic)
                            for (std::int64_t ky = 0; ky < spec.kernel; ++ky)
                            {
                                std::int64_t iy = oy * spec.stride + ky - spec.padding;
                                if (iy < 0 || iy >= h)
                                    continue;
                                for (std::int64_t kx = 0; kx < spec.kernel; ++kx)
                                {
                                    std::int64_t ix = ox * spec.stride + kx - spec.padding;
                                    if (ix < 0 || ix >= wd)
                                        continue;
                                    acc += w.value[static_cast<std::size_t>(
                                               ((oc * ci + ic) * spec.kernel + ky) * spec.kernel +
                                               kx)] *
                                           x.data[static_cast<std::size_t>((ic * h + iy) * wd + ix)];
                                }
                            }
                        y.data[static_cast<std::size_t>((oc * ho + oy) * wo + ox)] = acc;
                    }
            return y;
        }

        Tensor Conv2d::backward(const Tensor& grad_out)
        {
            const std::int64_t ci = spec.in_channels, h = cached_x_.dim(1), wd = cached_x_.dim(2);
            const std::int64_t ho = grad_out.dim(1), wo = grad_out.dim(2);

            Tensor dx({ci, h, wd});
            for (std::int64_t oc = 0; oc < spec.out_channels; ++oc)
                for (std::int64_t oy = 0; oy < ho; ++oy)
                    for (std::int64_t ox = 0; ox < wo; ++ox)
                    {
                        double g = grad_out.data[static_cast<std::size_t>((oc * ho + oy) * wo + ox)];
                        if (w.trainable)
                            b.grad[static_cast<std::size_t>(oc)] += g;
                        for (std::int64_t ic = 0; ic < ci; ++ic)
                            for (std::int64_t ky = 0; ky < spec.kernel; ++ky)
                            {
                                std::int64_t iy = oy * spec.stride + ky - spec.padding;
                                if (iy < 0 || iy >= h)
                                    continue;
                                for (std::int64_t kx = 0; kx < spec.kernel; ++kx)
                                {
                                    std::int64_t ix = ox * spec.stride + kx - spec.padding;
                                    if (ix < 0 || ix >= wd)
                                        continue;
                                    std::size_t wi = static_cast<std::size_t>(
                                        ((oc * ci + ic) * spec.kernel + ky) * spec.kernel + kx);
                                    std::size_t xi =
                                        static_cast<std::size_t>((ic * h + iy) * wd + ix);
                                    if (w.trainable)
                                        w.grad[wi] += g * cached_x_.data[xi];
                                    dx.data[xi] += g * w.value[wi];
                                }
                            }
                    }
            return dx;
        }

        void Conv2d::params(std::vector<Parameter*>& out)
        {
            out.push_back(&w);
            out.push_back(&b);
        }

        // ---- BatchNorm2d ------------------------------------------------------

        BatchNorm2d::BatchNorm2d(const std::string& name, std::int64_t channels)
            : gamma(name + ".gamma", {channels}, true),
              beta(name + ".beta", {channels}, true),
              running_mean(name + ".running_mean", {channels}, false),
              running_var(name + ".running_var", {channels}, false)
        {
            for (double& v : gamma.value.data)
                v = 1.0;
            for (double& v : running_var.value.data)
                v = 1.0;
            running_mean.is_buffer = true;
            running_var.is_buffer = true;
        }

        Tensor BatchNorm2d::forward(const Tensor& x, bool training)
        {
            ch_ = x.dim(0);
            hw_ = x.dim(1) * x.dim(2);
            cached_training_ = training;
            cached_xhat_ = Tensor(x.shape);
            cached_invstd_.assign(static_cast<std::size_t>(ch_), 0.0);
            last_mean.assign(static_cast<std::size_t>(ch_), 0.0);
            last_var.assign(static_cast<std::size_t>(ch_), 0.0);
            last_count = hw_;

            Tensor y(x.shape);
            for (std::int64_t c = 0; c < ch_; ++c)
            {
                const double* xs = x.data.data() + c * hw_;
                double mean, var;
                if (training)
                {
                    mean = 0.0;
                    for (std::int64_t i = 0; i < hw_; ++i)
                        mean += xs[i];
                    mean /= static_cast<double>(hw_);
                    var = 0.0;
                    for (std::int64_t i = 0; i < hw_; ++i)
                        var += (xs[i] - mean) * (xs[i] - mean);
                    var /= static_cast<double>(hw_);
                    last_mean[static_cast<std::size_t>(c)] = mean;
                    last_var[static_cast<std::size_t>(c)] = var;
                }
                else
                {
                    mean = running_mean.value[static_cast<std::size_t>(c)];
                    var = running_var.value[static_cast<std::size_t>(c)];
                }

                double invstd = 1.0 / std::sqrt(var + eps);
                cached_invstd_[static_cast<std::size_t>(c)] = invstd;
                double g = gamma.value[static_cast<std::size_t>(c)];
                double bt = beta.value[static_cast<std::size_t>(c)];
                double* xh = cached_xhat_.data.data() + c * hw_;
                double* ys = y.data.data() + c * hw_;
                for (std::int64_t i = 0; i < hw_; ++i)
                {
                    xh[i] = (xs[i] - mean) * invstd;
                    ys[i] = g * xh[i] + bt;
                }
            }
            return y;
        }

        Tensor BatchNorm2d::backward(const Tensor& grad_out)
        {
            Tensor dx(grad_out.shape);
            const double n = static_cast<double>(hw_);
            for (std::int64_t c = 0; c < ch_; ++c)
            {
                const double* g = grad_out.data.data() + c * hw_;
                const double* xh = cached_xhat_.data.data() + c * hw_;
                double* dxs = dx.data.data() + c * hw_;
                double sum_g = 0.0, sum_gx = 0.0;
                for (std::int64_t i = 0; i < hw_; ++i)
                {
                    sum_g += g[i];
                    sum_gx += g[i] * xh[i];
                }
                gamma.grad[static_cast<std::size_t>(c)] += sum_gx;
                beta.grad[static_cast<std::size_t>(c)] += sum_g;

                double gam = gamma.value[static_cast<std::size_t>(c)];
                double invstd = cached_invstd_[static_cast<std::size_t>(c)];
                if (cached_training_)
                {
                    double k = gam * invstd / n;
                    for (std::int64_t i = 0; i < hw_; ++i)
                        dxs[i] = k * (n * g[i] - sum_g - xh[i] * sum_gx);
                }
                else
                {
                    double k = gam * invstd;
                    for (std::int64_t i = 0; i < hw_; ++i)
                        dxs[i] = k * g[i];
                }
            }
            return dx;
        }

        void BatchNorm2d::fold_running_stats()
        {
            double unbias =
                last_count > 1 ? static_cast<double>(last_count) / (last_count - 1) : 1.0;
            for (std::size_t c = 0; c < last_mean.size(); ++c)
            {
                running_mean.value[c] =
                    (1.0 - momentum) * running_mean.value[c] + momentum * last_mean[c];
                running_var.value[c] =
                    (1.0 - momentum) * running_var.value[c] + momentum * last_var[c] * unbias;
            }
        }

        void BatchNorm2d::params(std::vector<Parameter*>& out)
        {
            out.push_back(&gamma);
            out.push_back(&beta);
            out.push_back(&running_mean);
            out.push_back(&running_var);
        }

        // ---- LoRA -------------------------------------------------------------

        LoRAAdapter::LoRAAdapter(const std::string& name, std::int64_t d_out, std::int64_t d_in,
                                 std::int64_t r, Rng& rng)
            : a(name + ".a", {r, d_in}, true), b(name + ".b", {d_out, r}, true), rank(r)
        {
            if (r < 1 || r > std::min(d_out, d_in))
                throw std::invalid_argument("LoRAAdapter: rank out of range");
            for (double& v : a.value.data)
                v = rng.normal(0.0, 0.02);
            a.is_adapter = true;
            b.is_adapter = true;
        }

        void LoRAAdapter::params(std::vector<Parameter*>& out)
        {
            out.push_back(&a);
            out.push_back(&b);
        }

        LoRALinear::LoRALinear(const std::string& name, std::int64_t d_out, std::int64_t d_in,
                               std::int64_t rank, Init init, Rng& rng)
            : frozen(name, d_out, d_in, init, rng, false),
              adapter(name + ".lora", d_out, d_in, rank, rng)
        {
        }

        Tensor LoRALinear::forward(const Tensor& x)
        {
            Tensor y = frozen.forward(x);
            const std::int64_t rows = x.numel() / frozen.d_in();
            cached_x_ = x;
            cached_u_ = Tensor({rows, adapter.rank});
            as_mat(cached_u_, rows, adapter.rank).noalias() =
                as_mat(x, rows, frozen.d_in()) *
                as_mat(adapter.a.value, adapter.rank, frozen.d_in()).transpose();
            as_mat(y, rows, frozen.d_out()).noalias() +=
                as_mat(cached_u_, rows, adapter.rank) *
                as_mat(adapter.b.value, frozen.d_out(), adapter.rank).transpose();
            return y;
        }

        Tensor LoRALinear::backward(const Tensor& grad_out)
        {
            const std::int64_t rows = grad_out.numel() / frozen.d_out();
            Tensor dx = frozen.backward(grad_out);

            ECMap g = as_mat(grad_out, rows, frozen.d_out());
            Tensor du({rows, adapter.rank});
            as_mat(du, rows, adapter.rank).noalias() =
                g * as_mat(adapter.b.value, frozen.d_out(), adapter.rank);

            as_mat(adapter.b.grad, frozen.d_out(), adapter.rank).noalias() +=
                g.transpose() * as_mat(std::as_const(cached_u_), rows, adapter.rank);
            as_mat(adapter.a.grad, adapter.rank, frozen.d_in()).noalias() +=
                as_mat(du, rows, adapter.rank).transpose() * as_mat(cached_x_, rows, frozen.d_in());
            as_mat(dx, rows, frozen.d_in()).noalias() +=
                as_mat(du, rows, adapter.rank) *
                as_mat(adapter.a.value, adapter.rank, frozen.d_in());
            return dx;
        }

        void LoRALinear::params(std::vector<Parameter*>& out)
        {
            frozen.params(out);
            adapter.params(out);
        }

        // ---- MultiHeadAttention -------------------------------------------------

        MultiHeadAttention::MultiHeadAttention(const std::string& name, std::int64_t dm,
                                               std::int64_t heads, bool causal_, Init init, Rng& rng,
                                               bool base_trainable, std::int64_t lora_rank)
            : d_model(dm), n_heads(heads), causal(causal_)
        {
            if (heads < 1 || dm % heads != 0)
                throw std::invalid_argument("MultiHeadAttention: d_model must divide by heads");
            head_dim = dm / heads;
            wq = Linear(name + ".wq", dm, dm, init, rng, base_trainable);
            wk = Linear(name + ".wk", dm, dm, init, rng, base_trainable);
            wv = Linear(name + ".wv", dm, dm, init, rng, base_trainable);
            wo = Linear(name + ".wo", dm, dm, init, rng, base_trainable);
            if (lora_rank > 0)
            {
                has_lora = true;
                lora_q = LoRAAdapter(name + ".wq.lora", dm, dm, lora_rank, rng);
                lora_v = LoRAAdapter(name + ".wv.lora", dm, dm, lora_rank, rng);
            }
        }

        Tensor MultiHeadAttention::forward(const Tensor& x)
        {
            const std::int64_t L = x.numel() / d_model;
            cached_x_ = x;

            q_ = wq.forward(x);
            k_ = wk.forward(x);
            v_ = wv.forward(x);
            if (has_lora)
            {
                lora_uq_ = Tensor({L, lora_q.rank});
                as_mat(lora_uq_, L, lora_q.rank).noalias() =
                    as_mat(x, L, d_model) *
                    as_mat(lora_q.a.value, lora_q.rank, d_model).transpose();
                as_mat(q_, L, d_model).noalias() +=
                    as_mat(lora_uq_, L, lora_q.rank) *
                    as_mat(lora_q.b.value, d_model, lora_q.rank).transpose();

                lora_uv_ = Tensor({L, lora_v.rank});
                as_mat(lora_uv_, L, lora_v.rank).noalias() =
                    as_mat(x, L, d_model) *
                    as_mat(lora_v.a.value, lora_v.rank, d_model).transpose();
                as_mat(v_, L, d_model).noalias() +=
                    as_mat(lora_uv_, L, lora_v.rank) *
                    as_mat(lora_v.b.value, d_model, lora_v.rank).transpose();
            }

            const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
            probs_.assign(static_cast<std::size_t>(n_heads), EMat());
            ctx_ = Tensor({L, d_model});

            ECMap qm = as_mat(std::as_const(q_), L, d_model);
            ECMap km = as_mat(std::as_const(k_), L, d_model);
            ECMap vm = as_mat(std::as_const(v_), L, d_model);
            EMap cm = as_mat(ctx_, L, d_model);
            for (std::int64_t h = 0; h < n_heads; ++h)
            {
                auto qh = qm.middleCols(h * head_dim, head_dim);
                auto kh = km.middleCols(h * head_dim, head_dim);
                auto vh = vm.middleCols(h * head_dim, head_dim);

                EMat s = qh * kh.transpose() * scale;
                if (causal)
                    for (Eigen::Index i = 0; i < s.rows(); ++i)
                        for (Eigen::Index j = i + 1; j < s.cols(); ++j)
                            s(i, j) = -std::numeric_limits<double>::infinity();
                softmax_rows(EMap(s.data(), s.rows(), s.cols()));
                probs_[static_cast<std::size_t>(h)] = s;
                cm.middleCols(h * head_dim, head_dim).noalias() = s * vh;
            }
            return wo.forward(ctx_);
        }

        Tensor MultiHeadAttention::backward(const Tensor& grad_out)
        {
            const std::int64_t L = grad_out.numel() / d_model;
            const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

            Tensor dctx = wo.backward(grad_out);
            Tensor dq({L, d_model}), dk({L, d_model}), dv({L, d_model});

            ECMap qm = as_mat(std::as_const(q_), L, d_model);
            ECMap km = as_mat(std::as_const(k_), L, d_model);
            ECMap vm = as_mat(std::as_const(v_), L, d_model);
            ECMap dcm = as_mat(std::as_const(dctx), L, d_model);
            EMap dqm = as_mat(dq, L, d_model);
            EMap dkm = as_mat(dk, L, d_model);
            EMap dvm = as_mat(dv, L, d_model);

            for (std::int64_t h = 0; h < n_heads; ++h)
            {
                const EMat& p = probs_[static_cast<std::size_t>(h)];
                auto qh = qm.middleCols(h * head_dim, head_dim);
                auto kh = km.middleCols(h * head_dim, head_dim);
                auto vh = vm.middleCols(h * head_dim, head_dim);
                auto dch = dcm.middleCols(h * head_dim, head_dim);

                EMat dp = dch * vh.transpose();
                dvm.middleCols(h * head_dim, head_dim).noalias() = p.transpose() * dch;

                // Softmax backward row by row: ds = p .* (dp - <p, dp>).
                EMat ds(p.rows(), p.cols());
                for (Eigen::Index r = 0; r < p.rows(); ++r)
                {
                    double row_dot = p.row(r).cwiseProduct(dp.row(r)).sum();
                    ds.row(r) = p.row(r).cwiseProduct((dp.row(r).array() - row_dot).matrix());
                }
                ds *= scale;

                dqm.middleCols(h * head_dim, head_dim).noalias() = ds * kh;
                dkm.middleCols(h * head_dim, head_dim).noalias() = ds.transpose() * qh;
            }

            Tensor dx = wq.backward(dq);
            {
                Tensor t = wk.backward(dk);
                as_mat(dx, L, d_model) += as_mat(t, L, d_model);
            }
            {
                Tensor t = wv.backward(dv);
                as_mat(dx, L, d_model) += as_mat(t, L, d_model);
            }

            if (has_lora)
            {
                ECMap x = as_mat(std::as_const(cached_x_), L, d_model);
                {
                    ECMap g = as_mat(std::as_const(dq), L, d_model);
                    EMat du = g * as_mat(lora_q.b.value, d_model, lora_q.rank);
                    as_mat(lora_q.b.grad, d_model, lora_q.rank).noalias() +=
                        g.transpose() * as_mat(std::as_const(lora_uq_), L, lora_q.rank);
                    as_mat(lora_q.a.grad, lora_q.rank, d_model).noalias() += du.transpose() * x;
                    as_mat(dx, L, d_model).noalias() +=
                        du * as_mat(lora_q.a.value, lora_q.rank, d_model);
                }
                {
                    ECMap g = as_mat(std::as_const(dv), L, d_model);
                    EMat du = g * as_mat(lora_v.b.value, d_model, lora_v.rank);
                    as_mat(lora_v.b.grad, d_model, lora_v.rank).noalias() +=
                        g.transpose() * as_mat(std::as_const(lora_uv_), L, lora_v.rank);
                    as_mat(lora_v.a.grad, lora_v.rank, d_model).noalias() += du.transpose() * x;
                    as_mat(dx, L, d_model).noalias() +=
                        du * as_mat(lora_v.a.value, lora_v.rank, d_model);
                }
            }
            return dx;
        }

        void MultiHeadAttention::params(std::vector<Parameter*>& out)
        {
            wq.params(out);
            wk.params(out);
            wv.params(out);
            wo.params(out);
            if (has_lora)
            {
                lora_q.params(out);
                lora_v.params(out);
            }
        }

        // ---- LayerNorm ----------------------------------------------------------

        LayerNorm::LayerNorm(const std::string& name, std::int64_t dim, bool trainable)
            : gamma(name + ".gamma", {dim}, trainable), beta(name + ".beta", {dim}, trainable)
        {
            for (double& v : gamma.value.data)
                v = 1.0;
        }

        Tensor LayerNorm::forward(const Tensor& x)
        {
            const std::int64_t d = gamma.value.numel();
            const std::int64_t rows = x.numel() / d;
            cached_xhat_ = Tensor({rows, d});
            cached_invstd_.assign(static_cast<std::size_t>(rows), 0.0);

            Tensor y({rows, d});
            for (std::int64_t r = 0; r < rows; ++r)
            {
                const double* xs = x.data.data() + r * d;
                double mean = 0.0;
                for (std::int64_t i = 0; i < d; ++i)
                    mean += xs[i];
                mean /= static_cast<double>(d);
                double var = 0.0;
                for (std::int64_t i = 0; i < d; ++i)
                    var += (xs[i] - mean) * (xs[i] - mean);
                var /= static_cast<double>(d);
                double invstd = 1.0 / std::sqrt(var + eps);
                cached_invstd_[static_cast<std::size_t>(r)] = invstd;

                double* xh = cached_xhat_.data.data() + r * d;
                double* ys = y.data.data() + r * d;
                for (std::int64_t i = 0; i < d; ++i)
                {
                    xh[i] = (xs[i] - mean) * invstd;
                    ys[i] = gamma.value[static_cast<std::size_t>(i)] * xh[i] +
                            beta.value[static_cast<std::size_t>(i)];
                }
            }
            return y;
        }

        Tensor LayerNorm::backward(const Tensor& grad_out)
        {
            const std::int64_t d = gamma.value.numel();
            const std::int64_t rows = grad_out.numel() / d;
            Tensor dx({rows, d});
            for (std::int64_t r = 0; r < rows; ++r)
            {
                const double* g = grad_out.data.data() + r * d;
                const double* xh = cached_xhat_.data.data() + r * d;
                double* dxs = dx.data.data() + r * d;

                double sum_gx = 0.0, sum_g = 0.0;
                for (std::int64_t i = 0; i < d; ++i)
                {
                    double gg = g[i] * gamma.value[static_cast<std::size_t>(i)];
                    sum_gx += gg * xh[i];
                    sum_g += gg;
                }
                if (gamma.trainable)
                    for (std::int64_t i = 0; i < d; ++i)
                    {
                        gamma.grad[static_cast<std::size_t>(i)] += g[i] * xh[i];
                        beta.grad[static_cast<std::size_t>(i)] += g[i];
                    }

                double invstd = cached_invstd_[static_cast<std::size_t>(r)];
                double nd = static_cast<double>(d);
                for (std::int64_t i = 0; i < d; ++i)
                {
                    double gg = g[i] * gamma.value[static_cast<std::size_t>(i)];
                    dxs[i] = invstd / nd * (nd * gg - sum_g - xh[i] * sum_gx);
                }
            }
            return dx;
        }

        void LayerNorm::params(std::vector<Parameter*>& out)
        {
            out.push_back(&gamma);
            out.push_back(&beta);
        }

        // ---- TransformerBlock ------------------------------------------------------

        TransformerBlock::TransformerBlock(const std::string& name, std::int64_t d_model,
                                           std::int64_t n_heads, std::int64_t lora_rank, Rng& rng)
            : ln1(name + ".ln1", d_model, false),
              ln2(name + ".ln2", d_model, false),
              attn(name + ".attn", d_model, n_heads, true, Init::gaussian_002, rng, false,
                   lora_rank),
              fc1(name + ".mlp.fc1", 4 * d_model, d_model, Init::gaussian_002, rng, false),
              fc2(name + ".mlp.fc2", d_model, 4 * d_model, Init::gaussian_002, rng, false)
        {
        }

        Tensor TransformerBlock::forward(const Tensor& x)
        {
            Tensor a = attn.forward(ln1.forward(x));
            Tensor h = x;
            for (std::size_t i = 0; i < h.data.size(); ++i)
                h.data[i] += a.data[i];
            Tensor m = fc2.forward(act.forward(fc1.forward(ln2.forward(h))));
            Tensor y = h;
            for (std::size_t i = 0; i < y.data.size(); ++i)
                y.data[i] += m.data[i];
            return y;
        }

        Tensor TransformerBlock::backward(const Tensor& grad_out)
        {
            Tensor dn2 = fc1.backward(act.backward(fc2.backward(grad_out)));
            Tensor dh = ln2.backward(dn2);
            for (std::size_t i = 0; i < dh.data.size(); ++i)
                dh.data[i] += grad_out.data[i];

            Tensor dn1 = attn.backward(dh);
            Tensor dx = ln1.backward(dn1);
            for (std::size_t i = 0; i < dx.data.size(); ++i)
                dx.data[i] += dh.data[i];
            return dx;
        }

        void TransformerBlock::params(std::vector<Parameter*>& out)
        {
            ln1.params(out);
            attn.params(out);
            ln2.params(out);
            fc1.params(out);
            fc2.params(out);
        }

        // ---- DownSampling ---------------------------------------------------------

        DownSampling::DownSampling(const std::string& name, std::int64_t channels, Rng& rng)
            : skip(name + ".skip", ConvSpec{channels, channels, 1, 2, 0}, rng, true),
              conv1(name + ".conv1", ConvSpec{channels, channels, 3, 2, 1}, rng, true),
              conv2(name + ".conv2", ConvSpec{channels, channels, 3, 1, 1}, rng, true),
              bn1(name + ".bn1", channels),
              bn2(name + ".bn2", channels)
        {
        }

        Tensor DownSampling::forward(const Tensor& x, bool training)
        {
            Tensor s = skip.forward(x);
            Tensor m = act1.forward(bn1.forward(conv1.forward(x), training));
            m = act2.forward(bn2.forward(conv2.forward(m), training));
            if (s.shape != m.shape)
                throw std::logic_error("DownSampling: branch shapes diverged");
            for (std::size_t i = 0; i < s.data.size(); ++i)
                s.data[i] += m.data[i];
            return s;
        }

        Tensor DownSampling::backward(const Tensor& grad_out)
        {
            Tensor dm = conv2.backward(bn2.backward(act2.backward(grad_out)));
            Tensor dx = conv1.backward(bn1.backward(act1.backward(dm)));
            Tensor ds = skip.backward(grad_out);
            for (std::size_t i = 0; i < dx.data.size(); ++i)
                dx.data[i] += ds.data[i];
            return dx;
        }

        void DownSampling::params(std::vector<Parameter*>& out)
        {
            skip.params(out);
            conv1.params(out);
            conv2.params(out);
            bn1.params(out);
            bn2.params(out);
        }

    } // namespace nn
} // namespace fapt
