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
//
// Differentiable building blocks. Every layer caches what its backward pass
// needs during forward, accumulates parameter gradients on backward and returns
// the gradient with respect to its input. Layers process one sample at a time;
// batching is the trainer's job.

#ifndef FAPT_NN_HPP
#define FAPT_NN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fapt/rng.hpp"
#include "fapt/tensor.hpp"

namespace fapt
{
    namespace nn
    {
        // Elementwise ops (exact Gaussian-CDF GELU).
        double gelu_scalar(double x);
        double gelu_grad_scalar(double x);
        Tensor gelu(const Tensor& x);
        Tensor leaky_relu(const Tensor& x, double slope = 0.01);

        // Numerically stable rowwise softmax, in place.
        void softmax_rows(EMap m);

        enum class Init
        {
            zeros,
            xavier_uniform, // trained-from-scratch linear layers
            gaussian_002,   // backbone stand-in and embeddings
            he_normal       // conv layers feeding leaky-relu
        };

        struct Linear
        {
            Parameter w; // d_out x d_in
            Parameter b; // d_out

            Linear() = default;
            Linear(const std::string& name, std::int64_t d_out, std::int64_t d_in, Init init,
                   Rng& rng, bool trainable);

            std::int64_t d_in() const { return w.value.dim(1); }
            std::int64_t d_out() const { return w.value.dim(0); }

            // x: rows x d_in -> rows x d_out
            Tensor forward(const Tensor& x);
            Tensor backward(const Tensor& grad_out);
            void params(std::vector<Parameter*>& out);

        private:
            Tensor cached_x_;
        };

        struct GeluLayer
        {
            Tensor forward(const Tensor& x);
            Tensor backward(const Tensor& grad_out);

        private:
            Tensor cached_x_;
        };

        struct LeakyReluLayer
        {
            double slope = 0.01;
            Tensor forward(const Tensor& x);
            Tensor backward(const Tensor& grad_out);

        private:
            Tensor cached_x_;
        };

        struct ConvSpec
        {
            std::int64_t in_channels = 1;
            std::int64_t out_channels = 1;
            std::int64_t kernel = 3;
            std::int64_t stride = 1;
            std::int64_t padding = 0;

            std::int64_t out_size(std::int64_t len) const
            {
                return (len + 2 * padding - kernel) / stride + 1;
            }
        };

        // Cross-correlation with zero padding on C x H x W inputs.
        struct Conv2d
        {
            ConvSpec spec;
            Parameter w; // C_out x C_in x k x k
            Parameter b; // C_out

            Conv2d() = default;
            Conv2d(const std::string& name, const ConvSpec& s, Rng& rng, bool trainable);

            Tensor forward(const Tensor& x);
            Tensor backward(const Tensor& grad_out);
            void params(std::vector<Parameter*>& out);

        private:
            Tensor cached_x_;
        };

        // Normalizes each channel over its spatial extent. In training mode the
        // statistics of the current input are used (and exposed via last_mean /
        // last_var for the trainer to fold into the running buffers, in sample
        // order); in inference mode the frozen running statistics apply.
        struct BatchNorm2d
        {
            Parameter gamma, beta;
            Parameter running_mean, running_var; // buffers
            double eps = 1e-5;
            double momentum = 0.1;

            std::vector<double> last_mean, last_var; // biased, per channel
            std::int64_t last_count = 0;             // spatial sample count

            BatchNorm2d() = default;
            BatchNorm2d(const std::string& name, std::int64_t channels);

            Tensor forward(const Tensor& x, bool training);
            Tensor backward(const Tensor& grad_out);
            void fold_running_stats(); // applies last_mean/last_var with momentum
            void params(std::vector<Parameter*>& out);

        private:
            Tensor cached_xhat_;
            std::vector<double> cached_invstd_;
            bool cached_training_ = false;
            std::int64_t ch_ = 0, hw_ = 0;
        };

        // Low-rank bypass pair: a is r x d_in, b is d_out x r, b starts at zero
        // so the bypass vanishes at initialization.
        struct LoRAAdapter
        {
            Parameter a, b;
            std::int64_t rank = 0;

            LoRAAdapter() = default;
            LoRAAdapter(const std::string& name, std::int64_t d_out, std::int64_t d_in,
                        std::int64_t r, Rng& rng);
            void params(std::vector<Parameter*>& out);
        };

        // Frozen linear plus trainable low-rank bypass: y = W x + B A x + b.
        struct LoRALinear
        {
            Linear frozen;
            LoRAAdapter adapter;

            LoRALinear() = default;
            LoRALinear(const std::string& name, std::int64_t d_out, std::int64_t d_in,
                       std::int64_t rank, Init init, Rng& rng);

            Tensor forward(const Tensor& x);
            Tensor backward(const Tensor& grad_out);
            void params(std::vector<Parameter*>& out);

        private:
            Tensor cached_x_, cached_u_;
        };

        // K-head scaled dot-product self-attention with merged output projection.
        // Optional low-rank adapters sit on the query and value projections; the
        // base projections may be frozen (backbone) or trainable (encoder).
        struct MultiHeadAttention
        {
            std::int64_t d_model = 0, n_heads = 0, head_dim = 0;
            bool causal = false;
            Linear wq, wk, wv, wo;
            bool has_lora = false;
            LoRAAdapter lora_q, lora_v;

            MultiHeadAttention() = default;
            MultiHeadAttention(const std::string& name, std::int64_t d_model, std::int64_t n_heads,
                               bool causal, Init init, Rng& rng, bool base_trainable,
                               std::int64_t lora_rank = 0);

            Tensor forward(const Tensor& x); // L x d_model -> L x d_model
            Tensor backward(const Tensor& grad_out);
            void params(std::vector<Parameter*>& out);

        private:
            Tensor cached_x_, q_, k_, v_, ctx_, lora_uq_, lora_uv_;
            std::vector<EMat> probs_; // per head, L x L
        };

        struct LayerNorm
        {
            Parameter gamma, beta;
            double eps = 1e-5;

            LayerNorm() = default;
            LayerNorm(const std::string& name, std::int64_t dim, bool trainable);

            Tensor forward(const Tensor& x); // rows x dim
            Tensor backward(const Tensor& grad_out);
            void params(std::vector<Parameter*>& out);

        private:
            Tensor cached_xhat_;
            std::vector<double> cached_invstd_;
        };

        // Pre-norm residual block: x + Attn(LN(x)), then x + MLP(LN(x)). The base
        // weights are frozen; only the query/value adapters train.
        struct TransformerBlock
        {
            LayerNorm ln1, ln2;
            MultiHeadAttention attn;
            Linear fc1, fc2;
            GeluLayer act;

            TransformerBlock() = default;
            TransformerBlock(const std::string& name, std::int64_t d_model, std::int64_t n_heads,
                             std::int64_t lora_rank, Rng& rng);

            Tensor forward(const Tensor& x);
            Tensor backward(const Tensor& grad_out);
            void params(std::vector<Parameter*>& out);
        };

        // Halves both spatial dimensions while keeping the channel count:
        // a 1x1 stride-2 skip convolution added to conv(3x3,s2,p1)+BN+LeakyReLU
        // followed by conv(3x3,s1,p1)+BN+LeakyReLU.
        struct DownSampling
        {
            Conv2d skip, conv1, conv2;
            BatchNorm2d bn1, bn2;
            LeakyReluLayer act1, act2;

            DownSampling() = default;
            DownSampling(const std::string& name, std::int64_t channels, Rng& rng);

            Tensor forward(const Tensor& x, bool training);
            Tensor backward(const Tensor& grad_out);
            void params(std::vector<Parameter*>& out);
        };

    } // namespace nn
} // namespace fapt

#endif
