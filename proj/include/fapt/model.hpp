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

#ifndef FAPT_MODEL_HPP
#define FAPT_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fapt/nn.hpp"
#include "fapt/scenario.hpp"

namespace fapt
{
    enum class Dtype : std::uint8_t
    {
        f32 = 1,
        f64 = 2
    };

    struct ModelConfig
    {
        int t_in = 8;       // T
        int f_out = 8;      // F
        int n_rows = 20;    // N
        int m_cols = 10;    // M
        int d_model = 64;
        int n_heads = 4;
        int n_layers = 2;   // N_L
        int d_hidden = 256; // d_l
        int lora_rank = 4;
        bool prompt_enabled = false;
        int prompt_len = 32; // L_p
        Dtype dtype = Dtype::f64; // checkpoint payload precision
        std::uint64_t init_seed = 42;

        void validate() const;
    };

    struct PromptContext
    {
        std::string task_text;
        std::string dataset_text;
        double stat_max = 0, stat_min = 0, stat_mean = 0, stat_std = 0, stat_median = 0;
        std::string text; // full prompt fed to the tokenizer
        std::vector<int> token_ids;
        Tensor embedded; // L_p x d_model
    };

    struct PredictOutput
    {
        CxSeries pred; // F x N x M
        NormStats stats;
    };

    // The port prediction network: per-sample normalization and real/imag split,
    // a shared convolutional encoder with multi-head attention, an input
    // projection onto the horizon axis, a frozen transformer backbone with
    // low-rank adapters on the query/value projections, and an output projection
    // back to channel tables. Optionally a trainable prompt-encoder path prepends
    // conditioned tokens to the backbone input.
    class PortLLM
    {
    public:
        explicit PortLLM(const ModelConfig& cfg);

        const ModelConfig& config() const { return cfg_; }

        // training=true uses per-input normalization statistics in the encoder
        // batch norms and records them for fold_logged_bn_stats.
        PredictOutput forward(const CxSeries& past, bool training = false);

        // Same pipeline with the adapter bypasses detached and the prompt rows
        // forced to zero: the pure frozen-backbone path.
        PredictOutput forward_frozen(const CxSeries& past, bool training = false);

        // Backward from the gradient of a loss w.r.t. the complex prediction.
        // grad.a[i] carries (dL/dRe, dL/dIm). Must follow forward(training=true).
        void backward(const CxSeries& grad_pred);

        std::vector<Parameter*> parameters();
        std::vector<const Parameter*> parameters() const;
        void zero_grads();
        std::int64_t trainable_param_count() const;
        std::int64_t total_param_count() const;

        void copy_state_from(const PortLLM& other);

        // Per-sample batch-norm statistics logged by the last training forward;
        // the trainer folds them into the running buffers in sample order.
        struct BnLog
        {
            std::vector<double> stats; // concatenated (mean, var) per BN pass
        };
        BnLog take_bn_log();
        void apply_bn_log(const BnLog& log);

        PromptContext build_prompt(const CxSeries& past) const;
        Tensor tokenize_and_embed(const std::string& text) const;

    private:
        struct EncoderCache;

        Tensor encode_branch(const Tensor& x, bool training, bool log_bn);
        Tensor encode_branch_backward(const Tensor& grad);
        Tensor input_projection(const Tensor& x2t);
        Tensor input_projection_backward(const Tensor& grad);
        Tensor backbone(const Tensor& x, bool detach_adapters);
        Tensor backbone_backward(const Tensor& grad);
        Tensor output_projection(const Tensor& x);
        Tensor output_projection_backward(const Tensor& grad);
        PredictOutput run_forward(const CxSeries& past, bool training, bool detach);

        ModelConfig cfg_;
        std::int64_t flat_dim_ = 0; // encoder spatial cells after two halvings

        // Shared encoder (trainable).
        nn::DownSampling down1_, down2_;
        nn::Linear enc_linear_;
        nn::LeakyReluLayer enc_act_;
        nn::MultiHeadAttention enc_attn_;

        // Input projection (trainable).
        nn::Linear in_lin1_, in_lin2_, in_rowmix_;
        nn::GeluLayer in_act_;

        // Frozen backbone with adapters.
        Parameter pos_embed_;
        std::vector<nn::TransformerBlock> blocks_;
        nn::LayerNorm ln_f_;

        // Output projection (trainable).
        nn::Linear out_lin1_, out_lin2_;
        nn::GeluLayer out_act_;

        // Prompt path (only constructed when enabled).
        Parameter prompt_table_; // 257 x d_model, frozen
        nn::Linear penc1_, penc2_;
        nn::GeluLayer penc_act_;

        // Forward caches for backward.
        Tensor cached_xr_, cached_xi_;
        NormStats cached_stats_;
        bool cached_training_ = false;
        bool cached_detached_ = false;
        std::vector<double> bn_log_;
    };

    // Normalize then split into real and imaginary parts.
    struct Preprocessed
    {
        Tensor real, imag; // T x N x M each
        NormStats stats;
    };
    Preprocessed preprocess(const CxSeries& past);

    // Denormalize the F x 2 x N x M output tensor and reassemble the complex
    // prediction.
    CxSeries assemble_output(const Tensor& y, const NormStats& stats, int f_out, int n_rows,
                             int m_cols);

} // namespace fapt

#endif
