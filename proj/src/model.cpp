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

#include "fapt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fapt
{

    namespace
    {
        constexpr int kPadToken = 256;
        constexpr int kVocab = 257;

        std::uint64_t fnv1a(const std::string& s)
        {
            std::uint64_t h = 1469598103934665603ull;
            for (unsigned char c : s)
            {
                h ^= c;
                h *= 1099511628211ull;
            }
            return h;
        }

        // Every parameter group draws from its own name-derived stream, so the
        // frozen weights are identical whether or not adapters or the prompt
        // path exist.
        Rng named_rng(std::uint64_t seed, const std::string& name)
        {
            return Rng(mix_seed(seed, fnv1a(name)));
        }

        Tensor transpose2d(const Tensor& x, std::int64_t rows, std::int64_t cols)
        {
            Tensor y({cols, rows});
            for (std::int64_t r = 0; r < rows; ++r)
                for (std::int64_t c = 0; c < cols; ++c)
                    y.data[static_cast<std::size_t>(c * rows + r)] =
                        x.data[static_cast<std::size_t>(r * cols + c)];
            return y;
        }

        std::int64_t halved(std::int64_t len) { return (len + 2 * 1 - 3) / 2 + 1; } // conv 3/2/1
    } // namespace

    void ModelConfig::validate() const
    {
        if (t_in < 1 || f_out < 1)
            throw std::invalid_argument("model: T and F must be >= 1");
        if (n_rows < 4 || m_cols < 4)
            throw std::invalid_argument("model: port grid must be at least 4x4 for two halvings");
        if (d_model < 1 || n_heads < 1 || d_model % n_heads != 0)
            throw std::invalid_argument("model: d_model must be divisible by n_heads");
        if (n_layers < 1 || d_hidden < 1)
            throw std::invalid_argument("model: invalid depth or hidden width");
        if (lora_rank < 1)
            throw std::invalid_argument("model: lora_rank must be >= 1");
        if (prompt_enabled && prompt_len < 1)
            throw std::invalid_argument("model: prompt_len must be >= 1");
    }

    Preprocessed preprocess(const CxSeries& past)
    {
        auto [norm, stats] = normalize(past);
        Preprocessed out;
        out.stats = stats;
        out.real = Tensor({norm.steps, norm.rows, norm.cols});
        out.imag = Tensor({norm.steps, norm.rows, norm.cols});
        for (std::size_t i = 0; i < norm.a.size(); ++i)
        {
            out.real.data[i] = norm.a[i].real();
            out.imag.data[i] = norm.a[i].imag();
        }
        return out;
    }

    CxSeries assemble_output(const Tensor& y, const NormStats& stats, int f_out, int n_rows,
                             int m_cols)
    {
        const std::size_t plane = static_cast<std::size_t>(n_rows) * m_cols;
        CxSeries out(f_out, n_rows, m_cols);
        for (int f = 0; f < f_out; ++f)
        {
            const double* re = y.data.data() + (static_cast<std::size_t>(f) * 2) * plane;
            const double* im = re + plane;
            cxd* dst = out.slice(f);
            for (std::size_t i = 0; i < plane; ++i)
                dst[i] = cxd(stats.sigma * re[i] + stats.mu.real(),
                             stats.sigma * im[i] + stats.mu.imag());
        }
        return out;
    }

    PortLLM::PortLLM(const ModelConfig& cfg) : cfg_(cfg)
    {
        cfg_.validate();
        const std::int64_t T = cfg_.t_in, F = cfg_.f_out, D = cfg_.d_model;
        flat_dim_ = halved(halved(cfg_.n_rows)) * halved(halved(cfg_.m_cols));

        auto rng_of = [&](const std::string& n) { return named_rng(cfg_.init_seed, n); };

        {
            Rng r = rng_of("encoder.down1");
            down1_ = nn::DownSampling("encoder.down1", T, r);
        }
        {
            Rng r = rng_of("encoder.down2");
            down2_ = nn::DownSampling("encoder.down2", T, r);
        }
        {
            Rng r = rng_of("encoder.linear");
            enc_linear_ = nn::Linear("encoder.linear", D, flat_dim_, nn::Init::xavier_uniform, r,
                                     true);
        }
        {
            Rng r = rng_of("encoder.attn");
            enc_attn_ = nn::MultiHeadAttention("encoder.attn", D, cfg_.n_heads, false,
                                               nn::Init::xavier_uniform, r, true);
        }
        {
            Rng r = rng_of("inproj.lin1");
            in_lin1_ = nn::Linear("inproj.lin1", cfg_.d_hidden, D, nn::Init::xavier_uniform, r,
                                  true);
        }
        {
            Rng r = rng_of("inproj.lin2");
            in_lin2_ = nn::Linear("inproj.lin2", D, cfg_.d_hidden, nn::Init::xavier_uniform, r,
                                  true);
        }
        {
            Rng r = rng_of("inproj.rowmix");
            in_rowmix_ = nn::Linear("inproj.rowmix", F, 2 * T, nn::Init::xavier_uniform, r, true);
        }

        const std::int64_t max_seq = (cfg_.prompt_enabled ? cfg_.prompt_len : 0) + F;
        pos_embed_ = Parameter("backbone.pos_embed", {max_seq, D}, false);
        {
            Rng r = rng_of("backbone.pos_embed");
            for (double& v : pos_embed_.value.data)
                v = r.normal(0.0, 0.02);
        }

        blocks_.reserve(static_cast<std::size_t>(cfg_.n_layers));
        for (int l = 0; l < cfg_.n_layers; ++l)
        {
            std::string name = "backbone.h" + std::to_string(l);
            Rng r = rng_of(name);
            blocks_.emplace_back(name, D, cfg_.n_heads, cfg_.lora_rank, r);
        }
        ln_f_ = nn::LayerNorm("backbone.ln_f", D, false);

        {
            Rng r = rng_of("outproj.lin1");
            out_lin1_ = nn::Linear("outproj.lin1", cfg_.d_hidden, D, nn::Init::xavier_uniform, r,
                                   true);
        }
        {
            Rng r = rng_of("outproj.lin2");
            out_lin2_ = nn::Linear("outproj.lin2", 2 * cfg_.n_rows * cfg_.m_cols, cfg_.d_hidden,
                                   nn::Init::xavier_uniform, r, true);
        }

        if (cfg_.prompt_enabled)
        {
            prompt_table_ = Parameter("prompt.table", {kVocab, D}, false);
            {
                Rng r = rng_of("prompt.table");
                for (double& v : prompt_table_.value.data)
                    v = r.normal(0.0, 0.02);
            }
            {
                Rng r = rng_of("prompt.enc1");
                penc1_ = nn::Linear("prompt.enc1", D, D, nn::Init::xavier_uniform, r, true);
            }
            {
                Rng r = rng_of("prompt.enc2");
                penc2_ = nn::Linear("prompt.enc2", D, D, nn::Init::xavier_uniform, r, true);
            }
        }
    }

    Tensor PortLLM::encode_branch(const Tensor& x, bool training, bool log_bn)
    {
        Tensor d1 = down1_.forward(x, training);
        Tensor d2 = down2_.forward(d1, training);
        if (training && log_bn)
        {
            for (nn::BatchNorm2d* bn : {&down1_.bn1, &down1_.bn2, &down2_.bn1, &down2_.bn2})
            {
                bn_log_.insert(bn_log_.end(), bn->last_mean.begin(), bn->last_mean.end());
                bn_log_.insert(bn_log_.end(), bn->last_var.begin(), bn->last_var.end());
            }
        }

        Tensor flat({cfg_.t_in, flat_dim_});
        flat.data = std::move(d2.data); // same row-major layout
        Tensor lin = enc_act_.forward(enc_linear_.forward(flat));
        return enc_attn_.forward(lin);
    }

    Tensor PortLLM::encode_branch_backward(const Tensor& grad)
    {
        Tensor g = enc_attn_.backward(grad);
        g = enc_linear_.backward(enc_act_.backward(g));
        // Reshape back to the conv output layout.
        std::int64_t n4 = halved(halved(cfg_.n_rows));
        std::int64_t m4 = halved(halved(cfg_.m_cols));
        Tensor gc({cfg_.t_in, n4, m4});
        gc.data = std::move(g.data);
        Tensor gd = down2_.backward(gc);
        return down1_.backward(gd);
    }

    Tensor PortLLM::input_projection(const Tensor& x2t)
    {
        const std::int64_t rows = 2 * cfg_.t_in, D = cfg_.d_model;
        Tensor h = in_lin2_.forward(in_act_.forward(in_lin1_.forward(x2t)));
        Tensor ht = transpose2d(h, rows, D);        // D x 2T
        Tensor mixed = in_rowmix_.forward(ht);      // D x F
        return transpose2d(mixed, D, cfg_.f_out);   // F x D
    }

    Tensor PortLLM::input_projection_backward(const Tensor& grad)
    {
        const std::int64_t rows = 2 * cfg_.t_in, D = cfg_.d_model;
        Tensor gm = transpose2d(grad, cfg_.f_out, D);  // D x F
        Tensor ght = in_rowmix_.backward(gm);          // D x 2T
        Tensor gh = transpose2d(ght, D, rows);         // 2T x D
        return in_lin1_.backward(in_act_.backward(in_lin2_.backward(gh)));
    }

    Tensor PortLLM::backbone(const Tensor& x, bool detach_adapters)
    {
        const std::int64_t L = x.dim(0), D = cfg_.d_model;
        Tensor h = x;
        for (std::int64_t r = 0; r < L; ++r)
            for (std::int64_t c = 0; c < D; ++c)
                h.data[static_cast<std::size_t>(r * D + c)] +=
                    pos_embed_.value[static_cast<std::size_t>(r * D + c)];

        for (nn::TransformerBlock& blk : blocks_)
        {
            bool saved = blk.attn.has_lora;
            if (detach_adapters)
                blk.attn.has_lora = false;
            h = blk.forward(h);
            blk.attn.has_lora = saved;
        }
        return ln_f_.forward(h);
    }

    Tensor PortLLM::backbone_backward(const Tensor& grad)
    {
        Tensor g = ln_f_.backward(grad);
        for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it)
        {
            bool saved = it->attn.has_lora;
            if (cached_detached_)
                it->attn.has_lora = false;
            g = it->backward(g);
            it->attn.has_lora = saved;
        }
        return g; // additive positional table is frozen
    }

    Tensor PortLLM::output_projection(const Tensor& x)
    {
        return out_lin2_.forward(out_act_.forward(out_lin1_.forward(x)));
    }

    Tensor PortLLM::output_projection_backward(const Tensor& grad)
    {
        return out_lin1_.backward(out_act_.backward(out_lin2_.backward(grad)));
    }

    PredictOutput PortLLM::run_forward(const CxSeries& past, bool training, bool detach)
    {
        if (past.steps != cfg_.t_in || past.rows != cfg_.n_rows || past.cols != cfg_.m_cols)
            throw std::invalid_argument("model: sample shape does not match the configuration");

        bn_log_.clear();
        cached_training_ = training;
        cached_detached_ = detach;

        Preprocessed pre = preprocess(past);
        cached_stats_ = pre.stats;
        cached_xr_ = pre.real;
        cached_xi_ = pre.imag;

        Tensor er = encode_branch(pre.real, training, true);
        Tensor ei = encode_branch(pre.imag, training, true);

        // Merge (T, 2, d_model) into 2T rows: row 2t is the real slice, 2t+1 the
        // imaginary slice of time step t.
        const std::int64_t T = cfg_.t_in, D = cfg_.d_model;
        Tensor x2t({2 * T, D});
        for (std::int64_t t = 0; t < T; ++t)
        {
            std::copy_n(er.data.begin() + t * D, D, x2t.data.begin() + (2 * t) * D);
            std::copy_n(ei.data.begin() + t * D, D, x2t.data.begin() + (2 * t + 1) * D);
        }

        Tensor xt = input_projection(x2t); // F x D

        Tensor seq;
        const std::int64_t lp = cfg_.prompt_enabled ? cfg_.prompt_len : 0;
        if (cfg_.prompt_enabled)
        {
            Tensor enc;
            if (detach)
            {
                enc = Tensor({lp, D});
            }
            else
            {
                PromptContext pc = build_prompt(past);
                enc = penc2_.forward(penc_act_.forward(penc1_.forward(pc.embedded)));
            }
            seq = Tensor({lp + cfg_.f_out, D});
            std::copy(enc.data.begin(), enc.data.end(), seq.data.begin());
            std::copy(xt.data.begin(), xt.data.end(),
                      seq.data.begin() + static_cast<std::ptrdiff_t>(lp * D));
        }
        else
        {
            seq = std::move(xt);
        }

        Tensor hidden = backbone(seq, detach);

        // Keep only the horizon rows.
        Tensor horizon({cfg_.f_out, D});
        std::copy_n(hidden.data.begin() + lp * D, cfg_.f_out * D, horizon.data.begin());

        Tensor y = output_projection(horizon); // F x 2NM

        PredictOutput out;
        out.stats = pre.stats;
        out.pred = assemble_output(y, pre.stats, cfg_.f_out, cfg_.n_rows, cfg_.m_cols);
        return out;
    }

    PredictOutput PortLLM::forward(const CxSeries& past, bool training)
    {
        return run_forward(past, training, false);
    }

    PredictOutput PortLLM::forward_frozen(const CxSeries& past, bool training)
    {
        return run_forward(past, training, true);
    }

    void PortLLM::backward(const CxSeries& grad_pred)
    {
        const std::int64_t D = cfg_.d_model;
        const std::size_t plane = static_cast<std::size_t>(cfg_.n_rows) * cfg_.m_cols;

        // Through denormalization: d/dY = sigma * (dL/dRe, dL/dIm).
        Tensor dy({cfg_.f_out, 2 * cfg_.n_rows * cfg_.m_cols});
        for (int f = 0; f < cfg_.f_out; ++f)
        {
            const cxd* g = grad_pred.slice(f);
            double* re = dy.data.data() + (static_cast<std::size_t>(f) * 2) * plane;
            double* im = re + plane;
            for (std::size_t i = 0; i < plane; ++i)
            {
                re[i] = cached_stats_.sigma * g[i].real();
                im[i] = cached_stats_.sigma * g[i].imag();
            }
        }

        Tensor dhorizon = output_projection_backward(dy); // F x D

        const std::int64_t lp = cfg_.prompt_enabled ? cfg_.prompt_len : 0;
        Tensor dhidden({lp + cfg_.f_out, D});
        std::copy(dhorizon.data.begin(), dhorizon.data.end(),
                  dhidden.data.begin() + static_cast<std::ptrdiff_t>(lp * D));

        Tensor dseq = backbone_backward(dhidden);

        Tensor dxt({cfg_.f_out, D});
        std::copy_n(dseq.data.begin() + lp * D, cfg_.f_out * D, dxt.data.begin());
        if (cfg_.prompt_enabled && !cached_detached_)
        {
            Tensor denc({lp, D});
            std::copy_n(dseq.data.begin(), lp * D, denc.data.begin());
            penc1_.backward(penc_act_.backward(penc2_.backward(denc)));
        }

        Tensor dx2t = input_projection_backward(dxt);

        const std::int64_t T = cfg_.t_in;
        Tensor der({T, D}), dei({T, D});
        for (std::int64_t t = 0; t < T; ++t)
        {
            std::copy_n(dx2t.data.begin() + (2 * t) * D, D, der.data.begin() + t * D);
            std::copy_n(dx2t.data.begin() + (2 * t + 1) * D, D, dei.data.begin() + t * D);
        }

        // The branch layers were last run on the imaginary input, so its caches
        // are live; run that backward first, then recompute the real branch
        // forward to restore its caches.
        encode_branch_backward(dei);
        encode_branch(cached_xr_, cached_training_, false);
        encode_branch_backward(der);
    }

    std::vector<Parameter*> PortLLM::parameters()
    {
        std::vector<Parameter*> ps;
        down1_.params(ps);
        down2_.params(ps);
        enc_linear_.params(ps);
        enc_attn_.params(ps);
        in_lin1_.params(ps);
        in_lin2_.params(ps);
        in_rowmix_.params(ps);
        ps.push_back(&pos_embed_);
        for (nn::TransformerBlock& b : blocks_)
            b.params(ps);
        ln_f_.params(ps);
        out_lin1_.params(ps);
        out_lin2_.params(ps);
        if (cfg_.prompt_enabled)
        {
            ps.push_back(&prompt_table_);
            penc1_.params(ps);
            penc2_.params(ps);
        }
        return ps;
    }

    std::vector<const Parameter*> PortLLM::parameters() const
    {
        auto ps = const_cast<PortLLM*>(this)->parameters();
        return {ps.begin(), ps.end()};
    }

    void PortLLM::zero_grads()
    {
        for (Parameter* p : parameters())
            p->grad.zero();
    }

    std::int64_t PortLLM::trainable_param_count() const
    {
        std::int64_t n = 0;
        for (const Parameter* p : parameters())
            if (p->trainable && !p->is_buffer)
                n += p->value.numel();
        return n;
    }

    std::int64_t PortLLM::total_param_count() const
    {
        std::int64_t n = 0;
        for (const Parameter* p : parameters())
            if (!p->is_buffer)
                n += p->value.numel();
        return n;
    }

    void PortLLM::copy_state_from(const PortLLM& other)
    {
        auto dst = parameters();
        auto src = const_cast<PortLLM&>(other).parameters();
        if (dst.size() != src.size())
            throw std::logic_error("copy_state_from: parameter lists differ");
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i]->value.data = src[i]->value.data;
    }

    PortLLM::BnLog PortLLM::take_bn_log()
    {
        BnLog log;
        log.stats = std::move(bn_log_);
        bn_log_.clear();
        return log;
    }

    void PortLLM::apply_bn_log(const BnLog& log)
    {
        nn::BatchNorm2d* bns[] = {&down1_.bn1, &down1_.bn2, &down2_.bn1, &down2_.bn2};
        const std::size_t c = static_cast<std::size_t>(cfg_.t_in);
        std::size_t off = 0;
        // Two branch passes per sample, four BN layers each.
        for (int pass = 0; pass < 2 && off + 8 * c <= log.stats.size(); ++pass)
            for (nn::BatchNorm2d* bn : bns)
            {
                bn->last_mean.assign(log.stats.begin() + static_cast<std::ptrdiff_t>(off),
                                     log.stats.begin() + static_cast<std::ptrdiff_t>(off + c));
                off += c;
                bn->last_var.assign(log.stats.begin() + static_cast<std::ptrdiff_t>(off),
                                    log.stats.begin() + static_cast<std::ptrdiff_t>(off + c));
                off += c;
                bn->last_count = bn == &down1_.bn1 || bn == &down1_.bn2
                                     ? halved(cfg_.n_rows) * halved(cfg_.m_cols)
                                     : halved(halved(cfg_.n_rows)) * halved(halved(cfg_.m_cols));
                bn->fold_running_stats();
            }
    }

    PromptContext PortLLM::build_prompt(const CxSeries& past) const
    {
        PromptContext pc;
        pc.task_text = "Task: predict the channel tables for the next " +
                       std::to_string(cfg_.f_out) + " steps from the previous " +
                       std::to_string(cfg_.t_in) + " observations.";
        pc.dataset_text = "Dataset: complex channel tables over a " + std::to_string(cfg_.n_rows) +
                          "x" + std::to_string(cfg_.m_cols) + " fluid antenna port grid.";

        std::vector<double> mags;
        mags.reserve(past.a.size());
        for (const cxd& v : past.a)
            mags.push_back(std::abs(v));
        std::sort(mags.begin(), mags.end());

        double sum = 0.0;
        for (double v : mags)
            sum += v;
        double mean = sum / static_cast<double>(mags.size());
        double var = 0.0;
        for (double v : mags)
            var += (v - mean) * (v - mean);
        var /= static_cast<double>(mags.size());
        std::size_t n = mags.size();
        double median = n % 2 == 1 ? mags[n / 2] : 0.5 * (mags[n / 2 - 1] + mags[n / 2]);

        pc.stat_max = mags.back();
        pc.stat_min = mags.front();
        pc.stat_mean = mean;
        pc.stat_std = std::sqrt(var);
        pc.stat_median = median;

        char buf[192];
        std::snprintf(buf, sizeof(buf), "Stats: max=%.6g min=%.6g mean=%.6g std=%.6g median=%.6g",
                      pc.stat_max, pc.stat_min, pc.stat_mean, pc.stat_std, pc.stat_median);
        pc.text = pc.task_text + " " + pc.dataset_text + " " + buf;

        pc.token_ids.reserve(static_cast<std::size_t>(cfg_.prompt_len));
        for (char ch : pc.text)
        {
            if (pc.token_ids.size() == static_cast<std::size_t>(cfg_.prompt_len))
                break;
            pc.token_ids.push_back(static_cast<unsigned char>(ch));
        }
        while (pc.token_ids.size() < static_cast<std::size_t>(cfg_.prompt_len))
            pc.token_ids.push_back(kPadToken);

        pc.embedded = Tensor({cfg_.prompt_len, cfg_.d_model});
        for (int i = 0; i < cfg_.prompt_len; ++i)
        {
            const double* row = prompt_table_.value.data.data() +
                                static_cast<std::size_t>(pc.token_ids[static_cast<std::size_t>(i)]) *
                                    cfg_.d_model;
            std::copy_n(row, cfg_.d_model,
                        pc.embedded.data.begin() + static_cast<std::ptrdiff_t>(i) * cfg_.d_model);
        }
        return pc;
    }

    Tensor PortLLM::tokenize_and_embed(const std::string& text) const
    {
        if (!cfg_.prompt_enabled)
            throw std::logic_error("tokenize_and_embed: prompt path is disabled");
        Tensor out({cfg_.prompt_len, cfg_.d_model});
        for (int i = 0; i < cfg_.prompt_len; ++i)
        {
            int id = i < static_cast<int>(text.size())
                         ? static_cast<unsigned char>(text[static_cast<std::size_t>(i)])
                         : kPadToken;
            const double* row =
                prompt_table_.value.data.data() + static_cast<std::size_t>(id) * cfg_.d_model;
            std::copy_n(row, cfg_.d_model,
                        out.data.begin() + static_cast<std::ptrdiff_t>(i) * cfg_.d_model);
        }
        return out;
    }

} // namespace fapt
