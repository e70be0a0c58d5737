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

#include "fapt/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace fapt
{

    namespace
    {
        constexpr char kMagic[8] = {'F', 'A', 'P', 'T', 'C', 'K', 'P', 'T'};
        constexpr std::uint32_t kVersion = 1;

        template <typename T>
        void put(std::ostream& os, T v)
        {
            os.write(reinterpret_cast<const char*>(&v), sizeof(T));
        }

        template <typename T>
        T get(std::istream& is)
        {
            T v{};
            is.read(reinterpret_cast<char*>(&v), sizeof(T));
            if (!is)
                throw DatasetError(IoErrc::truncated, "checkpoint: truncated payload");
            return v;
        }

        void put_config(std::ostream& os, const ModelConfig& c)
        {
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.t_in));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.f_out));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.n_rows));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.m_cols));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.d_model));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.n_heads));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.n_layers));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.d_hidden));
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.lora_rank));
            put<std::uint8_t>(os, c.prompt_enabled ? 1 : 0);
            put<std::uint32_t>(os, static_cast<std::uint32_t>(c.prompt_len));
            put<std::uint8_t>(os, static_cast<std::uint8_t>(c.dtype));
            put<std::uint64_t>(os, c.init_seed);
        }

        ModelConfig get_config(std::istream& is)
        {
            ModelConfig c;
            c.t_in = static_cast<int>(get<std::uint32_t>(is));
            c.f_out = static_cast<int>(get<std::uint32_t>(is));
            c.n_rows = static_cast<int>(get<std::uint32_t>(is));
            c.m_cols = static_cast<int>(get<std::uint32_t>(is));
            c.d_model = static_cast<int>(get<std::uint32_t>(is));
            c.n_heads = static_cast<int>(get<std::uint32_t>(is));
            c.n_layers = static_cast<int>(get<std::uint32_t>(is));
            c.d_hidden = static_cast<int>(get<std::uint32_t>(is));
            c.lora_rank = static_cast<int>(get<std::uint32_t>(is));
            c.prompt_enabled = get<std::uint8_t>(is) != 0;
            c.prompt_len = static_cast<int>(get<std::uint32_t>(is));
            c.dtype = static_cast<Dtype>(get<std::uint8_t>(is));
            c.init_seed = get<std::uint64_t>(is);
            return c;
        }
    } // namespace

    void save_checkpoint(const std::string& path, const PortLLM& model)
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw DatasetError(IoErrc::io_failure, "checkpoint: cannot open for writing: " + path);

        os.write(kMagic, 8);
        put(os, kVersion);
        put_config(os, model.config());

        auto params = model.parameters();
        put<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
        const Dtype dt = model.config().dtype;
        for (const Parameter* p : params)
        {
            put<std::uint32_t>(os, static_cast<std::uint32_t>(p->name.size()));
            os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
            put<std::uint8_t>(os, static_cast<std::uint8_t>(dt));
            std::uint8_t flags = 0;
            if (p->trainable)
                flags |= 1;
            if (p->is_adapter)
                flags |= 2;
            if (p->is_buffer)
                flags |= 4;
            put(os, flags);
            put<std::uint32_t>(os, static_cast<std::uint32_t>(p->value.shape.size()));
            for (std::int64_t d : p->value.shape)
                put<std::uint64_t>(os, static_cast<std::uint64_t>(d));
            if (dt == Dtype::f32)
                for (double v : p->value.data)
                    put(os, static_cast<float>(v));
            else
                for (double v : p->value.data)
                    put(os, v);
        }
        os.flush();
        if (!os)
            throw DatasetError(IoErrc::io_failure, "checkpoint: write failed: " + path);
    }

    PortLLM load_checkpoint(const std::string& path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw DatasetError(IoErrc::io_failure, "checkpoint: cannot open for reading: " + path);

        char magic[8];
        is.read(magic, 8);
        if (!is || std::memcmp(magic, kMagic, 8) != 0)
            throw DatasetError(IoErrc::bad_magic, "checkpoint: bad magic");
        if (get<std::uint32_t>(is) != kVersion)
            throw DatasetError(IoErrc::bad_version, "checkpoint: unsupported version");

        ModelConfig cfg = get_config(is);
        PortLLM model(cfg);
        auto params = model.parameters();

        std::uint32_t n = get<std::uint32_t>(is);
        if (n != params.size())
            throw DatasetError(IoErrc::truncated, "checkpoint: parameter count mismatch");

        for (std::uint32_t i = 0; i < n; ++i)
        {
            std::uint32_t len = get<std::uint32_t>(is);
            std::string name(len, '\0');
            is.read(name.data(), len);
            if (!is)
                throw DatasetError(IoErrc::truncated, "checkpoint: truncated payload");

            Dtype dt = static_cast<Dtype>(get<std::uint8_t>(is));
            (void)get<std::uint8_t>(is); // flags are re-derived from the model
            std::uint32_t ndim = get<std::uint32_t>(is);
            std::vector<std::int64_t> shape(ndim);
            for (std::uint32_t d = 0; d < ndim; ++d)
                shape[d] = static_cast<std::int64_t>(get<std::uint64_t>(is));

            Parameter* target = nullptr;
            for (Parameter* p : params)
                if (p->name == name)
                {
                    target = p;
                    break;
                }
            if (target == nullptr || target->value.shape != shape)
                throw DatasetError(IoErrc::dim_overflow,
                                   "checkpoint: unknown or mismatched parameter " + name);

            if (dt == Dtype::f32)
                for (double& v : target->value.data)
                    v = static_cast<double>(get<float>(is));
            else
                for (double& v : target->value.data)
                    v = get<double>(is);
        }
        return model;
    }

    std::uint64_t frozen_param_hash(const PortLLM& model)
    {
        std::uint64_t h = 1469598103934665603ull;
        for (const Parameter* p : model.parameters())
        {
            if (p->trainable || p->is_buffer)
                continue;
            const unsigned char* bytes =
                reinterpret_cast<const unsigned char*>(p->value.data.data());
            std::size_t nbytes = p->value.data.size() * sizeof(double);
            for (std::size_t i = 0; i < nbytes; ++i)
            {
                h ^= bytes[i];
                h *= 1099511628211ull;
            }
        }
        return h;
    }

} // namespace fapt
