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

#include "fapt/dataset_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

static_assert(std::endian::native == std::endian::little,
              "dataset files are little-endian; big-endian hosts are unsupported");

namespace fapt
{

    namespace
    {
        constexpr char kMagic[4] = {'F', 'A', 'P', 'T'};
        constexpr std::uint32_t kVersion = 1;
        constexpr std::uint32_t kMaxDim = 1u << 20;

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
                throw DatasetError(IoErrc::truncated, "dataset: truncated payload");
            return v;
        }

        void put_series(std::ostream& os, const CxSeries& s)
        {
            for (const cxd& v : s.a)
            {
                put(os, static_cast<float>(v.real()));
                put(os, static_cast<float>(v.imag()));
            }
        }

        void get_series(std::istream& is, CxSeries& s)
        {
            for (cxd& v : s.a)
            {
                float re = get<float>(is);
                float im = get<float>(is);
                v = cxd(re, im);
            }
        }

        void check_dims(std::uint64_t t, std::uint64_t f, std::uint64_t n, std::uint64_t m,
                        std::uint64_t n_samples)
        {
            if (t == 0 || f == 0 || n == 0 || m == 0 || t > kMaxDim || f > kMaxDim || n > kMaxDim ||
                m > kMaxDim)
                throw DatasetError(IoErrc::dim_overflow, "dataset: dimension out of range");
            std::uint64_t per_sample = (t + 2 * f) * n * m;
            if (per_sample > std::numeric_limits<std::uint64_t>::max() / 8 ||
                (n_samples > 0 && per_sample * 8 > std::numeric_limits<std::uint64_t>::max() / n_samples))
                throw DatasetError(IoErrc::dim_overflow, "dataset: payload size overflow");
        }
    } // namespace

    void write_dataset(const std::string& path, const Dataset& ds)
    {
        if (!ds.samples.empty())
            check_dims(ds.t_past, ds.f_future, ds.n_rows, ds.m_cols, ds.samples.size());

        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw DatasetError(IoErrc::io_failure, "dataset: cannot open for writing: " + path);

        os.write(kMagic, 4);
        put(os, kVersion);
        put(os, ds.t_past);
        put(os, ds.f_future);
        put(os, ds.n_rows);
        put(os, ds.m_cols);
        put(os, static_cast<std::uint32_t>(ds.samples.size()));

        for (const SampleRecord& rec : ds.samples)
        {
            put(os, rec.meta.ue_id);
            put(os, rec.meta.speed_mps);
            put(os, rec.meta.t0_slot);
            put(os, rec.meta.seed);
            put_series(os, rec.past);
            put_series(os, rec.future);
            put_series(os, rec.reference);
        }
        os.flush();
        if (!os)
            throw DatasetError(IoErrc::io_failure, "dataset: write failed: " + path);
    }

    Dataset read_dataset(const std::string& path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw DatasetError(IoErrc::io_failure, "dataset: cannot open for reading: " + path);

        char magic[4];
        is.read(magic, 4);
        if (!is || std::memcmp(magic, kMagic, 4) != 0)
            throw DatasetError(IoErrc::bad_magic, "dataset: bad magic");

        std::uint32_t version = get<std::uint32_t>(is);
        if (version != kVersion)
            throw DatasetError(IoErrc::bad_version, "dataset: unsupported format version");

        Dataset ds;
        ds.t_past = get<std::uint32_t>(is);
        ds.f_future = get<std::uint32_t>(is);
        ds.n_rows = get<std::uint32_t>(is);
        ds.m_cols = get<std::uint32_t>(is);
        std::uint32_t n_samples = get<std::uint32_t>(is);
        if (n_samples > 0)
            check_dims(ds.t_past, ds.f_future, ds.n_rows, ds.m_cols, n_samples);

        ds.samples.resize(n_samples);
        for (SampleRecord& rec : ds.samples)
        {
            rec.meta.ue_id = get<std::uint32_t>(is);
            rec.meta.speed_mps = get<double>(is);
            rec.meta.t0_slot = get<std::uint32_t>(is);
            rec.meta.seed = get<std::uint64_t>(is);

            rec.past = CxSeries(static_cast<int>(ds.t_past), static_cast<int>(ds.n_rows),
                                static_cast<int>(ds.m_cols));
            rec.future = CxSeries(static_cast<int>(ds.f_future), static_cast<int>(ds.n_rows),
                                  static_cast<int>(ds.m_cols));
            rec.reference = rec.future;
            get_series(is, rec.past);
            get_series(is, rec.future);
            get_series(is, rec.reference);
        }
        return ds;
    }

} // namespace fapt
