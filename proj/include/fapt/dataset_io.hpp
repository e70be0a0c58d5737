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

#ifndef FAPT_DATASET_IO_HPP
#define FAPT_DATASET_IO_HPP

#include <stdexcept>
#include <string>

#include "fapt/scenario.hpp"

namespace fapt
{
    enum class IoErrc
    {
        bad_magic,
        bad_version,
        truncated,
        dim_overflow,
        io_failure
    };

    struct DatasetError : std::runtime_error
    {
        IoErrc code;
        DatasetError(IoErrc c, const std::string& msg) : std::runtime_error(msg), code(c) {}
    };

    // Binary layout (little-endian): magic "FAPT", u32 version=1, u32 T, F, N, M,
    // u32 n_samples; per sample a meta block (u32 ue_id, f64 speed_mps,
    // u32 t0_slot, u64 seed) followed by the past, future and reference tensors
    // as f32 (re, im) pairs in row-major [time][n][m] order.
    void write_dataset(const std::string& path, const Dataset& ds);
    Dataset read_dataset(const std::string& path);

} // namespace fapt

#endif
