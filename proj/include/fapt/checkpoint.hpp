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

#ifndef FAPT_CHECKPOINT_HPP
#define FAPT_CHECKPOINT_HPP

#include <string>

#include "fapt/dataset_io.hpp"
#include "fapt/model.hpp"

namespace fapt
{
    // Checkpoints are self-describing: magic "FAPTCKPT", u32 version, the full
    // model configuration, then a named parameter table (u32 name length, name
    // bytes, u8 dtype tag, u8 flags, u32 ndim, u64 dims, payload). Frozen and
    // trainable parameters are both stored; flags mark trainable (bit 0),
    // adapter (bit 1) and buffer (bit 2) entries. Little-endian throughout.
    void save_checkpoint(const std::string& path, const PortLLM& model);
    PortLLM load_checkpoint(const std::string& path);

    // FNV-1a over the serialized payload bytes of every parameter matching the
    // predicate; used to verify frozen weights survive training untouched.
    std::uint64_t frozen_param_hash(const PortLLM& model);

} // namespace fapt

#endif
