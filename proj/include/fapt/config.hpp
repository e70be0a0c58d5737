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

#ifndef FAPT_CONFIG_HPP
#define FAPT_CONFIG_HPP

#include <map>
#include <stdexcept>
#include <string>

#include "fapt/miso.hpp"
#include "fapt/model.hpp"
#include "fapt/scenario.hpp"
#include "fapt/train.hpp"

namespace fapt
{
    struct ConfigError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // Flat key=value text. '#' starts a comment, blank lines are skipped and
    // every key must belong to the documented vocabulary; unknown keys are
    // rejected up front.
    class KvConfig
    {
    public:
        static KvConfig from_file(const std::string& path);
        static KvConfig from_string(const std::string& text);

        bool has(const std::string& key) const { return kv_.count(key) != 0; }
        double get_double(const std::string& key, double dflt) const;
        int get_int(const std::string& key, int dflt) const;
        std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const;
        bool get_bool(const std::string& key, bool dflt) const;
        std::string get_string(const std::string& key, const std::string& dflt) const;

        const std::map<std::string, std::string>& entries() const { return kv_; }

    private:
        std::map<std::string, std::string> kv_;
    };

    struct BenchConfig
    {
        int n_ue = 10;
        int trials_se = 200;
        int trials_nmse = 8;
        std::vector<double> speeds_kmh = {90.0, 120.0, 150.0};
        std::vector<std::pair<int, int>> bs_arrays = {{2, 8}, {8, 8}, {32, 8}};
        std::vector<double> snr_grid_db = {0.0, 10.0, 20.0, 30.0};
    };

    ScenarioConfig scenario_from_config(const KvConfig& cfg);
    ModelConfig model_from_config(const KvConfig& cfg);
    TrainConfig train_from_config(const KvConfig& cfg);
    BenchConfig bench_from_config(const KvConfig& cfg);

    // One line per effective key, sorted; hashed into the run manifest.
    std::string canonical_config_dump(const KvConfig& cfg);
    std::uint64_t config_hash(const std::string& canonical_dump);

} // namespace fapt

#endif
