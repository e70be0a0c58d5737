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

#ifndef FAPT_REPORT_IO_HPP
#define FAPT_REPORT_IO_HPP

#include <string>
#include <vector>

#include "fapt/miso.hpp"
#include "fapt/train.hpp"

namespace fapt
{
    // CSV files start with an ISO-8601 timestamp comment line followed by a
    // header row; data rows carry full double precision.
    void write_train_report_csv(const std::string& path, const TrainReport& report);
    void write_se_csv(const std::string& path, const SEReport& report);
    void write_horizon_csv(const std::string& path, const std::vector<HorizonRow>& rows);

    struct EvalRow
    {
        int sample = 0;
        double accuracy_pct = 0.0;
        double nmse_db = 0.0;
        double validation_nmse_db = 0.0;
    };
    void write_eval_csv(const std::string& path, const std::vector<EvalRow>& rows,
                        double mean_accuracy, double mean_nmse_db, double mean_validation_db,
                        double mean_latency_ms);

    struct RunManifest
    {
        std::string command;
        std::string tool_version;
        std::uint64_t seed = 0;
        std::uint64_t config_hash = 0;
        std::vector<std::string> outputs;
        double duration_seconds = 0.0;
    };

    // Written atomically: serialized to <path>.tmp then renamed.
    void write_manifest(const std::string& path, const RunManifest& manifest);

    std::string iso8601_utc_now();

} // namespace fapt

#endif
