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

#include "fapt/report_io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fapt
{

    std::string iso8601_utc_now()
    {
        std::time_t now = std::time(nullptr);
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        return buf;
    }

    namespace
    {
        std::ofstream open_csv(const std::string& path)
        {
            std::ofstream os(path, std::ios::trunc);
            if (!os)
                throw std::runtime_error("cannot open for writing: " + path);
            os << "# generated " << iso8601_utc_now() << "\n";
            os.precision(17);
            return os;
        }
    } // namespace

    void write_train_report_csv(const std::string& path, const TrainReport& report)
    {
        std::ofstream os = open_csv(path);
        os << "epoch,lr,train_nmse_db,test_nmse_db,accuracy_pct,validation_nmse_db\n";
        for (const EpochRow& r : report.rows)
            os << r.epoch << ',' << r.lr << ',' << r.train_nmse_db << ',' << r.test_nmse_db << ','
               << r.accuracy_pct << ',' << r.validation_nmse_db << '\n';
    }

    void write_se_csv(const std::string& path, const SEReport& report)
    {
        std::ofstream os = open_csv(path);
        os << "snr_db,condition,se_bps_hz,n_trials,stderr\n";
        for (const SERow& r : report.rows)
            os << r.snr_db << ',' << r.condition << ',' << r.se_bps_hz << ',' << r.n_trials << ','
               << r.std_err << '\n';
    }

    void write_horizon_csv(const std::string& path, const std::vector<HorizonRow>& rows)
    {
        std::ofstream os = open_csv(path);
        os << "predictor,speed_kmh,bs_array,horizon_step,nmse_db\n";
        for (const HorizonRow& r : rows)
            os << r.predictor << ',' << r.speed_kmh << ',' << r.bs_config << ',' << r.step << ','
               << r.nmse_db << '\n';
    }

    void write_eval_csv(const std::string& path, const std::vector<EvalRow>& rows,
                        double mean_accuracy, double mean_nmse_db, double mean_validation_db,
                        double mean_latency_ms)
    {
        std::ofstream os = open_csv(path);
        os << "sample,accuracy_pct,nmse_db,validation_nmse_db,latency_ms\n";
        for (const EvalRow& r : rows)
            os << r.sample << ',' << r.accuracy_pct << ',' << r.nmse_db << ','
               << r.validation_nmse_db << ",\n";
        os << "aggregate," << mean_accuracy << ',' << mean_nmse_db << ',' << mean_validation_db
           << ',' << mean_latency_ms << '\n';
    }

    void write_manifest(const std::string& path, const RunManifest& manifest)
    {
        nlohmann::json j;
        j["command"] = manifest.command;
        j["tool_version"] = manifest.tool_version;
        j["seed"] = manifest.seed;
        j["config_hash"] = manifest.config_hash;
        j["outputs"] = manifest.outputs;
        j["duration_seconds"] = manifest.duration_seconds;
        j["finished_at"] = iso8601_utc_now();

        std::string tmp = path + ".tmp";
        {
            std::ofstream os(tmp, std::ios::trunc);
            if (!os)
                throw std::runtime_error("cannot open for writing: " + tmp);
            os << j.dump(2) << '\n';
        }
        if (std::rename(tmp.c_str(), path.c_str()) != 0)
            throw std::runtime_error("cannot move manifest into place: " + path);
    }

} // namespace fapt
