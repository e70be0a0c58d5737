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

#ifndef FAPT_MISO_HPP
#define FAPT_MISO_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fapt/prony.hpp"
#include "fapt/scenario.hpp"

namespace fapt
{
    struct MisoScenario
    {
        int n_ue = 10;
        ScenarioConfig base;              // port grid, paths, slots; geom is the BS array
        double speed_mps = 120.0 / 3.6;
        std::vector<double> snr_db = {0.0, 10.0, 20.0, 30.0};
        int n_trials = 200;
        std::uint64_t seed = 1;

        void validate() const;
    };

    struct SERow
    {
        double snr_db = 0.0;
        std::string condition;
        double se_bps_hz = 0.0;
        int n_trials = 0;
        double std_err = 0.0;
    };

    struct SEReport
    {
        std::vector<SERow> rows;
    };

    struct HorizonRow
    {
        std::string predictor;
        double speed_kmh = 0.0;
        std::string bs_config; // e.g. "2x8"
        int step = 1;          // 1-based horizon index
        double nmse_db = 0.0;
    };

    // Zero-forcing precoder W = H^H (H H^H)^-1 with unit-norm columns and equal
    // per-user power 1/N_UE. h_rows[u] is user u's 1 x N_t channel row; the
    // returned w[u] is the length-N_t beamforming vector for user u.
    std::vector<std::vector<cxd>> ezf_precoder(const std::vector<std::vector<cxd>>& h_rows);

    // SINR_u = rho |h_u^H w_u|^2 / (rho sum_{v!=u} |h_u^H w_v|^2 + 1) and
    // SE = sum_u log2(1 + SINR_u).
    std::pair<std::vector<double>, double> sinr_and_se(
        const std::vector<std::vector<cxd>>& h_true, const std::vector<std::vector<cxd>>& w,
        double snr_db);

    // Builds a fresh copy of each benchmark predictor; used to give every
    // worker thread its own instances.
    using PredictorFactory = std::function<std::vector<std::unique_ptr<Predictor>>()>;

    // Monte-Carlo downlink benchmark. Per trial, each UE tracks its own port;
    // conditions are "stationary" (perfect CSI), one per predictor (precoder
    // from the predicted channel at the predicted port, evaluated on the true
    // evolved channel there) and "no-prediction" (outdated reference channel at
    // the reference port). SE is averaged over the prediction horizon.
    SEReport run_benchmark(const MisoScenario& scenario, const PredictorFactory& predictors);

    // Per-horizon-step validation NMSE between the channel at the selected port
    // and the reference channel, averaged over trials and UEs.
    std::vector<HorizonRow> nmse_horizon_bench(const MisoScenario& scenario,
                                               const PredictorFactory& predictors);

} // namespace fapt

#endif
