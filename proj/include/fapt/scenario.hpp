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

#ifndef FAPT_SCENARIO_HPP
#define FAPT_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "fapt/channel.hpp"
#include "fapt/rng.hpp"

namespace fapt
{
    // Central angles per UE: [phi_AOD, theta_EOD, phi_AOA, theta_EOA] in degrees.
    using AngleTuple = std::array<double, 4>;

    struct ScenarioConfig
    {
        double carrier_freq_hz = 39e9;
        PortGrid grid{20, 10, 1.8, 3.8}; // N=20, M=10 at ~5 ports per wavelength
        ArrayGeometry geom{1, 1, 0.5, 0.5};
        int n_paths = 4;                  // total paths, 1 LoS + (n_paths-1) NLoS
        double ricean_k = 10.0;           // linear
        double rms_delay_spread_s = 616e-9;
        double slot_duration_s = 1e-3;
        int group_len_slots = 50;
        int sampling_slot_max = 10;       // T0 drawn uniformly from [1, this]
        double speed_min_mps = 90.0 / 3.6;
        double speed_max_mps = 150.0 / 3.6;
        std::vector<AngleTuple> angle_tuples_deg = {
            {31, 149, 150, 30},    {-38, 218, 227, -47}, {1, 179, 99, 81},
            {10, 170, 36, 144},    {149, 31, 53, 127},   {129, 51, 71, 109},
            {-15, 195, 210, -30},  {199, -19, 212, -32}, {-43, 223, 76, 104},
            {7, 173, 23, 157}};
        double cluster_spread_deg = 5.0;  // NLoS scatter around the tuple centers
        int t_past = 8;                   // T
        int f_future = 8;                 // F
        int csi_delay_slots = 4;          // gap between last observed and first predicted slot
        double freq_offset_hz = 0.0;
        std::uint64_t seed = 1;

        double lambda_m() const { return kSpeedOfLight / carrier_freq_hz; }
        void validate() const;
    };

    struct SampleMeta
    {
        std::uint32_t ue_id = 0;
        double speed_mps = 0.0;
        std::uint32_t t0_slot = 0;
        std::uint64_t seed = 0; // per-sample substream seed
    };

    // One training unit: T past tables, F future (target) tables, and the F
    // reference tables (each constant over the port grid).
    struct SampleRecord
    {
        CxSeries past;      // T x N x M
        CxSeries future;    // F x N x M
        CxSeries reference; // F x N x M
        SampleMeta meta;
    };

    struct Dataset
    {
        std::uint32_t t_past = 0, f_future = 0, n_rows = 0, m_cols = 0;
        std::vector<SampleRecord> samples;
    };

    struct NormStats
    {
        cxd mu{0.0, 0.0};
        double sigma = 1.0; // floored at kSigmaFloor
    };

    inline constexpr double kSigmaFloor = 1e-12;

    // Deterministic path set for one UE: 1 LoS path at the tuple's central angles
    // plus n_paths-1 NLoS paths with exponential delays (sorted ascending),
    // exponential power profile and Gaussian angle scatter. Amplitudes satisfy
    // sum beta^2 = 1. Doppler is left at 0 until a velocity is applied.
    PathSet sample_path_set(const ScenarioConfig& cfg, int ue_index);

    // Fills per-path Doppler shifts for the given velocity.
    void apply_velocity(PathSet& ps, const Velocity& vel);

    // Builds one sample anchored at t0_slot: past tables end at t0_slot, future
    // tables start csi_delay_slots later, the reference is the port-(1,1) channel
    // at t0_slot replicated over the horizon.
    SampleRecord generate_sample(const ScenarioConfig& cfg, const PathSet& ps, std::int64_t t0_slot,
                                 const Velocity& vel);

    // Convenience overload matching the scalar-speed contract: the velocity
    // direction is drawn in the yz plane from the sample substream of t0_slot.
    SampleRecord generate_sample(const ScenarioConfig& cfg, const PathSet& ps, std::int64_t t0_slot,
                                 double speed);

    // n_samples samples drawn round-robin over the UE angle tuples, one group per
    // (ue, repetition) with a randomized sampling slot T0; deterministic in
    // (cfg.seed, cfg) regardless of thread count, emitted in generation order.
    Dataset generate_samples(const ScenarioConfig& cfg, int n_samples);

    // Seeded-permutation split: floor(n*split_fraction) samples train, rest test.
    std::pair<Dataset, Dataset> split_dataset(Dataset ds, double split_fraction,
                                              std::uint64_t seed);

    // generate_samples followed by split_dataset keyed on cfg.seed.
    std::pair<Dataset, Dataset> build_dataset(const ScenarioConfig& cfg, int n_samples,
                                              double split_fraction);

    // Mean/std normalization over all entries: mu is the complex mean, sigma the
    // standard deviation of the stacked real and imaginary components (after
    // centering), floored at kSigmaFloor.
    std::pair<CxSeries, NormStats> normalize(const CxSeries& x);

    CxSeries denormalize(const CxSeries& y, const NormStats& stats);

} // namespace fapt

#endif
