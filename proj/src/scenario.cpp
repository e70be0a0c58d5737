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

#include "fapt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fapt/threading.hpp"

namespace fapt
{

    namespace
    {
        constexpr std::uint64_t kStreamPathSet = 0x70617468u; // stream tags
        constexpr std::uint64_t kStreamSample = 0x73616d70u;
        constexpr std::uint64_t kStreamSplit = 0x73706c74u;
        constexpr std::uint64_t kStreamVelocity = 0x76656cu;
        constexpr double kDeg = kPi / 180.0;
    } // namespace

    void ScenarioConfig::validate() const
    {
        grid.validate();
        geom.validate();
        if (n_paths < 1)
            throw std::invalid_argument("scenario: n_paths must be >= 1");
        if (!(ricean_k > 0.0))
            throw std::invalid_argument("scenario: ricean_k must be positive");
        if (!(rms_delay_spread_s > 0.0))
            throw std::invalid_argument("scenario: rms_delay_spread must be positive");
        if (!(slot_duration_s > 0.0))
            throw std::invalid_argument("scenario: slot_duration must be positive");
        if (sampling_slot_max < 1 || sampling_slot_max > group_len_slots)
            throw std::invalid_argument("scenario: sampling slot must lie within the group");
        if (!(speed_min_mps <= speed_max_mps) || speed_min_mps < 0.0)
            throw std::invalid_argument("scenario: empty speed range");
        if (t_past < 1 || f_future < 1)
            throw std::invalid_argument("scenario: T and F must be >= 1");
        if (csi_delay_slots < 0)
            throw std::invalid_argument("scenario: csi delay must be >= 0");
        if (angle_tuples_deg.empty())
            throw std::invalid_argument("scenario: angle tuple list is empty");
    }

    PathSet sample_path_set(const ScenarioConfig& cfg, int ue_index)
    {
        if (cfg.angle_tuples_deg.empty())
            throw std::invalid_argument("sample_path_set: angle tuple list is empty");
        if (ue_index < 0 || ue_index >= static_cast<int>(cfg.angle_tuples_deg.size()))
            throw std::out_of_range("sample_path_set: ue_index out of range");

        const AngleTuple& c = cfg.angle_tuples_deg[static_cast<std::size_t>(ue_index)];
        Rng rng(mix_seed(cfg.seed, kStreamPathSet, static_cast<std::uint64_t>(ue_index)));

        PathSet ps;
        ps.ricean_k = cfg.ricean_k;
        ps.carrier_lambda = cfg.lambda_m();
        ps.freq_offset = cfg.freq_offset_hz;

        const int n_nlos = cfg.n_paths - 1;
        std::vector<double> delays(static_cast<std::size_t>(n_nlos));
        for (double& d : delays)
            d = rng.exponential(cfg.rms_delay_spread_s);
        std::sort(delays.begin(), delays.end());

        auto make_path = [&](double phi_aod_deg, double theta_eod_deg, double phi_aoa_deg,
                             double theta_eoa_deg, double tau, bool los) {
            Path p;
            p.phi_aod = phi_aod_deg * kDeg;
            p.theta_eod = theta_eod_deg * kDeg;
            p.phi_aoa = phi_aoa_deg * kDeg;
            p.theta_eoa = theta_eoa_deg * kDeg;
            canonicalize_angles(p.theta_eod, p.phi_aod);
            canonicalize_angles(p.theta_eoa, p.phi_aoa);
            p.tau = tau;
            p.is_los = los;
            return p;
        };

        ps.paths.push_back(make_path(c[0], c[1], c[2], c[3], 0.0, true));
        for (int i = 0; i < n_nlos; ++i)
        {
            double s = cfg.cluster_spread_deg;
            ps.paths.push_back(make_path(c[0] + rng.normal(0.0, s), c[1] + rng.normal(0.0, s),
                                         c[2] + rng.normal(0.0, s), c[3] + rng.normal(0.0, s),
                                         delays[static_cast<std::size_t>(i)], false));
        }

        // Exponential power profile over delay, jointly normalized to unit power.
        double total = 0.0;
        for (const Path& p : ps.paths)
            total += std::exp(-p.tau / cfg.rms_delay_spread_s);
        for (Path& p : ps.paths)
            p.beta = std::sqrt(std::exp(-p.tau / cfg.rms_delay_spread_s) / total);

        return ps;
    }

    void apply_velocity(PathSet& ps, const Velocity& vel)
    {
        for (Path& p : ps.paths)
            p.doppler_w = doppler_shift(p, vel, ps.carrier_lambda);
    }

    SampleRecord generate_sample(const ScenarioConfig& cfg, const PathSet& ps, std::int64_t t0_slot,
                                 const Velocity& vel)
    {
        if (cfg.t_past < 1 || cfg.f_future < 1)
            throw std::invalid_argument("generate_sample: T and F must be >= 1");

        PathSet moving = ps;
        apply_velocity(moving, vel);

        const int T = cfg.t_past;
        const int F = cfg.f_future;
        const double dt = cfg.slot_duration_s;

        std::vector<double> times;
        times.reserve(static_cast<std::size_t>(T + F));
        for (int i = 0; i < T; ++i)
            times.push_back(static_cast<double>(t0_slot - T + i + 1) * dt);
        for (int i = 0; i < F; ++i)
            times.push_back(static_cast<double>(t0_slot + cfg.csi_delay_slots + i + 1) * dt);

        // SISO synthesis: antenna 1 of the configured array.
        ArrayGeometry siso{1, 1, cfg.geom.d_ty, cfg.geom.d_tz};
        std::vector<CxTable> tabs = channel_stack_series(times, moving, siso, cfg.grid);

        SampleRecord rec;
        rec.past = CxSeries(T, cfg.grid.n_ports_z, cfg.grid.n_ports_y);
        rec.future = CxSeries(F, cfg.grid.n_ports_z, cfg.grid.n_ports_y);
        rec.reference = CxSeries(F, cfg.grid.n_ports_z, cfg.grid.n_ports_y);

        for (int i = 0; i < T; ++i)
            std::copy(tabs[static_cast<std::size_t>(i)].a.begin(),
                      tabs[static_cast<std::size_t>(i)].a.end(), rec.past.slice(i));
        for (int i = 0; i < F; ++i)
            std::copy(tabs[static_cast<std::size_t>(T + i)].a.begin(),
                      tabs[static_cast<std::size_t>(T + i)].a.end(), rec.future.slice(i));

        // The group's sampling slot is t0: the reference is the port-(1,1) channel
        // there, replicated over the prediction horizon.
        cxd h_ref = rec.past.at(T - 1, 0, 0);
        for (int i = 0; i < F; ++i)
        {
            cxd* s = rec.reference.slice(i);
            std::fill(s, s + rec.reference.table_size(), h_ref);
        }

        rec.meta.speed_mps = vel.speed();
        rec.meta.t0_slot = static_cast<std::uint32_t>(t0_slot < 0 ? 0 : t0_slot);
        return rec;
    }

    SampleRecord generate_sample(const ScenarioConfig& cfg, const PathSet& ps, std::int64_t t0_slot,
                                 double speed)
    {
        Rng rng(mix_seed(cfg.seed, kStreamVelocity, static_cast<std::uint64_t>(t0_slot)));
        double psi = rng.uniform(0.0, kTwoPi);
        Velocity vel{{0.0, speed * std::cos(psi), speed * std::sin(psi)}};
        return generate_sample(cfg, ps, t0_slot, vel);
    }

    Dataset generate_samples(const ScenarioConfig& cfg, int n_samples)
    {
        cfg.validate();
        if (n_samples < 2)
            throw std::invalid_argument("generate_samples: need at least 2 samples");

        const int n_ue = static_cast<int>(cfg.angle_tuples_deg.size());
        std::vector<PathSet> per_ue(static_cast<std::size_t>(n_ue));
        for (int u = 0; u < n_ue; ++u)
            per_ue[static_cast<std::size_t>(u)] = sample_path_set(cfg, u);

        Dataset ds;
        ds.t_past = static_cast<std::uint32_t>(cfg.t_past);
        ds.f_future = static_cast<std::uint32_t>(cfg.f_future);
        ds.n_rows = static_cast<std::uint32_t>(cfg.grid.n_ports_z);
        ds.m_cols = static_cast<std::uint32_t>(cfg.grid.n_ports_y);
        ds.samples.resize(static_cast<std::size_t>(n_samples));

        parallel_chunks(static_cast<std::size_t>(n_samples),
                        [&](std::size_t, std::size_t, std::size_t begin, std::size_t end) {
                            for (std::size_t s = begin; s < end; ++s)
                            {
                                int ue = static_cast<int>(s) % n_ue;
                                std::uint64_t sub = mix_seed(cfg.seed, kStreamSample, s);
                                Rng rng(sub);

                                std::int64_t group = static_cast<std::int64_t>(s) / n_ue;
                                std::int64_t tz0 = 1 + static_cast<std::int64_t>(rng.uniform_int(
                                                           static_cast<std::uint64_t>(
                                                               cfg.sampling_slot_max)));
                                std::int64_t t0 = group * cfg.group_len_slots + tz0 - 1;

                                double speed = rng.uniform(cfg.speed_min_mps, cfg.speed_max_mps);
                                double psi = rng.uniform(0.0, kTwoPi);
                                Velocity vel{{0.0, speed * std::cos(psi), speed * std::sin(psi)}};

                                ds.samples[s] = generate_sample(
                                    cfg, per_ue[static_cast<std::size_t>(ue)], t0, vel);
                                ds.samples[s].meta.ue_id = static_cast<std::uint32_t>(ue);
                                ds.samples[s].meta.seed = sub;
                            }
                        });
        return ds;
    }

    std::pair<Dataset, Dataset> split_dataset(Dataset ds, double split_fraction,
                                              std::uint64_t seed)
    {
        if (!(split_fraction > 0.0) || !(split_fraction < 1.0))
            throw std::invalid_argument("split_dataset: split fraction must lie in (0, 1)");
        const int n_samples = static_cast<int>(ds.samples.size());
        if (n_samples < 2)
            throw std::invalid_argument("split_dataset: need at least 2 samples");

        std::vector<int> order(static_cast<std::size_t>(n_samples));
        std::iota(order.begin(), order.end(), 0);
        Rng rng(mix_seed(seed, kStreamSplit, 0));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(i))]);

        int n_train = static_cast<int>(std::floor(n_samples * split_fraction));
        if (n_train < 1)
            n_train = 1;
        if (n_train >= n_samples)
            n_train = n_samples - 1;

        Dataset train, test;
        train.t_past = test.t_past = ds.t_past;
        train.f_future = test.f_future = ds.f_future;
        train.n_rows = test.n_rows = ds.n_rows;
        train.m_cols = test.m_cols = ds.m_cols;
        train.samples.reserve(static_cast<std::size_t>(n_train));
        test.samples.reserve(static_cast<std::size_t>(n_samples - n_train));
        for (int i = 0; i < n_samples; ++i)
        {
            SampleRecord& rec =
                ds.samples[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            (i < n_train ? train : test).samples.push_back(std::move(rec));
        }
        return {std::move(train), std::move(test)};
    }

    std::pair<Dataset, Dataset> build_dataset(const ScenarioConfig& cfg, int n_samples,
                                              double split_fraction)
    {
        if (n_samples < 2)
            throw std::invalid_argument("build_dataset: need at least 2 samples");
        if (!(split_fraction > 0.0) || !(split_fraction < 1.0))
            throw std::invalid_argument("build_dataset: split fraction must lie in (0, 1)");
        return split_dataset(generate_samples(cfg, n_samples), split_fraction, cfg.seed);
    }

    std::pair<CxSeries, NormStats> normalize(const CxSeries& x)
    {
        if (x.a.empty())
            throw std::invalid_argument("normalize: empty tensor");

        cxd mu(0.0, 0.0);
        for (const cxd& v : x.a)
            mu += v;
        mu /= static_cast<double>(x.a.size());

        double var = 0.0;
        for (const cxd& v : x.a)
            var += std::norm(v - mu);
        var /= static_cast<double>(2 * x.a.size());

        NormStats stats;
        stats.mu = mu;
        stats.sigma = std::max(std::sqrt(var), kSigmaFloor);

        CxSeries out(x.steps, x.rows, x.cols);
        for (std::size_t i = 0; i < x.a.size(); ++i)
            out.a[i] = (x.a[i] - mu) / stats.sigma;
        return {std::move(out), stats};
    }

    CxSeries denormalize(const CxSeries& y, const NormStats& stats)
    {
        CxSeries out(y.steps, y.rows, y.cols);
        for (std::size_t i = 0; i < y.a.size(); ++i)
            out.a[i] = stats.sigma * y.a[i] + stats.mu;
        return out;
    }

} // namespace fapt
