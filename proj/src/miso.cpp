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

#include "fapt/miso.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "fapt/port_select.hpp"
#include "fapt/threading.hpp"

namespace fapt
{

    void MisoScenario::validate() const
    {
        base.validate();
        if (n_ue < 1)
            throw std::invalid_argument("miso: need at least one UE");
        if (n_ue > base.geom.n_elements())
            throw std::invalid_argument("miso: zero-forcing needs n_ue <= N_t");
        if (n_trials < 1)
            throw std::invalid_argument("miso: need at least one trial");
        if (snr_db.empty())
            throw std::invalid_argument("miso: empty SNR grid");
    }

    std::vector<std::vector<cxd>> ezf_precoder(const std::vector<std::vector<cxd>>& h_rows)
    {
        const int n_ue = static_cast<int>(h_rows.size());
        if (n_ue == 0)
            throw std::invalid_argument("ezf_precoder: no users");
        const int n_t = static_cast<int>(h_rows.front().size());
        if (n_ue > n_t)
            throw std::invalid_argument("ezf_precoder: more users than antennas");

        // Rows of H are h_u^H so that H W = I gives h_u^H w_v = delta_uv under
        // the conjugated pairing used in the SINR.
        Eigen::MatrixXcd H(n_ue, n_t);
        for (int u = 0; u < n_ue; ++u)
        {
            if (static_cast<int>(h_rows[static_cast<std::size_t>(u)].size()) != n_t)
                throw std::invalid_argument("ezf_precoder: ragged channel rows");
            for (int k = 0; k < n_t; ++k)
                H(u, k) =
                    std::conj(h_rows[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)]);
        }

        Eigen::MatrixXcd G = H * H.adjoint();
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(G);
        if (!lu.isInvertible())
            throw std::domain_error("ezf_precoder: rank-deficient channel matrix");
        Eigen::MatrixXcd W = H.adjoint() * lu.inverse(); // N_t x N_UE

        const double power = 1.0 / std::sqrt(static_cast<double>(n_ue));
        std::vector<std::vector<cxd>> w(static_cast<std::size_t>(n_ue),
                                        std::vector<cxd>(static_cast<std::size_t>(n_t)));
        for (int u = 0; u < n_ue; ++u)
        {
            double nrm = W.col(u).norm();
            if (!(nrm > 0.0))
                throw std::domain_error("ezf_precoder: null beamforming column");
            for (int k = 0; k < n_t; ++k)
                w[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)] =
                    W(k, u) / nrm * power;
        }
        return w;
    }

    std::pair<std::vector<double>, double> sinr_and_se(
        const std::vector<std::vector<cxd>>& h_true, const std::vector<std::vector<cxd>>& w,
        double snr_db)
    {
        const std::size_t n_ue = h_true.size();
        if (w.size() != n_ue)
            throw std::invalid_argument("sinr_and_se: precoder/user count mismatch");
        const double rho = std::pow(10.0, snr_db / 10.0);

        std::vector<double> sinr(n_ue, 0.0);
        double se = 0.0;
        for (std::size_t u = 0; u < n_ue; ++u)
        {
            double sig = 0.0, intf = 0.0;
            for (std::size_t v = 0; v < n_ue; ++v)
            {
                cxd gain(0.0, 0.0);
                for (std::size_t k = 0; k < h_true[u].size(); ++k)
                    gain += std::conj(h_true[u][k]) * w[v][k];
                if (v == u)
                    sig = std::norm(gain);
                else
                    intf += std::norm(gain);
            }
            sinr[u] = rho * sig / (rho * intf + 1.0);
            se += std::log2(1.0 + sinr[u]);
        }
        return {sinr, se};
    }

    namespace
    {
        // Channel realizations for one (trial, ue): per-antenna past/future
        // tables plus the reference scalar per antenna.
        struct UeChannels
        {
            std::vector<CxSeries> past;   // N_t series of T x N x M
            std::vector<CxSeries> future; // N_t series of F x N x M
            std::vector<cxd> h_ref;       // per antenna, port (1,1) at t0
        };

        UeChannels synthesize_ue(const ScenarioConfig& cfg, double speed_mps, std::uint64_t seed,
                                 std::uint64_t trial, int ue)
        {
            ScenarioConfig c = cfg;
            c.seed = mix_seed(seed, 0xb37cull, trial * 1000 + static_cast<std::uint64_t>(ue));
            PathSet ps = sample_path_set(c, ue % static_cast<int>(c.angle_tuples_deg.size()));

            Rng rng(mix_seed(c.seed, 0x76656cull, 1));
            double psi = rng.uniform(0.0, kTwoPi);
            Velocity vel{{0.0, speed_mps * std::cos(psi), speed_mps * std::sin(psi)}};
            apply_velocity(ps, vel);

            const int T = cfg.t_past, F = cfg.f_future;
            const std::int64_t t0 = cfg.sampling_slot_max;
            std::vector<double> times;
            for (int i = 0; i < T; ++i)
                times.push_back(static_cast<double>(t0 - T + i + 1) * cfg.slot_duration_s);
            for (int i = 0; i < F; ++i)
                times.push_back(static_cast<double>(t0 + cfg.csi_delay_slots + i + 1) *
                                cfg.slot_duration_s);

            auto tabs = channel_stack_series(times, ps, cfg.geom, cfg.grid);
            const int n_t = cfg.geom.n_elements();

            UeChannels out;
            out.past.assign(static_cast<std::size_t>(n_t),
                            CxSeries(T, cfg.grid.n_ports_z, cfg.grid.n_ports_y));
            out.future.assign(static_cast<std::size_t>(n_t),
                              CxSeries(F, cfg.grid.n_ports_z, cfg.grid.n_ports_y));
            out.h_ref.resize(static_cast<std::size_t>(n_t));
            for (int i = 0; i < T; ++i)
                for (int k = 0; k < n_t; ++k)
                    std::copy(tabs[static_cast<std::size_t>(i * n_t + k)].a.begin(),
                              tabs[static_cast<std::size_t>(i * n_t + k)].a.end(),
                              out.past[static_cast<std::size_t>(k)].slice(i));
            for (int i = 0; i < F; ++i)
                for (int k = 0; k < n_t; ++k)
                    std::copy(tabs[static_cast<std::size_t>((T + i) * n_t + k)].a.begin(),
                              tabs[static_cast<std::size_t>((T + i) * n_t + k)].a.end(),
                              out.future[static_cast<std::size_t>(k)].slice(i));
            for (int k = 0; k < n_t; ++k)
                out.h_ref[static_cast<std::size_t>(k)] =
                    out.past[static_cast<std::size_t>(k)].at(T - 1, 0, 0);
            return out;
        }

        // Ports selected per horizon step from per-antenna predicted tables.
        std::vector<PortIndex> select_ports(const std::vector<CxSeries>& pred,
                                            const std::vector<cxd>& h_ref, const PortGrid& grid,
                                            int F)
        {
            std::vector<PortIndex> ports;
            ports.reserve(static_cast<std::size_t>(F));
            for (int i = 0; i < F; ++i)
            {
                std::vector<CxTable> pred_stack, ref_stack;
                for (std::size_t k = 0; k < pred.size(); ++k)
                {
                    pred_stack.push_back(pred[k].table(i));
                    ref_stack.push_back(reference_table(h_ref[k], grid));
                }
                ports.push_back(select_port_miso(pred_stack, ref_stack));
            }
            return ports;
        }
    } // namespace

    SEReport run_benchmark(const MisoScenario& scenario, const PredictorFactory& predictors)
    {
        scenario.validate();
        const int F = scenario.base.f_future;
        const int n_t = scenario.base.geom.n_elements();

        std::vector<std::string> conditions{"stationary"};
        {
            auto probe = predictors();
            for (const auto& p : probe)
                conditions.push_back(p->name());
        }
        conditions.push_back("no-prediction");

        const std::size_t n_cond = conditions.size();
        const std::size_t n_snr = scenario.snr_db.size();
        // per trial x condition x snr
        std::vector<double> se(static_cast<std::size_t>(scenario.n_trials) * n_cond * n_snr, 0.0);

        std::vector<std::vector<std::unique_ptr<Predictor>>> worker_preds(pool_size());

        parallel_chunks(static_cast<std::size_t>(scenario.n_trials), [&](std::size_t tid,
                                                                         std::size_t,
                                                                         std::size_t begin,
                                                                         std::size_t end) {
            if (worker_preds[tid].empty())
                worker_preds[tid] = predictors();
            auto& preds = worker_preds[tid];

            for (std::size_t trial = begin; trial < end; ++trial)
            {
                std::vector<UeChannels> ues;
                ues.reserve(static_cast<std::size_t>(scenario.n_ue));
                for (int u = 0; u < scenario.n_ue; ++u)
                    ues.push_back(synthesize_ue(scenario.base, scenario.speed_mps, scenario.seed,
                                                trial, u));

                // Predictions and port tracks per UE per predictor.
                std::vector<std::vector<std::vector<CxSeries>>> pred_tables(
                    preds.size()); // [pred][ue][ant]
                std::vector<std::vector<std::vector<PortIndex>>> pred_ports(preds.size());
                for (std::size_t p = 0; p < preds.size(); ++p)
                {
                    pred_tables[p].resize(static_cast<std::size_t>(scenario.n_ue));
                    pred_ports[p].resize(static_cast<std::size_t>(scenario.n_ue));
                    for (int u = 0; u < scenario.n_ue; ++u)
                    {
                        auto& per_ant = pred_tables[p][static_cast<std::size_t>(u)];
                        per_ant.reserve(static_cast<std::size_t>(n_t));
                        for (int k = 0; k < n_t; ++k)
                            per_ant.push_back(preds[p]->predict(
                                ues[static_cast<std::size_t>(u)].past[static_cast<std::size_t>(k)],
                                F));
                        pred_ports[p][static_cast<std::size_t>(u)] =
                            select_ports(per_ant, ues[static_cast<std::size_t>(u)].h_ref,
                                         scenario.base.grid, F);
                    }
                }

                for (std::size_t ci = 0; ci < n_cond; ++ci)
                {
                    std::vector<double> se_steps(n_snr, 0.0);
                    for (int i = 0; i < F; ++i)
                    {
                        std::vector<std::vector<cxd>> est(static_cast<std::size_t>(scenario.n_ue)),
                            tru(static_cast<std::size_t>(scenario.n_ue));
                        for (int u = 0; u < scenario.n_ue; ++u)
                        {
                            const UeChannels& ch = ues[static_cast<std::size_t>(u)];
                            std::vector<cxd>& e = est[static_cast<std::size_t>(u)];
                            std::vector<cxd>& t = tru[static_cast<std::size_t>(u)];
                            e.resize(static_cast<std::size_t>(n_t));
                            t.resize(static_cast<std::size_t>(n_t));

                            if (conditions[ci] == "stationary")
                            {
                                for (int k = 0; k < n_t; ++k)
                                {
                                    cxd h = ch.future[static_cast<std::size_t>(k)].at(i, 0, 0);
                                    e[static_cast<std::size_t>(k)] = h;
                                    t[static_cast<std::size_t>(k)] = h;
                                }
                            }
                            else if (conditions[ci] == "no-prediction")
                            {
                                for (int k = 0; k < n_t; ++k)
                                {
                                    e[static_cast<std::size_t>(k)] =
                                        ch.h_ref[static_cast<std::size_t>(k)];
                                    t[static_cast<std::size_t>(k)] =
                                        ch.future[static_cast<std::size_t>(k)].at(i, 0, 0);
                                }
                            }
                            else
                            {
                                std::size_t p = ci - 1; // predictor index
                                const PortIndex& port =
                                    pred_ports[p][static_cast<std::size_t>(u)]
                                              [static_cast<std::size_t>(i)];
                                for (int k = 0; k < n_t; ++k)
                                {
                                    e[static_cast<std::size_t>(k)] =
                                        pred_tables[p][static_cast<std::size_t>(u)]
                                                   [static_cast<std::size_t>(k)]
                                                       .at(i, port.n - 1, port.m - 1);
                                    t[static_cast<std::size_t>(k)] =
                                        ch.future[static_cast<std::size_t>(k)].at(i, port.n - 1,
                                                                                  port.m - 1);
                                }
                            }
                        }

                        auto w = ezf_precoder(est);
                        for (std::size_t si = 0; si < n_snr; ++si)
                            se_steps[si] += sinr_and_se(tru, w, scenario.snr_db[si]).second;
                    }
                    for (std::size_t si = 0; si < n_snr; ++si)
                        se[(trial * n_cond + ci) * n_snr + si] =
                            se_steps[si] / static_cast<double>(F);
                }
            }
        });

        SEReport report;
        for (std::size_t ci = 0; ci < n_cond; ++ci)
            for (std::size_t si = 0; si < n_snr; ++si)
            {
                double mean = 0.0;
                for (int trial = 0; trial < scenario.n_trials; ++trial)
                    mean += se[(static_cast<std::size_t>(trial) * n_cond + ci) * n_snr + si];
                mean /= static_cast<double>(scenario.n_trials);
                double var = 0.0;
                for (int trial = 0; trial < scenario.n_trials; ++trial)
                {
                    double d =
                        se[(static_cast<std::size_t>(trial) * n_cond + ci) * n_snr + si] - mean;
                    var += d * d;
                }
                var /= std::max(1.0, static_cast<double>(scenario.n_trials - 1));

                SERow row;
                row.snr_db = scenario.snr_db[si];
                row.condition = conditions[ci];
                row.se_bps_hz = mean;
                row.n_trials = scenario.n_trials;
                row.std_err = std::sqrt(var / scenario.n_trials);
                report.rows.push_back(row);
            }
        return report;
    }

    std::vector<HorizonRow> nmse_horizon_bench(const MisoScenario& scenario,
                                               const PredictorFactory& predictors)
    {
        scenario.validate();
        const int F = scenario.base.f_future;
        const int n_t = scenario.base.geom.n_elements();

        std::vector<std::string> names;
        {
            auto probe = predictors();
            for (const auto& p : probe)
                names.push_back(p->name());
        }
        const std::size_t n_pred = names.size();

        // ratio sums per (trial, predictor, step)
        std::vector<double> ratio(static_cast<std::size_t>(scenario.n_trials) * n_pred *
                                      static_cast<std::size_t>(F),
                                  0.0);

        std::vector<std::vector<std::unique_ptr<Predictor>>> worker_preds(pool_size());

        parallel_chunks(static_cast<std::size_t>(scenario.n_trials), [&](std::size_t tid,
                                                                         std::size_t,
                                                                         std::size_t begin,
                                                                         std::size_t end) {
            if (worker_preds[tid].empty())
                worker_preds[tid] = predictors();
            auto& preds = worker_preds[tid];

            for (std::size_t trial = begin; trial < end; ++trial)
            {
                for (int u = 0; u < scenario.n_ue; ++u)
                {
                    UeChannels ch = synthesize_ue(scenario.base, scenario.speed_mps, scenario.seed,
                                                  trial, u);
                    for (std::size_t p = 0; p < preds.size(); ++p)
                    {
                        std::vector<CxSeries> per_ant;
                        per_ant.reserve(static_cast<std::size_t>(n_t));
                        for (int k = 0; k < n_t; ++k)
                            per_ant.push_back(
                                preds[p]->predict(ch.past[static_cast<std::size_t>(k)], F));
                        auto ports = select_ports(per_ant, ch.h_ref, scenario.base.grid, F);

                        for (int i = 0; i < F; ++i)
                        {
                            double num = 0.0, den = 0.0;
                            for (int k = 0; k < n_t; ++k)
                            {
                                cxd h = ch.future[static_cast<std::size_t>(k)].at(
                                    i, ports[static_cast<std::size_t>(i)].n - 1,
                                    ports[static_cast<std::size_t>(i)].m - 1);
                                cxd r = ch.h_ref[static_cast<std::size_t>(k)];
                                num += std::norm(h - r);
                                den += std::norm(r);
                            }
                            ratio[(trial * n_pred + p) * static_cast<std::size_t>(F) +
                                  static_cast<std::size_t>(i)] +=
                                den > 0.0 ? num / den : 0.0;
                        }
                    }
                }
            }
        });

        std::vector<HorizonRow> rows;
        for (std::size_t p = 0; p < n_pred; ++p)
            for (int i = 0; i < F; ++i)
            {
                double mean = 0.0;
                for (int trial = 0; trial < scenario.n_trials; ++trial)
                    mean += ratio[(static_cast<std::size_t>(trial) * n_pred + p) *
                                      static_cast<std::size_t>(F) +
                                  static_cast<std::size_t>(i)];
                mean /= static_cast<double>(scenario.n_trials) * scenario.n_ue;

                HorizonRow row;
                row.predictor = names[p];
                row.speed_kmh = scenario.speed_mps * 3.6;
                row.bs_config = std::to_string(scenario.base.geom.n_y) + "x" +
                                std::to_string(scenario.base.geom.n_z);
                row.step = i + 1;
                row.nmse_db = mean > 0.0 ? 10.0 * std::log10(mean)
                                         : -std::numeric_limits<double>::infinity();
                rows.push_back(row);
            }
        return rows;
    }

} // namespace fapt
